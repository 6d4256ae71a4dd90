#pragma once

#include <optional>
#include <span>
#include <vector>

#include "hypergrowth/timeseries.hpp"

namespace hypergrowth {

/// Straight line y(t) = a - k*t fitted by ordinary least squares, with
/// residual diagnostics. The usual home of such a fit is reciprocal space:
/// a growing series 1/(a - k*t) has exactly this line as its reciprocal.
struct LinearFit {
    double a = 0.0;    // intercept
    double k = 0.0;    // decline rate per year; fitted line is a - k*t
    double rss = 0.0;  // residual sum of squares over included points
    double r2 = 0.0;   // coefficient of determination; 0 when degenerate
    std::size_t n = 0; // number of points used in the estimation
    bool degenerate_r2 = false;  // total sum of squares was zero (constant y)
    std::vector<Observation> residuals;  // (t, observed - fitted), every input point
    std::vector<double> excluded;        // years past exclude_after, not estimated over

    double fitted(double t) const { return a - k * t; }
};

/// S(t) = (a - k*t)^(-q), q > 0. The q = 1 case is the first-order hyperbola
/// whose reciprocal is exactly the line a - k*t; it diverges at t_s = a/k.
struct HyperbolicModel {
    double a = 0.0;
    double k = 0.0;
    double q = 1.0;

    /// Singularity year a/k, or empty when k <= 0 (no finite-time divergence).
    std::optional<double> singularity_time() const {
        if (k > 0.0) return a / k;
        return std::nullopt;
    }
};

struct HyperbolaFit {
    HyperbolicModel model;
    LinearFit line;  // diagnostics of the underlying reciprocal-space line fit
};

/// One grid entry of the exponent search: the line fit of (1/v)^(1/q) and the
/// resulting residual sum of squares measured back in original value space.
struct ExponentScore {
    double q = 1.0;
    double a = 0.0;
    double k = 0.0;
    double rss_linearized = 0.0;  // RSS of the line fit in (1/v)^(1/q) space
    double rss_value = 0.0;       // RSS of (a - k*t)^(-q) against v; selection metric
    bool valid = true;            // line stays positive over the included years
};

struct GeneralHyperbolaFit {
    HyperbolicModel model;  // the exponent with the smallest value-space RSS
    LinearFit line;         // line fit in the selected exponent's linearized space
    std::vector<ExponentScore> scores;  // one entry per grid exponent, grid order
};

/// GDP-per-capita style trajectory: pointwise ratio of two hyperbolic models
/// evaluated on a common year grid.
struct RatioTrajectory {
    HyperbolicModel numerator;    // GDP
    HyperbolicModel denominator;  // population
    std::vector<double> grid;
    std::vector<double> values;
};

/// Maps each value v to 1/v; the unit tag is wrapped as "1/(unit)" (or
/// unwrapped, so the transform is an involution). Rejects values <= 0.
TimeSeries reciprocal(const TimeSeries& series);

/// Ordinary least squares for y = a - k*t using centered two-pass sums.
/// Points with t > exclude_after are listed in `excluded` and still receive
/// residuals against the fitted line, but do not enter the estimation.
LinearFit fit_line(const TimeSeries& series, std::optional<double> exclude_after = {});

/// Reads a q = 1 hyperbola off a reciprocal-space line fit. Requires a > 0.
HyperbolicModel hyperbola_from_line(const LinearFit& fit);

/// (a - k*t)^(-q); rejects years at or beyond the singularity.
double eval_hyperbola(const HyperbolicModel& model, double t);

/// reciprocal -> fit_line -> hyperbola_from_line, keeping the line diagnostics.
HyperbolaFit fit_hyperbola(const TimeSeries& series, std::optional<double> exclude_after = {});

/// Grid search over exponents q: linearize via (1/v)^(1/q) = a - k*t, fit by
/// OLS, and score every candidate by RSS in original value space so scores
/// are commensurable across q. Returns the minimizer plus all scores.
GeneralHyperbolaFit fit_general_hyperbola(const TimeSeries& series,
                                          const std::vector<double>& q_grid,
                                          std::optional<double> exclude_after = {});

/// values[i] = gdp(t_i) / pop(t_i). Every grid year must lie strictly below
/// both singularity times.
RatioTrajectory ratio_trajectory(const HyperbolicModel& gdp, const HyperbolicModel& pop,
                                 const std::vector<double>& grid);

namespace detail {

struct OlsLine {
    double intercept = 0.0;
    double slope = 0.0;
    double tss = 0.0;  // total sum of squares of y about its mean
};

/// Centered (two-pass) least squares; rejects designs with no year variation.
OlsLine ols_line(std::span<const double> t, std::span<const double> y);

}  // namespace detail

}  // namespace hypergrowth
