#pragma once

#include <cstddef>
#include <optional>
#include <string>
#include <vector>

#include "hypergrowth/core.hpp"
#include "hypergrowth/timeseries.hpp"

namespace hypergrowth {

enum class Direction { Decreasing, Increasing };

struct MonotonicityViolation {
    double t_prev, t_next;
    double v_prev, v_next;
};

/// Checks that adjacent values move in the expected direction, with a
/// relative slack so measurement wiggle does not count as a regime change.
struct MonotonicityReport {
    Direction direction = Direction::Decreasing;
    double tolerance = 0.0;  // relative slack, applied against |v_prev|
    std::vector<MonotonicityViolation> violations;

    bool monotone() const { return violations.empty(); }
};

MonotonicityReport monotonicity_report(const TimeSeries& series, Direction direction,
                                       double rel_tolerance);

/// Per-point deviation record against a fitted line. `above_line` means the
/// observed reciprocal exceeds the fit, i.e. growth fell below the hyperbola.
struct DeviationFlag {
    double t = 0.0;
    double residual = 0.0;  // observed - fitted
    double z = 0.0;         // residual / residual-scale estimate
    bool flagged = false;   // |z| > threshold
    bool above_line = false;
    bool excluded = false;  // scored out-of-sample (not part of the estimation)
};

/// Residual scale is sqrt(rss / (n - 2)) over included points; excluded
/// points are scored against that same scale. Needs n > 2 included points.
std::vector<DeviationFlag> flag_deviations(const TimeSeries& series, const LinearFit& fit,
                                           double z_threshold);

struct SegmentFit {
    double t_start = 0.0;  // first year of the segment
    double t_end = 0.0;    // last year of the segment
    LinearFit fit;
};

/// One piecewise-linear candidate: contiguous runs of points, each fitted
/// independently by OLS. `boundaries` holds the last year of every segment
/// except the final one (the boundary point belongs to the left segment).
struct Segmentation {
    std::vector<double> boundaries;
    std::vector<SegmentFit> segments;
    double rss = 0.0;   // sum of per-segment residual sums of squares
    int params = 0;     // 3 * segments - 1: (a, k) per segment + each breakpoint
    double bic = 0.0;   // n * ln(rss / n) + params * ln(n)
};

struct ChowResult {
    double break_year = 0.0;
    double f = 0.0;
    double p_value = 1.0;
    int dof1 = 0;  // numerator degrees of freedom (restrictions)
    int dof2 = 0;  // denominator degrees of freedom
};

enum class Verdict { OneStage, MultiStage };

struct BreakReport {
    std::size_t n = 0;
    std::vector<double> candidate_breaks;  // break years that were evaluated
    std::optional<ChowResult> chow;
    std::vector<Segmentation> segmentations;
    std::size_t best = 0;  // index of the minimum-BIC segmentation
    Verdict verdict = Verdict::OneStage;
    std::vector<double> breakpoints;  // boundaries of the best segmentation
};

/// Chow structural-break F test at a fixed year, on a reciprocal-space
/// series. Splits at t <= break_year / t > break_year; needs at least three
/// points strictly on each side. The report also carries the one-segment and
/// two-segment fits so it can be scored and summarized like a scan.
BreakReport chow_test(const TimeSeries& reciprocal_series, double break_year);

/// Exhaustive BIC-scored segmentation search with breakpoints at observed
/// years. max_segments must be 1, 2 or 3; min_segment_points at least 3.
/// Ties break toward fewer segments, then the earlier first breakpoint.
BreakReport scan_breakpoints(const TimeSeries& reciprocal_series, int max_segments,
                             int min_segment_points);

struct VerdictSummary {
    Verdict verdict = Verdict::OneStage;
    std::vector<double> breakpoints;
    std::string text;
};

/// Human-readable adjudication: best segmentation, delta-BIC to the
/// runner-up, and Chow results when present.
VerdictSummary regime_verdict(const BreakReport& report);

}  // namespace hypergrowth
