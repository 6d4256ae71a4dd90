#include "hypergrowth/core.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypergrowth/format.hpp"

namespace hypergrowth {

namespace {

std::string year_str(double t) { return format_double(t); }

// "million persons" -> "1/(million persons)"; applied twice it unwraps, so
// the transform stays an involution on units as well as values.
std::string reciprocal_unit(const std::string& unit) {
    if (unit.size() > 4 && unit.compare(0, 3, "1/(") == 0 && unit.back() == ')') {
        return unit.substr(3, unit.size() - 4);
    }
    return "1/(" + unit + ")";
}

}  // namespace

void TimeSeries::validate_ordering() const {
    for (std::size_t i = 1; i < points.size(); ++i) {
        if (!(points[i - 1].t < points[i].t)) {
            throw Error("series '" + label + "': years not strictly increasing at year " +
                        year_str(points[i].t));
        }
    }
}

void TimeSeries::validate_positive() const {
    for (const auto& p : points) {
        if (!(p.v > 0.0)) {
            throw Error("series '" + label + "': non-positive value at year " + year_str(p.t));
        }
    }
}

TimeSeries reciprocal(const TimeSeries& series) {
    series.validate_ordering();
    series.validate_positive();
    TimeSeries out;
    out.label = series.label;
    out.unit = reciprocal_unit(series.unit);
    out.points.reserve(series.points.size());
    for (const auto& p : series.points) {
        out.points.push_back({p.t, 1.0 / p.v});
    }
    return out;
}

namespace detail {

OlsLine ols_line(std::span<const double> t, std::span<const double> y) {
    const std::size_t n = t.size();
    if (n < 2) {
        throw Error("insufficient data: ordinary least squares needs at least 2 points, got " +
                    std::to_string(n));
    }
    double t_mean = 0.0, y_mean = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        t_mean += t[i];
        y_mean += y[i];
    }
    t_mean /= static_cast<double>(n);
    y_mean /= static_cast<double>(n);

    // Centered sums; years near 2000 would otherwise cancel catastrophically.
    double stt = 0.0, sty = 0.0, syy = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
        const double dt = t[i] - t_mean;
        const double dy = y[i] - y_mean;
        stt += dt * dt;
        sty += dt * dy;
        syy += dy * dy;
    }
    if (!(stt > 0.0)) {
        throw Error("degenerate design: all years identical");
    }
    OlsLine out;
    out.slope = sty / stt;
    out.intercept = y_mean - out.slope * t_mean;
    out.tss = syy;
    return out;
}

}  // namespace detail

LinearFit fit_line(const TimeSeries& series, std::optional<double> exclude_after) {
    series.validate_ordering();

    std::vector<double> t_in, y_in;
    LinearFit fit;
    t_in.reserve(series.points.size());
    y_in.reserve(series.points.size());
    for (const auto& p : series.points) {
        if (exclude_after && p.t > *exclude_after) {
            fit.excluded.push_back(p.t);
        } else {
            t_in.push_back(p.t);
            y_in.push_back(p.v);
        }
    }
    if (t_in.size() < 2) {
        throw Error("insufficient data: " + std::to_string(t_in.size()) +
                    " point(s) left after exclusion, need at least 2");
    }

    const auto ols = detail::ols_line(t_in, y_in);
    fit.a = ols.intercept;
    fit.k = -ols.slope;
    fit.n = t_in.size();

    fit.rss = 0.0;
    fit.residuals.reserve(series.points.size());
    for (const auto& p : series.points) {
        const double r = p.v - fit.fitted(p.t);
        fit.residuals.push_back({p.t, r});
        if (!exclude_after || p.t <= *exclude_after) {
            fit.rss += r * r;
        }
    }

    if (ols.tss > 0.0) {
        fit.r2 = std::clamp(1.0 - fit.rss / ols.tss, 0.0, 1.0);
    } else {
        fit.r2 = 0.0;
        fit.degenerate_r2 = true;
    }
    return fit;
}

HyperbolicModel hyperbola_from_line(const LinearFit& fit) {
    if (!(fit.a > 0.0)) {
        throw Error("hyperbola requires a positive intercept, got a = " + year_str(fit.a));
    }
    return HyperbolicModel{fit.a, fit.k, 1.0};
}

double eval_hyperbola(const HyperbolicModel& model, double t) {
    const double u = model.a - model.k * t;
    if (!(u > 0.0)) {
        if (auto ts = model.singularity_time()) {
            throw Error("year " + year_str(t) + " is at or beyond the singularity time t_s = " +
                        year_str(*ts));
        }
        throw Error("year " + year_str(t) + " is outside the model's positive domain");
    }
    return model.q == 1.0 ? 1.0 / u : std::pow(u, -model.q);
}

HyperbolaFit fit_hyperbola(const TimeSeries& series, std::optional<double> exclude_after) {
    LinearFit line = fit_line(reciprocal(series), exclude_after);
    HyperbolicModel model = hyperbola_from_line(line);
    return HyperbolaFit{model, std::move(line)};
}

GeneralHyperbolaFit fit_general_hyperbola(const TimeSeries& series,
                                          const std::vector<double>& q_grid,
                                          std::optional<double> exclude_after) {
    if (q_grid.empty()) {
        throw Error("exponent grid must not be empty");
    }
    for (double q : q_grid) {
        if (!(q > 0.0)) {
            throw Error("exponent grid entries must be positive, got " + year_str(q));
        }
    }
    const TimeSeries recip = reciprocal(series);

    GeneralHyperbolaFit out;
    std::vector<LinearFit> fits;
    fits.reserve(q_grid.size());
    for (double q : q_grid) {
        // Linearize: (1/v)^(1/q) = a - k*t. q == 1 keeps the exact reciprocal.
        TimeSeries lin = recip;
        if (q != 1.0) {
            const double inv_q = 1.0 / q;
            for (auto& p : lin.points) p.v = std::pow(p.v, inv_q);
        }
        LinearFit fit = fit_line(lin, exclude_after);

        ExponentScore score;
        score.q = q;
        score.a = fit.a;
        score.k = fit.k;
        score.rss_linearized = fit.rss;
        score.rss_value = 0.0;
        for (const auto& p : series.points) {
            if (exclude_after && p.t > *exclude_after) continue;
            const double u = fit.fitted(p.t);
            if (!(u > 0.0)) {
                score.valid = false;
                score.rss_value = std::numeric_limits<double>::infinity();
                break;
            }
            const double dv = (q == 1.0 ? 1.0 / u : std::pow(u, -q)) - p.v;
            score.rss_value += dv * dv;
        }
        out.scores.push_back(score);
        fits.push_back(std::move(fit));
    }

    std::size_t best = q_grid.size();
    for (std::size_t i = 0; i < out.scores.size(); ++i) {
        if (!out.scores[i].valid) continue;
        if (best == q_grid.size() || out.scores[i].rss_value < out.scores[best].rss_value) {
            best = i;
        }
    }
    if (best == q_grid.size()) {
        throw Error("no admissible exponent: every candidate line goes non-positive "
                    "over the data range");
    }
    out.model = HyperbolicModel{out.scores[best].a, out.scores[best].k, out.scores[best].q};
    out.line = std::move(fits[best]);
    return out;
}

RatioTrajectory ratio_trajectory(const HyperbolicModel& gdp, const HyperbolicModel& pop,
                                 const std::vector<double>& grid) {
    RatioTrajectory out;
    out.numerator = gdp;
    out.denominator = pop;
    out.grid = grid;
    out.values.reserve(grid.size());
    const auto check_domain = [](const HyperbolicModel& m, double t, const char* role) {
        if (m.a - m.k * t > 0.0) return;
        if (auto ts = m.singularity_time()) {
            throw Error("grid year " + year_str(t) + " is at or beyond the " + role +
                        "'s singularity time t_s = " + year_str(*ts));
        }
        throw Error("grid year " + year_str(t) + " is outside the " + role +
                    "'s positive domain");
    };
    for (double t : grid) {
        check_domain(gdp, t, "numerator");
        check_domain(pop, t, "denominator");
        out.values.push_back(eval_hyperbola(gdp, t) / eval_hyperbola(pop, t));
    }
    return out;
}

}  // namespace hypergrowth
