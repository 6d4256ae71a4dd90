#include "hypergrowth/regimes.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "hypergrowth/format.hpp"
#include "hypergrowth/stats.hpp"

namespace hypergrowth {

namespace {

std::string num_str(double v) { return format_double(v); }

// Relative floor applied to residual sums of squares and residual scales.
// An exact fit leaves roundoff of order 1e-16 per value; scoring that
// against literal zero would turn noise into break evidence. Anything this
// far below the value scale is treated as a perfect fit.
constexpr double kResidualFloorRel = 1e-12;

double rms_value(const TimeSeries& series) {
    double s = 0.0;
    for (const auto& p : series.points) s += p.v * p.v;
    return std::sqrt(s / static_cast<double>(series.points.size()));
}

double rss_floor(const TimeSeries& series) {
    const double unit = kResidualFloorRel * rms_value(series);
    return static_cast<double>(series.points.size()) * unit * unit;
}

double bic_score(std::size_t n, double rss, int params, double floor) {
    const double r = std::max(rss, floor);
    const double dn = static_cast<double>(n);
    return dn * std::log(r / dn) + params * std::log(dn);
}

TimeSeries slice(const TimeSeries& series, std::size_t first, std::size_t count) {
    TimeSeries out;
    out.unit = series.unit;
    out.label = series.label;
    out.points.assign(series.points.begin() + static_cast<std::ptrdiff_t>(first),
                      series.points.begin() + static_cast<std::ptrdiff_t>(first + count));
    return out;
}

// Fits each contiguous run independently and scores the whole segmentation.
Segmentation make_segmentation(const TimeSeries& series, const std::vector<std::size_t>& splits,
                               double floor) {
    Segmentation seg;
    const std::size_t n = series.points.size();
    std::size_t begin = 0;
    for (std::size_t s = 0; s <= splits.size(); ++s) {
        const std::size_t end = s < splits.size() ? splits[s] : n;
        SegmentFit part;
        part.t_start = series.points[begin].t;
        part.t_end = series.points[end - 1].t;
        part.fit = fit_line(slice(series, begin, end - begin));
        seg.rss += part.fit.rss;
        seg.segments.push_back(std::move(part));
        if (s < splits.size()) {
            // The boundary point belongs to the left segment.
            seg.boundaries.push_back(series.points[end - 1].t);
        }
        begin = end;
    }
    seg.params = 3 * static_cast<int>(seg.segments.size()) - 1;
    seg.bic = bic_score(n, seg.rss, seg.params, floor);
    return seg;
}

bool better_segmentation(const Segmentation& a, const Segmentation& b) {
    if (a.bic != b.bic) return a.bic < b.bic;
    if (a.segments.size() != b.segments.size()) return a.segments.size() < b.segments.size();
    return a.boundaries < b.boundaries;  // earlier first breakpoint wins
}

void finalize_best(BreakReport& report) {
    report.best = 0;
    for (std::size_t i = 1; i < report.segmentations.size(); ++i) {
        if (better_segmentation(report.segmentations[i], report.segmentations[report.best])) {
            report.best = i;
        }
    }
    const Segmentation& best = report.segmentations[report.best];
    report.verdict = best.segments.size() == 1 ? Verdict::OneStage : Verdict::MultiStage;
    report.breakpoints = best.boundaries;
}

}  // namespace

MonotonicityReport monotonicity_report(const TimeSeries& series, Direction direction,
                                       double rel_tolerance) {
    series.validate_ordering();
    if (series.points.size() < 2) {
        throw Error("monotonicity check needs at least 2 points, got " +
                    std::to_string(series.points.size()));
    }
    MonotonicityReport report;
    report.direction = direction;
    report.tolerance = rel_tolerance;
    for (std::size_t i = 0; i + 1 < series.points.size(); ++i) {
        const auto& prev = series.points[i];
        const auto& next = series.points[i + 1];
        const double slack = rel_tolerance * std::fabs(prev.v);
        const bool violated = direction == Direction::Decreasing
                                  ? next.v > prev.v + slack
                                  : next.v < prev.v - slack;
        if (violated) {
            report.violations.push_back({prev.t, next.t, prev.v, next.v});
        }
    }
    return report;
}

std::vector<DeviationFlag> flag_deviations(const TimeSeries& series, const LinearFit& fit,
                                           double z_threshold) {
    series.validate_ordering();
    if (fit.n + fit.excluded.size() != series.points.size()) {
        throw Error("fit does not match the series: " + std::to_string(fit.n) + " included + " +
                    std::to_string(fit.excluded.size()) + " excluded points vs " +
                    std::to_string(series.points.size()) + " observations");
    }
    if (fit.n <= 2) {
        throw Error("residual scale undefined: need more than 2 included points, got " +
                    std::to_string(fit.n));
    }
    const double scale = std::sqrt(fit.rss / static_cast<double>(fit.n - 2));
    // Same reasoning as the RSS floor: an exactly-fitting line must not flag
    // its own roundoff.
    const double scale_eff = std::max(scale, kResidualFloorRel * rms_value(series));

    std::vector<DeviationFlag> flags;
    flags.reserve(series.points.size());
    for (const auto& p : series.points) {
        DeviationFlag flag;
        flag.t = p.t;
        flag.residual = p.v - fit.fitted(p.t);
        flag.z = flag.residual / scale_eff;
        flag.flagged = std::fabs(flag.z) > z_threshold;
        flag.above_line = flag.residual > 0.0;
        flag.excluded =
            std::find(fit.excluded.begin(), fit.excluded.end(), p.t) != fit.excluded.end();
        flags.push_back(flag);
    }
    return flags;
}

BreakReport chow_test(const TimeSeries& reciprocal_series, double break_year) {
    reciprocal_series.validate_ordering();
    const auto& pts = reciprocal_series.points;
    const std::size_t n = pts.size();

    std::size_t n_before = 0, n_after = 0, n_left = 0;
    for (const auto& p : pts) {
        if (p.t < break_year) ++n_before;
        if (p.t > break_year) ++n_after;
        if (p.t <= break_year) ++n_left;
    }
    if (n_before < 3) {
        throw Error("chow test: only " + std::to_string(n_before) +
                    " point(s) strictly before year " + num_str(break_year) + ", need 3");
    }
    if (n_after < 3) {
        throw Error("chow test: only " + std::to_string(n_after) +
                    " point(s) strictly after year " + num_str(break_year) + ", need 3");
    }

    const double floor = rss_floor(reciprocal_series);

    BreakReport report;
    report.n = n;
    report.candidate_breaks = {break_year};
    report.segmentations.push_back(make_segmentation(reciprocal_series, {}, floor));
    report.segmentations.push_back(make_segmentation(reciprocal_series, {n_left}, floor));
    finalize_best(report);

    const double rss_pooled = report.segmentations[0].rss;
    const double rss_split = report.segmentations[1].rss;

    ChowResult chow;
    chow.break_year = break_year;
    chow.dof1 = 2;
    chow.dof2 = static_cast<int>(n) - 4;
    if (rss_pooled <= floor) {
        // A perfect pooled line is the no-break null in its strongest form.
        chow.f = 0.0;
        chow.p_value = 1.0;
    } else {
        const double numerator = std::max(0.0, (rss_pooled - rss_split) / 2.0);
        const double denominator = rss_split / static_cast<double>(chow.dof2);
        if (denominator > 0.0) {
            chow.f = numerator / denominator;
        } else {
            chow.f = numerator == 0.0 ? 0.0 : std::numeric_limits<double>::infinity();
        }
        chow.p_value = f_upper_tail(chow.f, chow.dof1, chow.dof2);
    }
    report.chow = chow;
    return report;
}

BreakReport scan_breakpoints(const TimeSeries& reciprocal_series, int max_segments,
                             int min_segment_points) {
    reciprocal_series.validate_ordering();
    if (max_segments < 1 || max_segments > 3) {
        throw Error("max_segments must be 1, 2 or 3, got " + std::to_string(max_segments));
    }
    if (min_segment_points < 3) {
        throw Error("min_segment_points must be at least 3, got " +
                    std::to_string(min_segment_points));
    }
    const std::size_t n = reciprocal_series.points.size();
    const std::size_t m = static_cast<std::size_t>(min_segment_points);
    if (n < m) {
        throw Error("series has " + std::to_string(n) + " points, fewer than min_segment_points = " +
                    std::to_string(min_segment_points));
    }

    const double floor = rss_floor(reciprocal_series);

    BreakReport report;
    report.n = n;
    report.segmentations.push_back(make_segmentation(reciprocal_series, {}, floor));
    if (max_segments >= 2 && n >= 2 * m) {
        for (std::size_t s = m; s + m <= n; ++s) {
            report.segmentations.push_back(make_segmentation(reciprocal_series, {s}, floor));
        }
    }
    if (max_segments >= 3 && n >= 3 * m) {
        for (std::size_t s1 = m; s1 + 2 * m <= n; ++s1) {
            for (std::size_t s2 = s1 + m; s2 + m <= n; ++s2) {
                report.segmentations.push_back(
                    make_segmentation(reciprocal_series, {s1, s2}, floor));
            }
        }
    }

    for (const auto& seg : report.segmentations) {
        for (double b : seg.boundaries) report.candidate_breaks.push_back(b);
    }
    std::sort(report.candidate_breaks.begin(), report.candidate_breaks.end());
    report.candidate_breaks.erase(
        std::unique(report.candidate_breaks.begin(), report.candidate_breaks.end()),
        report.candidate_breaks.end());

    finalize_best(report);
    return report;
}

VerdictSummary regime_verdict(const BreakReport& report) {
    if (report.segmentations.empty()) {
        throw Error("regime verdict: report has no segmentations");
    }
    const Segmentation& best = report.segmentations[report.best];

    VerdictSummary out;
    out.verdict = report.verdict;
    out.breakpoints = report.breakpoints;

    std::string text;
    if (report.verdict == Verdict::OneStage) {
        text = "one stage: a single linear regime fits best (BIC " + num_str(best.bic) + ")";
    } else {
        text = "multi stage: " + std::to_string(best.segments.size()) +
               " regimes, breakpoints at";
        for (double b : best.boundaries) text += " " + num_str(b);
        text += " (BIC " + num_str(best.bic) + ")";
    }

    const Segmentation* runner_up = nullptr;
    for (std::size_t i = 0; i < report.segmentations.size(); ++i) {
        if (i == report.best) continue;
        if (!runner_up || better_segmentation(report.segmentations[i], *runner_up)) {
            runner_up = &report.segmentations[i];
        }
    }
    if (runner_up) {
        text += "; delta BIC to runner-up " + num_str(runner_up->bic - best.bic);
    }
    if (report.chow) {
        text += "; Chow at " + num_str(report.chow->break_year) + ": F = " +
                num_str(report.chow->f) + ", p = " + num_str(report.chow->p_value);
    }
    out.text = text;
    return out;
}

}  // namespace hypergrowth
