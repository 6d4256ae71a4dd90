#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <string>
#include <vector>

#include "hypergrowth/regimes.hpp"
#include "hypergrowth/synth.hpp"
#include "oracle.hpp"

using namespace hypergrowth;

namespace {

TimeSeries make_series(std::vector<Observation> pts) {
    TimeSeries s;
    s.points = std::move(pts);
    s.unit = "1/(units)";
    s.label = "test";
    return s;
}

bool approx_rel(double x, double y, double tol) {
    const double scale = std::max({std::fabs(x), std::fabs(y), 1e-300});
    return std::fabs(x - y) <= tol * scale;
}

template <class F>
std::string error_message(F&& f) {
    try {
        f();
    } catch (const Error& e) {
        return e.what();
    }
    return {};
}

// Independent exhaustive segmentation search in long double, for comparing
// against scan_breakpoints on noisy data (where the RSS floor is inactive).
struct OracleBest {
    std::vector<std::size_t> splits;
    long double bic = std::numeric_limits<long double>::infinity();
    std::size_t segments = 0;
};

long double oracle_segmentation_bic(const TimeSeries& s, const std::vector<std::size_t>& splits) {
    const std::size_t n = s.points.size();
    long double rss = 0.0L;
    std::size_t begin = 0;
    for (std::size_t i = 0; i <= splits.size(); ++i) {
        const std::size_t end = i < splits.size() ? splits[i] : n;
        std::vector<double> t, y;
        for (std::size_t j = begin; j < end; ++j) {
            t.push_back(s.points[j].t);
            y.push_back(s.points[j].v);
        }
        rss += oracle::ols(t, y).rss;
        begin = end;
    }
    const long double params = 3.0L * (splits.size() + 1) - 1.0L;
    return n * std::log(rss / n) + params * std::log(static_cast<long double>(n));
}

OracleBest oracle_scan(const TimeSeries& s, int max_segments, std::size_t m) {
    const std::size_t n = s.points.size();
    OracleBest best;
    const auto consider = [&](const std::vector<std::size_t>& splits) {
        const long double bic = oracle_segmentation_bic(s, splits);
        if (bic < best.bic) {
            best.bic = bic;
            best.splits = splits;
            best.segments = splits.size() + 1;
        }
    };
    consider({});
    if (max_segments >= 2) {
        for (std::size_t a = m; a + m <= n; ++a) consider({a});
    }
    if (max_segments >= 3) {
        for (std::size_t a = m; a + 2 * m <= n; ++a) {
            for (std::size_t b = a + m; b + m <= n; ++b) consider({a, b});
        }
    }
    return best;
}

std::vector<std::size_t> split_indices(const TimeSeries& s, const Segmentation& seg) {
    std::vector<std::size_t> out;
    for (double boundary : seg.boundaries) {
        std::size_t count = 0;
        for (const auto& p : s.points) {
            if (p.t <= boundary) ++count;
        }
        out.push_back(count);
    }
    return out;
}

}  // namespace

TEST_CASE("monotonicity_report ") {
    SUBCASE("strictly decreasing is monotone") {
        const auto r = monotonicity_report(
            make_series({{0, 10}, {1, 9}, {2, 8}}), Direction::Decreasing, 0.0);
        CHECK(r.monotone());
        CHECK(r.violations.empty());
    }
    SUBCASE("a rise is a violation at the right pair") {
        const auto r = monotonicity_report(
            make_series({{0, 10}, {1, 11}, {2, 8}}), Direction::Decreasing, 0.0);
        CHECK(!r.monotone());
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].t_prev == 0.0);
        CHECK(r.violations[0].t_next == 1.0);
    }
    SUBCASE("rise within relative slack is tolerated") {
        const auto r = monotonicity_report(
            make_series({{0, 10}, {1, 10.0005}, {2, 9}}), Direction::Decreasing, 1e-3);
        CHECK(r.monotone());
    }
    SUBCASE("increasing direction") {
        const auto r = monotonicity_report(
            make_series({{0, 1}, {1, 2}, {2, 1.5}}), Direction::Increasing, 0.0);
        REQUIRE(r.violations.size() == 1);
        CHECK(r.violations[0].t_prev == 1.0);
    }
    CHECK_THROWS_AS(monotonicity_report(make_series({{0, 1}}), Direction::Decreasing, 0.0),
                    Error);
}

TEST_CASE("flag_deviations on noiseless line data flags nothing") {
    TimeSeries s = make_series({});
    for (int i = 0; i < 20; ++i) {
        const double t = 100.0 * i;
        s.points.push_back({t, 10.0 - 0.003 * t});
    }
    const LinearFit fit = fit_line(s);
    for (double threshold : {0.5, 3.0, 10.0}) {
        for (const auto& f : flag_deviations(s, fit, threshold)) {
            CHECK(!f.flagged);
        }
    }
}

TEST_CASE("flag_deviations isolates a displaced trailing point") {
    // 19 points on y = 10 - 0.01*t with alternating +-1e-6 jitter, then a
    // final point displaced +0.5 above the line; fit excludes the final year.
    TimeSeries s = make_series({});
    std::vector<double> t_in, y_in;
    for (int i = 0; i < 19; ++i) {
        const double t = 50.0 * i;
        const double y = 10.0 - 0.01 * t + (i % 2 == 0 ? 1e-6 : -1e-6);
        s.points.push_back({t, y});
        t_in.push_back(t);
        y_in.push_back(y);
    }
    const double t_last = 50.0 * 19;
    s.points.push_back({t_last, 10.0 - 0.01 * t_last + 0.5});

    const LinearFit fit = fit_line(s, t_in.back());
    const auto flags = flag_deviations(s, fit, 3.0);
    REQUIRE(flags.size() == 20);
    for (std::size_t i = 0; i + 1 < flags.size(); ++i) {
        CHECK(!flags[i].flagged);
        CHECK(!flags[i].excluded);
    }
    CHECK(flags.back().flagged);
    CHECK(flags.back().above_line);
    CHECK(flags.back().excluded);

    // Independent residual computation.
    const oracle::Line ref = oracle::ols(t_in, y_in);
    const long double resid =
        (10.0 - 0.01 * t_last + 0.5) - (ref.intercept + ref.slope * t_last);
    const long double scale = std::sqrt(ref.rss / (19 - 2));
    CHECK(approx_rel(flags.back().residual, static_cast<double>(resid), 1e-6));
    CHECK(approx_rel(flags.back().z, static_cast<double>(resid / scale), 1e-6));
    CHECK(static_cast<double>(resid / scale) > 3.0);
}

TEST_CASE("flag_deviations with infinite threshold flags nothing") {
    TimeSeries s = make_series({});
    std::mt19937 rng(3);
    std::uniform_real_distribution<double> noise(-2.0, 2.0);
    for (int i = 0; i < 12; ++i) {
        s.points.push_back({10.0 * i, 8.0 - 0.05 * i + noise(rng)});
    }
    const LinearFit fit = fit_line(s);
    for (const auto& f : flag_deviations(s, fit, std::numeric_limits<double>::infinity())) {
        CHECK(!f.flagged);
    }
}

TEST_CASE("flag_deviations error paths") {
    TimeSeries s = make_series({{0, 10}, {10, 9}, {20, 8}});
    // Only 2 included points: scale undefined.
    TimeSeries two = make_series({{0, 10}, {10, 9}});
    const LinearFit two_fit = fit_line(two);
    CHECK_THROWS_AS(flag_deviations(two, two_fit, 3.0), Error);
    // Fit from a different grid.
    const LinearFit other = fit_line(make_series({{0, 10}, {10, 9}, {20, 8}, {30, 7}}));
    CHECK_THROWS_AS(flag_deviations(s, other, 3.0), Error);
}

TEST_CASE("chow_test on a single exact line is the no-break null") {
    TimeSeries s = make_series({});
    for (int i = 0; i < 20; ++i) {
        const double t = 25.0 * i;
        s.points.push_back({t, 10.0 - 0.012 * t});
    }
    const BreakReport report = chow_test(s, 237.0);
    REQUIRE(report.chow.has_value());
    CHECK(report.chow->f == 0.0);
    CHECK(report.chow->p_value == 1.0);
    CHECK(report.verdict == Verdict::OneStage);
    CHECK(report.n == 20);
    CHECK(report.segmentations.size() == 2);
}

TEST_CASE("chow_test detects a slope change, F cross-checked against oracle RSS terms") {
    // Two exact segments, slopes -0.01 and -0.03, meeting at the break year,
    // 10 points each, deterministic jitter of +-1e-9.
    TimeSeries s = make_series({});
    const double t_break = 9.0;
    std::vector<double> t_all, y_all, t1, y1, t2, y2;
    for (int i = 0; i < 20; ++i) {
        const double t = static_cast<double>(i);
        double y = t <= t_break ? 10.0 - 0.01 * t
                                : (10.0 - 0.01 * t_break) - 0.03 * (t - t_break);
        y += (i % 2 == 0 ? 1e-9 : -1e-9);
        s.points.push_back({t, y});
        t_all.push_back(t);
        y_all.push_back(y);
        if (t <= t_break) {
            t1.push_back(t);
            y1.push_back(y);
        } else {
            t2.push_back(t);
            y2.push_back(y);
        }
    }
    const BreakReport report = chow_test(s, t_break);
    REQUIRE(report.chow.has_value());
    CHECK(report.chow->f > 1e6);
    CHECK(report.chow->p_value < 1e-12);
    CHECK(report.verdict == Verdict::MultiStage);

    const long double rss_p = oracle::ols(t_all, y_all).rss;
    const long double rss_1 = oracle::ols(t1, y1).rss;
    const long double rss_2 = oracle::ols(t2, y2).rss;
    const long double f_ref =
        ((rss_p - rss_1 - rss_2) / 2.0L) / ((rss_1 + rss_2) / (20.0L - 4.0L));
    CHECK(approx_rel(report.chow->f, static_cast<double>(f_ref), 1e-6));
}

TEST_CASE("chow_test is invariant under year shifts (property)") {
    std::mt19937 rng(5);
    std::uniform_real_distribution<double> noise(-0.01, 0.01);
    std::uniform_real_distribution<double> shift_dist(-3000.0, 3000.0);
    for (int iter = 0; iter < 30; ++iter) {
        TimeSeries s = make_series({});
        TimeSeries shifted = make_series({});
        const double shift = shift_dist(rng);
        for (int i = 0; i < 16; ++i) {
            const double t = 5.0 * i;
            const double y = 12.0 - (i < 8 ? 0.02 : 0.05) * t + noise(rng);
            s.points.push_back({t, y});
            shifted.points.push_back({t + shift, y});
        }
        const BreakReport a = chow_test(s, 37.0);
        const BreakReport b = chow_test(shifted, 37.0 + shift);
        REQUIRE(a.chow.has_value());
        REQUIRE(b.chow.has_value());
        CHECK(approx_rel(a.chow->f, b.chow->f, 1e-9));
    }
}

TEST_CASE("chow_test names the deficient side") {
    TimeSeries s = make_series({});
    for (int i = 0; i < 10; ++i) s.points.push_back({static_cast<double>(i), 10.0 - 0.1 * i});
    const auto before = error_message([&] { chow_test(s, 1.5); });
    CHECK(before.find("before") != std::string::npos);
    const auto after = error_message([&] { chow_test(s, 7.5); });
    CHECK(after.find("after") != std::string::npos);
}

TEST_CASE("scan_breakpoints on a noiseless line is one stage") {
    TimeSeries s = make_series({});
    for (int i = 0; i < 20; ++i) {
        const double t = 100.0 * i;
        s.points.push_back({t, 10.0 - 0.004 * t});
    }
    const BreakReport report = scan_breakpoints(s, 3, 3);
    CHECK(report.verdict == Verdict::OneStage);
    CHECK(report.breakpoints.empty());
    CHECK(report.segmentations[report.best].segments.size() == 1);
}

TEST_CASE("scan_breakpoints matches the independent exhaustive oracle on noisy data") {
    std::mt19937 rng(29);
    for (int iter = 0; iter < 25; ++iter) {
        TimeSeries s = make_series({});
        std::mt19937_64 gen(1000 + iter);
        const bool with_break = iter % 2 == 0;
        for (int i = 0; i < 12; ++i) {
            const double t = static_cast<double>(i);
            double y = with_break ? (i < 6 ? 10.0 - 0.02 * t : 9.88 - 0.08 * (t - 6.0))
                                  : 10.0 - 0.02 * t;
            y += 5e-3 * standard_normal(gen);
            s.points.push_back({t, y});
        }
        const BreakReport report = scan_breakpoints(s, 3, 3);
        const OracleBest ref = oracle_scan(s, 3, 3);
        const auto got = split_indices(s, report.segmentations[report.best]);
        CHECK(got == ref.splits);
        CHECK(approx_rel(report.segmentations[report.best].bic,
                         static_cast<double>(ref.bic), 1e-9));
    }
}

TEST_CASE("scan_breakpoints finds a clear two-regime break within one sample") {
    for (std::uint64_t seed = 1; seed <= 20; ++seed) {
        const TimeSeries s =
            synth_piecewise_reciprocal(10.0, 0.01, 0.05, 15.0, 0.0, 1.0, 30, 1e-3, seed);
        const BreakReport report = scan_breakpoints(s, 3, 3);
        CHECK(report.verdict == Verdict::MultiStage);
        REQUIRE(!report.breakpoints.empty());
        // The kink must be among the detected breakpoints, to within one sample.
        bool found = false;
        for (double b : report.breakpoints) {
            found = found || std::fabs(b - 15.0) <= 1.0;
        }
        CHECK(found);
    }
}

TEST_CASE("n = 9 with min 3 per segment admits exactly one 3-segment split") {
    TimeSeries s = make_series({});
    std::mt19937_64 gen(77);
    for (int i = 0; i < 9; ++i) {
        s.points.push_back({static_cast<double>(i), 10.0 - 0.01 * i + 1e-3 * standard_normal(gen)});
    }
    const BreakReport report = scan_breakpoints(s, 3, 3);
    std::size_t three_seg = 0;
    for (const auto& seg : report.segmentations) {
        if (seg.segments.size() == 3) {
            ++three_seg;
            CHECK(seg.segments[0].fit.n == 3);
            CHECK(seg.segments[1].fit.n == 3);
            CHECK(seg.segments[2].fit.n == 3);
            CHECK(seg.boundaries == std::vector<double>{2.0, 5.0});
        }
    }
    CHECK(three_seg == 1);
    // 1-segment + four 2-segment splits (3..6 left) + one 3-segment split.
    CHECK(report.segmentations.size() == 6);
}

TEST_CASE("scan_breakpoints argument validation") {
    TimeSeries s = make_series({{0, 3}, {1, 2.5}, {2, 2.0}, {3, 1.5}});
    CHECK_THROWS_AS(scan_breakpoints(s, 0, 3), Error);
    CHECK_THROWS_AS(scan_breakpoints(s, 4, 3), Error);
    CHECK_THROWS_AS(scan_breakpoints(s, 2, 2), Error);
    TimeSeries tiny = make_series({{0, 3}, {1, 2.5}});
    CHECK_THROWS_AS(scan_breakpoints(tiny, 2, 3), Error);
}

TEST_CASE("adding segments never increases the best achievable RSS (property)") {
    std::mt19937_64 gen(4242);
    for (int iter = 0; iter < 20; ++iter) {
        TimeSeries s = make_series({});
        for (int i = 0; i < 18; ++i) {
            s.points.push_back(
                {2.0 * i, 10.0 - 0.03 * i + 0.05 * standard_normal(gen)});
        }
        const BreakReport report = scan_breakpoints(s, 3, 3);
        double best_rss[4] = {0.0, 1e300, 1e300, 1e300};
        for (const auto& seg : report.segmentations) {
            auto& slot = best_rss[seg.segments.size()];
            slot = std::min(slot, seg.rss);
        }
        CHECK(best_rss[2] <= best_rss[1] * (1.0 + 1e-12));
        CHECK(best_rss[3] <= best_rss[2] * (1.0 + 1e-12));
    }
}

TEST_CASE("one-segment BIC equals n*ln(rss/n) + 2*ln(n) exactly") {
    TimeSeries s = make_series({});
    std::mt19937_64 gen(99);
    for (int i = 0; i < 14; ++i) {
        s.points.push_back({3.0 * i, 9.0 - 0.01 * i + 0.01 * standard_normal(gen)});
    }
    const BreakReport report = scan_breakpoints(s, 1, 3);
    REQUIRE(report.segmentations.size() == 1);
    const Segmentation& seg = report.segmentations[0];
    const double n = 14.0;
    CHECK(seg.bic == n * std::log(seg.rss / n) + 2 * std::log(n));
    CHECK(seg.params == 2);
}

TEST_CASE("scan_breakpoints detects mirrored breakpoints on mirrored data") {
    std::mt19937_64 gen(31337);
    TimeSeries s = make_series({});
    for (int i = 0; i < 24; ++i) {
        const double t = static_cast<double>(i);
        const double y =
            (i < 10 ? 12.0 - 0.01 * t : 11.9 - 0.09 * (t - 10.0)) + 1e-3 * standard_normal(gen);
        s.points.push_back({t, y});
    }
    TimeSeries mirrored = make_series({});
    for (int i = 23; i >= 0; --i) {
        mirrored.points.push_back({-s.points[i].t, s.points[i].v});
    }
    const BreakReport fwd = scan_breakpoints(s, 2, 3);
    const BreakReport rev = scan_breakpoints(mirrored, 2, 3);
    REQUIRE(fwd.verdict == Verdict::MultiStage);
    REQUIRE(rev.verdict == Verdict::MultiStage);
    // Segment sizes come out reversed, total RSS identical.
    std::vector<std::size_t> sizes_fwd, sizes_rev;
    for (const auto& part : fwd.segmentations[fwd.best].segments) sizes_fwd.push_back(part.fit.n);
    for (const auto& part : rev.segmentations[rev.best].segments) sizes_rev.push_back(part.fit.n);
    std::reverse(sizes_rev.begin(), sizes_rev.end());
    CHECK(sizes_fwd == sizes_rev);
    CHECK(approx_rel(fwd.segmentations[fwd.best].rss, rev.segmentations[rev.best].rss, 1e-9));
}

TEST_CASE("per-segment residuals sum to zero (property)") {
    std::mt19937_64 gen(555);
    TimeSeries s = make_series({});
    for (int i = 0; i < 21; ++i) {
        s.points.push_back({4.0 * i, 10.0 - 0.01 * i + 0.02 * standard_normal(gen)});
    }
    const BreakReport report = scan_breakpoints(s, 3, 3);
    for (const auto& seg : report.segmentations) {
        for (const auto& part : seg.segments) {
            double sum = 0.0, scale = 0.0;
            for (const auto& r : part.fit.residuals) {
                sum += r.v;
                scale += std::fabs(r.v);
            }
            CHECK(std::fabs(sum) <= 1e-9 * std::max(1.0, scale));
        }
    }
}

TEST_CASE("regime_verdict summaries") {
    TimeSeries line = make_series({});
    for (int i = 0; i < 15; ++i) {
        line.points.push_back({5.0 * i, 7.0 - 0.02 * i});
    }
    const BreakReport one = scan_breakpoints(line, 3, 3);
    const VerdictSummary vs = regime_verdict(one);
    CHECK(vs.verdict == Verdict::OneStage);
    CHECK(vs.text.find("one stage") != std::string::npos);
    CHECK(vs.text.find("runner-up") != std::string::npos);

    const TimeSeries broken =
        synth_piecewise_reciprocal(10.0, 0.01, 0.06, 9.0, 0.0, 1.0, 20, 1e-4, 3);
    const BreakReport multi = chow_test(broken, 9.0);
    const VerdictSummary vm = regime_verdict(multi);
    CHECK(vm.verdict == Verdict::MultiStage);
    CHECK(vm.text.find("multi stage") != std::string::npos);
    CHECK(vm.text.find("Chow") != std::string::npos);
    CHECK(vm.breakpoints == std::vector<double>{9.0});

    CHECK_THROWS_AS(regime_verdict(BreakReport{}), Error);
}
