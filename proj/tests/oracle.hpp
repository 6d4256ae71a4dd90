#pragma once

// Independent reference computations for the tests. These deliberately share
// no code with the library: naive closed-form formulas evaluated at long
// double precision, so they can serve as oracles for the double-precision
// implementation.

#include <cmath>
#include <cstddef>
#include <limits>
#include <vector>

namespace oracle {

struct Line {
    long double intercept = 0.0L;
    long double slope = 0.0L;
    long double rss = 0.0L;
};

inline Line ols(const std::vector<double>& t, const std::vector<double>& y) {
    const std::size_t n = t.size();
    long double st = 0.0L, sy = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        st += t[i];
        sy += y[i];
    }
    const long double tm = st / static_cast<long double>(n);
    const long double ym = sy / static_cast<long double>(n);
    long double stt = 0.0L, sty = 0.0L;
    for (std::size_t i = 0; i < n; ++i) {
        stt += (t[i] - tm) * (t[i] - tm);
        sty += (t[i] - tm) * (y[i] - ym);
    }
    Line out;
    out.slope = sty / stt;
    out.intercept = ym - out.slope * tm;
    for (std::size_t i = 0; i < n; ++i) {
        const long double r = y[i] - (out.intercept + out.slope * t[i]);
        out.rss += r * r;
    }
    return out;
}

// Value-space residual sum of squares of the model (a - k*t)^(-q) against
// observed values, for exponent-selection cross-checks. Returns infinity
// when the line goes non-positive over the sample years.
inline long double value_rss(long double a, long double k, long double q,
                             const std::vector<double>& t, const std::vector<double>& v) {
    long double rss = 0.0L;
    for (std::size_t i = 0; i < t.size(); ++i) {
        const long double u = a - k * t[i];
        if (!(u > 0.0L)) return std::numeric_limits<long double>::infinity();
        const long double d = std::pow(u, -q) - static_cast<long double>(v[i]);
        rss += d * d;
    }
    return rss;
}

// Linearize via (1/v)^(1/q), fit by OLS, and score in value space; the
// whole exponent-candidate pipeline in one independent pass.
struct ExponentCandidate {
    long double a = 0.0L;
    long double k = 0.0L;
    long double rss_value = 0.0L;
};

inline ExponentCandidate exponent_candidate(double q, const std::vector<double>& t,
                                            const std::vector<double>& v) {
    std::vector<double> w(v.size());
    for (std::size_t i = 0; i < v.size(); ++i) {
        w[i] = std::pow(1.0 / v[i], 1.0 / q);
    }
    const Line line = ols(t, w);
    ExponentCandidate out;
    out.a = line.intercept;
    out.k = -line.slope;
    out.rss_value = value_rss(out.a, out.k, q, t, v);
    return out;
}

}  // namespace oracle
