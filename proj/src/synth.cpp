#include "hypergrowth/synth.hpp"

#include <cmath>
#include <numbers>

#include "hypergrowth/format.hpp"

namespace hypergrowth {

double standard_normal(std::mt19937_64& rng) {
    // Box-Muller over explicit 53-bit uniforms; std::normal_distribution is
    // implementation-defined, which would tie fixtures to one stdlib.
    const double u1 =
        (static_cast<double>(rng() >> 11) + 1.0) * 0x1.0p-53;  // (0, 1]
    const double u2 = static_cast<double>(rng() >> 11) * 0x1.0p-53;  // [0, 1)
    return std::sqrt(-2.0 * std::log(u1)) * std::cos(2.0 * std::numbers::pi * u2);
}

namespace {

void check_count(int n) {
    if (n < 2) {
        throw Error("synthetic series needs at least 2 points, got " + std::to_string(n));
    }
}

// Inverts a reciprocal-space value, rejecting draws that left the positive
// domain (only possible when sigma is comparable to the values themselves).
double invert(double w, double t) {
    if (!(w > 0.0)) {
        throw Error("synthetic reciprocal value went non-positive at year " + format_double(t) +
                    "; reduce the noise level");
    }
    return 1.0 / w;
}

}  // namespace

TimeSeries synth_hyperbola(double a, double k, double q, double t0, double t1, int n,
                           double sigma, std::uint64_t seed) {
    check_count(n);
    if (!(q > 0.0)) throw Error("exponent q must be positive");
    std::mt19937_64 rng(seed);
    TimeSeries out;
    out.label = "synthetic hyperbola";
    out.unit = "units";
    out.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / (n - 1);
        double w = a - k * t;
        if (sigma > 0.0) w += sigma * standard_normal(rng);
        if (!(w > 0.0)) {
            throw Error("grid reaches the singularity: a - k*t = " + format_double(w) +
                        " at year " + format_double(t));
        }
        out.points.push_back({t, q == 1.0 ? 1.0 / w : std::pow(w, -q)});
    }
    return out;
}

TimeSeries synth_reciprocal_line(double a, double k, double t0, double dt, int n, double sigma,
                                 std::uint64_t seed) {
    check_count(n);
    std::mt19937_64 rng(seed);
    TimeSeries out;
    out.label = "synthetic reciprocal line";
    out.unit = "1/(units)";
    out.points.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) {
        const double t = t0 + dt * i;
        double w = a - k * t;
        if (sigma > 0.0) w += sigma * standard_normal(rng);
        out.points.push_back({t, w});
    }
    return out;
}

TimeSeries synth_piecewise_reciprocal(double a, double k1, double k2, double t_break, double t0,
                                      double dt, int n, double sigma, std::uint64_t seed) {
    check_count(n);
    std::mt19937_64 rng(seed);
    TimeSeries out;
    out.label = "synthetic piecewise reciprocal";
    out.unit = "1/(units)";
    out.points.reserve(static_cast<std::size_t>(n));
    const double w_break = a - k1 * t_break;
    for (int i = 0; i < n; ++i) {
        const double t = t0 + dt * i;
        double w = t <= t_break ? a - k1 * t : w_break - k2 * (t - t_break);
        if (sigma > 0.0) w += sigma * standard_normal(rng);
        out.points.push_back({t, w});
    }
    return out;
}

TimeSeries synth_slowdown(double a, double k, double t_slow, double t0, double t1, int n,
                          double sigma, std::uint64_t seed) {
    check_count(n);
    std::mt19937_64 rng(seed);
    TimeSeries out;
    out.label = "synthetic slowdown";
    out.unit = "units";
    out.points.reserve(static_cast<std::size_t>(n));
    const double u_slow = a - k * t_slow;
    if (!(u_slow > 0.0)) {
        throw Error("slowdown year is at or beyond the singularity");
    }
    const double v_slow = 1.0 / u_slow;
    const double dv_slow = k / (u_slow * u_slow);  // d/dt of 1/(a - k*t)
    for (int i = 0; i < n; ++i) {
        const double t = t0 + (t1 - t0) * static_cast<double>(i) / (n - 1);
        double v;
        if (t <= t_slow) {
            const double u = a - k * t;
            if (!(u > 0.0)) {
                throw Error("grid reaches the singularity at year " + format_double(t));
            }
            v = 1.0 / u;
        } else {
            // Tangent continuation: growth keeps the rate it had at t_slow.
            v = v_slow + dv_slow * (t - t_slow);
        }
        double w = 1.0 / v;
        if (sigma > 0.0) w += sigma * standard_normal(rng);
        out.points.push_back({t, invert(w, t)});
    }
    return out;
}

}  // namespace hypergrowth
