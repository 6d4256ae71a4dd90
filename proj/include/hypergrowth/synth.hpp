#pragma once

#include <cstdint>
#include <random>

#include "hypergrowth/timeseries.hpp"

namespace hypergrowth {

/// Deterministic standard normal draw (Box-Muller over mt19937_64 uniforms);
/// identical across platforms for a given engine state, unlike
/// std::normal_distribution.
double standard_normal(std::mt19937_64& rng);

/// n samples of S(t) = (a - k*t)^(-q) on an even grid over [t0, t1], with
/// optional Gaussian noise of the given sigma added to the linearized values
/// a - k*t before inversion. The whole grid must stay below the singularity.
TimeSeries synth_hyperbola(double a, double k, double q, double t0, double t1, int n,
                           double sigma = 0.0, std::uint64_t seed = 0);

/// Reciprocal-space series directly: values a - k*t + noise at t0, t0+dt, ...
TimeSeries synth_reciprocal_line(double a, double k, double t0, double dt, int n, double sigma,
                                 std::uint64_t seed);

/// Reciprocal-space two-regime series: decline rate k1 through t_break
/// (inclusive), then k2, continuous at the kink.
TimeSeries synth_piecewise_reciprocal(double a, double k1, double k2, double t_break, double t0,
                                      double dt, int n, double sigma, std::uint64_t seed);

/// Hyperbolic growth that switches to linear growth (the tangent at t_slow),
/// so trailing reciprocal values sag above the fitted line.
TimeSeries synth_slowdown(double a, double k, double t_slow, double t0, double t1, int n,
                          double sigma = 0.0, std::uint64_t seed = 0);

}  // namespace hypergrowth
