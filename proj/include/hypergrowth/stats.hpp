#pragma once

namespace hypergrowth {

/// Regularized incomplete beta function I_x(a, b), evaluated by a Lentz
/// continued fraction to a relative tolerance of 1e-10. Requires a, b > 0
/// and x in [0, 1].
double regularized_incomplete_beta(double x, double a, double b);

/// CDF of the F(d1, d2) distribution at x.
double f_cdf(double x, double d1, double d2);

/// Upper tail P(F > x) for the F(d1, d2) distribution, computed directly
/// through the incomplete beta so small p-values do not cancel.
double f_upper_tail(double x, double d1, double d2);

}  // namespace hypergrowth
