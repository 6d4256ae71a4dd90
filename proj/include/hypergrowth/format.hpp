#pragma once

#include <string>

namespace hypergrowth {

/// Shortest decimal string that round-trips to the same double ("0.1",
/// "1000", "9.5e-07"). Locale-independent.
std::string format_double(double v);

/// Fixed-point with the given number of fractional digits.
std::string format_fixed(double v, int digits);

}  // namespace hypergrowth
