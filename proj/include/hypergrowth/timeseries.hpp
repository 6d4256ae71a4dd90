#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace hypergrowth {

/// Thrown on any data or parameter rejection. Messages name the offending
/// input (year, line, label) so callers can surface them directly.
class Error : public std::runtime_error {
  public:
    explicit Error(const std::string& msg) : std::runtime_error(msg) {}
};

struct Observation {
    double t;  // year CE, real-valued
    double v;
};

/// Ordered (year, value) observations with a unit tag.
///
/// Years are strictly increasing. Values must be strictly positive wherever
/// a reciprocal transform or a logarithmic display is involved; series that
/// enter through the ingest boundary are always fully positive.
struct TimeSeries {
    std::vector<Observation> points;
    std::string unit;  // e.g. "million persons", "billion 1990 International Dollars"
    std::string label;

    std::size_t size() const { return points.size(); }
    bool empty() const { return points.empty(); }

    /// Rejects out-of-order or duplicate years.
    void validate_ordering() const;

    /// Rejects any value <= 0 (or NaN), naming the offending year.
    void validate_positive() const;
};

}  // namespace hypergrowth
