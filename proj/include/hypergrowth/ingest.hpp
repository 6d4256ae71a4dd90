#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "hypergrowth/timeseries.hpp"

namespace hypergrowth {

/// A bundle of ingested series with a provenance note. Labels are unique.
struct CanonicalTable {
    std::vector<TimeSeries> series;
    std::string source;

    void add(TimeSeries s);  // rejects duplicate labels
};

/// Canonical long format: optional leading `#` comment lines (`# unit: ...`
/// and `# label: ...` are honored), a `year,value` header, then one numeric
/// pair per row. Rows are sorted by year; duplicate years and values <= 0
/// are rejected, so no invalid series escapes this boundary.
TimeSeries parse_canonical_csv(const std::string& text);

struct MaddisonParse {
    TimeSeries series;
    std::size_t skipped_cells = 0;  // empty cells in the selected row
};

/// Maddison-style horizontal layout: one header row with years as column
/// labels, one region per data row. Delimiter is auto-detected between comma
/// and tab from the first line; quoted cells and thousands separators
/// (commas or spaces inside numbers) are handled. Values are multiplied by
/// scale_factor. Empty cells are skipped and counted.
MaddisonParse parse_maddison_horizontal(const std::string& text, const std::string& row_label,
                                        const std::string& unit, double scale_factor);

}  // namespace hypergrowth
