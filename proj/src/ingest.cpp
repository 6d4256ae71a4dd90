#include "hypergrowth/ingest.hpp"

#include <algorithm>
#include <charconv>
#include <string_view>

#include "hypergrowth/format.hpp"

namespace hypergrowth {

namespace {

std::string_view trim(std::string_view s) {
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) {
        s.remove_prefix(1);
    }
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) {
        s.remove_suffix(1);
    }
    return s;
}

bool parse_number(std::string_view cell, double& out) {
    cell = trim(cell);
    if (!cell.empty() && cell.front() == '+') cell.remove_prefix(1);
    if (cell.empty()) return false;
    const char* first = cell.data();
    const char* last = cell.data() + cell.size();
    const auto res = std::from_chars(first, last, out);
    return res.ec == std::errc() && res.ptr == last;
}

std::vector<std::string_view> split_lines(const std::string& text) {
    std::vector<std::string_view> lines;
    std::string_view rest = text;
    while (!rest.empty()) {
        const auto nl = rest.find('\n');
        if (nl == std::string_view::npos) {
            lines.push_back(rest);
            break;
        }
        lines.push_back(rest.substr(0, nl));
        rest.remove_prefix(nl + 1);
    }
    return lines;
}

// Standard CSV cell splitting: quoted cells may contain the delimiter, and
// "" inside quotes is a literal quote.
std::vector<std::string> split_cells(std::string_view line, char delim) {
    std::vector<std::string> cells;
    std::string cell;
    bool in_quotes = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < line.size() && line[i + 1] == '"') {
                    cell += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                cell += c;
            }
        } else if (c == '"' && cell.empty()) {
            in_quotes = true;
        } else if (c == delim) {
            cells.push_back(std::move(cell));
            cell.clear();
        } else {
            cell += c;
        }
    }
    cells.push_back(std::move(cell));
    return cells;
}

void sort_and_check(TimeSeries& series) {
    std::stable_sort(series.points.begin(), series.points.end(),
                     [](const Observation& a, const Observation& b) { return a.t < b.t; });
    for (std::size_t i = 1; i < series.points.size(); ++i) {
        if (series.points[i - 1].t == series.points[i].t) {
            throw Error("duplicate year " + format_double(series.points[i].t));
        }
    }
    for (const auto& p : series.points) {
        if (!(p.v > 0.0)) {
            throw Error("non-positive value " + format_double(p.v) + " at year " +
                        format_double(p.t) + " (growth series must be strictly positive)");
        }
    }
}

}  // namespace

void CanonicalTable::add(TimeSeries s) {
    for (const auto& existing : series) {
        if (existing.label == s.label) {
            throw Error("duplicate series label '" + s.label + "' in table");
        }
    }
    series.push_back(std::move(s));
}

TimeSeries parse_canonical_csv(const std::string& text) {
    TimeSeries series;
    series.unit = "unspecified";

    bool header_seen = false;
    std::size_t line_no = 0;
    for (std::string_view raw : split_lines(text)) {
        ++line_no;
        const std::string_view line = trim(raw);
        if (line.empty()) continue;
        if (line.front() == '#') {
            std::string_view comment = trim(line.substr(1));
            if (comment.rfind("unit:", 0) == 0) {
                series.unit = std::string(trim(comment.substr(5)));
            } else if (comment.rfind("label:", 0) == 0) {
                series.label = std::string(trim(comment.substr(6)));
            }
            continue;
        }
        if (!header_seen) {
            auto cells = split_cells(line, ',');
            if (cells.size() != 2 || trim(cells[0]) != "year" || trim(cells[1]) != "value") {
                throw Error("line " + std::to_string(line_no) +
                            ": expected header 'year,value', got '" + std::string(line) + "'");
            }
            header_seen = true;
            continue;
        }
        auto cells = split_cells(line, ',');
        if (cells.size() != 2) {
            throw Error("line " + std::to_string(line_no) + ": expected 2 cells, got " +
                        std::to_string(cells.size()));
        }
        Observation obs{};
        if (!parse_number(cells[0], obs.t)) {
            throw Error("line " + std::to_string(line_no) + ": '" + cells[0] +
                        "' is not a number");
        }
        if (!parse_number(cells[1], obs.v)) {
            throw Error("line " + std::to_string(line_no) + ": '" + cells[1] +
                        "' is not a number");
        }
        series.points.push_back(obs);
    }
    if (!header_seen) {
        throw Error("missing 'year,value' header row");
    }
    if (series.points.empty()) {
        throw Error("no data rows");
    }
    sort_and_check(series);
    return series;
}

MaddisonParse parse_maddison_horizontal(const std::string& text, const std::string& row_label,
                                        const std::string& unit, double scale_factor) {
    const auto lines = split_lines(text);

    // Delimiter from the first line: any tab means tab-separated (region
    // names in TSV exports may legitimately contain commas).
    std::size_t first = 0;
    while (first < lines.size() && trim(lines[first]).empty()) ++first;
    if (first == lines.size()) {
        throw Error("empty input");
    }
    const char delim = lines[first].find('\t') != std::string_view::npos ? '\t' : ',';

    const auto header = split_cells(lines[first], delim);
    if (header.size() < 2) {
        throw Error("header row has no year columns");
    }
    struct YearColumn {
        std::size_t index;
        double year;
    };
    std::vector<YearColumn> year_columns;
    for (std::size_t j = 1; j < header.size(); ++j) {
        const std::string_view cell = trim(header[j]);
        if (cell.empty()) continue;  // padding column
        std::string cleaned(cell);
        cleaned.erase(std::remove_if(cleaned.begin(), cleaned.end(),
                                     [](char c) { return c == ',' || c == ' '; }),
                      cleaned.end());
        double year = 0.0;
        if (!parse_number(cleaned, year)) {
            throw Error("header column " + std::to_string(j + 1) + " ('" + std::string(cell) +
                        "') is not a year");
        }
        year_columns.push_back({j, year});
    }
    if (year_columns.empty()) {
        throw Error("header row has no usable year columns");
    }

    std::vector<std::string> available;
    const std::vector<std::string>* row = nullptr;
    std::vector<std::string> row_storage;
    for (std::size_t i = first + 1; i < lines.size(); ++i) {
        if (trim(lines[i]).empty()) continue;
        auto cells = split_cells(lines[i], delim);
        const std::string label(trim(cells[0]));
        if (label.empty()) continue;
        if (!row && label == row_label) {
            row_storage = std::move(cells);
            row = &row_storage;
        }
        available.push_back(label);
    }
    if (!row) {
        std::string msg = "row label '" + row_label + "' not found; available labels:";
        for (const auto& l : available) msg += " '" + l + "'";
        throw Error(msg);
    }

    MaddisonParse out;
    out.series.unit = unit;
    out.series.label = row_label;
    for (const auto& col : year_columns) {
        if (col.index >= row->size()) {
            ++out.skipped_cells;
            continue;
        }
        const std::string_view cell = trim((*row)[col.index]);
        if (cell.empty()) {
            ++out.skipped_cells;
            continue;
        }
        // Strip thousands separators (commas or spaces inside the number).
        std::string cleaned(cell);
        cleaned.erase(std::remove_if(cleaned.begin(), cleaned.end(),
                                     [](char c) { return c == ',' || c == ' '; }),
                      cleaned.end());
        double value = 0.0;
        if (!parse_number(cleaned, value)) {
            throw Error("row '" + row_label + "', year " + format_double(col.year) + ": cell '" +
                        std::string(cell) + "' is not a number");
        }
        out.series.points.push_back({col.year, value * scale_factor});
    }
    if (out.series.points.empty()) {
        throw Error("row '" + row_label + "' has no usable cells");
    }
    sort_and_check(out.series);
    return out;
}

}  // namespace hypergrowth
