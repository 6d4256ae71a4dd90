// hypergrowth: reciprocal-transform diagnostics for historical growth series.
//
// Subcommands wire the library modules into reproducible analyses:
//   ingest       Maddison-style horizontal table -> canonical year,value CSV
//   fit          canonical CSV -> hyperbolic fit report (JSON)
//   test-break   Chow structural-break test at a fixed year (JSON)
//   scan-breaks  BIC-scored piecewise-linear segmentation scan (JSON)
//   ratio        GDP / population trajectory from two fits (CSV)
//   plot         figure styles as SVG or plot-point CSV
//   synth        seeded synthetic fixtures (canonical CSV)

#include <cmath>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "hypergrowth/core.hpp"
#include "hypergrowth/format.hpp"
#include "hypergrowth/ingest.hpp"
#include "hypergrowth/regimes.hpp"
#include "hypergrowth/report.hpp"
#include "hypergrowth/synth.hpp"

namespace hg = hypergrowth;
using nlohmann::ordered_json;

namespace {

// Flag combinations the parser cannot express (exit code 2, like CLI11's own
// parse errors).
class UsageError : public std::runtime_error {
  public:
    explicit UsageError(const std::string& msg) : std::runtime_error(msg) {}
};

struct RunConfig {
    std::vector<std::string> inputs;
    std::string row_label;
    double scale = 1.0;
    std::string unit = "unspecified";
    std::optional<double> exclude_after;
    std::vector<double> q_grid;
    double year = 0.0;
    int max_segments = 3;
    int min_segment_points = 3;
    double z_threshold = 3.0;
    double mono_tolerance = 0.0;
    std::string style = "linear";
    std::vector<double> keep_years;
    std::string format;
    std::string output;
    std::uint64_t seed = 0;
    std::string kind = "hyperbola";
    int count = 0;  // synth point count; 0 means the kind's default
    double noise = 0.0;
};

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) {
        throw hg::Error("cannot open input file '" + path + "'");
    }
    std::ostringstream buf;
    buf << in.rdbuf();
    return buf.str();
}

void write_output(const std::string& path, const std::string& text) {
    if (path.empty()) {
        std::cout << text;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) {
        throw hg::Error("cannot open output file '" + path + "'");
    }
    out << text;
}

ordered_json json_opt(const std::optional<double>& v) {
    if (v) return *v;
    return nullptr;
}

// Series linearized for the chosen exponent: (1/v)^(1/q). The space the
// line was fitted in, and the space deviation flags live in.
hg::TimeSeries linearized_series(const hg::TimeSeries& series, double q) {
    hg::TimeSeries out = hg::reciprocal(series);
    if (q != 1.0) {
        const double inv_q = 1.0 / q;
        for (auto& p : out.points) p.v = std::pow(p.v, inv_q);
    }
    return out;
}

hg::TimeSeries truncate_after(const hg::TimeSeries& series, std::optional<double> cutoff) {
    if (!cutoff) return series;
    hg::TimeSeries out = series;
    out.points.clear();
    for (const auto& p : series.points) {
        if (p.t <= *cutoff) out.points.push_back(p);
    }
    return out;
}

// ---------------------------------------------------------------------------
// ingest
// ---------------------------------------------------------------------------

void cmd_ingest(const RunConfig& cfg) {
    const auto parsed = hg::parse_maddison_horizontal(read_file(cfg.inputs[0]), cfg.row_label,
                                                      cfg.unit, cfg.scale);
    if (parsed.skipped_cells > 0) {
        std::cerr << "note: skipped " << parsed.skipped_cells << " empty cell(s) in row '"
                  << cfg.row_label << "'\n";
    }
    write_output(cfg.output, hg::emit_canonical_csv(parsed.series));
}

// ---------------------------------------------------------------------------
// fit
// ---------------------------------------------------------------------------

hg::FitRecord build_fit_record(const hg::TimeSeries& series, const RunConfig& cfg) {
    hg::FitRecord rec;
    rec.label = series.label;
    rec.unit = series.unit;
    rec.n_points = series.points.size();
    rec.t_min = series.points.front().t;
    rec.t_max = series.points.back().t;
    rec.exclude_after = cfg.exclude_after;
    rec.z_threshold = cfg.z_threshold;

    if (cfg.q_grid.empty()) {
        hg::HyperbolaFit fit = hg::fit_hyperbola(series, cfg.exclude_after);
        rec.model = fit.model;
        rec.line = std::move(fit.line);
    } else {
        hg::GeneralHyperbolaFit fit =
            hg::fit_general_hyperbola(series, cfg.q_grid, cfg.exclude_after);
        rec.model = fit.model;
        rec.line = std::move(fit.line);
        rec.q_scores = std::move(fit.scores);
    }

    rec.monotonicity = hg::monotonicity_report(hg::reciprocal(series),
                                               hg::Direction::Decreasing, cfg.mono_tolerance);
    if (rec.line.n > 2) {
        rec.flags =
            hg::flag_deviations(linearized_series(series, rec.model.q), rec.line,
                                cfg.z_threshold);
    }
    return rec;
}

void cmd_fit(const RunConfig& cfg) {
    const hg::TimeSeries series = hg::parse_canonical_csv(read_file(cfg.inputs[0]));
    const hg::FitRecord rec = build_fit_record(series, cfg);

    ordered_json params;
    params["subcommand"] = "fit";
    params["input"] = cfg.inputs[0];
    params["exclude_after"] = json_opt(cfg.exclude_after);
    params["q_grid"] = cfg.q_grid;
    params["z_threshold"] = cfg.z_threshold;
    params["mono_tolerance"] = cfg.mono_tolerance;
    write_output(cfg.output, hg::emit_json_report({rec}, {}, {}, params));
}

// ---------------------------------------------------------------------------
// test-break / scan-breaks
// ---------------------------------------------------------------------------

void cmd_test_break(const RunConfig& cfg) {
    const hg::TimeSeries series = hg::parse_canonical_csv(read_file(cfg.inputs[0]));
    const hg::TimeSeries recip = truncate_after(hg::reciprocal(series), cfg.exclude_after);

    hg::BreakRecord rec;
    rec.label = series.label;
    rec.report = hg::chow_test(recip, cfg.year);
    const hg::VerdictSummary verdict = hg::regime_verdict(rec.report);
    rec.summary = verdict.text;

    ordered_json params;
    params["subcommand"] = "test-break";
    params["input"] = cfg.inputs[0];
    params["year"] = cfg.year;
    params["exclude_after"] = json_opt(cfg.exclude_after);
    write_output(cfg.output, hg::emit_json_report({}, {rec}, {verdict.text}, params));
}

void cmd_scan_breaks(const RunConfig& cfg) {
    const hg::TimeSeries series = hg::parse_canonical_csv(read_file(cfg.inputs[0]));
    const hg::TimeSeries recip = truncate_after(hg::reciprocal(series), cfg.exclude_after);

    hg::BreakRecord rec;
    rec.label = series.label;
    rec.report = hg::scan_breakpoints(recip, cfg.max_segments, cfg.min_segment_points);
    const hg::VerdictSummary verdict = hg::regime_verdict(rec.report);
    rec.summary = verdict.text;

    ordered_json params;
    params["subcommand"] = "scan-breaks";
    params["input"] = cfg.inputs[0];
    params["max_segments"] = cfg.max_segments;
    params["min_segment_points"] = cfg.min_segment_points;
    params["exclude_after"] = json_opt(cfg.exclude_after);
    write_output(cfg.output, hg::emit_json_report({}, {rec}, {verdict.text}, params));
}

// ---------------------------------------------------------------------------
// ratio
// ---------------------------------------------------------------------------

struct RatioSide {
    hg::HyperbolicModel model;
    std::string label;
    std::string unit;
    double t_min = 0.0;
    double t_max = 0.0;
    std::vector<double> years;  // observed years when the side came from a CSV
};

RatioSide load_ratio_side(const std::string& path, const RunConfig& cfg) {
    const std::string text = read_file(path);
    RatioSide side;
    const auto first = text.find_first_not_of(" \t\r\n");
    if (first != std::string::npos && text[first] == '{') {
        // A fit report produced by `hypergrowth fit`.
        const auto j = ordered_json::parse(text);
        if (!j.contains("fits") || j["fits"].empty()) {
            throw hg::Error("fit report '" + path + "' contains no fits");
        }
        const auto& f = j["fits"][0];
        side.model = hg::HyperbolicModel{f["a"].get<double>(), f["k"].get<double>(),
                                         f["q"].get<double>()};
        side.label = f["label"].get<std::string>();
        side.unit = f["unit"].get<std::string>();
        side.t_min = f["t_min"].get<double>();
        side.t_max = f["t_max"].get<double>();
        return side;
    }
    const hg::TimeSeries series = hg::parse_canonical_csv(text);
    const hg::HyperbolaFit fit = hg::fit_hyperbola(series, cfg.exclude_after);
    side.model = fit.model;
    side.label = series.label.empty() ? path : series.label;
    side.unit = series.unit;
    side.t_min = series.points.front().t;
    side.t_max = series.points.back().t;
    for (const auto& p : series.points) side.years.push_back(p.t);
    return side;
}

void cmd_ratio(const RunConfig& cfg) {
    const RatioSide num = load_ratio_side(cfg.inputs[0], cfg);
    const RatioSide den = load_ratio_side(cfg.inputs[1], cfg);

    std::vector<double> grid;
    if (!num.years.empty()) {
        grid = num.years;
    } else if (!den.years.empty()) {
        grid = den.years;
    } else {
        // Both sides are fit reports: 100 evenly spaced years over the
        // overlap of their data ranges, clipped short of both singularities.
        const double lo = std::max(num.t_min, den.t_min);
        double hi = std::min(num.t_max, den.t_max);
        if (!(hi > lo)) {
            throw hg::Error("fit reports have no overlapping year range");
        }
        const double span = hi - lo;
        for (const auto* side : {&num, &den}) {
            if (auto ts = side->model.singularity_time()) {
                hi = std::min(hi, *ts - hg::kSingularityClip * span);
            }
        }
        if (!(hi > lo)) {
            throw hg::Error("no valid years below both singularity times");
        }
        for (int i = 0; i < 100; ++i) {
            grid.push_back(lo + (hi - lo) * static_cast<double>(i) / 99.0);
        }
    }

    const hg::RatioTrajectory traj = hg::ratio_trajectory(num.model, den.model, grid);

    hg::TimeSeries out;
    out.label = num.label + " / " + den.label;
    out.unit = num.unit + " per " + den.unit;
    for (std::size_t i = 0; i < traj.grid.size(); ++i) {
        out.points.push_back({traj.grid[i], traj.values[i]});
    }
    write_output(cfg.output, hg::emit_canonical_csv(out));
}

// ---------------------------------------------------------------------------
// plot
// ---------------------------------------------------------------------------

void cmd_plot(const RunConfig& cfg) {
    const std::string format = cfg.format.empty() ? "svg" : cfg.format;
    if (format != "svg" && format != "csv") {
        throw UsageError("plot supports --format svg or csv, got '" + format + "'");
    }

    std::vector<hg::TimeSeries> series;
    for (const auto& path : cfg.inputs) {
        series.push_back(hg::parse_canonical_csv(read_file(path)));
    }

    hg::PlotDocument doc;
    if (cfg.style == "linear") {
        doc = hg::plot_series(series, {}, hg::AxisScale::Linear, false);
    } else if (cfg.style == "semilog") {
        doc = hg::plot_series(series, {}, hg::AxisScale::Log10, false);
    } else if (cfg.style == "reciprocal" || cfg.style == "overlay") {
        std::vector<hg::HyperbolicModel> models;
        for (const auto& s : series) {
            models.push_back(hg::fit_hyperbola(s, cfg.exclude_after).model);
        }
        doc = hg::plot_series(series, models, hg::AxisScale::Linear,
                              cfg.style == "reciprocal");
    } else if (cfg.style == "sparse") {
        if (cfg.keep_years.empty()) {
            throw UsageError("--style sparse requires --keep-years");
        }
        std::vector<hg::TimeSeries> sparse;
        for (const auto& s : series) {
            sparse.push_back(hg::sparse_display(s, cfg.keep_years));
        }
        doc = hg::plot_series(sparse, {}, hg::AxisScale::Linear, false);
        // The few kept points are joined by straight lines.
        std::vector<hg::Layer> joined;
        for (const auto& layer : doc.layers) {
            hg::Layer line = layer;
            line.kind = hg::LayerKind::Line;
            line.style = "sparse";
            joined.push_back(std::move(line));
        }
        for (auto& layer : doc.layers) joined.push_back(std::move(layer));
        doc.layers = std::move(joined);
    } else {
        throw UsageError("unknown --style '" + cfg.style +
                         "' (expected linear|semilog|reciprocal|overlay|sparse)");
    }

    write_output(cfg.output, format == "svg" ? hg::render_svg(doc) : hg::plot_points_csv(doc));
}

// ---------------------------------------------------------------------------
// synth
// ---------------------------------------------------------------------------

void cmd_synth(const RunConfig& cfg) {
    hg::TimeSeries out;
    if (cfg.kind == "hyperbola") {
        const int n = cfg.count > 0 ? cfg.count : 19;
        out = hg::synth_hyperbola(10.0, 0.01, 1.0, 0.0, 900.0, n, cfg.noise, cfg.seed);
    } else if (cfg.kind == "piecewise") {
        const int n = cfg.count > 0 ? cfg.count : 30;
        const double t_break = static_cast<double>((n - 1) / 2);
        const hg::TimeSeries recip = hg::synth_piecewise_reciprocal(
            10.0, 0.01, 0.05, t_break, 0.0, 1.0, n, cfg.noise, cfg.seed);
        out = hg::reciprocal(recip);
        out.label = "synthetic piecewise";
    } else if (cfg.kind == "slowdown") {
        const int n = cfg.count > 0 ? cfg.count : 20;
        out = hg::synth_slowdown(10.0, 0.01, 800.0, 0.0, 950.0, n, cfg.noise, cfg.seed);
    } else {
        throw UsageError("unknown --kind '" + cfg.kind +
                         "' (expected hyperbola|piecewise|slowdown)");
    }
    write_output(cfg.output, hg::emit_canonical_csv(out));
}

}  // namespace

int main(int argc, char** argv) {
    RunConfig cfg;

    CLI::App app{"hypergrowth: reciprocal-transform diagnostics for growth series"};
    app.require_subcommand(1);

    auto* ingest = app.add_subcommand(
        "ingest", "Convert a Maddison-style horizontal table to canonical year,value CSV");
    ingest->add_option("--input", cfg.inputs, "horizontal CSV/TSV export")
        ->required()
        ->expected(1);
    ingest->add_option("--row-label", cfg.row_label, "row to extract, e.g. World")->required();
    ingest
        ->add_option("--scale", cfg.scale,
                     "multiply values (e.g. 0.001 for millions -> billions)")
        ->capture_default_str();
    ingest->add_option("--unit", cfg.unit, "unit tag for the extracted series")
        ->capture_default_str();
    ingest->add_option("--output", cfg.output, "output path (default: stdout)");

    auto* fit =
        app.add_subcommand("fit", "Fit a hyperbolic trajectory via the reciprocal line");
    fit->add_option("--input", cfg.inputs, "canonical CSV")->required()->expected(1);
    fit->add_option("--exclude-after", cfg.exclude_after,
                    "exclude years after this from the estimation");
    fit->add_option("--q-grid", cfg.q_grid, "comma-separated exponent grid, e.g. 0.5,1,1.5,2,3")
        ->delimiter(',');
    fit->add_option("--z-threshold", cfg.z_threshold, "deviation flag threshold")
        ->capture_default_str();
    fit->add_option("--mono-tolerance", cfg.mono_tolerance,
                    "relative slack for the monotonicity check")
        ->capture_default_str();
    fit->add_option("--output", cfg.output, "output path (default: stdout)");

    auto* test_break =
        app.add_subcommand("test-break", "Chow structural-break test on the reciprocal series");
    test_break->add_option("--input", cfg.inputs, "canonical CSV")->required()->expected(1);
    test_break->add_option("--year", cfg.year, "candidate break year")->required();
    test_break->add_option("--exclude-after", cfg.exclude_after,
                           "drop years after this before testing");
    test_break->add_option("--output", cfg.output, "output path (default: stdout)");

    auto* scan = app.add_subcommand(
        "scan-breaks", "Exhaustive BIC segmentation scan on the reciprocal series");
    scan->add_option("--input", cfg.inputs, "canonical CSV")->required()->expected(1);
    scan->add_option("--max-segments", cfg.max_segments, "1, 2 or 3")->capture_default_str();
    scan->add_option("--min-segment-points", cfg.min_segment_points, "at least 3")
        ->capture_default_str();
    scan->add_option("--exclude-after", cfg.exclude_after,
                     "drop years after this before scanning");
    scan->add_option("--output", cfg.output, "output path (default: stdout)");

    auto* ratio = app.add_subcommand(
        "ratio", "Per-capita style trajectory: numerator fit divided by denominator fit");
    ratio
        ->add_option("--input", cfg.inputs,
                     "two inputs in order: numerator (GDP), then denominator (population); "
                     "each a canonical CSV or a fit-report JSON")
        ->required()
        ->expected(2);
    ratio->add_option("--exclude-after", cfg.exclude_after, "exclusion applied to CSV-side fits");
    ratio->add_option("--output", cfg.output, "output path (default: stdout)");

    auto* plot = app.add_subcommand("plot", "Render a figure as SVG or plot-point CSV");
    plot->add_option("--input", cfg.inputs, "canonical CSV (repeatable)")
        ->required()
        ->expected(1, 8);
    plot->add_option("--style", cfg.style, "linear|semilog|reciprocal|overlay|sparse")
        ->capture_default_str();
    plot->add_option("--keep-years", cfg.keep_years, "years kept by --style sparse")
        ->delimiter(',');
    plot->add_option("--exclude-after", cfg.exclude_after, "exclusion applied to fitted overlays");
    plot->add_option("--format", cfg.format, "svg (default) or csv");
    plot->add_option("--output", cfg.output, "output path (default: stdout)");

    auto* synth = app.add_subcommand("synth", "Generate a seeded synthetic fixture");
    synth->add_option("--kind", cfg.kind, "hyperbola|piecewise|slowdown")->capture_default_str();
    synth->add_option("--n", cfg.count, "number of points (0 = kind default)");
    synth->add_option("--noise", cfg.noise, "Gaussian noise sigma in reciprocal space")
        ->capture_default_str();
    synth->add_option("--seed", cfg.seed, "random seed")->capture_default_str();
    synth->add_option("--output", cfg.output, "output path (default: stdout)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (app.got_subcommand(ingest)) {
            cmd_ingest(cfg);
        } else if (app.got_subcommand(fit)) {
            cmd_fit(cfg);
        } else if (app.got_subcommand(test_break)) {
            cmd_test_break(cfg);
        } else if (app.got_subcommand(scan)) {
            cmd_scan_breaks(cfg);
        } else if (app.got_subcommand(ratio)) {
            cmd_ratio(cfg);
        } else if (app.got_subcommand(plot)) {
            cmd_plot(cfg);
        } else if (app.got_subcommand(synth)) {
            cmd_synth(cfg);
        }
        return 0;
    } catch (const UsageError& e) {
        std::cerr << "usage error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
}
