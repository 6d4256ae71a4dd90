#pragma once

#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "hypergrowth/core.hpp"
#include "hypergrowth/format.hpp"
#include "hypergrowth/regimes.hpp"
#include "hypergrowth/timeseries.hpp"

namespace hypergrowth {

// ---------------------------------------------------------------------------
// Plot documents
// ---------------------------------------------------------------------------

enum class AxisScale { Linear, Log10 };
enum class LayerKind { Points, Line, Curve };

struct XY {
    double x, y;
};

struct Axis {
    std::string label;
    double lo = 0.0;
    double hi = 1.0;
    AxisScale scale = AxisScale::Linear;
};

struct Layer {
    LayerKind kind = LayerKind::Points;
    std::string name;   // series label or fit description; used in CSV output
    std::string style;  // "data", "fit", "sparse"
    std::vector<XY> points;
};

/// Renderable description of a figure. Curve layers are pre-sampled, so the
/// document is self-contained and rendering is a pure function of it.
struct PlotDocument {
    std::string title;
    Axis x_axis;
    Axis y_axis;
    std::vector<Layer> layers;
    double width = 800.0;
    double height = 600.0;
};

inline constexpr int kCurveSamples = 200;           // samples per model curve
inline constexpr double kSingularityClip = 0.02;    // clip curves this fraction of
                                                    // the x-range short of t_s

/// Builds a document from data series plus optional fitted models.
/// reciprocal_mode plots 1/v with the fitted lines a - k*t overlaid;
/// otherwise values are plotted with sampled hyperbolic curves. Axes are
/// auto-ranged with 5% margins (log10 margins applied in log space).
PlotDocument plot_series(const std::vector<TimeSeries>& series,
                         const std::vector<HyperbolicModel>& models, AxisScale scale,
                         bool reciprocal_mode);

/// Subseries at exactly keep_years, for the few-points-joined-by-lines
/// display. Every requested year must be present.
TimeSeries sparse_display(const TimeSeries& series, const std::vector<double>& keep_years);

/// Self-contained SVG 1.1 text. Deterministic: stable element order, fixed
/// 3-digit coordinate formatting, decade ticks on log10 axes.
std::string render_svg(const PlotDocument& doc);

/// Alternative plot output: CSV with columns layer,x,y.
std::string plot_points_csv(const PlotDocument& doc);

/// Canonical long-format CSV (`# unit:` / `# label:` comments + year,value
/// rows); parse_canonical_csv reads it back losslessly.
std::string emit_canonical_csv(const TimeSeries& series);

// ---------------------------------------------------------------------------
// JSON reports (schema "hypergrowth-report/1")
// ---------------------------------------------------------------------------

struct FitRecord {
    std::string label;
    std::string unit;
    std::size_t n_points = 0;
    double t_min = 0.0;
    double t_max = 0.0;
    HyperbolicModel model;
    LinearFit line;
    std::vector<ExponentScore> q_scores;          // present when a q grid was searched
    std::vector<DeviationFlag> flags;
    std::optional<MonotonicityReport> monotonicity;  // of the reciprocal series
    std::optional<double> exclude_after;
    double z_threshold = 3.0;
};

struct BreakRecord {
    std::string label;
    BreakReport report;
    std::string summary;
};

/// Stable-key-order JSON with full round-trip number precision; serializing,
/// parsing and re-serializing is byte-identical.
std::string emit_json_report(const std::vector<FitRecord>& fits,
                             const std::vector<BreakRecord>& breaks,
                             const std::vector<std::string>& verdicts,
                             const nlohmann::ordered_json& params);

}  // namespace hypergrowth
