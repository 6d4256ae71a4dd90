#include "hypergrowth/report.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace hypergrowth {

namespace {

constexpr double kMarginFrac = 0.05;  // axis padding on each side

// Fixed palette; layers cycle through it in order.
const char* const kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd",
                                "#ff7f0e", "#8c564b"};
constexpr int kPaletteSize = 6;

struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();

    void include(double v) {
        lo = std::min(lo, v);
        hi = std::max(hi, v);
    }
    bool valid() const { return lo <= hi; }
};

void pad_linear(Range& r) {
    if (r.lo == r.hi) {
        r.lo -= 0.5;
        r.hi += 0.5;
        return;
    }
    const double m = kMarginFrac * (r.hi - r.lo);
    r.lo -= m;
    r.hi += m;
}

void pad_log(Range& r) {
    double lo = std::log10(r.lo);
    double hi = std::log10(r.hi);
    if (lo == hi) {
        lo -= 0.5;
        hi += 0.5;
    } else {
        const double m = kMarginFrac * (hi - lo);
        lo -= m;
        hi += m;
    }
    r.lo = std::pow(10.0, lo);
    r.hi = std::pow(10.0, hi);
}

std::vector<XY> sample_curve(const HyperbolicModel& model, double exponent_sign, double x_lo,
                             double x_hi, double x_span) {
    // exponent_sign = -1 samples S(t) itself, +1 its reciprocal (a - k*t)^q.
    std::vector<XY> pts;
    double hi = x_hi;
    if (auto ts = model.singularity_time()) {
        hi = std::min(hi, *ts - kSingularityClip * x_span);
    }
    if (!(hi > x_lo)) return pts;
    pts.reserve(kCurveSamples);
    for (int i = 0; i < kCurveSamples; ++i) {
        const double x = x_lo + (hi - x_lo) * static_cast<double>(i) / (kCurveSamples - 1);
        const double u = model.a - model.k * x;
        if (!(u > 0.0)) continue;
        pts.push_back({x, std::pow(u, exponent_sign * model.q)});
    }
    return pts;
}

std::string csv_escape(const std::string& s) {
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        out += c;
    }
    out += "\"";
    return out;
}

std::string xml_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size());
    for (char c : s) {
        switch (c) {
            case '&': out += "&amp;"; break;
            case '<': out += "&lt;"; break;
            case '>': out += "&gt;"; break;
            case '"': out += "&quot;"; break;
            default: out += c;
        }
    }
    return out;
}

struct TickSet {
    std::vector<double> values;
    int label_digits = 0;  // fractional digits for fixed-point tick labels
};

TickSet nice_ticks(double lo, double hi) {
    TickSet out;
    const double raw = (hi - lo) / 6.0;
    if (!(raw > 0.0)) return out;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    const double norm = raw / mag;
    double step = mag;
    if (norm >= 7.5) {
        step = 10.0 * mag;
    } else if (norm >= 3.5) {
        step = 5.0 * mag;
    } else if (norm >= 1.5) {
        step = 2.0 * mag;
    }
    out.label_digits = step < 1.0 ? static_cast<int>(std::ceil(-std::log10(step) - 1e-9)) : 0;
    const long long k0 = static_cast<long long>(std::ceil(lo / step - 1e-9));
    for (long long k = k0; k * step <= hi + step * 1e-9; ++k) {
        out.values.push_back(static_cast<double>(k) * step);
    }
    return out;
}

std::vector<double> decade_ticks(double lo, double hi) {
    std::vector<double> out;
    const int k0 = static_cast<int>(std::ceil(std::log10(lo) - 1e-9));
    const int k1 = static_cast<int>(std::floor(std::log10(hi) + 1e-9));
    for (int k = k0; k <= k1; ++k) {
        out.push_back(std::pow(10.0, k));
    }
    return out;
}

}  // namespace

TimeSeries sparse_display(const TimeSeries& series, const std::vector<double>& keep_years) {
    series.validate_ordering();
    if (keep_years.empty()) {
        throw Error("sparse display needs at least one keep year");
    }
    std::vector<double> wanted = keep_years;
    std::sort(wanted.begin(), wanted.end());
    wanted.erase(std::unique(wanted.begin(), wanted.end()), wanted.end());

    TimeSeries out;
    out.unit = series.unit;
    out.label = series.label;
    for (double year : wanted) {
        const auto it = std::find_if(series.points.begin(), series.points.end(),
                                     [year](const Observation& p) { return p.t == year; });
        if (it == series.points.end()) {
            throw Error("keep year " + format_double(year) + " is not present in series '" +
                        series.label + "'");
        }
        out.points.push_back(*it);
    }
    return out;
}

PlotDocument plot_series(const std::vector<TimeSeries>& series,
                         const std::vector<HyperbolicModel>& models, AxisScale scale,
                         bool reciprocal_mode) {
    if (series.empty()) {
        throw Error("plot needs at least one series");
    }

    std::vector<TimeSeries> plotted;
    plotted.reserve(series.size());
    for (const auto& s : series) {
        s.validate_ordering();
        if (s.empty()) throw Error("plot: series '" + s.label + "' is empty");
        plotted.push_back(reciprocal_mode ? reciprocal(s) : s);
    }

    Range x_range;
    for (const auto& s : plotted) {
        x_range.include(s.points.front().t);
        x_range.include(s.points.back().t);
    }
    const double x_span = x_range.hi - x_range.lo;

    PlotDocument doc;
    for (std::size_t i = 0; i < plotted.size(); ++i) {
        Layer layer;
        layer.kind = LayerKind::Points;
        layer.name = plotted[i].label.empty() ? "series" + std::to_string(i + 1)
                                              : plotted[i].label;
        layer.style = "data";
        for (const auto& p : plotted[i].points) layer.points.push_back({p.t, p.v});
        doc.layers.push_back(std::move(layer));
        if (!doc.title.empty()) doc.title += ", ";
        doc.title += plotted[i].label.empty() ? "series" + std::to_string(i + 1)
                                              : plotted[i].label;
    }

    for (std::size_t j = 0; j < models.size(); ++j) {
        const auto& m = models[j];
        Layer layer;
        layer.name = "fit" + std::to_string(j + 1);
        layer.style = "fit";
        if (reciprocal_mode && m.q == 1.0) {
            // The reciprocal of a first-order hyperbola is the line itself.
            layer.kind = LayerKind::Line;
            layer.points.push_back({x_range.lo, m.a - m.k * x_range.lo});
            layer.points.push_back({x_range.hi, m.a - m.k * x_range.hi});
        } else {
            layer.kind = LayerKind::Curve;
            layer.points = sample_curve(m, reciprocal_mode ? 1.0 : -1.0, x_range.lo, x_range.hi,
                                        x_span);
        }
        doc.layers.push_back(std::move(layer));
    }

    Range y_range;
    for (const auto& layer : doc.layers) {
        for (const auto& p : layer.points) y_range.include(p.y);
    }
    if (!y_range.valid()) {
        throw Error("plot has no drawable points");
    }
    if (scale == AxisScale::Log10) {
        for (const auto& layer : doc.layers) {
            for (const auto& p : layer.points) {
                if (!(p.y > 0.0)) {
                    throw Error("log10 scale requires positive values, got " +
                                format_double(p.y) + " in layer '" + layer.name + "' at x = " +
                                format_double(p.x));
                }
            }
        }
    }

    pad_linear(x_range);
    if (scale == AxisScale::Log10) {
        pad_log(y_range);
    } else {
        pad_linear(y_range);
    }

    doc.x_axis = Axis{"year", x_range.lo, x_range.hi, AxisScale::Linear};
    std::string y_label = plotted.front().unit;
    doc.y_axis = Axis{y_label, y_range.lo, y_range.hi, scale};
    return doc;
}

std::string render_svg(const PlotDocument& doc) {
    const double w = doc.width;
    const double h = doc.height;
    const double ml = 70.0, mr = 25.0, mt = 45.0, mb = 55.0;
    const bool logy = doc.y_axis.scale == AxisScale::Log10;

    const double x_lo = doc.x_axis.lo, x_hi = doc.x_axis.hi;
    const double y_lo = logy ? std::log10(doc.y_axis.lo) : doc.y_axis.lo;
    const double y_hi = logy ? std::log10(doc.y_axis.hi) : doc.y_axis.hi;

    const auto px = [&](double x) {
        return ml + (x - x_lo) / (x_hi - x_lo) * (w - ml - mr);
    };
    const auto py = [&](double y) {
        const double d = logy ? std::log10(y) : y;
        return h - mb - (d - y_lo) / (y_hi - y_lo) * (h - mt - mb);
    };
    const auto fx = [](double v) { return format_fixed(v, 3); };

    std::string svg;
    svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" + fx(w) +
           "\" height=\"" + fx(h) + "\" viewBox=\"0 0 " + fx(w) + " " + fx(h) + "\">\n";
    svg += "<rect x=\"0\" y=\"0\" width=\"" + fx(w) + "\" height=\"" + fx(h) +
           "\" fill=\"#ffffff\"/>\n";
    if (!doc.title.empty()) {
        svg += "<text x=\"" + fx(w / 2.0) +
               "\" y=\"24.000\" text-anchor=\"middle\" font-family=\"sans-serif\" "
               "font-size=\"16\">" +
               xml_escape(doc.title) + "</text>\n";
    }

    // Plot frame.
    svg += "<rect x=\"" + fx(ml) + "\" y=\"" + fx(mt) + "\" width=\"" + fx(w - ml - mr) +
           "\" height=\"" + fx(h - mt - mb) +
           "\" fill=\"none\" stroke=\"#333333\" stroke-width=\"1\"/>\n";

    // X ticks.
    {
        const TickSet ticks = nice_ticks(x_lo, x_hi);
        for (double v : ticks.values) {
            const double x = px(v);
            svg += "<line x1=\"" + fx(x) + "\" y1=\"" + fx(h - mb) + "\" x2=\"" + fx(x) +
                   "\" y2=\"" + fx(h - mb + 5.0) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
            svg += "<text x=\"" + fx(x) + "\" y=\"" + fx(h - mb + 18.0) +
                   "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">" +
                   format_fixed(v, ticks.label_digits) + "</text>\n";
        }
    }
    // Y ticks: decade ticks on a log10 axis, nice steps otherwise.
    if (logy) {
        for (double v : decade_ticks(doc.y_axis.lo, doc.y_axis.hi)) {
            const double y = py(v);
            svg += "<line x1=\"" + fx(ml - 5.0) + "\" y1=\"" + fx(y) + "\" x2=\"" + fx(ml) +
                   "\" y2=\"" + fx(y) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
            svg += "<text x=\"" + fx(ml - 8.0) + "\" y=\"" + fx(y + 4.0) +
                   "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
                   format_double(v) + "</text>\n";
        }
    } else {
        const TickSet ticks = nice_ticks(y_lo, y_hi);
        for (double v : ticks.values) {
            const double y = py(v);
            svg += "<line x1=\"" + fx(ml - 5.0) + "\" y1=\"" + fx(y) + "\" x2=\"" + fx(ml) +
                   "\" y2=\"" + fx(y) + "\" stroke=\"#333333\" stroke-width=\"1\"/>\n";
            svg += "<text x=\"" + fx(ml - 8.0) + "\" y=\"" + fx(y + 4.0) +
                   "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">" +
                   format_fixed(v, ticks.label_digits) + "</text>\n";
        }
    }

    // Axis labels.
    if (!doc.x_axis.label.empty()) {
        svg += "<text x=\"" + fx(ml + (w - ml - mr) / 2.0) + "\" y=\"" + fx(h - 12.0) +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\">" +
               xml_escape(doc.x_axis.label) + "</text>\n";
    }
    if (!doc.y_axis.label.empty()) {
        const std::string cx = fx(18.0);
        const std::string cy = fx(mt + (h - mt - mb) / 2.0);
        svg += "<text x=\"" + cx + "\" y=\"" + cy +
               "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"13\" "
               "transform=\"rotate(-90 " +
               cx + " " + cy + ")\">" + xml_escape(doc.y_axis.label) + "</text>\n";
    }

    // Data layers, in document order.
    for (std::size_t i = 0; i < doc.layers.size(); ++i) {
        const Layer& layer = doc.layers[i];
        const std::string color = kPalette[i % kPaletteSize];
        if (layer.kind == LayerKind::Points) {
            for (const auto& p : layer.points) {
                svg += "<circle cx=\"" + fx(px(p.x)) + "\" cy=\"" + fx(py(p.y)) +
                       "\" r=\"3.000\" fill=\"" + color + "\"/>\n";
            }
        } else if (layer.points.size() >= 2) {
            svg += "<polyline fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.5\"";
            if (layer.style == "fit") svg += " stroke-dasharray=\"6,3\"";
            svg += " points=\"";
            for (std::size_t j = 0; j < layer.points.size(); ++j) {
                if (j) svg += " ";
                svg += fx(px(layer.points[j].x)) + "," + fx(py(layer.points[j].y));
            }
            svg += "\"/>\n";
        }
    }

    svg += "</svg>\n";
    return svg;
}

std::string plot_points_csv(const PlotDocument& doc) {
    std::string out = "layer,x,y\n";
    for (const auto& layer : doc.layers) {
        const std::string name = csv_escape(layer.name);
        for (const auto& p : layer.points) {
            out += name + "," + format_double(p.x) + "," + format_double(p.y) + "\n";
        }
    }
    return out;
}

std::string emit_canonical_csv(const TimeSeries& series) {
    std::string out;
    if (!series.label.empty()) {
        out += "# label: " + series.label + "\n";
    }
    out += "# unit: " + series.unit + "\n";
    out += "year,value\n";
    for (const auto& p : series.points) {
        out += format_double(p.t) + "," + format_double(p.v) + "\n";
    }
    return out;
}

namespace {

using ordered_json = nlohmann::ordered_json;

ordered_json json_optional(std::optional<double> v) {
    if (v) return *v;
    return nullptr;
}

ordered_json fit_to_json(const FitRecord& rec) {
    ordered_json j;
    j["label"] = rec.label;
    j["unit"] = rec.unit;
    j["n_points"] = rec.n_points;
    j["t_min"] = rec.t_min;
    j["t_max"] = rec.t_max;
    j["a"] = rec.model.a;
    j["k"] = rec.model.k;
    j["q"] = rec.model.q;
    j["t_s"] = json_optional(rec.model.singularity_time());
    j["r2"] = rec.line.r2;
    j["rss"] = rec.line.rss;
    j["degenerate_r2"] = rec.line.degenerate_r2;
    j["n_included"] = rec.line.n;
    j["excluded_years"] = rec.line.excluded;
    j["exclude_after"] = json_optional(rec.exclude_after);
    j["z_threshold"] = rec.z_threshold;

    if (rec.monotonicity) {
        ordered_json m;
        m["direction"] =
            rec.monotonicity->direction == Direction::Decreasing ? "decreasing" : "increasing";
        m["tolerance"] = rec.monotonicity->tolerance;
        m["verdict"] = rec.monotonicity->monotone() ? "monotone" : "violated";
        ordered_json violations = ordered_json::array();
        for (const auto& v : rec.monotonicity->violations) {
            violations.push_back({{"t_prev", v.t_prev},
                                  {"t_next", v.t_next},
                                  {"v_prev", v.v_prev},
                                  {"v_next", v.v_next}});
        }
        m["violations"] = violations;
        j["monotonicity"] = m;
    } else {
        j["monotonicity"] = nullptr;
    }

    ordered_json flags = ordered_json::array();
    for (const auto& f : rec.flags) {
        flags.push_back({{"t", f.t},
                         {"residual", f.residual},
                         {"z", f.z},
                         {"flagged", f.flagged},
                         {"side", f.above_line ? "above_line" : "below_line"},
                         {"excluded", f.excluded}});
    }
    j["deviation_flags"] = flags;

    ordered_json scores = ordered_json::array();
    for (const auto& s : rec.q_scores) {
        ordered_json e;
        e["q"] = s.q;
        e["a"] = s.a;
        e["k"] = s.k;
        e["rss_linearized"] = s.rss_linearized;
        e["rss_value"] = s.valid ? ordered_json(s.rss_value) : ordered_json(nullptr);
        e["valid"] = s.valid;
        scores.push_back(e);
    }
    j["q_scores"] = scores;
    return j;
}

ordered_json break_to_json(const BreakRecord& rec) {
    const BreakReport& report = rec.report;
    ordered_json j;
    j["label"] = rec.label;
    j["n"] = report.n;
    j["candidate_breaks"] = report.candidate_breaks;
    if (report.chow) {
        ordered_json c;
        c["break_year"] = report.chow->break_year;
        c["f"] = report.chow->f;
        c["p_value"] = report.chow->p_value;
        c["dof"] = {report.chow->dof1, report.chow->dof2};
        j["chow"] = c;
    } else {
        j["chow"] = nullptr;
    }
    ordered_json segs = ordered_json::array();
    for (const auto& seg : report.segmentations) {
        ordered_json s;
        s["boundaries"] = seg.boundaries;
        ordered_json parts = ordered_json::array();
        for (const auto& part : seg.segments) {
            parts.push_back({{"t_start", part.t_start},
                             {"t_end", part.t_end},
                             {"n", part.fit.n},
                             {"a", part.fit.a},
                             {"k", part.fit.k},
                             {"rss", part.fit.rss}});
        }
        s["segments"] = parts;
        s["rss"] = seg.rss;
        s["params"] = seg.params;
        s["bic"] = seg.bic;
        segs.push_back(s);
    }
    j["segmentations"] = segs;
    j["best"] = report.best;
    j["verdict"] = report.verdict == Verdict::OneStage ? "one_stage" : "multi_stage";
    j["breakpoints"] = report.breakpoints;
    j["summary"] = rec.summary;
    return j;
}

}  // namespace

std::string emit_json_report(const std::vector<FitRecord>& fits,
                             const std::vector<BreakRecord>& breaks,
                             const std::vector<std::string>& verdicts,
                             const nlohmann::ordered_json& params) {
    ordered_json j;
    j["schema"] = "hypergrowth-report/1";
    j["params"] = params;
    ordered_json jf = ordered_json::array();
    for (const auto& f : fits) jf.push_back(fit_to_json(f));
    j["fits"] = jf;
    ordered_json jb = ordered_json::array();
    for (const auto& b : breaks) jb.push_back(break_to_json(b));
    j["breaks"] = jb;
    j["verdicts"] = verdicts;
    return j.dump(2) + "\n";
}

}  // namespace hypergrowth
