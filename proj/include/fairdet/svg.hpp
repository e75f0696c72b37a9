// fairdet -- subgroup fairness evaluation for speaker verification scores
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Standalone SVG 1.1 renderers for the three visualization types: DET curves
// on normal-deviate axes, score-distribution overlays, and ratio charts
// (single-model bars and two-model scatter).
//
// Rendering is deterministic by construction: fixed element ordering, fixed
// ids, a fixed palette, and all coordinates formatted "%.2f". Identical
// inputs produce byte-identical documents, which is what the golden-file
// tests pin.

#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "fairdet/det.hpp"
#include "fairdet/distribution.hpp"
#include "fairdet/error.hpp"
#include "fairdet/fairness.hpp"

namespace fairdet {

namespace svg {

inline std::string fmt2(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline std::string fmt4(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.4f", v);
  return buf;
}

inline std::string escape(const std::string& s) {
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

// Ordered, distinguishable series palette.
inline const std::vector<std::string>& palette() {
  static const std::vector<std::string> colors = {
      "#1f77b4", "#ff7f0e", "#2ca02c", "#d62728", "#9467bd", "#8c564b",
      "#e377c2", "#7f7f7f", "#bcbd22", "#17becf", "#aec7e8", "#ffbb78",
      "#98df8a", "#ff9896", "#c5b0d5", "#c49c94", "#f7b6d2", "#c7c7c7",
      "#dbdb8d", "#9edae5"};
  return colors;
}

inline const std::string& series_color(std::size_t i) {
  return palette()[i % palette().size()];
}

class Writer {
 public:
  void open(double width, double height) {
    buf_ += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
    buf_ += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt2(width) +
            "\" height=\"" + fmt2(height) + "\" viewBox=\"0 0 " + fmt2(width) + " " +
            fmt2(height) + "\" font-family=\"Helvetica, Arial, sans-serif\">\n";
  }
  void close() { buf_ += "</svg>\n"; }

  void raw(const std::string& s) { buf_ += s; }

  void rect(double x, double y, double w, double h, const std::string& style) {
    buf_ += "<rect x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" width=\"" + fmt2(w) +
            "\" height=\"" + fmt2(h) + "\" " + style + "/>\n";
  }

  void line(double x1, double y1, double x2, double y2, const std::string& style) {
    buf_ += "<line x1=\"" + fmt2(x1) + "\" y1=\"" + fmt2(y1) + "\" x2=\"" + fmt2(x2) +
            "\" y2=\"" + fmt2(y2) + "\" " + style + "/>\n";
  }

  void circle(double cx, double cy, double r, const std::string& style,
              const std::string& title = "") {
    buf_ += "<circle cx=\"" + fmt2(cx) + "\" cy=\"" + fmt2(cy) + "\" r=\"" + fmt2(r) +
            "\" " + style;
    if (title.empty()) {
      buf_ += "/>\n";
    } else {
      buf_ += "><title>" + escape(title) + "</title></circle>\n";
    }
  }

  void path(const std::string& d, const std::string& style,
            const std::string& title = "") {
    buf_ += "<path d=\"" + d + "\" " + style;
    if (title.empty()) {
      buf_ += "/>\n";
    } else {
      buf_ += "><title>" + escape(title) + "</title></path>\n";
    }
  }

  // points are already pixel coordinates.
  void polyline(const std::vector<std::pair<double, double>>& pts,
                const std::string& style) {
    buf_ += "<polyline points=\"";
    for (std::size_t i = 0; i < pts.size(); ++i) {
      if (i) buf_ += ' ';
      buf_ += fmt2(pts[i].first) + "," + fmt2(pts[i].second);
    }
    buf_ += "\" " + style + "/>\n";
  }

  void text(double x, double y, const std::string& content, const std::string& style) {
    buf_ += "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" " + style + ">" +
            escape(content) + "</text>\n";
  }

  void text_rotated(double x, double y, const std::string& content,
                    const std::string& style) {
    buf_ += "<text x=\"" + fmt2(x) + "\" y=\"" + fmt2(y) + "\" transform=\"rotate(-90 " +
            fmt2(x) + " " + fmt2(y) + ")\" " + style + ">" + escape(content) + "</text>\n";
  }

  const std::string& str() const { return buf_; }

 private:
  std::string buf_;
};

// Linear pixel mapping of a data rectangle into the plot area.
struct Frame {
  double width = 760.0, height = 560.0;
  double ml = 72.0, mr = 188.0, mt = 46.0, mb = 58.0;
  double x0 = 0.0, x1 = 1.0, y0 = 0.0, y1 = 1.0;

  double plot_w() const { return width - ml - mr; }
  double plot_h() const { return height - mt - mb; }
  double right() const { return width - mr; }
  double bottom() const { return height - mb; }
  double sx(double x) const { return ml + (x - x0) / (x1 - x0) * plot_w(); }
  double sy(double y) const { return mt + (y1 - y) / (y1 - y0) * plot_h(); }
};

// Grows the canvas when the legend needs more rows than the plot is tall.
inline void fit_legend(Frame& f, std::size_t legend_rows) {
  const double needed = f.mt + 12.0 + 17.0 * static_cast<double>(legend_rows) + f.mb;
  if (needed > f.height) f.height = needed;
}

inline void draw_title(Writer& w, const Frame& f, const std::string& title) {
  if (!title.empty())
    w.text(f.ml + f.plot_w() / 2.0, f.mt - 18.0, title,
           "text-anchor=\"middle\" font-size=\"15\" fill=\"#222222\"");
}

inline void draw_frame_box(Writer& w, const Frame& f) {
  w.rect(f.ml, f.mt, f.plot_w(), f.plot_h(),
         "fill=\"none\" stroke=\"#444444\" stroke-width=\"1\"");
}

inline void draw_axis_titles(Writer& w, const Frame& f, const std::string& x_title,
                             const std::string& y_title) {
  w.text(f.ml + f.plot_w() / 2.0, f.bottom() + 40.0, x_title,
         "text-anchor=\"middle\" font-size=\"13\" fill=\"#222222\"");
  w.text_rotated(f.ml - 48.0, f.mt + f.plot_h() / 2.0, y_title,
                 "text-anchor=\"middle\" font-size=\"13\" fill=\"#222222\"");
}

struct LegendEntry {
  std::string name;
  std::string color;
  std::string dash;    // stroke-dasharray value, empty = solid
  char marker = 0;     // 0 none, 'c' circle, 's' square, 'd' diamond
};

inline void draw_legend(Writer& w, const Frame& f,
                        const std::vector<LegendEntry>& entries) {
  const double lx = f.right() + 14.0;
  double ly = f.mt + 6.0;
  for (const auto& e : entries) {
    if (e.marker == 0) {
      std::string style = "stroke=\"" + e.color + "\" stroke-width=\"2\" fill=\"none\"";
      if (!e.dash.empty()) style += " stroke-dasharray=\"" + e.dash + "\"";
      w.line(lx, ly, lx + 22.0, ly, style);
    } else if (e.marker == 'c') {
      w.circle(lx + 11.0, ly, 4.0, "fill=\"" + e.color + "\"");
    } else if (e.marker == 's') {
      w.rect(lx + 7.0, ly - 4.0, 8.0, 8.0, "fill=\"" + e.color + "\"");
    } else {
      w.path("M" + fmt2(lx + 11.0) + " " + fmt2(ly - 5.0) + "L" + fmt2(lx + 16.0) + " " +
                 fmt2(ly) + "L" + fmt2(lx + 11.0) + " " + fmt2(ly + 5.0) + "L" +
                 fmt2(lx + 6.0) + " " + fmt2(ly) + "Z",
             "fill=\"" + e.color + "\"");
    }
    w.text(lx + 28.0, ly + 4.0, e.name, "font-size=\"11\" fill=\"#222222\"");
    ly += 17.0;
  }
}

// Deterministic polyline thinning: stride-keep, endpoints always retained.
// Used only at render time; analysis-level point sets stay exhaustive.
inline std::vector<std::pair<double, double>> decimate(
    std::vector<std::pair<double, double>> pts, std::size_t max_points = 1500) {
  if (pts.size() <= max_points) return pts;
  const std::size_t stride = (pts.size() + max_points - 1) / max_points;
  std::vector<std::pair<double, double>> out;
  out.reserve(pts.size() / stride + 2);
  for (std::size_t i = 0; i < pts.size(); i += stride) out.push_back(pts[i]);
  if (out.back() != pts.back()) out.push_back(pts.back());
  return out;
}

inline void draw_marker(Writer& w, char kind, double px, double py,
                        const std::string& color, const std::string& title) {
  if (kind == 't') {  // triangle
    w.path("M" + fmt2(px) + " " + fmt2(py - 6.0) + "L" + fmt2(px + 5.5) + " " +
               fmt2(py + 4.5) + "L" + fmt2(px - 5.5) + " " + fmt2(py + 4.5) + "Z",
           "fill=\"" + color + "\" stroke=\"#ffffff\" stroke-width=\"0.8\"", title);
  } else if (kind == 'x') {  // cross
    w.path("M" + fmt2(px - 5.0) + " " + fmt2(py - 5.0) + "L" + fmt2(px + 5.0) + " " +
               fmt2(py + 5.0) + "M" + fmt2(px - 5.0) + " " + fmt2(py + 5.0) + "L" +
               fmt2(px + 5.0) + " " + fmt2(py - 5.0),
           "stroke=\"" + color + "\" stroke-width=\"2.4\" fill=\"none\"", title);
  } else {  // circle
    w.circle(px, py, 4.5,
             "fill=\"none\" stroke=\"" + color + "\" stroke-width=\"2\"", title);
  }
}

// "Nice" tick step for linear axes: 1/2/5 times a power of ten.
inline double nice_step(double range, int target_ticks = 6) {
  if (!(range > 0.0)) return 1.0;
  const double raw = range / static_cast<double>(target_ticks);
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double norm = raw / mag;
  double step;
  if (norm <= 1.0) step = 1.0;
  else if (norm <= 2.0) step = 2.0;
  else if (norm <= 5.0) step = 5.0;
  else step = 10.0;
  return step * mag;
}

inline std::string fmt_tick(double v) {
  if (v != 0.0 && std::abs(v) < 1e-12) v = 0.0;
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

inline void draw_linear_axes(Writer& w, Frame& f) {
  const double xstep = nice_step(f.x1 - f.x0);
  const double ystep = nice_step(f.y1 - f.y0);
  const double x_start = std::ceil(f.x0 / xstep) * xstep;
  const double y_start = std::ceil(f.y0 / ystep) * ystep;
  for (double v = x_start; v <= f.x1 + 1e-9 * xstep; v += xstep) {
    const double px = f.sx(v);
    w.line(px, f.mt, px, f.bottom(), "stroke=\"#dddddd\" stroke-width=\"1\"");
    w.text(px, f.bottom() + 16.0, fmt_tick(v),
           "text-anchor=\"middle\" font-size=\"11\" fill=\"#333333\"");
  }
  for (double v = y_start; v <= f.y1 + 1e-9 * ystep; v += ystep) {
    const double py = f.sy(v);
    w.line(f.ml, py, f.right(), py, "stroke=\"#dddddd\" stroke-width=\"1\"");
    w.text(f.ml - 6.0, py + 4.0, fmt_tick(v),
           "text-anchor=\"end\" font-size=\"11\" fill=\"#333333\"");
  }
}

}  // namespace svg

// --- DET plot ---

struct DetSeries {
  std::string name;
  DetCurvePoints data;
  std::string dash;     // stroke-dasharray; empty = solid
  int color_index = -1;  // palette slot; -1 = position in the series list
};

struct DetPlotStyle {
  std::string title = "Detection error tradeoff";
  double axis_lo = 0.001;  // rate at both axes' low end
  double axis_hi = 0.4;    // rate at both axes' high end
};

inline std::string render_det_svg(const std::vector<DetSeries>& series,
                                  const DetPlotStyle& style = {}) {
  if (series.empty()) throw DataError("DET plot: no series");
  svg::Frame f;
  f.x0 = probit(style.axis_lo);
  f.x1 = probit(style.axis_hi);
  f.y0 = f.x0;
  f.y1 = f.x1;
  svg::fit_legend(f, series.size() + 3);

  svg::Writer w;
  w.open(f.width, f.height);
  w.raw("<defs><clipPath id=\"plot-clip\"><rect x=\"" + svg::fmt2(f.ml) + "\" y=\"" +
        svg::fmt2(f.mt) + "\" width=\"" + svg::fmt2(f.plot_w()) + "\" height=\"" +
        svg::fmt2(f.plot_h()) + "\"/></clipPath></defs>\n");
  svg::draw_title(w, f, style.title);

  // Grid at the conventional tick rates that fall inside the axis range.
  for (double tick : det_axis_ticks()) {
    if (tick < style.axis_lo - 1e-15 || tick > style.axis_hi + 1e-15) continue;
    const double t = probit(tick);
    const double pct = tick * 100.0;
    char label[16];
    std::snprintf(label, sizeof(label), pct < 1.0 ? "%.1f" : "%.0f", pct);
    w.line(f.sx(t), f.mt, f.sx(t), f.bottom(), "stroke=\"#dddddd\" stroke-width=\"1\"");
    w.text(f.sx(t), f.bottom() + 16.0, label,
           "text-anchor=\"middle\" font-size=\"11\" fill=\"#333333\"");
    w.line(f.ml, f.sy(t), f.right(), f.sy(t), "stroke=\"#dddddd\" stroke-width=\"1\"");
    w.text(f.ml - 6.0, f.sy(t) + 4.0, label,
           "text-anchor=\"end\" font-size=\"11\" fill=\"#333333\"");
  }
  svg::draw_frame_box(w, f);
  svg::draw_axis_titles(w, f, "False positive rate (%)", "False negative rate (%)");

  std::vector<svg::LegendEntry> legend;
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string& color =
        svg::series_color(s.color_index >= 0 ? static_cast<std::size_t>(s.color_index) : si);
    std::vector<std::pair<double, double>> pts;
    pts.reserve(s.data.points.size());
    for (const auto& p : s.data.points) pts.emplace_back(f.sx(p.x), f.sy(p.y));
    pts = svg::decimate(std::move(pts));
    std::string line_style = "fill=\"none\" stroke=\"" + color +
                             "\" stroke-width=\"1.6\" clip-path=\"url(#plot-clip)\"";
    if (!s.dash.empty()) line_style += " stroke-dasharray=\"" + s.dash + "\"";
    w.polyline(pts, line_style);
    legend.push_back({s.name, color, s.dash, 0});
  }
  // Markers drawn after every curve so they stay on top.
  for (std::size_t si = 0; si < series.size(); ++si) {
    const auto& s = series[si];
    const std::string& color =
        svg::series_color(s.color_index >= 0 ? static_cast<std::size_t>(s.color_index) : si);
    for (const auto& m : s.data.markers) {
      const char kind = m.kind == MarkerKind::kOverallMinCost ? 't'
                        : m.kind == MarkerKind::kSubgroupMinCost ? 'x'
                                                                 : 'o';
      svg::draw_marker(w, kind, f.sx(m.x), f.sy(m.y), color, s.name + ": " + m.label);
    }
  }
  legend.push_back({"triangle: pooled-optimum point", "#555555", "", 0});
  legend.push_back({"cross: subgroup-optimum point", "#555555", "", 0});
  legend.push_back({"circle: equal-error point", "#555555", "", 0});
  svg::draw_legend(w, f, legend);
  w.close();
  return w.str();
}

// --- Score-distribution overlay ---

struct DistributionSeries {
  std::string name;
  DistributionSummary summary;
  std::size_t color_index = 0;
};

struct DistributionPlotStyle {
  std::string title = "Score distributions";
};

inline std::string render_distribution_svg(const std::vector<DistributionSeries>& series,
                                           const DistributionPlotStyle& style = {}) {
  if (series.empty()) throw DataError("distribution plot: no series");

  double xlo = 0.0, xhi = 0.0, yhi = 0.0;
  bool first = true;
  for (const auto& s : series) {
    const auto& sum = s.summary;
    const double lo = sum.kde ? sum.kde->grid.front() : sum.histogram.edges.front();
    const double hi = sum.kde ? sum.kde->grid.back() : sum.histogram.edges.back();
    double dmax = 0.0;
    if (sum.kde)
      for (double d : sum.kde->density) dmax = std::max(dmax, d);
    else
      for (double d : sum.histogram.densities) dmax = std::max(dmax, d);
    if (first) { xlo = lo; xhi = hi; first = false; }
    xlo = std::min(xlo, lo);
    xhi = std::max(xhi, hi);
    yhi = std::max(yhi, dmax);
  }
  if (xhi == xlo) { xlo -= 1.0; xhi += 1.0; }
  if (yhi == 0.0) yhi = 1.0;

  svg::Frame f;
  f.x0 = xlo;
  f.x1 = xhi;
  f.y0 = 0.0;
  f.y1 = yhi * 1.08;
  svg::fit_legend(f, series.size());

  svg::Writer w;
  w.open(f.width, f.height);
  svg::draw_title(w, f, style.title);
  svg::draw_linear_axes(w, f);
  svg::draw_frame_box(w, f);
  svg::draw_axis_titles(w, f, "Score", "Density");

  std::vector<svg::LegendEntry> legend;
  for (const auto& s : series) {
    const std::string& color = svg::series_color(s.color_index);
    const std::string dash = s.summary.is_target ? "" : "5,4";
    std::vector<std::pair<double, double>> pts;
    if (s.summary.kde) {
      const auto& k = *s.summary.kde;
      pts.reserve(k.grid.size());
      for (std::size_t i = 0; i < k.grid.size(); ++i)
        pts.emplace_back(f.sx(k.grid[i]), f.sy(k.density[i]));
    } else {
      // Degenerate sample: draw the histogram outline.
      const auto& h = s.summary.histogram;
      pts.emplace_back(f.sx(h.edges.front()), f.sy(0.0));
      for (std::size_t b = 0; b < h.densities.size(); ++b) {
        pts.emplace_back(f.sx(h.edges[b]), f.sy(h.densities[b]));
        pts.emplace_back(f.sx(h.edges[b + 1]), f.sy(h.densities[b]));
      }
      pts.emplace_back(f.sx(h.edges.back()), f.sy(0.0));
    }
    std::string line_style =
        "fill=\"none\" stroke=\"" + color + "\" stroke-width=\"1.6\"";
    if (!dash.empty()) line_style += " stroke-dasharray=\"" + dash + "\"";
    w.polyline(pts, line_style);
    legend.push_back({s.name, color, dash, 0});
  }
  svg::draw_legend(w, f, legend);
  w.close();
  return w.str();
}

// --- Ratio scatter (two-model comparison) ---

struct ScatterPoint {
  std::string name;
  double x = 0.0;   // model A ratio
  double y = 0.0;   // model B ratio
  char marker = 'd';  // 'c' / 's' / 'd' by trailing sex attribute when present
};

struct RatioScatter {
  std::vector<ScatterPoint> points;
  std::string label_a = "model A";
  std::string label_b = "model B";
};

// Builds scatter data from comparison rows: x = model A's ratio, y = model
// B's. Marker shape keys off a trailing "m"/"f" attribute value when the
// subgroup has one.
inline RatioScatter ratio_scatter(const std::vector<ComparisonRow>& rows,
                                  const std::string& label_a,
                                  const std::string& label_b) {
  if (rows.empty()) throw DataError("ratio scatter: no rows");
  RatioScatter s;
  s.label_a = label_a;
  s.label_b = label_b;
  s.points.reserve(rows.size());
  for (const auto& r : rows) {
    ScatterPoint p;
    p.name = r.subgroup.display();
    p.x = r.ratio_a;
    p.y = r.ratio_b;
    const std::string& last = r.subgroup.values.back();
    p.marker = last == "f" ? 'c' : last == "m" ? 's' : 'd';
    s.points.push_back(std::move(p));
  }
  return s;
}

struct ScatterPlotStyle {
  std::string title = "Subgroup cost ratios: model vs model";
};

inline std::string render_scatter_svg(const RatioScatter& scatter,
                                      const ScatterPlotStyle& style = {}) {
  if (scatter.points.empty()) throw DataError("ratio scatter: no points");
  double hi = 1.0;
  for (const auto& p : scatter.points) hi = std::max({hi, p.x, p.y});
  hi *= 1.12;

  svg::Frame f;
  f.x0 = 0.0;
  f.x1 = hi;
  f.y0 = 0.0;
  f.y1 = hi;

  svg::Writer w;
  w.open(f.width, f.height);
  svg::draw_title(w, f, style.title);
  svg::draw_linear_axes(w, f);
  svg::draw_frame_box(w, f);
  svg::draw_axis_titles(w, f, scatter.label_a + " ratio", scatter.label_b + " ratio");

  // Identity diagonal: points below it favor model B, above favor model A.
  w.line(f.sx(0.0), f.sy(0.0), f.sx(hi), f.sy(hi),
         "stroke=\"#888888\" stroke-width=\"1\" stroke-dasharray=\"6,5\"");

  for (const auto& p : scatter.points) {
    const double px = f.sx(p.x), py = f.sy(p.y);
    const std::string title = p.name + " (" + svg::fmt4(p.x) + ", " + svg::fmt4(p.y) + ")";
    if (p.marker == 'c') {
      w.circle(px, py, 4.0, "fill=\"#1f77b4\"", title);
    } else if (p.marker == 's') {
      w.rect(px - 4.0, py - 4.0, 8.0, 8.0, "fill=\"#d62728\"");
    } else {
      w.path("M" + svg::fmt2(px) + " " + svg::fmt2(py - 5.0) + "L" + svg::fmt2(px + 5.0) +
                 " " + svg::fmt2(py) + "L" + svg::fmt2(px) + " " + svg::fmt2(py + 5.0) +
                 "L" + svg::fmt2(px - 5.0) + " " + svg::fmt2(py) + "Z",
             "fill=\"#2ca02c\"", title);
    }
    w.text(px + 6.0, py - 6.0, p.name, "font-size=\"10\" fill=\"#333333\"");
  }

  std::vector<svg::LegendEntry> legend;
  legend.push_back({"circle: *_f subgroups", "#1f77b4", "", 'c'});
  legend.push_back({"square: *_m subgroups", "#d62728", "", 's'});
  legend.push_back({"diamond: other subgroups", "#2ca02c", "", 'd'});
  legend.push_back({"dashed: equal ratios", "#888888", "6,5", 0});
  legend.push_back({"below it: " + scatter.label_b + " better", "#888888", "", 0});
  legend.push_back({"above it: " + scatter.label_a + " better", "#888888", "", 0});
  svg::draw_legend(w, f, legend);
  w.close();
  return w.str();
}

// --- Single-model ratio bars ---

struct RatioChartStyle {
  std::string title;  // defaults to "<model> subgroup cost ratios"
};

inline std::string render_ratio_chart_svg(const FairnessReport& report,
                                          const RatioChartStyle& style = {}) {
  if (report.subgroups.empty()) throw DataError("ratio chart: report has no subgroups");
  const std::string title =
      !style.title.empty()
          ? style.title
          : (report.model_name.empty() ? std::string("Subgroup cost ratios")
                                       : report.model_name + " subgroup cost ratios");

  double hi = 1.0;
  for (const auto& m : report.subgroups) hi = std::max(hi, m.ratio_overall_min);
  hi *= 1.15;

  const double row_h = 22.0;
  svg::Frame f;
  f.ml = 150.0;
  f.mr = 60.0;
  f.height = f.mt + row_h * static_cast<double>(report.subgroups.size()) + f.mb;
  f.x0 = 0.0;
  f.x1 = hi;
  f.y0 = 0.0;
  f.y1 = 1.0;

  svg::Writer w;
  w.open(f.width, f.height);
  svg::draw_title(w, f, title);

  const double xstep = svg::nice_step(hi);
  for (double v = 0.0; v <= hi + 1e-9 * xstep; v += xstep) {
    const double px = f.sx(v);
    w.line(px, f.mt, px, f.bottom(), "stroke=\"#dddddd\" stroke-width=\"1\"");
    w.text(px, f.bottom() + 16.0, svg::fmt_tick(v),
           "text-anchor=\"middle\" font-size=\"11\" fill=\"#333333\"");
  }

  double y = f.mt + 4.0;
  for (const auto& m : report.subgroups) {
    const double ratio = m.ratio_overall_min;
    const std::string color = ratio > 1.0 ? "#d62728" : "#17a2a8";
    w.rect(f.sx(0.0), y, std::max(f.sx(ratio) - f.sx(0.0), 0.5), row_h - 8.0,
           "fill=\"" + color + "\"");
    w.text(f.ml - 8.0, y + row_h / 2.0 + 1.0, m.subgroup.display(),
           "text-anchor=\"end\" font-size=\"11\" fill=\"#222222\"");
    w.text(f.sx(ratio) + 4.0, y + row_h / 2.0 + 1.0, svg::fmt4(ratio),
           "font-size=\"10\" fill=\"#333333\"");
    y += row_h;
  }
  // Parity reference: ratio = 1 (subgroup matches the pooled average).
  w.line(f.sx(1.0), f.mt, f.sx(1.0), f.bottom(),
         "stroke=\"#444444\" stroke-width=\"1.2\" stroke-dasharray=\"4,3\"");
  svg::draw_frame_box(w, f);
  w.text(f.ml + f.plot_w() / 2.0, f.bottom() + 40.0,
         "subgroup cost at pooled optimum / pooled cost",
         "text-anchor=\"middle\" font-size=\"13\" fill=\"#222222\"");
  w.close();
  return w.str();
}

}  // namespace fairdet
