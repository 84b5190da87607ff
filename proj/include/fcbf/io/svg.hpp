#pragma once
// Minimal native SVG plotting: panels with linear axes, tick labels, polyline
// series, optional reference circles and a legend.

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fcbf/sim.hpp"

namespace fcbf::io {

struct Series {
  std::string label;
  std::vector<double> x;
  std::vector<double> y;
};

struct Circle {
  double cx = 0.0, cy = 0.0, r = 0.0;
  std::string fill;
  std::string label;
};

struct Panel {
  std::string title;
  std::string xlabel;
  std::string ylabel;
  std::vector<Series> series;
  std::vector<Circle> circles;
  bool equal_aspect = false;
};

namespace svg_detail {

inline const char* color(std::size_t i) {
  static const char* palette[] = {"#c2189b", "#1f5fbf", "#d62728", "#2ca02c",
                                  "#ff7f0e", "#6a3d9a", "#17becf", "#8c564b"};
  return palette[i % (sizeof(palette) / sizeof(palette[0]))];
}

inline std::string esc(const std::string& s) {
  std::string o;
  for (char ch : s) {
    switch (ch) {
      case '&': o += "&amp;"; break;
      case '<': o += "&lt;"; break;
      case '>': o += "&gt;"; break;
      case '"': o += "&quot;"; break;
      default: o += ch;
    }
  }
  return o;
}

/// Tick spacing of 1, 2 or 5 times a power of ten giving about `target` ticks.
inline double nice_step(double span, int target = 5) {
  if (!(span > 0.0)) return 1.0;
  const double raw = span / target;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  const double f = raw / mag;
  return (f < 1.5 ? 1.0 : f < 3.5 ? 2.0 : f < 7.5 ? 5.0 : 10.0) * mag;
}

struct Range {
  double lo = std::numeric_limits<double>::infinity();
  double hi = -std::numeric_limits<double>::infinity();
  void add(double v) {
    if (!std::isfinite(v)) return;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  void finalize() {
    if (!std::isfinite(lo)) lo = 0.0, hi = 1.0;
    if (hi - lo < 1e-12 * std::max(1.0, std::abs(hi))) {
      const double pad = std::max(1.0, std::abs(hi)) * 0.05;
      lo -= pad;
      hi += pad;
    }
    const double pad = 0.04 * (hi - lo);
    lo -= pad;
    hi += pad;
  }
};

inline std::string num(double v) {
  if (std::abs(v) < 1e-12) return "0";
  return fmt::format("{:.4g}", v);
}

}  // namespace svg_detail

/// Render panels on a grid with `columns` panels per row.
inline std::string render_svg(const std::vector<Panel>& panels, int columns = 2,
                              double panel_w = 460, double panel_h = 340) {
  using namespace svg_detail;
  const int ncols = std::max(1, std::min<int>(columns, static_cast<int>(panels.size())));
  const int nrows = (static_cast<int>(panels.size()) + ncols - 1) / ncols;
  const double W = ncols * panel_w, H = std::max(1, nrows) * panel_h;
  std::string s = fmt::format(
      "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"{0}\" height=\"{1}\" viewBox=\"0 0 {0} {1}\" "
      "font-family=\"sans-serif\" font-size=\"11\">\n<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n",
      W, H);
  const double ml = 62, mr = 14, mt = 28, mb = 42;
  for (std::size_t pi = 0; pi < panels.size(); ++pi) {
    const auto& p = panels[pi];
    const double ox = static_cast<double>(pi % ncols) * panel_w;
    const double oy = static_cast<double>(pi / ncols) * panel_h;
    const double pw = panel_w - ml - mr, ph = panel_h - mt - mb;

    Range rx, ry;
    for (const auto& se : p.series) {
      for (double v : se.x) rx.add(v);
      for (double v : se.y) ry.add(v);
    }
    for (const auto& c : p.circles) {
      rx.add(c.cx - c.r), rx.add(c.cx + c.r);
      ry.add(c.cy - c.r), ry.add(c.cy + c.r);
    }
    rx.finalize();
    ry.finalize();
    if (p.equal_aspect) {
      // Same data units per pixel on both axes.
      const double upp = std::max((rx.hi - rx.lo) / pw, (ry.hi - ry.lo) / ph);
      const double cx = 0.5 * (rx.lo + rx.hi), cy = 0.5 * (ry.lo + ry.hi);
      rx.lo = cx - 0.5 * upp * pw, rx.hi = cx + 0.5 * upp * pw;
      ry.lo = cy - 0.5 * upp * ph, ry.hi = cy + 0.5 * upp * ph;
    }
    auto X = [&](double v) { return ox + ml + (v - rx.lo) / (rx.hi - rx.lo) * pw; };
    auto Y = [&](double v) { return oy + mt + (ry.hi - v) / (ry.hi - ry.lo) * ph; };

    s += fmt::format("<g>\n<text x=\"{}\" y=\"{}\" text-anchor=\"middle\" font-size=\"13\">{}</text>\n",
                     ox + ml + pw / 2, oy + 18, esc(p.title));
    s += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" stroke=\"#444\"/>\n",
                     ox + ml, oy + mt, pw, ph);
    const double sx = nice_step(rx.hi - rx.lo), sy = nice_step(ry.hi - ry.lo);
    for (double v = std::ceil(rx.lo / sx) * sx; v <= rx.hi; v += sx) {
      s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{0:.2f}\" y2=\"{2:.2f}\" stroke=\"#ddd\"/>"
                       "<text x=\"{0:.2f}\" y=\"{3:.2f}\" text-anchor=\"middle\">{4}</text>\n",
                       X(v), oy + mt, oy + mt + ph, oy + mt + ph + 14, num(v));
    }
    for (double v = std::ceil(ry.lo / sy) * sy; v <= ry.hi; v += sy) {
      s += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1:.2f}\" x2=\"{2:.2f}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>"
                       "<text x=\"{3:.2f}\" y=\"{4:.2f}\" text-anchor=\"end\">{5}</text>\n",
                       ox + ml, Y(v), ox + ml + pw, ox + ml - 4, Y(v) + 4, num(v));
    }
    s += fmt::format("<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n", ox + ml + pw / 2,
                     oy + panel_h - 8, esc(p.xlabel));
    s += fmt::format(
        "<text x=\"{0}\" y=\"{1}\" text-anchor=\"middle\" transform=\"rotate(-90 {0} {1})\">{2}</text>\n",
        ox + 14, oy + mt + ph / 2, esc(p.ylabel));

    s += fmt::format("<clipPath id=\"clip{}\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/></clipPath>\n",
                     pi, ox + ml, oy + mt, pw, ph);
    s += fmt::format("<g clip-path=\"url(#clip{})\">\n", pi);
    for (const auto& c : p.circles) {
      const double rpx = c.r / (rx.hi - rx.lo) * pw;
      const double rpy = c.r / (ry.hi - ry.lo) * ph;
      s += fmt::format("<ellipse cx=\"{:.2f}\" cy=\"{:.2f}\" rx=\"{:.2f}\" ry=\"{:.2f}\" fill=\"{}\" "
                       "fill-opacity=\"0.35\" stroke=\"#555\"><title>{}</title></ellipse>\n",
                       X(c.cx), Y(c.cy), rpx, rpy, c.fill, esc(c.label));
    }
    for (std::size_t k = 0; k < p.series.size(); ++k) {
      const auto& se = p.series[k];
      std::string pts;
      for (std::size_t i = 0; i < se.x.size() && i < se.y.size(); ++i) {
        if (!std::isfinite(se.x[i]) || !std::isfinite(se.y[i])) continue;
        pts += fmt::format("{:.2f},{:.2f} ", X(se.x[i]), Y(se.y[i]));
      }
      s += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.6\" points=\"{}\"/>\n",
                       color(k), pts);
    }
    s += "</g>\n";
    for (std::size_t k = 0; k < p.series.size(); ++k) {
      const double ly = oy + mt + 14 + 14 * static_cast<double>(k);
      s += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" stroke-width=\"2\"/>"
                       "<text x=\"{4}\" y=\"{5}\">{6}</text>\n",
                       ox + ml + pw - 130, ly, ox + ml + pw - 112, color(k), ox + ml + pw - 108, ly + 4,
                       esc(p.series[k].label));
    }
    s += "</g>\n";
  }
  s += "</svg>\n";
  return s;
}

/// Overlay of several runs: plane trajectory, both applied inputs and the
/// barrier value over time. Obstacle and goal discs are drawn only when the
/// scenario is supplied; everything else comes from the log records.
inline std::string trajectory_figure(const std::vector<std::pair<std::string, TrajectoryLog>>& runs,
                                     const std::optional<UnicycleParams>& scene = std::nullopt) {
  Panel plane{"Trajectory", "x (m)", "y (m)", {}, {}, true};
  Panel u1{"Applied input u1", "t (s)", "u1 (rad/s)", {}, {}, false};
  Panel u2{"Applied input u2", "t (s)", "u2 (N)", {}, {}, false};
  Panel b{"Barrier b(x)", "t (s)", "b", {}, {}, false};
  for (const auto& [name, log] : runs) {
    Series sp{name, {}, {}}, s1{name, {}, {}}, s2{name, {}, {}}, sb{name, {}, {}};
    for (const auto& r : log.records) {
      sp.x.push_back(r.state.x);
      sp.y.push_back(r.state.y);
      sb.x.push_back(r.t);
      sb.y.push_back(r.b);
      if (r.u) {
        s1.x.push_back(r.t);
        s1.y.push_back((*r.u)[0]);
        s2.x.push_back(r.t);
        s2.y.push_back((*r.u)[1]);
      }
    }
    plane.series.push_back(std::move(sp));
    u1.series.push_back(std::move(s1));
    u2.series.push_back(std::move(s2));
    b.series.push_back(std::move(sb));
  }
  if (scene) {
    plane.circles.push_back({scene->obstacle_x, scene->obstacle_y, scene->obstacle_r, "#f4a6a6", "obstacle"});
    plane.circles.push_back({scene->goal_x, scene->goal_y, scene->goal_tol_rd, "#7fd67f", "goal"});
  }
  return render_svg({plane, u1, u2, b});
}

}  // namespace fcbf::io
