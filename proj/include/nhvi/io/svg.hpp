#pragma once

// Minimal SVG 1.1 line charts: linear axes with ticks, one polyline per
// series, an optional legend and scatter markers. Long series are thinned
// to a per-pixel min/max envelope before drawing.

#include <fmt/format.h>

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <limits>
#include <numbers>
#include <string>
#include <vector>

#include "nhvi/diagnostics.hpp"
#include "nhvi/errors.hpp"
#include "nhvi/integrator.hpp"

namespace nhvi::io {

struct Series {
  std::string label;
  std::string color = "#1f77b4";
  std::vector<double> x{};
  std::vector<double> y{};
  bool markers = false;  ///< draw points instead of a polyline
  bool dashed = false;
};

class LineChart {
 public:
  LineChart(std::string title, std::string x_label, std::string y_label)
      : title_(std::move(title)), x_label_(std::move(x_label)), y_label_(std::move(y_label)) {}

  void add(Series s) { series_.push_back(std::move(s)); }
  void equal_aspect(bool on) { equal_aspect_ = on; }
  void max_points(std::size_t n) { max_points_ = n; }

  [[nodiscard]] std::string render() const;

  void save(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw Error(ErrorKind::EvaluationFailure, "cannot write '" + path.string() + "'");
    out << render();
  }

 private:
  struct Range {
    double lo = std::numeric_limits<double>::infinity();
    double hi = -std::numeric_limits<double>::infinity();
    void add(double v) {
      if (!std::isfinite(v)) return;
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
    void pad() {
      if (!(lo <= hi)) lo = 0.0, hi = 1.0;
      double span = hi - lo;
      if (span <= 1e-12 * std::max(1.0, std::abs(hi))) span = std::max(1.0, std::abs(hi)) * 1e-3;
      lo -= 0.05 * span;
      hi += 0.05 * span;
    }
  };

  static std::vector<double> ticks(double lo, double hi) {
    const double raw = (hi - lo) / 6.0;
    const double mag = std::pow(10.0, std::floor(std::log10(raw)));
    double step = mag;
    for (double f : {1.0, 2.0, 2.5, 5.0, 10.0}) {
      step = f * mag;
      if (step >= raw) break;
    }
    std::vector<double> out;
    for (double t = std::ceil(lo / step) * step; t <= hi + 1e-9 * step; t += step) {
      out.push_back(std::abs(t) < 1e-12 * step ? 0.0 : t);
    }
    return out;
  }

  // Keeps the first, min, max and last sample of each bucket, in order.
  std::vector<std::size_t> thin(const Series& s) const {
    const std::size_t n = std::min(s.x.size(), s.y.size());
    std::vector<std::size_t> idx;
    if (n <= max_points_) {
      for (std::size_t i = 0; i < n; ++i) idx.push_back(i);
      return idx;
    }
    const std::size_t buckets = max_points_ / 4;
    for (std::size_t b = 0; b < buckets; ++b) {
      const std::size_t lo = b * n / buckets;
      const std::size_t hi = (b + 1) * n / buckets;
      if (lo >= hi) continue;
      std::size_t imin = lo, imax = lo;
      for (std::size_t i = lo; i < hi; ++i) {
        if (s.y[i] < s.y[imin]) imin = i;
        if (s.y[i] > s.y[imax]) imax = i;
      }
      std::vector<std::size_t> pick{lo, imin, imax, hi - 1};
      std::sort(pick.begin(), pick.end());
      pick.erase(std::unique(pick.begin(), pick.end()), pick.end());
      idx.insert(idx.end(), pick.begin(), pick.end());
    }
    return idx;
  }

  std::string title_, x_label_, y_label_;
  std::vector<Series> series_;
  bool equal_aspect_ = false;
  std::size_t max_points_ = 4000;
};

inline std::string LineChart::render() const {
  constexpr double W = 800, H = 500, left = 80, right = 20, top = 40, bottom = 60;
  const double pw = W - left - right, ph = H - top - bottom;

  Range xr, yr;
  for (const Series& s : series_) {
    for (double v : s.x) xr.add(v);
    for (double v : s.y) yr.add(v);
  }
  xr.pad();
  yr.pad();
  if (equal_aspect_) {
    const double sx = (xr.hi - xr.lo) / pw, sy = (yr.hi - yr.lo) / ph;
    if (sx > sy) {
      const double mid = 0.5 * (yr.lo + yr.hi), half = 0.5 * sx * ph;
      yr.lo = mid - half, yr.hi = mid + half;
    } else {
      const double mid = 0.5 * (xr.lo + xr.hi), half = 0.5 * sy * pw;
      xr.lo = mid - half, xr.hi = mid + half;
    }
  }
  auto px = [&](double x) { return left + (x - xr.lo) / (xr.hi - xr.lo) * pw; };
  auto py = [&](double y) { return top + ph - (y - yr.lo) / (yr.hi - yr.lo) * ph; };

  std::string svg = fmt::format(
      "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n"
      "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"{0}\" height=\"{1}\" "
      "viewBox=\"0 0 {0} {1}\" font-family=\"sans-serif\" font-size=\"12\">\n"
      "<rect width=\"{0}\" height=\"{1}\" fill=\"white\"/>\n"
      "<text x=\"{2}\" y=\"24\" text-anchor=\"middle\" font-size=\"15\">{3}</text>\n",
      W, H, W / 2, title_);

  svg += fmt::format("<rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\" fill=\"none\" "
                     "stroke=\"black\"/>\n",
                     left, top, pw, ph);
  for (double t : ticks(xr.lo, xr.hi)) {
    const double x = px(t);
    svg += fmt::format("<line x1=\"{0:.2f}\" y1=\"{1}\" x2=\"{0:.2f}\" y2=\"{2}\" stroke=\"#ddd\"/>"
                       "<text x=\"{0:.2f}\" y=\"{3}\" text-anchor=\"middle\">{4:g}</text>\n",
                       x, top, top + ph, top + ph + 16, t);
  }
  for (double t : ticks(yr.lo, yr.hi)) {
    const double y = py(t);
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1:.2f}\" x2=\"{2}\" y2=\"{1:.2f}\" stroke=\"#ddd\"/>"
                       "<text x=\"{3}\" y=\"{4:.2f}\" text-anchor=\"end\">{5:.6g}</text>\n",
                       left, y, left + pw, left - 6, y + 4, t);
  }
  svg += fmt::format(
      "<text x=\"{}\" y=\"{}\" text-anchor=\"middle\">{}</text>\n"
      "<text x=\"16\" y=\"{}\" text-anchor=\"middle\" transform=\"rotate(-90 16 {})\">{}</text>\n",
      left + pw / 2, H - 18, x_label_, top + ph / 2, top + ph / 2, y_label_);

  svg += fmt::format("<clipPath id=\"plot\"><rect x=\"{}\" y=\"{}\" width=\"{}\" height=\"{}\"/>"
                     "</clipPath>\n<g clip-path=\"url(#plot)\">\n",
                     left, top, pw, ph);
  for (const Series& s : series_) {
    const auto idx = thin(s);
    if (s.markers) {
      for (std::size_t i : idx) {
        svg += fmt::format("<circle cx=\"{:.2f}\" cy=\"{:.2f}\" r=\"3\" fill=\"{}\"/>\n",
                           px(s.x[i]), py(s.y[i]), s.color);
      }
      continue;
    }
    svg += fmt::format("<polyline fill=\"none\" stroke=\"{}\" stroke-width=\"1.3\"{} points=\"",
                       s.color, s.dashed ? " stroke-dasharray=\"6 4\"" : "");
    for (std::size_t i : idx) {
      if (!std::isfinite(s.x[i]) || !std::isfinite(s.y[i])) continue;
      svg += fmt::format("{:.2f},{:.2f} ", px(s.x[i]), py(s.y[i]));
    }
    svg += "\"/>\n";
  }
  svg += "</g>\n";

  double ly = top + 14;
  for (const Series& s : series_) {
    if (s.label.empty()) continue;
    svg += fmt::format("<line x1=\"{0}\" y1=\"{1}\" x2=\"{2}\" y2=\"{1}\" stroke=\"{3}\" "
                       "stroke-width=\"2\"/><text x=\"{4}\" y=\"{5}\">{6}</text>\n",
                       left + pw - 120, ly, left + pw - 100, s.color, left + pw - 94, ly + 4,
                       s.label);
    ly += 16;
  }
  svg += "</svg>\n";
  return svg;
}

inline const char* palette(std::size_t i) {
  static const char* colors[] = {"#1f77b4", "#d62728", "#2ca02c", "#9467bd", "#ff7f0e"};
  return colors[i % 5];
}

/// Discrete energy against time, with impact nodes marked.
[[nodiscard]] inline LineChart energy_chart(const Trajectory& traj, const DiscreteLagrangian& ld) {
  LineChart chart("Discrete energy", "t", "E");
  Series line{"E", palette(0)};
  Series hits{"impact", palette(1)};
  hits.markers = true;
  for (const EnergySample& e : energy_series(traj, ld)) {
    line.x.push_back(e.t);
    line.y.push_back(e.energy);
    if (e.impact) {
      hits.x.push_back(e.t);
      hits.y.push_back(e.energy);
    }
  }
  chart.add(std::move(line));
  if (!hits.x.empty()) chart.add(std::move(hits));
  return chart;
}

/// Every configuration coordinate against time.
[[nodiscard]] inline LineChart coordinates_chart(const Trajectory& traj,
                                                 const MechanicalModel& model) {
  LineChart chart("Configuration", "t", "q");
  const auto names = model.coordinate_names();
  for (int i = 0; i < model.dim(); ++i) {
    Series s{names[static_cast<std::size_t>(i)], palette(static_cast<std::size_t>(i))};
    for (const State& st : traj.states) {
      s.x.push_back(st.t);
      s.y.push_back(st.q[i]);
    }
    chart.add(std::move(s));
  }
  return chart;
}

/// Path in the physical plane: the centre (x, y) for the particle and the
/// rigid body; for the pendulum the bob seen from above, with the cylinder.
[[nodiscard]] inline LineChart plane_chart(const Trajectory& traj, const MechanicalModel& model) {
  LineChart chart("Trajectory", "x", "y");
  chart.equal_aspect(true);
  Series path{"path", "black"};
  path.dashed = true;
  const std::string_view name = model.name();
  const auto params = model.params();
  for (const State& st : traj.states) {
    if (name == "pendulum") {
      const double l = params.at("length");
      path.x.push_back(l * std::sin(st.q[0]) * std::cos(st.q[1]));
      path.y.push_back(l * std::sin(st.q[0]) * std::sin(st.q[1]));
    } else if (name == "se2_body") {
      path.x.push_back(st.q[1]);
      path.y.push_back(st.q[2]);
    } else {
      path.x.push_back(st.q[0]);
      path.y.push_back(st.q[1]);
    }
  }
  if (name == "pendulum") {
    Series wall{"wall", palette(1)};
    const double r = params.at("radius");
    for (int i = 0; i <= 360; ++i) {
      const double a = 2.0 * std::numbers::pi * i / 360.0;
      wall.x.push_back(r * std::cos(a));
      wall.y.push_back(r * std::sin(a));
    }
    chart.add(std::move(wall));
  }
  chart.add(std::move(path));
  return chart;
}

}  // namespace nhvi::io
