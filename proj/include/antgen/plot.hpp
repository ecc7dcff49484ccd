#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <string>
#include <vector>

#include "antgen/core.hpp"
#include "antgen/intensity.hpp"
#include "antgen/io.hpp"
#include "antgen/stats.hpp"

namespace antgen {

namespace detail {

constexpr double kSvgWidth = 640.0;
constexpr double kSvgHeight = 480.0;
constexpr double kMarginLeft = 56.0;
constexpr double kMarginRight = 20.0;
constexpr double kMarginTop = 20.0;
constexpr double kMarginBottom = 44.0;

struct SvgAxes {
  double x_lo, x_hi, y_lo, y_hi;

  double px(double x) const {
    return kMarginLeft + (x - x_lo) / (x_hi - x_lo) * (kSvgWidth - kMarginLeft - kMarginRight);
  }
  double py(double y) const {
    return kSvgHeight - kMarginBottom -
           (y - y_lo) / (y_hi - y_lo) * (kSvgHeight - kMarginTop - kMarginBottom);
  }
};

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2f", v);
  return buf;
}

inline std::string tick_label(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.4g", v);
  return buf;
}

inline void svg_open(std::string& out) {
  out += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"640\" height=\"480\" "
         "viewBox=\"0 0 640 480\">\n";
  out += "<rect x=\"0\" y=\"0\" width=\"640\" height=\"480\" fill=\"white\"/>\n";
}

inline void svg_axes(std::string& out, const SvgAxes& ax) {
  const double x0 = kMarginLeft, x1 = kSvgWidth - kMarginRight;
  const double y0 = kSvgHeight - kMarginBottom, y1 = kMarginTop;
  out += "<line x1=\"" + svg_num(x0) + "\" y1=\"" + svg_num(y0) + "\" x2=\"" + svg_num(x1) +
         "\" y2=\"" + svg_num(y0) + "\" stroke=\"black\"/>\n";
  out += "<line x1=\"" + svg_num(x0) + "\" y1=\"" + svg_num(y0) + "\" x2=\"" + svg_num(x0) +
         "\" y2=\"" + svg_num(y1) + "\" stroke=\"black\"/>\n";
  for (int k = 0; k <= 4; ++k) {
    const double fx = ax.x_lo + (ax.x_hi - ax.x_lo) * k / 4.0;
    const double fy = ax.y_lo + (ax.y_hi - ax.y_lo) * k / 4.0;
    out += "<text x=\"" + svg_num(ax.px(fx)) + "\" y=\"" + svg_num(y0 + 16.0) +
           "\" font-size=\"11\" text-anchor=\"middle\">" + tick_label(fx) + "</text>\n";
    out += "<text x=\"" + svg_num(x0 - 6.0) + "\" y=\"" + svg_num(ax.py(fy) + 4.0) +
           "\" font-size=\"11\" text-anchor=\"end\">" + tick_label(fy) + "</text>\n";
  }
}

inline std::string svg_close() { return "</svg>\n"; }

// Three-stop colormap from dark purple through teal to yellow.
inline std::string heat_color(double t) {
  static const double stops[3][3] = {{68, 1, 84}, {33, 145, 140}, {253, 231, 37}};
  t = std::min(std::max(t, 0.0), 1.0);
  const int seg = t < 0.5 ? 0 : 1;
  const double f = (t - seg * 0.5) * 2.0;
  char buf[16];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x",
                static_cast<int>(stops[seg][0] + f * (stops[seg + 1][0] - stops[seg][0])),
                static_cast<int>(stops[seg][1] + f * (stops[seg + 1][1] - stops[seg][1])),
                static_cast<int>(stops[seg][2] + f * (stops[seg + 1][2] - stops[seg][2])));
  return buf;
}

}  // namespace detail

/// Scatter plot of a pattern: free points black, fixed points grey.
inline void plot_pattern_svg(const LabeledPattern& labeled, const std::filesystem::path& path) {
  const Window& w = labeled.pattern().window();
  detail::SvgAxes ax{w.a(), w.b(), w.c(), w.d()};
  std::string out;
  detail::svg_open(out);
  detail::svg_axes(out, ax);
  for (std::size_t i = 0; i < labeled.size(); ++i) {
    const Point& p = labeled.pattern().points()[i];
    const char* fill = labeled.labels()[i] == PointLabel::fixed ? "#999999" : "black";
    out += "<circle cx=\"" + detail::svg_num(ax.px(p.x)) + "\" cy=\"" +
           detail::svg_num(ax.py(p.y)) + "\" r=\"2\" fill=\"" + std::string(fill) + "\"/>\n";
  }
  out += detail::svg_close();
  atomic_write(path, out);
}

inline void plot_pattern_svg(const PointPattern& pattern, const std::filesystem::path& path) {
  plot_pattern_svg(LabeledPattern(pattern, std::vector<PointLabel>(pattern.size(),
                                                                   PointLabel::free)),
                   path);
}

/// K function against its simulation envelope: one shaded band, the observed
/// curve, and the theoretical pi t^2 reference.
inline void plot_k_svg(const KFunction& observed, const Envelope& band,
                       const std::filesystem::path& path) {
  if (observed.t != band.t) throw Error("observed K and envelope use different t grids");
  const KFunction reference = k_theoretical_poisson(observed.t);
  double y_hi = 1e-12;
  for (double v : band.upper) y_hi = std::max(y_hi, v);
  for (double v : observed.values) y_hi = std::max(y_hi, v);
  for (double v : reference.values) y_hi = std::max(y_hi, v);
  detail::SvgAxes ax{observed.t.front(), observed.t.back(), 0.0, 1.05 * y_hi};

  std::string out;
  detail::svg_open(out);
  detail::svg_axes(out, ax);

  std::string band_pts;
  for (std::size_t i = 0; i < band.t.size(); ++i) {
    band_pts += detail::svg_num(ax.px(band.t[i])) + "," + detail::svg_num(ax.py(band.upper[i])) + " ";
  }
  for (std::size_t i = band.t.size(); i-- > 0;) {
    band_pts += detail::svg_num(ax.px(band.t[i])) + "," + detail::svg_num(ax.py(band.lower[i])) + " ";
  }
  out += "<polygon points=\"" + band_pts + "\" fill=\"#cfcfcf\" stroke=\"none\"/>\n";

  const auto path_for = [&](const std::vector<double>& values) {
    std::string d;
    for (std::size_t i = 0; i < observed.t.size(); ++i) {
      d += (i == 0 ? "M" : "L");
      d += detail::svg_num(ax.px(observed.t[i])) + " " + detail::svg_num(ax.py(values[i]));
      d += " ";
    }
    return d;
  };
  out += "<path d=\"" + path_for(reference.values) +
         "\" fill=\"none\" stroke=\"black\" stroke-dasharray=\"6 4\"/>\n";
  out += "<path d=\"" + path_for(observed.values) + "\" fill=\"none\" stroke=\"black\"/>\n";
  out += detail::svg_close();
  atomic_write(path, out);
}

/// Heat grid of an intensity field on a logarithmic color scale, with legend
/// labels at powers of 10.
inline void plot_field_svg(const IntensityField& field, const std::filesystem::path& path) {
  const Window& box = field.box();
  detail::SvgAxes ax{box.a(), box.b(), box.c(), box.d()};
  const int m = field.resolution();

  double v_max = field.max_value();
  double v_min_pos = v_max;
  for (double v : field.values()) {
    if (v > 0.0) v_min_pos = std::min(v_min_pos, v);
  }
  const bool flat = !(v_max > 0.0) || !(v_max > v_min_pos);
  const double log_lo = flat ? 0.0 : std::log10(v_min_pos);
  const double log_hi = flat ? 1.0 : std::log10(v_max);

  std::string out;
  detail::svg_open(out);
  const double hx = field.spacing_x();
  const double hy = field.spacing_y();
  for (int i = 0; i < m; ++i) {
    for (int j = 0; j < m; ++j) {
      const Point p = field.node(i, j);
      const double v = field.at(i, j);
      double t = 0.0;
      if (!flat && v > 0.0) t = (std::log10(v) - log_lo) / (log_hi - log_lo);
      const double x0 = ax.px(std::max(p.x - hx / 2.0, box.a()));
      const double x1 = ax.px(std::min(p.x + hx / 2.0, box.b()));
      const double y0 = ax.py(std::min(p.y + hy / 2.0, box.d()));
      const double y1 = ax.py(std::max(p.y - hy / 2.0, box.c()));
      out += "<rect x=\"" + detail::svg_num(x0) + "\" y=\"" + detail::svg_num(y0) + "\" width=\"" +
             detail::svg_num(x1 - x0) + "\" height=\"" + detail::svg_num(y1 - y0) + "\" fill=\"" +
             detail::heat_color(t) + "\"/>\n";
    }
  }
  detail::svg_axes(out, ax);

  // Legend: color bar on the right margin with decade labels.
  if (!flat) {
    const double bar_x = detail::kSvgWidth - 14.0;
    const double bar_top = detail::kMarginTop;
    const double bar_h = detail::kSvgHeight - detail::kMarginTop - detail::kMarginBottom;
    for (int s = 0; s < 32; ++s) {
      const double t = (s + 0.5) / 32.0;
      out += "<rect x=\"" + detail::svg_num(bar_x) + "\" y=\"" +
             detail::svg_num(bar_top + bar_h * (1.0 - (s + 1) / 32.0)) +
             "\" width=\"10\" height=\"" + detail::svg_num(bar_h / 32.0) + "\" fill=\"" +
             detail::heat_color(t) + "\"/>\n";
    }
    for (int e = static_cast<int>(std::ceil(log_lo)); e <= static_cast<int>(std::floor(log_hi));
         ++e) {
      const double t = (e - log_lo) / (log_hi - log_lo);
      out += "<text x=\"" + detail::svg_num(bar_x - 4.0) + "\" y=\"" +
             detail::svg_num(bar_top + bar_h * (1.0 - t) + 4.0) +
             "\" font-size=\"10\" text-anchor=\"end\">1e" + std::to_string(e) + "</text>\n";
    }
  }
  out += detail::svg_close();
  atomic_write(path, out);
}

}  // namespace antgen
