#pragma once

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>
#include <vector>

#include "ssx/shap.hpp"

namespace ssx {

namespace detail {

inline std::string svg_num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  return buf;
}

inline void svg_open(std::string& out, int w, int h) {
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + std::to_string(w) +
         "\" height=\"" + std::to_string(h) + "\" viewBox=\"0 0 " + std::to_string(w) + " " +
         std::to_string(h) + "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
}

inline void svg_circle(std::string& out, double x, double y, double r, const std::string& fill,
                       double opacity = 0.75) {
  out += "<circle cx=\"" + svg_num(x) + "\" cy=\"" + svg_num(y) + "\" r=\"" + svg_num(r) +
         "\" fill=\"" + fill + "\" fill-opacity=\"" + svg_num(opacity) + "\"/>\n";
}

inline void svg_line(std::string& out, double x1, double y1, double x2, double y2,
                     const std::string& stroke) {
  out += "<line x1=\"" + svg_num(x1) + "\" y1=\"" + svg_num(y1) + "\" x2=\"" + svg_num(x2) +
         "\" y2=\"" + svg_num(y2) + "\" stroke=\"" + stroke + "\" stroke-width=\"1\"/>\n";
}

inline void svg_text(std::string& out, double x, double y, const std::string& s,
                     int size = 12, const std::string& anchor = "start") {
  out += "<text x=\"" + svg_num(x) + "\" y=\"" + svg_num(y) + "\" font-size=\"" +
         std::to_string(size) + "\" font-family=\"sans-serif\" text-anchor=\"" + anchor +
         "\">" + s + "</text>\n";
}

}  // namespace detail

// One horizontal band per ranked feature; dots are per-instance attribution
// values, red when the feature bit is set, blue when clear.
inline std::string beeswarm_svg(const std::vector<BeeswarmFeature>& feats) {
  const int width = 760, row_h = 34, top = 40, left = 110, plot_w = 600;
  const int height = top + static_cast<int>(feats.size()) * row_h + 30;
  double lo = 0.0, hi = 0.0;
  for (const auto& f : feats)
    for (double v : f.values) {
      lo = std::min(lo, v);
      hi = std::max(hi, v);
    }
  if (hi - lo < 1e-12) hi = lo + 1e-12;
  const auto xmap = [&](double v) { return left + (v - lo) / (hi - lo) * plot_w; };

  std::string out;
  detail::svg_open(out, width, height);
  detail::svg_text(out, left, 20, "features by mean |attribution|; red = bit set", 13);
  detail::svg_line(out, xmap(0.0), top - 10, xmap(0.0), height - 25, "#888888");
  std::uint64_t jitter_state = 0x9e3779b97f4a7c15ull;
  for (std::size_t r = 0; r < feats.size(); ++r) {
    const auto& f = feats[r];
    const double cy = top + double(r) * row_h + row_h / 2.0;
    detail::svg_text(out, left - 8, cy + 4, f.code, 12, "end");
    detail::svg_line(out, left, cy, left + plot_w, cy, "#eeeeee");
    for (std::size_t i = 0; i < f.values.size(); ++i) {
      const double jitter = (double(splitmix64(jitter_state) >> 11) / 9007199254740992.0 - 0.5) *
                            (row_h - 10);
      detail::svg_circle(out, xmap(f.values[i]), cy + jitter, 2.2,
                         f.bits[i] ? "#d62728" : "#1f77b4", 0.55);
    }
  }
  detail::svg_text(out, left, height - 8, detail::svg_num(lo), 11);
  detail::svg_text(out, left + plot_w, height - 8, detail::svg_num(hi), 11, "end");
  out += "</svg>\n";
  return out;
}

// Combined attribution vs silent ratio; dot area tracks log10 support.
inline std::string scatter_svg(const std::vector<ScatterRow>& rows) {
  const int width = 640, height = 480, left = 60, top = 30;
  const int plot_w = width - left - 30, plot_h = height - top - 50;
  double xlo = 0.0, xhi = 0.0;
  for (const auto& r : rows) {
    xlo = std::min(xlo, r.combined_shap);
    xhi = std::max(xhi, r.combined_shap);
  }
  if (xhi - xlo < 1e-12) xhi = xlo + 1e-12;
  const auto xmap = [&](double v) { return left + (v - xlo) / (xhi - xlo) * plot_w; };
  const auto ymap = [&](double v) { return top + (1.0 - v) * plot_h; };

  std::string out;
  detail::svg_open(out, width, height);
  detail::svg_text(out, left, 18, "silent ratio vs combined attribution", 13);
  detail::svg_line(out, left, top, left, top + plot_h, "#444444");
  detail::svg_line(out, left, top + plot_h, left + plot_w, top + plot_h, "#444444");
  for (double tick : {0.0, 0.5, 1.0}) {
    detail::svg_line(out, left - 4, ymap(tick), left, ymap(tick), "#444444");
    detail::svg_text(out, left - 8, ymap(tick) + 4, detail::svg_num(tick), 11, "end");
  }
  for (const auto& r : rows)
    detail::svg_circle(out, xmap(r.combined_shap), ymap(r.silent_ratio),
                       2.0 + r.log10_support, "#2ca02c", 0.45);
  detail::svg_text(out, left, height - 10, detail::svg_num(xlo), 11);
  detail::svg_text(out, left + plot_w, height - 10, detail::svg_num(xhi), 11, "end");
  out += "</svg>\n";
  return out;
}

}  // namespace ssx
