#pragma once

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstddef>
#include <span>
#include <stdexcept>
#include <string>

#include "cumdiff/report.hpp"

namespace cumdiff {

namespace detail {

// Fixed three-decimal pixel coordinates keep the output byte-deterministic.
inline void append_coord(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::fixed, 3);
  out.append(buf, res.ptr);
}

inline void append_short(std::string& out, double v) {
  char buf[32];
  const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 4);
  out.append(buf, res.ptr);
}

struct Viewport {
  double left, right, top, bottom;  // plot rectangle in pixels
  double y_limit;                   // data range is [-y_limit, y_limit]

  double x(double a) const { return left + a * (right - left); }
  double y(double v) const {
    return bottom + (v + y_limit) / (2.0 * y_limit) * (top - bottom);
  }
};

inline void append_polyline(std::string& out, const Viewport& vp,
                            std::span<const double> xs, std::span<const double> ys,
                            double y_scale, const char* style) {
  out += "<polyline fill=\"none\" ";
  out += style;
  out += " points=\"";
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (i) out.push_back(' ');
    append_coord(out, vp.x(xs[i]));
    out.push_back(',');
    append_coord(out, vp.y(ys[i] / y_scale));
  }
  out += "\"/>\n";
}

}  // namespace detail

// Standalone SVG of the piecewise linear graph through (A_l, C_l /
// sigma_n), with a horizontal zero line and abscissa ticks at 0, 0.25,
// 0.5, 0.75, 1. When the report carries a baseline curve it is drawn as a
// lighter overlay. Output depends only on (report, width, height).
inline std::string emit_svg(const AnalysisReport& report, unsigned width = 640,
                            unsigned height = 400) {
  if (width < 100 || height < 100) {
    throw std::runtime_error("SVG size must be at least 100x100 pixels");
  }
  double max_abs = 0.0;
  for (const double v : report.normalized) max_abs = std::max(max_abs, std::fabs(v));
  if (report.baseline) {
    for (const double v : report.baseline->ordinates) {
      max_abs = std::max(max_abs, std::fabs(v / report.curve.sigma_n));
    }
  }
  const double y_limit = (max_abs < 1e-12) ? 1.0 : 1.15 * max_abs;

  detail::Viewport vp{52.0, width - 16.0, 16.0, height - 36.0, y_limit};
  std::string out;
  out.reserve(4096);
  out += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"";
  detail::append_coord(out, width);
  out += "\" height=\"";
  detail::append_coord(out, height);
  out += "\" viewBox=\"0 0 ";
  detail::append_coord(out, width);
  out.push_back(' ');
  detail::append_coord(out, height);
  out += "\">\n";
  out += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";

  // zero line
  out += "<line stroke=\"#888888\" stroke-width=\"1\" x1=\"";
  detail::append_coord(out, vp.x(0.0));
  out += "\" y1=\"";
  detail::append_coord(out, vp.y(0.0));
  out += "\" x2=\"";
  detail::append_coord(out, vp.x(1.0));
  out += "\" y2=\"";
  detail::append_coord(out, vp.y(0.0));
  out += "\"/>\n";

  // abscissa ticks and labels along the lower edge
  static constexpr double kTicks[] = {0.0, 0.25, 0.5, 0.75, 1.0};
  static constexpr const char* kTickLabels[] = {"0", "0.25", "0.5", "0.75", "1"};
  for (std::size_t i = 0; i < 5; ++i) {
    const double px = vp.x(kTicks[i]);
    out += "<line stroke=\"#444444\" stroke-width=\"1\" x1=\"";
    detail::append_coord(out, px);
    out += "\" y1=\"";
    detail::append_coord(out, vp.bottom);
    out += "\" x2=\"";
    detail::append_coord(out, px);
    out += "\" y2=\"";
    detail::append_coord(out, vp.bottom + 5.0);
    out += "\"/>\n<text font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"middle\" x=\"";
    detail::append_coord(out, px);
    out += "\" y=\"";
    detail::append_coord(out, vp.bottom + 18.0);
    out += "\">";
    out += kTickLabels[i];
    out += "</text>\n";
  }

  // ordinate extremes and zero label on the left edge
  const double labels[3] = {y_limit, 0.0, -y_limit};
  for (const double v : labels) {
    out += "<text font-family=\"sans-serif\" font-size=\"11\" text-anchor=\"end\" x=\"";
    detail::append_coord(out, vp.left - 6.0);
    out += "\" y=\"";
    detail::append_coord(out, vp.y(v) + 4.0);
    out += "\">";
    detail::append_short(out, v);
    out += "</text>\n";
  }

  if (report.baseline) {
    detail::append_polyline(out, vp, report.baseline->abscissae, report.baseline->ordinates,
                            report.curve.sigma_n,
                            "stroke=\"#e08040\" stroke-width=\"1\" stroke-opacity=\"0.8\"");
  }
  detail::append_polyline(out, vp, report.curve.abscissae, report.normalized, 1.0,
                          "stroke=\"#1f4e9c\" stroke-width=\"1.5\"");
  out += "</svg>\n";
  return out;
}

}  // namespace cumdiff
