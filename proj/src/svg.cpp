// Copyright 2026 The acl Authors
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//     http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "acl/svg.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <limits>
#include <sstream>

namespace acl {
namespace {

constexpr double kWidth = 800.0, kHeight = 500.0;
constexpr double kLeft = 70.0, kRight = 160.0, kTop = 40.0, kBottom = 50.0;

const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                         "#8c564b", "#17becf", "#7f7f7f", "#bcbd22", "#e377c2"};

std::string fmt(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.6g", v);
  return buf;
}

// Tick positions at 1-2-5 spacing covering [lo, hi].
std::vector<double> linear_ticks(double lo, double hi) {
  const double span = hi - lo;
  if (!(span > 0.0)) return {lo};
  const double raw = span / 6.0;
  const double mag = std::pow(10.0, std::floor(std::log10(raw)));
  double step = mag;
  for (double mult : {1.0, 2.0, 5.0, 10.0}) {
    if (mag * mult >= raw) {
      step = mag * mult;
      break;
    }
  }
  std::vector<double> ticks;
  for (double v = std::ceil(lo / step) * step; v <= hi + 1e-9 * span; v += step)
    ticks.push_back(v);
  return ticks;
}

}  // namespace

std::string render_line_plot(const std::string& title, const std::string& x_label,
                             const std::string& y_label,
                             const std::vector<PlotSeries>& series, bool log_y) {
  double x_min = std::numeric_limits<double>::infinity(), x_max = -x_min;
  double y_min = x_min, y_max = -x_min;
  const auto y_value = [&](double y) { return log_y ? std::log10(y) : y; };
  for (const PlotSeries& s : series)
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y)) continue;
      if (log_y && !(y > 0.0)) continue;
      x_min = std::min(x_min, x);
      x_max = std::max(x_max, x);
      y_min = std::min(y_min, y_value(y));
      y_max = std::max(y_max, y_value(y));
    }
  if (!(x_min < x_max)) {
    x_min = 0.0;
    x_max = 1.0;
  }
  if (!(y_min < y_max)) {
    y_min -= 1.0;
    y_max += 1.0;
  }
  if (!std::isfinite(y_min) || !std::isfinite(y_max)) {
    y_min = 0.0;
    y_max = 1.0;
  }

  const double plot_w = kWidth - kLeft - kRight;
  const double plot_h = kHeight - kTop - kBottom;
  const auto sx = [&](double x) { return kLeft + (x - x_min) / (x_max - x_min) * plot_w; };
  const auto sy = [&](double yv) {
    return kTop + (y_max - yv) / (y_max - y_min) * plot_h;
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" << kWidth
      << "\" height=\"" << kHeight << "\" viewBox=\"0 0 " << kWidth << " " << kHeight
      << "\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"24\" text-anchor=\"middle\" "
         "font-family=\"sans-serif\" font-size=\"16\">" << title << "</text>\n";

  // Axes frame.
  out << "<rect x=\"" << kLeft << "\" y=\"" << kTop << "\" width=\"" << plot_w
      << "\" height=\"" << plot_h << "\" fill=\"none\" stroke=\"#333\"/>\n";

  // Y ticks and grid.
  if (log_y) {
    for (int e = static_cast<int>(std::floor(y_min)); e <= static_cast<int>(std::ceil(y_max)); ++e) {
      if (e < y_min - 1e-9 || e > y_max + 1e-9) continue;
      const double py = sy(e);
      out << "<line x1=\"" << kLeft << "\" y1=\"" << py << "\" x2=\"" << kLeft + plot_w
          << "\" y2=\"" << py << "\" stroke=\"#ddd\"/>\n";
      out << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">1e"
          << e << "</text>\n";
    }
  } else {
    for (double tv : linear_ticks(y_min, y_max)) {
      const double py = sy(tv);
      out << "<line x1=\"" << kLeft << "\" y1=\"" << py << "\" x2=\"" << kLeft + plot_w
          << "\" y2=\"" << py << "\" stroke=\"#ddd\"/>\n";
      out << "<text x=\"" << kLeft - 8 << "\" y=\"" << py + 4
          << "\" text-anchor=\"end\" font-family=\"sans-serif\" font-size=\"11\">"
          << fmt(tv) << "</text>\n";
    }
  }
  for (double tv : linear_ticks(x_min, x_max)) {
    const double px = sx(tv);
    out << "<line x1=\"" << px << "\" y1=\"" << kTop << "\" x2=\"" << px << "\" y2=\""
        << kTop + plot_h << "\" stroke=\"#eee\"/>\n";
    out << "<text x=\"" << px << "\" y=\"" << kTop + plot_h + 18
        << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"11\">"
        << fmt(tv) << "</text>\n";
  }
  out << "<text x=\"" << kLeft + plot_w / 2 << "\" y=\"" << kHeight - 12
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\">" << x_label
      << "</text>\n";
  out << "<text x=\"18\" y=\"" << kTop + plot_h / 2
      << "\" text-anchor=\"middle\" font-family=\"sans-serif\" font-size=\"12\" "
         "transform=\"rotate(-90 18 " << kTop + plot_h / 2 << ")\">" << y_label
      << "</text>\n";

  // Series polylines and legend.
  for (std::size_t k = 0; k < series.size(); ++k) {
    const PlotSeries& s = series[k];
    const char* color = kColors[k % (sizeof kColors / sizeof kColors[0])];
    std::ostringstream pts;
    bool open = false;
    for (const auto& [x, y] : s.points) {
      if (!std::isfinite(x) || !std::isfinite(y) || (log_y && !(y > 0.0))) continue;
      if (open) pts << " ";
      pts << fmt(sx(x)) << "," << fmt(sy(y_value(y)));
      open = true;
    }
    if (open) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"1.5\"";
      if (s.dashed) out << " stroke-dasharray=\"6,4\"";
      out << " points=\"" << pts.str() << "\"/>\n";
    }
    const double ly = kTop + 16.0 + 18.0 * static_cast<double>(k);
    out << "<line x1=\"" << kLeft + plot_w + 12 << "\" y1=\"" << ly - 4 << "\" x2=\""
        << kLeft + plot_w + 36 << "\" y2=\"" << ly - 4 << "\" stroke=\"" << color
        << "\" stroke-width=\"1.5\"" << (s.dashed ? " stroke-dasharray=\"6,4\"" : "")
        << "/>\n";
    out << "<text x=\"" << kLeft + plot_w + 42 << "\" y=\"" << ly
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << s.label << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace acl
