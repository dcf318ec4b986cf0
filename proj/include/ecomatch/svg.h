// Copyright 2020 The Authors.
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

// Minimal SVG line charts.

#ifndef ECOMATCH_SVG_H_
#define ECOMATCH_SVG_H_

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace ecomatch {

struct Series {
  std::string label;
  std::vector<std::pair<double, double>> points;
};

inline std::string FormatShort(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%g", v);
  return buf;
}

inline std::string XmlEscape(const std::string& s) {
  std::string out;
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

inline std::string LineChartSvg(const std::string& title, const std::string& x_label,
                                const std::string& y_label, const std::vector<Series>& series) {
  static const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e", "#9467bd",
                                  "#8c564b", "#e377c2", "#7f7f7f", "#bcbd22", "#17becf"};
  const double width = 640, height = 400;
  const double left = 70, right = 180, top = 40, bottom = 50;
  const double pw = width - left - right, ph = height - top - bottom;

  double x0 = 0, x1 = 1, y0 = 0, y1 = 1;
  bool any = false;
  for (const auto& s : series)
    for (const auto& [x, y] : s.points) {
      if (!any) {
        x0 = x1 = x;
        y0 = y1 = y;
        any = true;
      }
      x0 = std::min(x0, x);
      x1 = std::max(x1, x);
      y0 = std::min(y0, y);
      y1 = std::max(y1, y);
    }
  if (x1 - x0 < 1e-12) {
    x0 -= 1;
    x1 += 1;
  }
  if (y1 - y0 < 1e-12) {
    y0 -= 1;
    y1 += 1;
  }
  const double pad = 0.05 * (y1 - y0);
  y0 -= pad;
  y1 += pad;
  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * pw; };
  auto py = [&](double y) { return top + (1 - (y - y0) / (y1 - y0)) * ph; };
  auto num = [](double v) {
    char buf[32];
    std::snprintf(buf, sizeof(buf), "%.2f", v);
    return std::string(buf);
  };

  std::ostringstream out;
  out << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width << "\" height=\""
      << height << "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  out << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  out << "<text x=\"" << num(left + pw / 2) << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-size=\"15\">" << XmlEscape(title) << "</text>\n";
  out << "<rect x=\"" << num(left) << "\" y=\"" << num(top) << "\" width=\"" << num(pw)
      << "\" height=\"" << num(ph) << "\" fill=\"none\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 5; ++i) {
    const double yv = y0 + (y1 - y0) * i / 5.0;
    const double xv = x0 + (x1 - x0) * i / 5.0;
    out << "<line x1=\"" << num(left - 4) << "\" y1=\"" << num(py(yv)) << "\" x2=\""
        << num(left) << "\" y2=\"" << num(py(yv)) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(left - 6) << "\" y=\"" << num(py(yv) + 4)
        << "\" text-anchor=\"end\">" << FormatShort(std::round(yv * 1000) / 1000) << "</text>\n";
    out << "<line x1=\"" << num(px(xv)) << "\" y1=\"" << num(top + ph) << "\" x2=\""
        << num(px(xv)) << "\" y2=\"" << num(top + ph + 4) << "\" stroke=\"black\"/>\n";
    out << "<text x=\"" << num(px(xv)) << "\" y=\"" << num(top + ph + 18)
        << "\" text-anchor=\"middle\">" << FormatShort(std::round(xv * 1000) / 1000)
        << "</text>\n";
  }
  out << "<text x=\"" << num(left + pw / 2) << "\" y=\"" << num(height - 10)
      << "\" text-anchor=\"middle\">" << XmlEscape(x_label) << "</text>\n";
  out << "<text x=\"16\" y=\"" << num(top + ph / 2) << "\" text-anchor=\"middle\" "
      << "transform=\"rotate(-90 16 " << num(top + ph / 2) << ")\">" << XmlEscape(y_label)
      << "</text>\n";

  for (std::size_t k = 0; k < series.size(); ++k) {
    const char* color = kColors[k % 10];
    const auto& s = series[k];
    if (!s.points.empty()) {
      out << "<polyline fill=\"none\" stroke=\"" << color << "\" stroke-width=\"2\" points=\"";
      for (std::size_t i = 0; i < s.points.size(); ++i)
        out << (i ? " " : "") << num(px(s.points[i].first)) << ',' << num(py(s.points[i].second));
      out << "\"/>\n";
    }
    const double ly = top + 10 + 18.0 * k;
    out << "<line x1=\"" << num(left + pw + 12) << "\" y1=\"" << num(ly) << "\" x2=\""
        << num(left + pw + 36) << "\" y2=\"" << num(ly) << "\" stroke=\"" << color
        << "\" stroke-width=\"2\"/>\n";
    out << "<text x=\"" << num(left + pw + 42) << "\" y=\"" << num(ly + 4) << "\">"
        << XmlEscape(s.label) << "</text>\n";
  }
  out << "</svg>\n";
  return out.str();
}

}  // namespace ecomatch

#endif  // ECOMATCH_SVG_H_
