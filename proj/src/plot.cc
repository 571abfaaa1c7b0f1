/* Copyright 2026 The transcore Authors. All Rights Reserved.

Licensed under the Apache License, Version 2.0 (the "License");
you may not use this file except in compliance with the License.
You may obtain a copy of the License at

    http://www.apache.org/licenses/LICENSE-2.0

Unless required by applicable law or agreed to in writing, software
distributed under the License is distributed on an "AS IS" BASIS,
WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
See the License for the specific language governing permissions and
limitations under the License.
==============================================================================*/
#include "transcore/plot.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <string>

#include "transcore/error.h"
#include "transcore/image_io.h"

namespace transcore {

namespace {

constexpr const char* kColors[] = {"#1f77b4", "#d62728", "#2ca02c",
                                   "#ff7f0e", "#9467bd", "#8c564b",
                                   "#e377c2", "#17becf"};

std::string Num(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.2f", v);
  std::string s = buf;
  return s == "-0.00" ? "0.00" : s;
}

std::string Escape(const std::string& s) {
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

}  // namespace

std::string LinePlotSvg(const std::string& title,
                        std::span<const double> degrees,
                        std::span<const PlotSeries> series) {
  for (const auto& s : series) {
    if (s.values.size() != degrees.size()) {
      throw Error(ErrorCode::kLengthMismatch,
                  "series '" + s.name + "' does not match the degree axis");
    }
  }
  double d_min = 0.0, d_max = 0.0;
  if (!degrees.empty()) {
    d_min = *std::min_element(degrees.begin(), degrees.end());
    d_max = *std::max_element(degrees.begin(), degrees.end());
  }
  double v_min = 0.0, v_max = 0.0;
  for (const auto& s : series) {
    for (double v : s.values) {
      if (!std::isfinite(v)) continue;
      v_min = std::min(v_min, v);
      v_max = std::max(v_max, v);
    }
  }
  if (v_max == v_min) {
    v_min -= 1.0;
    v_max += 1.0;
  }
  auto px = [&](double d) {
    if (d_max == d_min) return (kPlotLeft + kPlotRight) / 2.0;
    return kPlotLeft + (d - d_min) / (d_max - d_min) * (kPlotRight - kPlotLeft);
  };
  auto py = [&](double v) {
    return kPlotBottom -
           (v - v_min) / (v_max - v_min) * (kPlotBottom - kPlotTop);
  };

  std::string svg;
  svg += "<?xml version=\"1.0\" encoding=\"UTF-8\"?>\n";
  svg += "<svg xmlns=\"http://www.w3.org/2000/svg\" version=\"1.1\" width=\"" +
         Num(kPlotWidth) + "\" height=\"" + Num(kPlotHeight) + "\">\n";
  svg += "<rect x=\"0\" y=\"0\" width=\"" + Num(kPlotWidth) + "\" height=\"" +
         Num(kPlotHeight) + "\" fill=\"white\"/>\n";
  svg += "<text x=\"" + Num((kPlotLeft + kPlotRight) / 2.0) +
         "\" y=\"18\" text-anchor=\"middle\" font-size=\"14\">" +
         Escape(title) + "</text>\n";

  // Axes, zero line and ticks.
  svg += "<g stroke=\"black\" stroke-width=\"1\">\n";
  svg += "<line x1=\"" + Num(kPlotLeft) + "\" y1=\"" + Num(kPlotBottom) +
         "\" x2=\"" + Num(kPlotRight) + "\" y2=\"" + Num(kPlotBottom) +
         "\"/>\n";
  svg += "<line x1=\"" + Num(kPlotLeft) + "\" y1=\"" + Num(kPlotTop) +
         "\" x2=\"" + Num(kPlotLeft) + "\" y2=\"" + Num(kPlotBottom) +
         "\"/>\n";
  svg += "</g>\n";
  svg += "<line x1=\"" + Num(kPlotLeft) + "\" y1=\"" + Num(py(0.0)) +
         "\" x2=\"" + Num(kPlotRight) + "\" y2=\"" + Num(py(0.0)) +
         "\" stroke=\"#999999\" stroke-dasharray=\"2,2\"/>\n";
  svg += "<g font-size=\"10\">\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = v_min + (v_max - v_min) * t / 4.0;
    char label[32];
    std::snprintf(label, sizeof(label), "%.4g", v);
    svg += "<text x=\"" + Num(kPlotLeft - 6) + "\" y=\"" + Num(py(v) + 3) +
           "\" text-anchor=\"end\">" + label + "</text>\n";
  }
  for (double d : degrees) {
    char label[32];
    std::snprintf(label, sizeof(label), "%g", d);
    svg += "<text x=\"" + Num(px(d)) + "\" y=\"" + Num(kPlotBottom + 14) +
           "\" text-anchor=\"middle\">" + label + "</text>\n";
  }
  svg += "</g>\n";

  for (std::size_t i = 0; i < series.size(); ++i) {
    const PlotSeries& s = series[i];
    const char* color = kColors[i % std::size(kColors)];
    std::string points;
    for (std::size_t k = 0; k < degrees.size(); ++k) {
      if (!std::isfinite(s.values[k])) continue;
      if (!points.empty()) points += ' ';
      points += Num(px(degrees[k])) + "," + Num(py(s.values[k]));
    }
    svg += "<polyline data-series=\"" + Escape(s.name) +
           "\" fill=\"none\" stroke=\"" + color +
           "\" stroke-width=\"2\" points=\"" + points + "\"/>\n";
    const double ly = kPlotTop + 16.0 * i;
    svg += "<line x1=\"" + Num(kPlotRight + 20) + "\" y1=\"" + Num(ly) +
           "\" x2=\"" + Num(kPlotRight + 40) + "\" y2=\"" + Num(ly) +
           "\" stroke=\"" + color + "\" stroke-width=\"2\"/>\n";
    svg += "<text x=\"" + Num(kPlotRight + 46) + "\" y=\"" + Num(ly + 4) +
           "\" font-size=\"11\">" + Escape(s.name) +
           (s.higher_is_better ? " (\xE2\x86\x91)" : " (\xE2\x86\x93)") +
           "</text>\n";
  }
  svg += "</svg>\n";
  return svg;
}

void RenderLinePlot(const std::string& title, std::span<const double> degrees,
                    std::span<const PlotSeries> series,
                    const std::filesystem::path& out_path) {
  const std::string svg = LinePlotSvg(title, degrees, series);
  WriteFileBytes(out_path, {reinterpret_cast<const std::uint8_t*>(svg.data()),
                            svg.size()});
}

}  // namespace transcore
