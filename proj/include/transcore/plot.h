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
#ifndef TRANSCORE_PLOT_H_
#define TRANSCORE_PLOT_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

namespace transcore {

struct PlotSeries {
  std::string name;
  bool higher_is_better = true;
  std::vector<double> values;  // one per degree
};

// Fixed canvas geometry. A value v at degree d is drawn at
//   x = kPlotLeft + (d - d_min) / (d_max - d_min) * (kPlotRight - kPlotLeft)
//   y = kPlotBottom - (v - v_min) / (v_max - v_min) * (kPlotBottom - kPlotTop)
// where [v_min, v_max] spans all finite values and 0. A zero-width degree
// range puts points at the horizontal center; a zero-height value range
// is widened to [v_min - 1, v_max + 1].
inline constexpr double kPlotWidth = 640.0;
inline constexpr double kPlotHeight = 400.0;
inline constexpr double kPlotLeft = 70.0;
inline constexpr double kPlotRight = 470.0;
inline constexpr double kPlotTop = 30.0;
inline constexpr double kPlotBottom = 350.0;

// Static SVG 1.1 line chart, one polyline per series. Coordinates are
// printed with two decimals; identical input gives identical bytes.
std::string LinePlotSvg(const std::string& title,
                        std::span<const double> degrees,
                        std::span<const PlotSeries> series);

void RenderLinePlot(const std::string& title, std::span<const double> degrees,
                    std::span<const PlotSeries> series,
                    const std::filesystem::path& out_path);

}  // namespace transcore

#endif  // TRANSCORE_PLOT_H_
