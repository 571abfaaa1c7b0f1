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
#ifndef TRANSCORE_CONFIG_H_
#define TRANSCORE_CONFIG_H_

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "transcore/sweep.h"

namespace transcore {

// {"pairs": [{"id", "source", "translated", "source_labels"?,
//             "translated_domain_gt"?, "task"?}]}
// Relative paths resolve against the manifest's directory. Ids must be
// unique and every referenced file must exist.
struct Manifest {
  std::vector<ImagePair> pairs;

  static Manifest Load(const std::filesystem::path& path);
  static Manifest FromJsonText(std::string_view text,
                               const std::filesystem::path& base_dir);
  std::string ToJsonText() const;
};

// Run configuration. Precedence: built-in defaults, then the JSON config
// file, then command-line flags.
//
// {
//   "metrics": ["samscore", "l2", "psnr", "ssim"],
//   "encoders": {"samscore": "stub" | "onnx:<path>" | "precomputed:<dir>",
//                "vitscore": ..., "lpips": "onnx:<path>",
//                "segmenter": "onnx:<path>"},
//   "distortions": {"piecewise-affine": [0, 0.01, ...],
//                   "gaussian-noise": [0, 50, ...],
//                   "color-jitter": [...]},
//   "grid": {"rows": 4, "cols": 4},
//   "color_jitter_deterministic": false,
//   "resize_to": 256,
//   "seed": 0, "jobs": 1, "pooled": false,
//   "output_dir": "transcore_out",
//   "segmentation": {"num_classes": 19, "ignore_id": 255, "input_size": 512}
// }
struct RunConfig {
  std::vector<std::string> metrics = {"l2", "psnr", "samscore", "ssim"};
  std::map<std::string, std::string> encoders = {{"samscore", "stub"}};
  SweepOptions sweep;
  bool pooled = false;
  std::filesystem::path output_dir = "transcore_out";
  int num_classes = 19;
  std::optional<int> ignore_id = 255;
  int segmenter_input_size = 512;

  RunConfig();

  static RunConfig Load(const std::filesystem::path& path);
  // Applies the keys present in `text` on top of the current values.
  void Merge(std::string_view text);

  // Every metric known and backed by a configured encoder.
  void Validate() const;
};

// Six-degree default grids used when a sweep does not name its own.
std::vector<double> DefaultDegrees(DistortionKind kind);

// Instantiates the backends named in `config.encoders`.
MetricBackends BuildBackends(const RunConfig& config);

// Parses "0,0.01,0.02".
std::vector<double> ParseDegreeList(std::string_view text);

}  // namespace transcore

#endif  // TRANSCORE_CONFIG_H_
