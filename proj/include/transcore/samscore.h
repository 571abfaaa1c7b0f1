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
#ifndef TRANSCORE_SAMSCORE_H_
#define TRANSCORE_SAMSCORE_H_

#include <filesystem>
#include <span>
#include <string>
#include <vector>

#include "transcore/encoder.h"

namespace transcore {

inline constexpr double kCosineEps = 1e-12;

// Per-position cosine similarities, H x W row-major.
struct SimilarityMap {
  int height = 0;
  int width = 0;
  std::vector<float> values;

  float at(int y, int x) const {
    return values[static_cast<std::size_t>(y) * width + x];
  }
};

struct ScoreResult {
  double score = 0.0;
  SimilarityMap map;
  std::string pair_id;
  std::string encoder;
};

// u.v / (|u| |v|) in double precision. When both norms are below `eps` the
// vectors are treated as identical (1.0); when exactly one is, as unrelated
// (0.0). The result is clamped into [-1, 1].
double Cosine(std::span<const float> u, std::span<const float> v,
              double eps = kCosineEps);

SimilarityMap ComputeSimilarityMap(const EmbeddingMap& x,
                                   const EmbeddingMap& y);

// Spatial mean of the similarity map, accumulated serially in double.
ScoreResult SamScore(const EmbeddingMap& x, const EmbeddingMap& y);

// Embeds both images with `encoder` and scores them. Keys may be null.
ScoreResult ScoreImages(Encoder& encoder, const ImageBuffer& source,
                        const ImageBuffer& translated,
                        const EmbeddingKey* source_key = nullptr,
                        const EmbeddingKey* translated_key = nullptr);

// Grayscale heatmap: v in [-1, 1] maps linearly to [0, 255], rounded half
// up, so 1 -> 255, 0 -> 128, -1 -> 0.
ImageBuffer HeatmapImage(const SimilarityMap& map);
void RenderHeatmap(const SimilarityMap& map,
                   const std::filesystem::path& out_path);

}  // namespace transcore

#endif  // TRANSCORE_SAMSCORE_H_
