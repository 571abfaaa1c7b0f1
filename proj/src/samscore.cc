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
#include "transcore/samscore.h"

#include <algorithm>
#include <cmath>
#include <string>

#include "transcore/error.h"
#include "transcore/image_io.h"

namespace transcore {

double Cosine(std::span<const float> u, std::span<const float> v,
              double eps) {
  if (u.size() != v.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "cosine of vectors with lengths " + std::to_string(u.size()) +
                    " and " + std::to_string(v.size()));
  }
  if (u.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "cosine of empty vectors");
  }
  double dot = 0.0, uu = 0.0, vv = 0.0;
  for (std::size_t i = 0; i < u.size(); ++i) {
    const double a = u[i];
    const double b = v[i];
    dot += a * b;
    uu += a * a;
    vv += b * b;
  }
  const double nu = std::sqrt(uu);
  const double nv = std::sqrt(vv);
  const bool u_zero = nu < eps;
  const bool v_zero = nv < eps;
  if (u_zero && v_zero) return 1.0;
  if (u_zero || v_zero) return 0.0;
  return std::clamp(dot / (nu * nv), -1.0, 1.0);
}

namespace {

// Cosines kept in double so the spatial mean is not limited by the float32
// storage of the map.
std::vector<double> FiberCosines(const EmbeddingMap& x, const EmbeddingMap& y) {
  if (x.shape() != y.shape()) {
    throw Error(ErrorCode::kShapeMismatch,
                "embedding shapes differ between source and translated");
  }
  const int c = x.channels();
  std::vector<double> out(static_cast<std::size_t>(x.height()) * x.width());
  std::vector<float> fx(c), fy(c);
  for (int h = 0; h < x.height(); ++h) {
    for (int w = 0; w < x.width(); ++w) {
      for (int k = 0; k < c; ++k) {
        fx[k] = x.at(k, h, w);
        fy[k] = y.at(k, h, w);
      }
      out[static_cast<std::size_t>(h) * x.width() + w] = Cosine(fx, fy);
    }
  }
  return out;
}

SimilarityMap ToMap(const std::vector<double>& cosines, int height,
                    int width) {
  SimilarityMap map{height, width, {}};
  map.values.assign(cosines.begin(), cosines.end());
  return map;
}

}  // namespace

SimilarityMap ComputeSimilarityMap(const EmbeddingMap& x,
                                   const EmbeddingMap& y) {
  return ToMap(FiberCosines(x, y), x.height(), x.width());
}

ScoreResult SamScore(const EmbeddingMap& x, const EmbeddingMap& y) {
  const std::vector<double> cosines = FiberCosines(x, y);
  ScoreResult result;
  result.map = ToMap(cosines, x.height(), x.width());
  double sum = 0.0;
  for (double v : cosines) sum += v;
  result.score = sum / static_cast<double>(cosines.size());
  return result;
}

ScoreResult ScoreImages(Encoder& encoder, const ImageBuffer& source,
                        const ImageBuffer& translated,
                        const EmbeddingKey* source_key,
                        const EmbeddingKey* translated_key) {
  const EmbeddingMap xe = encoder.Embed(source, source_key);
  const EmbeddingMap ye = encoder.Embed(translated, translated_key);
  ScoreResult result = SamScore(xe, ye);
  result.encoder = encoder.Id();
  if (translated_key != nullptr) result.pair_id = translated_key->pair_id;
  return result;
}

ImageBuffer HeatmapImage(const SimilarityMap& map) {
  ImageBuffer img(map.height, map.width, 1, PixelScale::kU8);
  auto dst = img.mutable_data();
  for (std::size_t i = 0; i < map.values.size(); ++i) {
    const double v = std::clamp(static_cast<double>(map.values[i]), -1.0, 1.0);
    dst[i] = QuantizeU8((v + 1.0) * 127.5);
  }
  return img;
}

void RenderHeatmap(const SimilarityMap& map,
                   const std::filesystem::path& out_path) {
  WritePngFile(out_path, HeatmapImage(map));
}

}  // namespace transcore
