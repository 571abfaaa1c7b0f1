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
#ifndef TRANSCORE_DISTORTION_H_
#define TRANSCORE_DISTORTION_H_

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "transcore/image.h"

namespace transcore {

enum class DistortionKind { kPiecewiseAffine, kGaussianNoise, kColorJitter };

std::string_view DistortionName(DistortionKind kind);
std::optional<DistortionKind> ParseDistortionKind(std::string_view name);

struct DistortionSpec {
  DistortionKind kind = DistortionKind::kPiecewiseAffine;
  // Deformation scale, noise variance (0-255 scale) or jitter strength.
  double degree = 0.0;
  std::uint64_t seed = 0;
  int grid_rows = 4;
  int grid_cols = 4;
  // Color jitter only: fixed factors instead of sampled ones.
  bool deterministic = false;

  void Validate() const;
};

ImageBuffer ApplyDistortion(const ImageBuffer& img, const DistortionSpec& spec);

struct ControlOffset {
  double dx = 0.0;
  double dy = 0.0;
};

// Control-point displacements used by PiecewiseAffine, row-major over the
// rows x cols grid. For each point the x offset is drawn before the y
// offset, both N(0, sigma^2) with sigma = degree * min(height, width).
std::vector<ControlOffset> PiecewiseAffineOffsets(int height, int width,
                                                  double degree,
                                                  std::uint64_t seed, int rows,
                                                  int cols);

// Piecewise affine warp over a rows x cols control grid. Control point
// (i, j) sits at pixel-center coordinates
//   (y, x) = (i * (H-1)/(rows-1), j * (W-1)/(cols-1)),
// so the grid spans the whole image. Each grid cell is split along its
// top-left to bottom-right diagonal. An output pixel p inside a triangle
// samples the input at p + sum_k lambda_k * offset_k where lambda are p's
// barycentric coordinates in the regular triangle, i.e. each triangle maps
// by the affine transform fixed by its displaced vertices. Sampling is
// bilinear with edge clamping.
ImageBuffer PiecewiseAffine(const ImageBuffer& img, double degree,
                            std::uint64_t seed, int rows = 4, int cols = 4);

// Additive N(0, variance) noise on the 0-255 scale, one draw per sample in
// storage order, then clamp and round half up. kUnit images get the
// equivalent noise scaled by 1/255 and are not rounded.
ImageBuffer GaussianNoise(const ImageBuffer& img, double variance,
                          std::uint64_t seed);

struct JitterFactors {
  double brightness = 1.0;
  double contrast = 1.0;
  double saturation = 1.0;
  // Hue rotation in turns of the hue circle.
  double hue_turns = 0.0;
};

// Sampled (or fixed, when deterministic) jitter factors for `degree`.
// Random mode draws brightness, contrast, saturation from U[1-d, 1+d] and
// h from U[-d, d], in that order; deterministic mode uses 1+d and h = d/2.
// The applied hue rotation is 0.5 * h turns.
JitterFactors SampleJitterFactors(double degree, std::uint64_t seed,
                                  bool deterministic);

// Brightness, contrast, saturation then hue, computed in unit-range float
// with clamping after every step. Contrast blends toward the mean
// luminance of the whole image; saturation toward per-pixel luminance.
ImageBuffer ApplyJitter(const ImageBuffer& img, const JitterFactors& factors);

ImageBuffer ColorJitter(const ImageBuffer& img, double degree,
                        std::uint64_t seed, bool deterministic);

// Stable per-task seed: FNV-1a 64 over
//   "<master>\x1f<pair_id>\x1f<kind name>\x1f<degree_index>"
// (decimal integers, UTF-8 text), then one SplitMix64 step on the hash.
std::uint64_t DeriveSeed(std::uint64_t master, std::string_view pair_id,
                         DistortionKind kind, std::uint32_t degree_index);

}  // namespace transcore

#endif  // TRANSCORE_DISTORTION_H_
