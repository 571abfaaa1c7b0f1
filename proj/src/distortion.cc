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
#include "transcore/distortion.h"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "transcore/error.h"
#include "transcore/rng.h"

namespace transcore {

double RngStream::Normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_r_ * std::sin(spare_theta_);
  }
  const double u1 = Uniform();
  const double u2 = Uniform();
  const double r = std::sqrt(-2.0 * std::log(1.0 - u1));
  const double theta = 2.0 * std::numbers::pi * u2;
  // The sine half is evaluated on the next call. Keeping sin and cos in
  // separate calls stops the compiler from fusing them into sincos(), whose
  // results can differ from plain cos() in the last bit.
  spare_r_ = r;
  spare_theta_ = theta;
  has_spare_ = true;
  return r * std::cos(theta);
}

std::string_view DistortionName(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::kPiecewiseAffine: return "piecewise-affine";
    case DistortionKind::kGaussianNoise: return "gaussian-noise";
    case DistortionKind::kColorJitter: return "color-jitter";
  }
  return "unknown";
}

std::optional<DistortionKind> ParseDistortionKind(std::string_view name) {
  for (DistortionKind k :
       {DistortionKind::kPiecewiseAffine, DistortionKind::kGaussianNoise,
        DistortionKind::kColorJitter}) {
    if (DistortionName(k) == name) return k;
  }
  return std::nullopt;
}

void DistortionSpec::Validate() const {
  if (!(degree >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "degree must be >= 0");
  }
  switch (kind) {
    case DistortionKind::kPiecewiseAffine:
      if (degree > 0.1) {
        throw Error(ErrorCode::kInvalidArgument,
                    "piecewise-affine degree must be within [0, 0.1]");
      }
      if (grid_rows < 2 || grid_cols < 2) {
        throw Error(ErrorCode::kInvalidArgument, "grid must be at least 2x2");
      }
      break;
    case DistortionKind::kGaussianNoise:
      if (degree > 10000.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "noise variance must be within [0, 10000]");
      }
      break;
    case DistortionKind::kColorJitter:
      if (degree >= 1.0) {
        throw Error(ErrorCode::kInvalidArgument,
                    "color-jitter degree must be within [0, 1)");
      }
      break;
  }
}

ImageBuffer ApplyDistortion(const ImageBuffer& img,
                            const DistortionSpec& spec) {
  spec.Validate();
  switch (spec.kind) {
    case DistortionKind::kPiecewiseAffine:
      return PiecewiseAffine(img, spec.degree, spec.seed, spec.grid_rows,
                             spec.grid_cols);
    case DistortionKind::kGaussianNoise:
      return GaussianNoise(img, spec.degree, spec.seed);
    case DistortionKind::kColorJitter:
      return ColorJitter(img, spec.degree, spec.seed, spec.deterministic);
  }
  return img;
}

std::vector<ControlOffset> PiecewiseAffineOffsets(int height, int width,
                                                  double degree,
                                                  std::uint64_t seed, int rows,
                                                  int cols) {
  const double sigma = degree * std::min(height, width);
  RngStream rng(seed);
  std::vector<ControlOffset> offsets(static_cast<std::size_t>(rows) * cols);
  for (auto& o : offsets) {
    o.dx = sigma * rng.Normal();
    o.dy = sigma * rng.Normal();
  }
  return offsets;
}

namespace {

double SampleBilinearClamped(const ImageBuffer& img, double sy, double sx,
                             int c) {
  sy = std::clamp(sy, 0.0, static_cast<double>(img.height() - 1));
  sx = std::clamp(sx, 0.0, static_cast<double>(img.width() - 1));
  const int y0 = static_cast<int>(std::floor(sy));
  const int x0 = static_cast<int>(std::floor(sx));
  const int y1 = std::min(y0 + 1, img.height() - 1);
  const int x1 = std::min(x0 + 1, img.width() - 1);
  const double fy = sy - y0;
  const double fx = sx - x0;
  const double top = img.at(y0, x0, c) * (1.0 - fx) + img.at(y0, x1, c) * fx;
  const double bottom =
      img.at(y1, x0, c) * (1.0 - fx) + img.at(y1, x1, c) * fx;
  return top * (1.0 - fy) + bottom * fy;
}

float StoreSample(double v, PixelScale scale) {
  if (scale == PixelScale::kU8) return QuantizeU8(v);
  return static_cast<float>(std::clamp(v, 0.0, 1.0));
}

}  // namespace

ImageBuffer PiecewiseAffine(const ImageBuffer& img, double degree,
                            std::uint64_t seed, int rows, int cols) {
  if (rows < 2 || cols < 2) {
    throw Error(ErrorCode::kInvalidArgument, "grid must be at least 2x2");
  }
  if (!(degree >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "degree must be >= 0");
  }
  if (img.height() < rows || img.width() < cols) {
    throw Error(ErrorCode::kImageTooSmall,
                "image smaller than the control grid");
  }
  if (degree == 0.0) return img;

  const std::vector<ControlOffset> offsets =
      PiecewiseAffineOffsets(img.height(), img.width(), degree, seed, rows,
                             cols);
  const double cell_h = static_cast<double>(img.height() - 1) / (rows - 1);
  const double cell_w = static_cast<double>(img.width() - 1) / (cols - 1);
  auto offset = [&](int i, int j) -> const ControlOffset& {
    return offsets[static_cast<std::size_t>(i) * cols + j];
  };

  ImageBuffer out(img.height(), img.width(), img.channels(), img.scale());
  for (int y = 0; y < img.height(); ++y) {
    const int i = std::min(static_cast<int>(y / cell_h), rows - 2);
    const double v = (y - i * cell_h) / cell_h;
    for (int x = 0; x < img.width(); ++x) {
      const int j = std::min(static_cast<int>(x / cell_w), cols - 2);
      const double u = (x - j * cell_w) / cell_w;
      const ControlOffset& tl = offset(i, j);
      const ControlOffset& br = offset(i + 1, j + 1);
      double dx, dy;
      if (u >= v) {
        const ControlOffset& tr = offset(i, j + 1);
        dx = (1.0 - u) * tl.dx + (u - v) * tr.dx + v * br.dx;
        dy = (1.0 - u) * tl.dy + (u - v) * tr.dy + v * br.dy;
      } else {
        const ControlOffset& bl = offset(i + 1, j);
        dx = (1.0 - v) * tl.dx + (v - u) * bl.dx + u * br.dx;
        dy = (1.0 - v) * tl.dy + (v - u) * bl.dy + u * br.dy;
      }
      for (int c = 0; c < img.channels(); ++c) {
        out.at(y, x, c) = StoreSample(
            SampleBilinearClamped(img, y + dy, x + dx, c), img.scale());
      }
    }
  }
  return out;
}

ImageBuffer GaussianNoise(const ImageBuffer& img, double variance,
                          std::uint64_t seed) {
  if (!(variance >= 0.0)) {
    throw Error(ErrorCode::kInvalidArgument, "variance must be >= 0");
  }
  if (variance == 0.0) return img;
  const bool u8 = img.scale() == PixelScale::kU8;
  const double sigma = std::sqrt(variance) / (u8 ? 1.0 : 255.0);
  RngStream rng(seed);
  ImageBuffer out = img;
  for (float& v : out.mutable_data()) {
    const double noisy = v + sigma * rng.Normal();
    v = StoreSample(noisy, img.scale());
  }
  return out;
}

JitterFactors SampleJitterFactors(double degree, std::uint64_t seed,
                                  bool deterministic) {
  JitterFactors f;
  double h;
  if (deterministic) {
    f.brightness = f.contrast = f.saturation = 1.0 + degree;
    h = 0.5 * degree;
  } else {
    RngStream rng(seed);
    f.brightness = rng.Uniform(1.0 - degree, 1.0 + degree);
    f.contrast = rng.Uniform(1.0 - degree, 1.0 + degree);
    f.saturation = rng.Uniform(1.0 - degree, 1.0 + degree);
    h = rng.Uniform(-degree, degree);
  }
  f.hue_turns = 0.5 * h;
  return f;
}

namespace {

constexpr double kLumaR = 0.299;
constexpr double kLumaG = 0.587;
constexpr double kLumaB = 0.114;

double Clamp01(double v) { return std::clamp(v, 0.0, 1.0); }

void RotateHue(double& r, double& g, double& b, double turns) {
  const double maxc = std::max({r, g, b});
  const double minc = std::min({r, g, b});
  const double delta = maxc - minc;
  if (delta <= 0.0) return;  // achromatic
  const double value = maxc;
  const double sat = delta / maxc;
  double hue;
  if (maxc == r) {
    hue = (g - b) / delta;
  } else if (maxc == g) {
    hue = 2.0 + (b - r) / delta;
  } else {
    hue = 4.0 + (r - g) / delta;
  }
  hue = hue / 6.0 + turns;
  hue -= std::floor(hue);

  const double h6 = hue * 6.0;
  const int sector = std::min(static_cast<int>(h6), 5);
  const double frac = h6 - sector;
  const double p = value * (1.0 - sat);
  const double q = value * (1.0 - sat * frac);
  const double t = value * (1.0 - sat * (1.0 - frac));
  switch (sector) {
    case 0: r = value; g = t; b = p; break;
    case 1: r = q; g = value; b = p; break;
    case 2: r = p; g = value; b = t; break;
    case 3: r = p; g = q; b = value; break;
    case 4: r = t; g = p; b = value; break;
    default: r = value; g = p; b = q; break;
  }
}

}  // namespace

ImageBuffer ApplyJitter(const ImageBuffer& img, const JitterFactors& f) {
  if (img.channels() != 3) {
    throw Error(ErrorCode::kGrayscaleUnsupported,
                "color jitter needs a 3-channel image");
  }
  const double scale = ScaleMax(img.scale());
  const std::size_t n = static_cast<std::size_t>(img.height()) * img.width();
  std::vector<double> px(n * 3);
  auto in = img.data();
  for (std::size_t i = 0; i < px.size(); ++i) {
    px[i] = Clamp01(in[i] / scale * f.brightness);
  }

  double mean_luma = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    mean_luma += kLumaR * px[3 * i] + kLumaG * px[3 * i + 1] +
                 kLumaB * px[3 * i + 2];
  }
  mean_luma /= static_cast<double>(n);
  for (double& v : px) v = Clamp01((v - mean_luma) * f.contrast + mean_luma);

  for (std::size_t i = 0; i < n; ++i) {
    double* p = &px[3 * i];
    const double gray = kLumaR * p[0] + kLumaG * p[1] + kLumaB * p[2];
    for (int c = 0; c < 3; ++c) {
      p[c] = Clamp01((p[c] - gray) * f.saturation + gray);
    }
    if (f.hue_turns != 0.0) RotateHue(p[0], p[1], p[2], f.hue_turns);
  }

  ImageBuffer out(img.height(), img.width(), 3, img.scale());
  auto dst = out.mutable_data();
  for (std::size_t i = 0; i < px.size(); ++i) {
    dst[i] = StoreSample(px[i] * scale, img.scale());
  }
  return out;
}

ImageBuffer ColorJitter(const ImageBuffer& img, double degree,
                        std::uint64_t seed, bool deterministic) {
  if (!(degree >= 0.0 && degree < 1.0)) {
    throw Error(ErrorCode::kInvalidArgument,
                "color-jitter degree must be within [0, 1)");
  }
  if (img.channels() != 3) {
    throw Error(ErrorCode::kGrayscaleUnsupported,
                "color jitter needs a 3-channel image");
  }
  if (degree == 0.0) return img;
  return ApplyJitter(img, SampleJitterFactors(degree, seed, deterministic));
}

std::uint64_t DeriveSeed(std::uint64_t master, std::string_view pair_id,
                         DistortionKind kind, std::uint32_t degree_index) {
  std::string text = std::to_string(master);
  text += '\x1f';
  text += pair_id;
  text += '\x1f';
  text += DistortionName(kind);
  text += '\x1f';
  text += std::to_string(degree_index);

  std::uint64_t hash = 0xCBF29CE484222325ULL;
  for (unsigned char byte : text) {
    hash ^= byte;
    hash *= 0x100000001B3ULL;
  }
  return SplitMix64Next(hash);
}

}  // namespace transcore
