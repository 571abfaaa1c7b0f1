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
#include "transcore/synthetic.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <numbers>

#include "transcore/image_io.h"
#include "transcore/rng.h"

namespace transcore {

namespace {

struct Grating {
  double cos_t, sin_t, freq, phase, amplitude;

  static Grating Random(RngStream& rng, double amp_lo, double amp_hi) {
    const double theta = rng.Uniform(0.0, std::numbers::pi);
    const double wavelength = rng.Uniform(6.0, 10.0);
    return {std::cos(theta), std::sin(theta),
            2.0 * std::numbers::pi / wavelength,
            rng.Uniform(0.0, 2.0 * std::numbers::pi),
            rng.Uniform(amp_lo, amp_hi)};
  }

  double operator()(double y, double x) const {
    return amplitude * std::sin(freq * (x * cos_t + y * sin_t) + phase);
  }
};

struct Shape {
  bool ellipse;
  double cy, cx, ry, rx;
  double color[3];
  Grating texture;

  bool Contains(double y, double x) const {
    const double dy = (y - cy) / ry;
    const double dx = (x - cx) / rx;
    if (ellipse) return dy * dy + dx * dx <= 1.0;
    return std::fabs(dy) <= 1.0 && std::fabs(dx) <= 1.0;
  }
};

}  // namespace

ImageBuffer SyntheticImage(std::uint64_t seed, int height, int width) {
  RngStream rng(seed);
  const Grating background = Grating::Random(rng, 80.0, 110.0);
  double base[3], ramp_y[3], ramp_x[3];
  for (int c = 0; c < 3; ++c) {
    base[c] = rng.Uniform(115.0, 140.0);
    ramp_y[c] = rng.Uniform(-10.0, 10.0);
    ramp_x[c] = rng.Uniform(-10.0, 10.0);
  }
  const int n_shapes = 3 + static_cast<int>(rng.Uniform() * 4.0);
  std::vector<Shape> shapes;
  for (int i = 0; i < n_shapes; ++i) {
    Shape s;
    s.ellipse = rng.Uniform() < 0.5;
    s.cy = rng.Uniform(0.15, 0.85) * height;
    s.cx = rng.Uniform(0.15, 0.85) * width;
    s.ry = rng.Uniform(0.08, 0.25) * height;
    s.rx = rng.Uniform(0.08, 0.25) * width;
    for (double& c : s.color) c = rng.Uniform(100.0, 155.0);
    s.texture = Grating::Random(rng, 70.0, 100.0);
    shapes.push_back(s);
  }

  ImageBuffer img(height, width, 3, PixelScale::kU8);
  for (int y = 0; y < height; ++y) {
    const double fy = static_cast<double>(y) / height - 0.5;
    for (int x = 0; x < width; ++x) {
      const double fx = static_cast<double>(x) / width - 0.5;
      double px[3];
      const double g = background(y, x);
      for (int c = 0; c < 3; ++c) {
        px[c] = base[c] + ramp_y[c] * fy + ramp_x[c] * fx + g;
      }
      for (const Shape& s : shapes) {
        if (!s.Contains(y, x)) continue;
        const double t = s.texture(y, x);
        for (int c = 0; c < 3; ++c) px[c] = s.color[c] + t;
      }
      for (int c = 0; c < 3; ++c) img.at(y, x, c) = QuantizeU8(px[c]);
    }
  }
  return img;
}

ImageBuffer SyntheticTranslation(const ImageBuffer& source,
                                 std::uint64_t seed) {
  RngStream rng(seed ^ 0x5DEECE66DULL);
  double gamma[3];
  for (double& g : gamma) g = rng.Uniform(0.75, 1.35);
  ImageBuffer out = source;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      for (int c = 0; c < out.channels(); ++c) {
        const double v = source.at(y, x, c) / 255.0;
        out.at(y, x, c) = QuantizeU8(255.0 * std::pow(v, gamma[c % 3]));
      }
    }
  }
  return out;
}

std::vector<ImagePair> WriteSyntheticCorpus(const std::filesystem::path& dir,
                                            int count, int size,
                                            std::uint64_t seed) {
  std::filesystem::create_directories(dir);
  std::vector<ImagePair> pairs;
  for (int i = 0; i < count; ++i) {
    char id[32];
    std::snprintf(id, sizeof(id), "syn%03d", i);
    std::uint64_t sm = seed + static_cast<std::uint64_t>(i);
    const std::uint64_t image_seed = SplitMix64Next(sm);
    const ImageBuffer src = SyntheticImage(image_seed, size, size);
    const ImageBuffer gen = SyntheticTranslation(src, image_seed);
    ImagePair pair;
    pair.id = id;
    pair.source = dir / (std::string(id) + "_src.png");
    pair.translated = dir / (std::string(id) + "_gen.png");
    pair.task = "synthetic";
    WritePngFile(pair.source, src);
    WritePngFile(pair.translated, gen);
    pairs.push_back(std::move(pair));
  }
  return pairs;
}

}  // namespace transcore
