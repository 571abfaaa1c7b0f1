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
#ifndef TRANSCORE_ENCODER_H_
#define TRANSCORE_ENCODER_H_

#include <array>
#include <cstdint>
#include <filesystem>
#include <memory>
#include <mutex>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "transcore/image.h"

namespace transcore {

// C x H x W float32 feature grid; each (h, w) fiber describes local content.
class EmbeddingMap {
 public:
  EmbeddingMap() = default;
  EmbeddingMap(int channels, int height, int width);
  // Throws kNonFinite if any value is NaN or infinite.
  EmbeddingMap(int channels, int height, int width, std::vector<float> data);

  // Accepts [C,H,W] or [1,C,H,W].
  static EmbeddingMap FromTensor(const TensorF32& tensor);
  TensorF32 ToTensor() const;

  int channels() const { return channels_; }
  int height() const { return height_; }
  int width() const { return width_; }
  std::array<int, 3> shape() const { return {channels_, height_, width_}; }

  float at(int c, int y, int x) const {
    return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }
  float& at(int c, int y, int x) {
    return data_[(static_cast<std::size_t>(c) * height_ + y) * width_ + x];
  }

  std::span<const float> data() const { return data_; }
  std::span<float> mutable_data() { return data_; }

  friend bool operator==(const EmbeddingMap&, const EmbeddingMap&) = default;

 private:
  int channels_ = 0;
  int height_ = 0;
  int width_ = 0;
  std::vector<float> data_;
};

// Resize + per-channel standardization applied before an exchange-format
// encoder. Mean and std are on the 0-255 pixel scale.
struct Preprocessing {
  int size = 1024;
  std::array<double, 3> mean = {123.675, 116.28, 103.53};
  std::array<double, 3> std = {58.395, 57.12, 57.375};

  static Preprocessing Sam() { return {}; }
  static Preprocessing Vit() {
    return {224, {127.5, 127.5, 127.5}, {127.5, 127.5, 127.5}};
  }

  // Stable identifier used in cache keys.
  std::string Id() const;
};

enum class EncoderKind { kOnnxModel, kPrecomputed, kStub };

struct EncoderSpec {
  EncoderKind kind = EncoderKind::kStub;
  std::optional<std::filesystem::path> model_path;
  std::optional<std::filesystem::path> embed_dir;
  // Required for onnx-model and precomputed; the stub derives H and W from
  // the image and always has 8 channels.
  std::optional<std::array<int, 3>> expected_shape;
  Preprocessing preprocessing;

  static EncoderSpec Stub();
  static EncoderSpec Sam(std::filesystem::path model);
  static EncoderSpec Vit(std::filesystem::path model);
  static EncoderSpec Precomputed(std::filesystem::path dir,
                                 std::optional<std::array<int, 3>> shape =
                                     std::nullopt);

  // Parses "stub", "onnx:<path>" or "precomputed:<dir>". `onnx_shape` and
  // `onnx_pre` describe the model contract (SAM by default).
  static EncoderSpec Parse(std::string_view uri,
                           std::array<int, 3> onnx_shape = {256, 64, 64},
                           Preprocessing onnx_pre = Preprocessing::Sam());

  void Validate() const;
  std::string KindName() const;
};

// Identifies which image is being embedded so the precomputed backend can
// locate `<pair_id>.<role>.npy`. A distorted image never has a precomputed
// embedding.
struct EmbeddingKey {
  std::string pair_id;
  std::string role;  // "src" or "gen"
  bool distorted = false;
};

class Encoder {
 public:
  virtual ~Encoder() = default;
  // `key` may be null for backends that only look at pixels.
  virtual EmbeddingMap Embed(const ImageBuffer& img,
                             const EmbeddingKey* key) = 0;
  // Identifier of the backend and its preprocessing, used in cache keys.
  virtual std::string Id() const = 0;
};

std::unique_ptr<Encoder> MakeEncoder(const EncoderSpec& spec);

// Convenience wrapper around MakeEncoder(spec)->Embed(img, key).
EmbeddingMap Embed(const EncoderSpec& spec, const ImageBuffer& img,
                   const EmbeddingKey* key = nullptr);

// Grayscale -> RGB, bilinear resize to size x size, [0,255] float,
// per-channel (v - mean) / std. Shape [1, 3, size, size].
TensorF32 PreprocessImage(const ImageBuffer& img, const Preprocessing& pre);

inline TensorF32 PreprocessForSam(const ImageBuffer& img) {
  return PreprocessImage(img, Preprocessing::Sam());
}

inline constexpr int kStubPatch = 16;
inline constexpr int kStubBins = 8;

// Analytic stand-in encoder: 8-bin gradient-orientation histograms over
// non-overlapping 16x16 patches of the BT.601 luminance, magnitude
// weighted, each patch vector L2-normalized (zero vectors stay zero).
// Output shape (8, floor(H/16), floor(W/16)).
EmbeddingMap StubEncode(const ImageBuffer& img);

// Orientation bin of a gradient vector, bins of 45 degrees counted
// counter-clockwise from +x in (gx, gy) coordinates, half-open on the
// upper edge. Computed with comparisons only so 90-degree rotations of the
// vector shift the bin by exactly two.
int OrientationBin(double gx, double gy);

class PrecomputedEncoder : public Encoder {
 public:
  PrecomputedEncoder(std::filesystem::path dir,
                     std::optional<std::array<int, 3>> expected_shape);
  EmbeddingMap Embed(const ImageBuffer& img, const EmbeddingKey* key) override;
  std::string Id() const override;

 private:
  std::filesystem::path dir_;
  std::optional<std::array<int, 3>> expected_shape_;
};

class StubEncoder : public Encoder {
 public:
  EmbeddingMap Embed(const ImageBuffer& img, const EmbeddingKey*) override {
    return StubEncode(img);
  }
  std::string Id() const override { return "stub-orientation-v1"; }
};

// Stores embeddings as NPY files under `dir`, keyed by a content hash of
// (pixel bytes, inner encoder id). Thread-safe.
class CachingEncoder : public Encoder {
 public:
  CachingEncoder(std::unique_ptr<Encoder> inner, std::filesystem::path dir);
  EmbeddingMap Embed(const ImageBuffer& img, const EmbeddingKey* key) override;
  std::string Id() const override { return inner_->Id(); }

  std::filesystem::path CachePath(const ImageBuffer& img) const;

 private:
  std::unique_ptr<Encoder> inner_;
  std::filesystem::path dir_;
  std::mutex mu_;
};

// Cache directory from TRANSCORE_CACHE, if set and non-empty.
std::optional<std::filesystem::path> CacheDirFromEnv();

// True when the library was built against ONNX Runtime.
bool OnnxRuntimeAvailable();

// FNV-1a 64 over raw bytes; exposed for cache keys and tests.
std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t hash = 0xCBF29CE484222325ULL);

}  // namespace transcore

#endif  // TRANSCORE_ENCODER_H_
