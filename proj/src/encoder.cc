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
#include "transcore/encoder.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <string>
#include <utility>

#include "transcore/error.h"
#include "transcore/image_io.h"
#include "transcore/onnx_session.h"

namespace transcore {

EmbeddingMap::EmbeddingMap(int channels, int height, int width)
    : channels_(channels), height_(height), width_(width) {
  if (channels < 1 || height < 1 || width < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "embedding dimensions must be >= 1");
  }
  data_.assign(static_cast<std::size_t>(channels) * height * width, 0.0f);
}

EmbeddingMap::EmbeddingMap(int channels, int height, int width,
                           std::vector<float> data)
    : EmbeddingMap(channels, height, width) {
  if (data.size() != data_.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "embedding data length does not match C*H*W");
  }
  for (float v : data) {
    if (!std::isfinite(v)) {
      throw Error(ErrorCode::kNonFinite, "embedding contains NaN or Inf");
    }
  }
  data_ = std::move(data);
}

EmbeddingMap EmbeddingMap::FromTensor(const TensorF32& tensor) {
  std::vector<std::int64_t> shape = tensor.shape();
  if (shape.size() == 4 && shape[0] == 1) shape.erase(shape.begin());
  if (shape.size() != 3) {
    throw Error(ErrorCode::kShapeMismatch,
                "embedding tensor must be [C,H,W] or [1,C,H,W]");
  }
  return EmbeddingMap(static_cast<int>(shape[0]), static_cast<int>(shape[1]),
                      static_cast<int>(shape[2]),
                      std::vector<float>(tensor.data().begin(),
                                         tensor.data().end()));
}

TensorF32 EmbeddingMap::ToTensor() const {
  return TensorF32({channels_, height_, width_}, data_);
}

std::string Preprocessing::Id() const {
  char buf[256];
  std::snprintf(buf, sizeof(buf),
                "bilinear%d/mean=%.6f,%.6f,%.6f/std=%.6f,%.6f,%.6f", size,
                mean[0], mean[1], mean[2], std[0], std[1], std[2]);
  return buf;
}

EncoderSpec EncoderSpec::Stub() { return EncoderSpec{}; }

EncoderSpec EncoderSpec::Sam(std::filesystem::path model) {
  EncoderSpec spec;
  spec.kind = EncoderKind::kOnnxModel;
  spec.model_path = std::move(model);
  spec.expected_shape = std::array<int, 3>{256, 64, 64};
  spec.preprocessing = Preprocessing::Sam();
  return spec;
}

EncoderSpec EncoderSpec::Vit(std::filesystem::path model) {
  EncoderSpec spec;
  spec.kind = EncoderKind::kOnnxModel;
  spec.model_path = std::move(model);
  spec.expected_shape = std::array<int, 3>{768, 14, 14};
  spec.preprocessing = Preprocessing::Vit();
  return spec;
}

EncoderSpec EncoderSpec::Precomputed(std::filesystem::path dir,
                                     std::optional<std::array<int, 3>> shape) {
  EncoderSpec spec;
  spec.kind = EncoderKind::kPrecomputed;
  spec.embed_dir = std::move(dir);
  spec.expected_shape = shape;
  return spec;
}

EncoderSpec EncoderSpec::Parse(std::string_view uri,
                               std::array<int, 3> onnx_shape,
                               Preprocessing onnx_pre) {
  if (uri == "stub") return Stub();
  const auto colon = uri.find(':');
  if (colon == std::string_view::npos || colon + 1 == uri.size()) {
    throw Error(ErrorCode::kConfigError,
                "encoder must be stub, onnx:<path> or precomputed:<dir>, got '" +
                    std::string(uri) + "'");
  }
  const std::string_view scheme = uri.substr(0, colon);
  const std::filesystem::path target(std::string(uri.substr(colon + 1)));
  if (scheme == "onnx") {
    EncoderSpec spec;
    spec.kind = EncoderKind::kOnnxModel;
    spec.model_path = target;
    spec.expected_shape = onnx_shape;
    spec.preprocessing = onnx_pre;
    return spec;
  }
  if (scheme == "precomputed") return Precomputed(target);
  throw Error(ErrorCode::kConfigError,
              "unknown encoder scheme '" + std::string(scheme) + "'");
}

void EncoderSpec::Validate() const {
  auto fail = [](const std::string& msg) {
    throw Error(ErrorCode::kConfigError, msg);
  };
  switch (kind) {
    case EncoderKind::kStub:
      if (model_path || embed_dir) fail("stub encoder takes no paths");
      break;
    case EncoderKind::kOnnxModel:
      if (!model_path || embed_dir) {
        fail("onnx-model encoder needs model_path and no embed_dir");
      }
      if (!expected_shape) fail("onnx-model encoder needs expected_shape");
      break;
    case EncoderKind::kPrecomputed:
      if (!embed_dir || model_path) {
        fail("precomputed encoder needs embed_dir and no model_path");
      }
      break;
  }
  if (expected_shape) {
    for (int d : *expected_shape) {
      if (d < 1) fail("expected_shape dimensions must be >= 1");
    }
  }
  if (preprocessing.size < 1) fail("preprocessing size must be >= 1");
  for (double s : preprocessing.std) {
    if (!(s > 0.0)) fail("preprocessing std must be positive");
  }
}

std::string EncoderSpec::KindName() const {
  switch (kind) {
    case EncoderKind::kOnnxModel: return "onnx-model";
    case EncoderKind::kPrecomputed: return "precomputed";
    case EncoderKind::kStub: return "stub";
  }
  return "unknown";
}

TensorF32 PreprocessImage(const ImageBuffer& img, const Preprocessing& pre) {
  const ImageBuffer rgb = ToScale(ToRgb(img), PixelScale::kUnit);
  const ImageBuffer resized = ResizeBilinear(rgb, pre.size, pre.size);
  TensorF32 out({1, 3, pre.size, pre.size});
  auto dst = out.mutable_data();
  const std::size_t plane = static_cast<std::size_t>(pre.size) * pre.size;
  for (int y = 0; y < pre.size; ++y) {
    for (int x = 0; x < pre.size; ++x) {
      for (int c = 0; c < 3; ++c) {
        const double v = static_cast<double>(resized.at(y, x, c)) * 255.0;
        dst[c * plane + static_cast<std::size_t>(y) * pre.size + x] =
            static_cast<float>((v - pre.mean[c]) / pre.std[c]);
      }
    }
  }
  return out;
}

int OrientationBin(double gx, double gy) {
  if (gx == 0.0 && gy == 0.0) return 0;
  int quadrant = 0;
  while (!(gx > 0.0 && gy >= 0.0)) {
    const double t = gx;
    gx = gy;
    gy = -t;
    ++quadrant;
  }
  return 2 * quadrant + (gy >= gx ? 1 : 0);
}

EmbeddingMap StubEncode(const ImageBuffer& img) {
  const int h0 = img.height();
  const int w0 = img.width();
  if (std::min(h0, w0) < kStubPatch) {
    throw Error(ErrorCode::kImageTooSmall,
                "stub encoder needs at least 16x16 pixels");
  }
  // Luminance scaled by 1000 on the 0-255 scale: integral (hence exact) for
  // 8-bit input, which makes gradients exactly invariant to global offsets.
  const double unit = img.scale() == PixelScale::kU8 ? 1.0 : 255.0;
  std::vector<double> luma(static_cast<std::size_t>(h0) * w0);
  for (int y = 0; y < h0; ++y) {
    for (int x = 0; x < w0; ++x) {
      double l;
      if (img.channels() == 3) {
        l = 299.0 * (img.at(y, x, 0) * unit) +
            587.0 * (img.at(y, x, 1) * unit) +
            114.0 * (img.at(y, x, 2) * unit);
      } else {
        l = 1000.0 * (img.at(y, x, 0) * unit);
      }
      luma[static_cast<std::size_t>(y) * w0 + x] = l;
    }
  }
  auto lum = [&](int y, int x) {
    y = std::clamp(y, 0, h0 - 1);
    x = std::clamp(x, 0, w0 - 1);
    return luma[static_cast<std::size_t>(y) * w0 + x];
  };

  const int out_h = h0 / kStubPatch;
  const int out_w = w0 / kStubPatch;
  EmbeddingMap out(kStubBins, out_h, out_w);
  for (int py = 0; py < out_h; ++py) {
    for (int px = 0; px < out_w; ++px) {
      double hist[kStubBins] = {};
      for (int y = py * kStubPatch; y < (py + 1) * kStubPatch; ++y) {
        for (int x = px * kStubPatch; x < (px + 1) * kStubPatch; ++x) {
          const double gx = (lum(y, x + 1) - lum(y, x - 1)) / 2000.0;
          const double gy = (lum(y + 1, x) - lum(y - 1, x)) / 2000.0;
          const double mag = std::sqrt(gx * gx + gy * gy);
          if (mag > 0.0) hist[OrientationBin(gx, gy)] += mag;
        }
      }
      double norm = 0.0;
      for (double v : hist) norm += v * v;
      norm = std::max(std::sqrt(norm), 1e-12);
      for (int b = 0; b < kStubBins; ++b) {
        out.at(b, py, px) = static_cast<float>(hist[b] / norm);
      }
    }
  }
  return out;
}

namespace {

void CheckShape(const EmbeddingMap& map,
                const std::optional<std::array<int, 3>>& expected,
                const std::string& what) {
  if (expected && map.shape() != *expected) {
    const auto s = map.shape();
    const auto e = *expected;
    throw Error(ErrorCode::kShapeMismatch,
                what + " produced (" + std::to_string(s[0]) + "," +
                    std::to_string(s[1]) + "," + std::to_string(s[2]) +
                    "), expected (" + std::to_string(e[0]) + "," +
                    std::to_string(e[1]) + "," + std::to_string(e[2]) + ")");
  }
}

class OnnxEncoder : public Encoder {
 public:
  explicit OnnxEncoder(const EncoderSpec& spec)
      : session_(*spec.model_path),
        model_path_(*spec.model_path),
        expected_(spec.expected_shape),
        pre_(spec.preprocessing) {}

  EmbeddingMap Embed(const ImageBuffer& img, const EmbeddingKey*) override {
    const TensorF32 input = PreprocessImage(img, pre_);
    std::vector<TensorF32> out =
        session_.Run({{"image", &input}}, {"embedding"});
    EmbeddingMap map = EmbeddingMap::FromTensor(out.at(0));
    CheckShape(map, expected_, "encoder " + model_path_.string());
    return map;
  }

  std::string Id() const override {
    return "onnx:" + model_path_.filename().string() + "/" + pre_.Id();
  }

 private:
  OnnxSession session_;
  std::filesystem::path model_path_;
  std::optional<std::array<int, 3>> expected_;
  Preprocessing pre_;
};

}  // namespace

PrecomputedEncoder::PrecomputedEncoder(
    std::filesystem::path dir, std::optional<std::array<int, 3>> expected)
    : dir_(std::move(dir)), expected_shape_(expected) {}

EmbeddingMap PrecomputedEncoder::Embed(const ImageBuffer&,
                                       const EmbeddingKey* key) {
  if (key == nullptr || key->pair_id.empty()) {
    throw Error(ErrorCode::kMissingEmbedding,
                "precomputed encoder needs a pair id and role");
  }
  if (key->distorted) {
    throw Error(ErrorCode::kMissingEmbedding,
                "no precomputed embedding for distorted image of pair " +
                    key->pair_id);
  }
  const std::filesystem::path path =
      dir_ / (key->pair_id + "." + key->role + ".npy");
  if (!std::filesystem::exists(path)) {
    throw Error(ErrorCode::kMissingEmbedding,
                "missing embedding file " + path.string());
  }
  EmbeddingMap map = EmbeddingMap::FromTensor(ReadTensorFile(path));
  CheckShape(map, expected_shape_, path.string());
  return map;
}

std::string PrecomputedEncoder::Id() const {
  return "precomputed:" + dir_.string();
}

std::uint64_t Fnv1a64(std::span<const std::uint8_t> bytes,
                      std::uint64_t hash) {
  for (std::uint8_t b : bytes) {
    hash ^= b;
    hash *= 0x100000001B3ULL;
  }
  return hash;
}

CachingEncoder::CachingEncoder(std::unique_ptr<Encoder> inner,
                               std::filesystem::path dir)
    : inner_(std::move(inner)), dir_(std::move(dir)) {}

std::filesystem::path CachingEncoder::CachePath(const ImageBuffer& img) const {
  const int dims[4] = {img.height(), img.width(), img.channels(),
                       img.scale() == PixelScale::kU8 ? 8 : 32};
  std::uint64_t h = Fnv1a64(
      {reinterpret_cast<const std::uint8_t*>(dims), sizeof(dims)});
  h = Fnv1a64({reinterpret_cast<const std::uint8_t*>(img.data().data()),
               img.size() * sizeof(float)},
              h);
  const std::string id = inner_->Id();
  h = Fnv1a64({reinterpret_cast<const std::uint8_t*>(id.data()), id.size()},
              h);
  char name[32];
  std::snprintf(name, sizeof(name), "%016llx.npy",
                static_cast<unsigned long long>(h));
  return dir_ / name;
}

EmbeddingMap CachingEncoder::Embed(const ImageBuffer& img,
                                   const EmbeddingKey* key) {
  const std::filesystem::path path = CachePath(img);
  {
    std::lock_guard<std::mutex> lock(mu_);
    if (std::filesystem::exists(path)) {
      return EmbeddingMap::FromTensor(ReadTensorFile(path));
    }
  }
  EmbeddingMap map = inner_->Embed(img, key);
  std::lock_guard<std::mutex> lock(mu_);
  std::filesystem::create_directories(dir_);
  const std::filesystem::path tmp = path.string() + ".tmp";
  WriteTensorFile(tmp, map.ToTensor());
  std::filesystem::rename(tmp, path);
  return map;
}

std::optional<std::filesystem::path> CacheDirFromEnv() {
  const char* env = std::getenv("TRANSCORE_CACHE");
  if (env == nullptr || *env == '\0') return std::nullopt;
  return std::filesystem::path(env);
}

bool OnnxRuntimeAvailable() {
#ifdef TRANSCORE_HAVE_ONNXRUNTIME
  return true;
#else
  return false;
#endif
}

std::unique_ptr<Encoder> MakeEncoder(const EncoderSpec& spec) {
  spec.Validate();
  switch (spec.kind) {
    case EncoderKind::kStub:
      return std::make_unique<StubEncoder>();
    case EncoderKind::kPrecomputed:
      return std::make_unique<PrecomputedEncoder>(*spec.embed_dir,
                                                  spec.expected_shape);
    case EncoderKind::kOnnxModel: {
      std::unique_ptr<Encoder> enc = std::make_unique<OnnxEncoder>(spec);
      if (auto dir = CacheDirFromEnv()) {
        enc = std::make_unique<CachingEncoder>(std::move(enc), *dir);
      }
      return enc;
    }
  }
  throw Error(ErrorCode::kConfigError, "unknown encoder kind");
}

EmbeddingMap Embed(const EncoderSpec& spec, const ImageBuffer& img,
                   const EmbeddingKey* key) {
  return MakeEncoder(spec)->Embed(img, key);
}

}  // namespace transcore
