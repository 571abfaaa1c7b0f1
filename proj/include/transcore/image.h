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
#ifndef TRANSCORE_IMAGE_H_
#define TRANSCORE_IMAGE_H_

#include <cstddef>
#include <cstdint>
#include <span>
#include <vector>

namespace transcore {

// How pixel values are scaled. kU8 buffers hold integral values in [0,255];
// kUnit buffers hold values in [0,1].
enum class PixelScale { kU8, kUnit };

inline double ScaleMax(PixelScale scale) {
  return scale == PixelScale::kU8 ? 255.0 : 1.0;
}

// Row-major interleaved raster (H x W x C). Values are stored as float for
// both scales so arithmetic code does not branch on the storage type; an
// 8-bit image is still bit-exact since every integer in [0,255] is
// representable.
class ImageBuffer {
 public:
  ImageBuffer() = default;
  ImageBuffer(int height, int width, int channels, PixelScale scale);
  ImageBuffer(int height, int width, int channels, PixelScale scale,
              std::vector<float> data);

  int height() const { return height_; }
  int width() const { return width_; }
  int channels() const { return channels_; }
  PixelScale scale() const { return scale_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  float at(int y, int x, int c) const {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  float& at(int y, int x, int c) {
    return data_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }

  std::span<const float> data() const { return data_; }
  std::span<float> mutable_data() { return data_; }

  bool SameShape(const ImageBuffer& other) const {
    return height_ == other.height_ && width_ == other.width_ &&
           channels_ == other.channels_;
  }

  // Checks every documented invariant; throws Error on violation.
  void Validate() const;

  friend bool operator==(const ImageBuffer&, const ImageBuffer&) = default;

 private:
  int height_ = 0;
  int width_ = 0;
  int channels_ = 0;
  PixelScale scale_ = PixelScale::kU8;
  std::vector<float> data_;
};

// Rounds half up and clamps into [0,255]; the single quantization rule used
// whenever float arithmetic produces an 8-bit result.
inline float QuantizeU8(double v) {
  if (!(v > 0.0)) return 0.0f;
  if (v >= 255.0) return 255.0f;
  return static_cast<float>(static_cast<int>(v + 0.5));
}

// Converts between scales. kUnit -> kU8 quantizes with QuantizeU8.
ImageBuffer ToScale(const ImageBuffer& img, PixelScale scale);

// Replicates a single-channel image to three channels; 3-channel input is
// returned unchanged.
ImageBuffer ToRgb(const ImageBuffer& img);

// Bilinear resampling with half-pixel centers (align_corners = false).
// Source coordinates are clamped to the image, so sampling never
// extrapolates. kU8 output is quantized with QuantizeU8.
ImageBuffer ResizeBilinear(const ImageBuffer& img, int out_height,
                           int out_width);

// Dense float32 tensor, row-major.
class TensorF32 {
 public:
  TensorF32() = default;
  explicit TensorF32(std::vector<std::int64_t> shape);
  TensorF32(std::vector<std::int64_t> shape, std::vector<float> data);

  const std::vector<std::int64_t>& shape() const { return shape_; }
  std::span<const float> data() const { return data_; }
  std::span<float> mutable_data() { return data_; }
  std::size_t size() const { return data_.size(); }

  friend bool operator==(const TensorF32&, const TensorF32&) = default;

 private:
  std::vector<std::int64_t> shape_;
  std::vector<float> data_;
};

std::size_t ShapeProduct(std::span<const std::int64_t> shape);

}  // namespace transcore

#endif  // TRANSCORE_IMAGE_H_
