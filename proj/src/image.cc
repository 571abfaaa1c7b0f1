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
#include "transcore/image.h"

#include <algorithm>
#include <cmath>
#include <string>
#include <utility>

#include "transcore/error.h"

namespace transcore {

std::string_view ErrorCodeName(ErrorCode code) {
  switch (code) {
    case ErrorCode::kInvalidArgument: return "InvalidArgument";
    case ErrorCode::kIoError: return "IoError";
    case ErrorCode::kMalformedFile: return "MalformedFile";
    case ErrorCode::kUnsupportedPixelFormat: return "UnsupportedPixelFormat";
    case ErrorCode::kUnsupportedDtype: return "UnsupportedDtype";
    case ErrorCode::kUnsupportedByteOrder: return "UnsupportedByteOrder";
    case ErrorCode::kShapeMismatch: return "ShapeMismatch";
    case ErrorCode::kLengthMismatch: return "LengthMismatch";
    case ErrorCode::kImageTooSmall: return "ImageTooSmall";
    case ErrorCode::kBackendUnavailable: return "BackendUnavailable";
    case ErrorCode::kMissingEmbedding: return "MissingEmbedding";
    case ErrorCode::kNonFinite: return "NonFinite";
    case ErrorCode::kClassCountMismatch: return "ClassCountMismatch";
    case ErrorCode::kEmptyMatrix: return "EmptyMatrix";
    case ErrorCode::kGrayscaleUnsupported: return "GrayscaleUnsupported";
    case ErrorCode::kDegenerateSeries: return "DegenerateSeries";
    case ErrorCode::kZeroBaseline: return "ZeroBaseline";
    case ErrorCode::kInsufficientDegrees: return "InsufficientDegrees";
    case ErrorCode::kConfigError: return "ConfigError";
  }
  return "Unknown";
}

namespace {

void CheckDims(int height, int width, int channels) {
  if (height < 1 || width < 1) {
    throw Error(ErrorCode::kInvalidArgument,
                "image dimensions must be positive, got " +
                    std::to_string(height) + "x" + std::to_string(width));
  }
  if (channels != 1 && channels != 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "channels must be 1 or 3, got " + std::to_string(channels));
  }
}

}  // namespace

ImageBuffer::ImageBuffer(int height, int width, int channels, PixelScale scale)
    : height_(height), width_(width), channels_(channels), scale_(scale) {
  CheckDims(height, width, channels);
  data_.assign(static_cast<std::size_t>(height) * width * channels, 0.0f);
}

ImageBuffer::ImageBuffer(int height, int width, int channels, PixelScale scale,
                         std::vector<float> data)
    : height_(height),
      width_(width),
      channels_(channels),
      scale_(scale),
      data_(std::move(data)) {
  CheckDims(height, width, channels);
  if (data_.size() != static_cast<std::size_t>(height) * width * channels) {
    throw Error(ErrorCode::kLengthMismatch,
                "pixel data length " + std::to_string(data_.size()) +
                    " does not match " + std::to_string(height) + "x" +
                    std::to_string(width) + "x" + std::to_string(channels));
  }
}

void ImageBuffer::Validate() const {
  CheckDims(height_, width_, channels_);
  const double hi = ScaleMax(scale_);
  for (float v : data_) {
    if (!(v >= 0.0f && v <= hi)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "pixel value " + std::to_string(v) + " outside [0," +
                      std::to_string(hi) + "]");
    }
    if (scale_ == PixelScale::kU8 && v != std::floor(v)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "8-bit image holds non-integral value " + std::to_string(v));
    }
  }
}

ImageBuffer ToScale(const ImageBuffer& img, PixelScale scale) {
  if (img.scale() == scale) return img;
  std::vector<float> out(img.size());
  auto in = img.data();
  if (scale == PixelScale::kUnit) {
    for (std::size_t i = 0; i < in.size(); ++i) out[i] = in[i] / 255.0f;
  } else {
    for (std::size_t i = 0; i < in.size(); ++i) {
      out[i] = QuantizeU8(static_cast<double>(in[i]) * 255.0);
    }
  }
  return ImageBuffer(img.height(), img.width(), img.channels(), scale,
                     std::move(out));
}

ImageBuffer ToRgb(const ImageBuffer& img) {
  if (img.channels() == 3) return img;
  ImageBuffer out(img.height(), img.width(), 3, img.scale());
  for (int y = 0; y < img.height(); ++y) {
    for (int x = 0; x < img.width(); ++x) {
      const float v = img.at(y, x, 0);
      for (int c = 0; c < 3; ++c) out.at(y, x, c) = v;
    }
  }
  return out;
}

ImageBuffer ResizeBilinear(const ImageBuffer& img, int out_height,
                           int out_width) {
  if (out_height < 1 || out_width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "resize target must be >= 1x1");
  }
  const int in_h = img.height();
  const int in_w = img.width();
  const int ch = img.channels();
  if (in_h == out_height && in_w == out_width) return img;

  struct Tap {
    int lo, hi;
    double frac;
  };
  auto taps = [](int in_size, int out_size) {
    std::vector<Tap> t(out_size);
    const double ratio = static_cast<double>(in_size) / out_size;
    for (int o = 0; o < out_size; ++o) {
      double src = (o + 0.5) * ratio - 0.5;
      src = std::clamp(src, 0.0, static_cast<double>(in_size - 1));
      const int lo = static_cast<int>(std::floor(src));
      t[o] = {lo, std::min(lo + 1, in_size - 1), src - lo};
    }
    return t;
  };
  const std::vector<Tap> ty = taps(in_h, out_height);
  const std::vector<Tap> tx = taps(in_w, out_width);

  ImageBuffer out(out_height, out_width, ch, img.scale());
  const bool quantize = img.scale() == PixelScale::kU8;
  for (int y = 0; y < out_height; ++y) {
    const Tap& a = ty[y];
    for (int x = 0; x < out_width; ++x) {
      const Tap& b = tx[x];
      for (int c = 0; c < ch; ++c) {
        const double top = img.at(a.lo, b.lo, c) * (1.0 - b.frac) +
                           img.at(a.lo, b.hi, c) * b.frac;
        const double bottom = img.at(a.hi, b.lo, c) * (1.0 - b.frac) +
                              img.at(a.hi, b.hi, c) * b.frac;
        const double v = top * (1.0 - a.frac) + bottom * a.frac;
        out.at(y, x, c) = quantize ? QuantizeU8(v) : static_cast<float>(v);
      }
    }
  }
  return out;
}

std::size_t ShapeProduct(std::span<const std::int64_t> shape) {
  std::size_t n = 1;
  for (std::int64_t d : shape) n *= static_cast<std::size_t>(d);
  return n;
}

TensorF32::TensorF32(std::vector<std::int64_t> shape)
    : shape_(std::move(shape)) {
  if (shape_.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "tensor shape must be non-empty");
  }
  for (std::int64_t d : shape_) {
    if (d < 1) {
      throw Error(ErrorCode::kInvalidArgument,
                  "tensor dimensions must be >= 1");
    }
  }
  data_.assign(ShapeProduct(shape_), 0.0f);
}

TensorF32::TensorF32(std::vector<std::int64_t> shape, std::vector<float> data)
    : TensorF32(std::move(shape)) {
  if (data.size() != data_.size()) {
    throw Error(ErrorCode::kLengthMismatch,
                "tensor data length " + std::to_string(data.size()) +
                    " does not match shape product " +
                    std::to_string(data_.size()));
  }
  data_ = std::move(data);
}

}  // namespace transcore
