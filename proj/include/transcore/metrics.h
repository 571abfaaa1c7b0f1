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
#ifndef TRANSCORE_METRICS_H_
#define TRANSCORE_METRICS_H_

#include <cstdint>
#include <filesystem>
#include <memory>
#include <optional>
#include <vector>

#include "transcore/encoder.h"
#include "transcore/image.h"
#include "transcore/onnx_session.h"
#include "transcore/samscore.h"

namespace transcore {

// ---------------------------------------------------------------------------
// Pixel metrics. All require identical shape and scale and are computed in
// the images' native units.

struct PixelError {
  double mse = 0.0;
  double rms = 0.0;
};

PixelError ComputePixelError(const ImageBuffer& a, const ImageBuffer& b);

// Root-mean-square difference, sqrt(sum (a-b)^2 / N).
inline double L2Distance(const ImageBuffer& a, const ImageBuffer& b) {
  return ComputePixelError(a, b).rms;
}

// 10 log10(peak^2 / mse); +infinity when the images are identical. A
// non-positive `peak` selects the scale default (255 or 1).
double Psnr(const ImageBuffer& a, const ImageBuffer& b, double peak = 0.0);

struct SsimParams {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
};

// Mean SSIM over valid-mode window positions and channels, Gaussian
// window, dynamic range 255 (kU8) or 1 (kUnit).
double Ssim(const ImageBuffer& a, const ImageBuffer& b,
            const SsimParams& params = {});

// Normalized 2-D Gaussian weights, row-major window x window.
std::vector<double> GaussianWindow(int window, double sigma);

// ---------------------------------------------------------------------------
// Segmentation scoring (FCNScore).

struct LabelMap {
  int height = 0;
  int width = 0;
  int num_classes = 0;
  std::optional<int> ignore_id;
  std::vector<std::int32_t> labels;

  std::int32_t at(int y, int x) const {
    return labels[static_cast<std::size_t>(y) * width + x];
  }
  void Validate() const;
};

// Single-channel PNG whose pixel values are class ids.
LabelMap ReadLabelMap(const std::filesystem::path& path, int num_classes,
                      std::optional<int> ignore_id);
LabelMap ResizeLabelsNearest(const LabelMap& labels, int height, int width);

// Rows are reference (gt) classes, columns predicted classes.
class ConfusionMatrix {
 public:
  explicit ConfusionMatrix(int num_classes);

  int num_classes() const { return num_classes_; }
  std::uint64_t at(int gt, int pred) const {
    return counts_[static_cast<std::size_t>(gt) * num_classes_ + pred];
  }
  std::uint64_t& at(int gt, int pred) {
    return counts_[static_cast<std::size_t>(gt) * num_classes_ + pred];
  }
  std::uint64_t Total() const;
  std::uint64_t RowSum(int c) const;
  std::uint64_t ColSum(int c) const;

  friend bool operator==(const ConfusionMatrix&,
                         const ConfusionMatrix&) = default;

 private:
  int num_classes_;
  std::vector<std::uint64_t> counts_;
};

// Pixels whose gt or prediction equals the gt's ignore_id are skipped.
ConfusionMatrix Confusion(const LabelMap& gt, const LabelMap& pred);

struct FcnScores {
  double per_pixel_acc = 0.0;
  // Mean IoU over classes present in gt or prediction.
  double class_iou = 0.0;
  // NaN for classes absent from both.
  std::vector<double> per_class_iou;
};

FcnScores ComputeFcnScores(const ConfusionMatrix& cm);

// Produces a label map for an image (argmax over class logits).
class Segmenter {
 public:
  virtual ~Segmenter() = default;
  virtual LabelMap Segment(const ImageBuffer& img) = 0;
  virtual int num_classes() const = 0;
};

// ONNX segmenter: input "image" [1,3,S,S] (preprocessed like the encoders),
// output "logits" [1,K,S,S]. The label map is resized back to the image
// size with nearest-neighbor sampling.
class OnnxSegmenter : public Segmenter {
 public:
  OnnxSegmenter(const std::filesystem::path& model, int num_classes,
                Preprocessing pre);
  LabelMap Segment(const ImageBuffer& img) override;
  int num_classes() const override { return num_classes_; }

 private:
  OnnxSession session_;
  int num_classes_;
  Preprocessing pre_;
};

// Segments `translated` and scores it against the reference labels.
FcnScores FcnScore(Segmenter& segmenter, const ImageBuffer& translated,
                   const LabelMap& reference);

// ---------------------------------------------------------------------------
// Learned metrics.

class PerceptualDistance {
 public:
  virtual ~PerceptualDistance() = default;
  virtual double Distance(const ImageBuffer& a, const ImageBuffer& b) = 0;
};

// LPIPS exported as one graph: inputs "image_a", "image_b" [1,3,256,256] in
// [-1,1], output "distance" [1].
class OnnxLpips : public PerceptualDistance {
 public:
  explicit OnnxLpips(const std::filesystem::path& model);
  double Distance(const ImageBuffer& a, const ImageBuffer& b) override;

  // RGB, bilinear 256x256, unit range mapped to [-1,1].
  static TensorF32 Prepare(const ImageBuffer& img);

 private:
  OnnxSession session_;
};

// LPIPS through an encoder spec whose kind must be onnx-model.
double Lpips(const EncoderSpec& spec, const ImageBuffer& a,
             const ImageBuffer& b);

// SAMScore math over a ViT-style encoder's patch grid.
ScoreResult VitScore(Encoder& vit_encoder, const ImageBuffer& a,
                     const ImageBuffer& b);
ScoreResult VitScore(const EncoderSpec& spec, const ImageBuffer& a,
                     const ImageBuffer& b);

}  // namespace transcore

#endif  // TRANSCORE_METRICS_H_
