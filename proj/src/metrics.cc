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
#include "transcore/metrics.h"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>
#include <utility>

#include "transcore/error.h"
#include "transcore/image_io.h"

namespace transcore {

namespace {

void RequireSameImages(const ImageBuffer& a, const ImageBuffer& b) {
  if (!a.SameShape(b) || a.scale() != b.scale()) {
    throw Error(ErrorCode::kShapeMismatch,
                "images differ in shape or scale: " +
                    std::to_string(a.height()) + "x" +
                    std::to_string(a.width()) + "x" +
                    std::to_string(a.channels()) + " vs " +
                    std::to_string(b.height()) + "x" +
                    std::to_string(b.width()) + "x" +
                    std::to_string(b.channels()));
  }
}

}  // namespace

PixelError ComputePixelError(const ImageBuffer& a, const ImageBuffer& b) {
  RequireSameImages(a, b);
  auto da = a.data();
  auto db = b.data();
  double sum = 0.0;
  for (std::size_t i = 0; i < da.size(); ++i) {
    const double d = static_cast<double>(da[i]) - db[i];
    sum += d * d;
  }
  PixelError e;
  e.mse = sum / static_cast<double>(da.size());
  e.rms = std::sqrt(e.mse);
  return e;
}

double Psnr(const ImageBuffer& a, const ImageBuffer& b, double peak) {
  if (peak <= 0.0) peak = ScaleMax(a.scale());
  const double mse = ComputePixelError(a, b).mse;
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(peak * peak / mse);
}

std::vector<double> GaussianWindow(int window, double sigma) {
  std::vector<double> g(window);
  const double center = (window - 1) / 2.0;
  double sum = 0.0;
  for (int i = 0; i < window; ++i) {
    const double d = i - center;
    g[i] = std::exp(-(d * d) / (2.0 * sigma * sigma));
    sum += g[i];
  }
  for (double& v : g) v /= sum;
  std::vector<double> w(static_cast<std::size_t>(window) * window);
  for (int y = 0; y < window; ++y) {
    for (int x = 0; x < window; ++x) w[y * window + x] = g[y] * g[x];
  }
  return w;
}

double Ssim(const ImageBuffer& a, const ImageBuffer& b,
            const SsimParams& params) {
  RequireSameImages(a, b);
  const int win = params.window;
  if (std::min(a.height(), a.width()) < win) {
    throw Error(ErrorCode::kImageTooSmall,
                "SSIM needs images of at least " + std::to_string(win) +
                    " pixels per side");
  }
  const double range = ScaleMax(a.scale());
  const double c1 = (params.k1 * range) * (params.k1 * range);
  const double c2 = (params.k2 * range) * (params.k2 * range);

  // The 2-D window is the outer product of this 1-D kernel, so filtering
  // runs as a horizontal pass followed by a vertical pass.
  std::vector<double> g(win);
  {
    const double center = (win - 1) / 2.0;
    double sum = 0.0;
    for (int i = 0; i < win; ++i) {
      const double d = i - center;
      g[i] = std::exp(-(d * d) / (2.0 * params.sigma * params.sigma));
      sum += g[i];
    }
    for (double& v : g) v /= sum;
  }

  const int h = a.height();
  const int w = a.width();
  const int oh = h - win + 1;
  const int ow = w - win + 1;
  const std::size_t out_n = static_cast<std::size_t>(oh) * ow;

  double total = 0.0;
  for (int c = 0; c < a.channels(); ++c) {
    // Horizontal pass for the five moment images.
    std::vector<double> hx[5];
    for (auto& m : hx) m.assign(static_cast<std::size_t>(h) * ow, 0.0);
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < ow; ++x) {
        double s[5] = {};
        for (int k = 0; k < win; ++k) {
          const double va = a.at(y, x + k, c);
          const double vb = b.at(y, x + k, c);
          s[0] += g[k] * va;
          s[1] += g[k] * vb;
          s[2] += g[k] * va * va;
          s[3] += g[k] * vb * vb;
          s[4] += g[k] * va * vb;
        }
        for (int m = 0; m < 5; ++m) hx[m][static_cast<std::size_t>(y) * ow + x] = s[m];
      }
    }
    for (int y = 0; y < oh; ++y) {
      for (int x = 0; x < ow; ++x) {
        double s[5] = {};
        for (int k = 0; k < win; ++k) {
          const std::size_t idx = static_cast<std::size_t>(y + k) * ow + x;
          for (int m = 0; m < 5; ++m) s[m] += g[k] * hx[m][idx];
        }
        const double mu_a = s[0];
        const double mu_b = s[1];
        const double var_a = s[2] - mu_a * mu_a;
        const double var_b = s[3] - mu_b * mu_b;
        const double cov = s[4] - mu_a * mu_b;
        total += ((2.0 * mu_a * mu_b + c1) * (2.0 * cov + c2)) /
                 ((mu_a * mu_a + mu_b * mu_b + c1) * (var_a + var_b + c2));
      }
    }
  }
  return total / (static_cast<double>(out_n) * a.channels());
}

void LabelMap::Validate() const {
  if (height < 1 || width < 1) {
    throw Error(ErrorCode::kInvalidArgument, "label map must be non-empty");
  }
  if (labels.size() != static_cast<std::size_t>(height) * width) {
    throw Error(ErrorCode::kLengthMismatch,
                "label count does not match dimensions");
  }
  if (num_classes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "num_classes must be >= 1");
  }
  for (std::int32_t l : labels) {
    if ((l < 0 || l >= num_classes) && !(ignore_id && l == *ignore_id)) {
      throw Error(ErrorCode::kInvalidArgument,
                  "label " + std::to_string(l) + " outside [0," +
                      std::to_string(num_classes) + ")");
    }
  }
}

LabelMap ReadLabelMap(const std::filesystem::path& path, int num_classes,
                      std::optional<int> ignore_id) {
  const ImageBuffer img = ReadPngFile(path);
  if (img.channels() != 1) {
    throw Error(ErrorCode::kUnsupportedPixelFormat,
                "label maps must be single-channel PNG: " + path.string());
  }
  LabelMap map{img.height(), img.width(), num_classes, ignore_id, {}};
  map.labels.reserve(img.size());
  for (float v : img.data()) map.labels.push_back(static_cast<std::int32_t>(v));
  map.Validate();
  return map;
}

LabelMap ResizeLabelsNearest(const LabelMap& labels, int height, int width) {
  if (labels.height == height && labels.width == width) return labels;
  LabelMap out{height, width, labels.num_classes, labels.ignore_id, {}};
  out.labels.resize(static_cast<std::size_t>(height) * width);
  for (int y = 0; y < height; ++y) {
    const int sy = std::min(
        static_cast<int>((y + 0.5) * labels.height / height), labels.height - 1);
    for (int x = 0; x < width; ++x) {
      const int sx = std::min(
          static_cast<int>((x + 0.5) * labels.width / width), labels.width - 1);
      out.labels[static_cast<std::size_t>(y) * width + x] = labels.at(sy, sx);
    }
  }
  return out;
}

ConfusionMatrix::ConfusionMatrix(int num_classes) : num_classes_(num_classes) {
  if (num_classes < 1) {
    throw Error(ErrorCode::kInvalidArgument, "num_classes must be >= 1");
  }
  counts_.assign(static_cast<std::size_t>(num_classes) * num_classes, 0);
}

std::uint64_t ConfusionMatrix::Total() const {
  std::uint64_t t = 0;
  for (std::uint64_t v : counts_) t += v;
  return t;
}

std::uint64_t ConfusionMatrix::RowSum(int c) const {
  std::uint64_t s = 0;
  for (int p = 0; p < num_classes_; ++p) s += at(c, p);
  return s;
}

std::uint64_t ConfusionMatrix::ColSum(int c) const {
  std::uint64_t s = 0;
  for (int g = 0; g < num_classes_; ++g) s += at(g, c);
  return s;
}

ConfusionMatrix Confusion(const LabelMap& gt, const LabelMap& pred) {
  if (gt.height != pred.height || gt.width != pred.width) {
    throw Error(ErrorCode::kShapeMismatch, "label maps differ in size");
  }
  if (gt.num_classes != pred.num_classes) {
    throw Error(ErrorCode::kClassCountMismatch,
                "label maps declare different class counts");
  }
  gt.Validate();
  pred.Validate();
  ConfusionMatrix cm(gt.num_classes);
  for (std::size_t i = 0; i < gt.labels.size(); ++i) {
    const std::int32_t g = gt.labels[i];
    const std::int32_t p = pred.labels[i];
    if (gt.ignore_id && (g == *gt.ignore_id || p == *gt.ignore_id)) continue;
    if (pred.ignore_id && p == *pred.ignore_id) continue;
    ++cm.at(g, p);
  }
  return cm;
}

FcnScores ComputeFcnScores(const ConfusionMatrix& cm) {
  const std::uint64_t total = cm.Total();
  if (total == 0) {
    throw Error(ErrorCode::kEmptyMatrix, "confusion matrix has no pixels");
  }
  FcnScores s;
  std::uint64_t trace = 0;
  double iou_sum = 0.0;
  int present = 0;
  s.per_class_iou.assign(cm.num_classes(),
                         std::numeric_limits<double>::quiet_NaN());
  for (int c = 0; c < cm.num_classes(); ++c) {
    const std::uint64_t tp = cm.at(c, c);
    trace += tp;
    const std::uint64_t uni = cm.RowSum(c) + cm.ColSum(c) - tp;
    if (uni == 0) continue;
    const double iou = static_cast<double>(tp) / static_cast<double>(uni);
    s.per_class_iou[c] = iou;
    iou_sum += iou;
    ++present;
  }
  s.per_pixel_acc = static_cast<double>(trace) / static_cast<double>(total);
  s.class_iou = iou_sum / present;
  return s;
}

OnnxSegmenter::OnnxSegmenter(const std::filesystem::path& model,
                             int num_classes, Preprocessing pre)
    : session_(model), num_classes_(num_classes), pre_(pre) {}

LabelMap OnnxSegmenter::Segment(const ImageBuffer& img) {
  const TensorF32 input = PreprocessImage(img, pre_);
  std::vector<TensorF32> out = session_.Run({{"image", &input}}, {"logits"});
  const TensorF32& logits = out.at(0);
  const auto& shape = logits.shape();
  if (shape.size() != 4 || shape[0] != 1 || shape[1] != num_classes_) {
    throw Error(ErrorCode::kShapeMismatch,
                "segmenter logits must be [1," + std::to_string(num_classes_) +
                    ",H,W]");
  }
  const int sh = static_cast<int>(shape[2]);
  const int sw = static_cast<int>(shape[3]);
  const std::size_t plane = static_cast<std::size_t>(sh) * sw;
  LabelMap labels{sh, sw, num_classes_, std::nullopt, {}};
  labels.labels.resize(plane);
  auto data = logits.data();
  for (std::size_t i = 0; i < plane; ++i) {
    int best = 0;
    for (int k = 1; k < num_classes_; ++k) {
      if (data[k * plane + i] > data[best * plane + i]) best = k;
    }
    labels.labels[i] = best;
  }
  return ResizeLabelsNearest(labels, img.height(), img.width());
}

FcnScores FcnScore(Segmenter& segmenter, const ImageBuffer& translated,
                   const LabelMap& reference) {
  LabelMap pred = segmenter.Segment(translated);
  pred = ResizeLabelsNearest(pred, reference.height, reference.width);
  pred.ignore_id = reference.ignore_id;
  return ComputeFcnScores(Confusion(reference, pred));
}

OnnxLpips::OnnxLpips(const std::filesystem::path& model) : session_(model) {}

TensorF32 OnnxLpips::Prepare(const ImageBuffer& img) {
  const ImageBuffer rgb =
      ResizeBilinear(ToScale(ToRgb(img), PixelScale::kUnit), 256, 256);
  TensorF32 t({1, 3, 256, 256});
  auto dst = t.mutable_data();
  const std::size_t plane = 256 * 256;
  for (int y = 0; y < 256; ++y) {
    for (int x = 0; x < 256; ++x) {
      for (int c = 0; c < 3; ++c) {
        dst[c * plane + static_cast<std::size_t>(y) * 256 + x] =
            rgb.at(y, x, c) * 2.0f - 1.0f;
      }
    }
  }
  return t;
}

double OnnxLpips::Distance(const ImageBuffer& a, const ImageBuffer& b) {
  const TensorF32 ta = Prepare(a);
  const TensorF32 tb = Prepare(b);
  std::vector<TensorF32> out =
      session_.Run({{"image_a", &ta}, {"image_b", &tb}}, {"distance"});
  if (out.at(0).size() != 1) {
    throw Error(ErrorCode::kShapeMismatch, "LPIPS output must be [1]");
  }
  return out[0].data()[0];
}

double Lpips(const EncoderSpec& spec, const ImageBuffer& a,
             const ImageBuffer& b) {
  if (spec.kind != EncoderKind::kOnnxModel || !spec.model_path) {
    throw Error(ErrorCode::kBackendUnavailable,
                "LPIPS needs an onnx-model backend");
  }
  OnnxLpips model(*spec.model_path);
  return model.Distance(a, b);
}

ScoreResult VitScore(Encoder& vit_encoder, const ImageBuffer& a,
                     const ImageBuffer& b) {
  return ScoreImages(vit_encoder, a, b);
}

ScoreResult VitScore(const EncoderSpec& spec, const ImageBuffer& a,
                     const ImageBuffer& b) {
  std::unique_ptr<Encoder> encoder = MakeEncoder(spec);
  return VitScore(*encoder, a, b);
}

}  // namespace transcore
