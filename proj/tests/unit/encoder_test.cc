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
#include <array>
#include <cmath>
#include <cstdint>
#include <cstdlib>
#include <filesystem>
#include <memory>
#include <vector>

#include "gtest/gtest.h"
#include "oracles/oracles.h"
#include "transcore/encoder.h"
#include "transcore/image_io.h"
#include "transcore/synthetic.h"
#include "unit/test_util.h"

namespace transcore {
namespace {

using ::transcore::testing::ConstantImage;
using ::transcore::testing::RandomImage;
using ::transcore::testing::TestDir;

void ExpectMatchesOracle(const ImageBuffer& img, double tol) {
  const EmbeddingMap map = StubEncode(img);
  const auto expect = oracle::StubHistograms(img);
  ASSERT_EQ(map.channels(), 8);
  ASSERT_EQ(map.height(), static_cast<int>(expect.size()));
  ASSERT_EQ(map.width(), static_cast<int>(expect[0].size()));
  for (int y = 0; y < map.height(); ++y) {
    for (int x = 0; x < map.width(); ++x) {
      for (int b = 0; b < 8; ++b) {
        ASSERT_NEAR(map.at(b, y, x), expect[y][x][b], tol)
            << "patch " << y << "," << x << " bin " << b;
      }
    }
  }
}

TEST(StubEncoderTest, ShapeFollowsPatchGrid) {
  const EmbeddingMap map = StubEncode(RandomImage(1, 50, 33, 3));
  EXPECT_EQ(map.shape(), (std::array<int, 3>{8, 3, 2}));
}

TEST(StubEncoderTest, TooSmallImage) {
  EXPECT_TRANSCORE_ERROR(StubEncode(RandomImage(1, 15, 64, 3)),
                         kImageTooSmall);
}

TEST(StubEncoderTest, ConstantImageGivesZeroVectors) {
  const EmbeddingMap map = StubEncode(ConstantImage(48, 32, 3, 77.0f));
  for (float v : map.data()) EXPECT_EQ(v, 0.0f);
}

TEST(StubEncoderTest, VerticalStepEdgeByHand) {
  // 32x32 gray, 200 for x < 8 and 50 from x = 8 on. Only columns 7 and 8
  // see a gradient, pointing toward -x (180 degrees, bin 4), and both lie
  // in the left patch column. The right patches are flat.
  ImageBuffer img(32, 32, 1, PixelScale::kU8);
  for (int y = 0; y < 32; ++y) {
    for (int x = 0; x < 32; ++x) img.at(y, x, 0) = x < 8 ? 200.0f : 50.0f;
  }
  const EmbeddingMap map = StubEncode(img);
  ASSERT_EQ(map.shape(), (std::array<int, 3>{8, 2, 2}));
  for (int py = 0; py < 2; ++py) {
    for (int b = 0; b < 8; ++b) {
      EXPECT_EQ(map.at(b, py, 0), b == 4 ? 1.0f : 0.0f) << b;
      EXPECT_EQ(map.at(b, py, 1), 0.0f) << b;
    }
  }
}

TEST(StubEncoderTest, DiagonalRampSplitsAtBinEdge) {
  // L = 1000 * (x + y): gradient exactly at 45 degrees, the lower edge of
  // bin 1.
  ImageBuffer img(16, 16, 1, PixelScale::kU8);
  for (int y = 0; y < 16; ++y) {
    for (int x = 0; x < 16; ++x) img.at(y, x, 0) = static_cast<float>(x + y);
  }
  const EmbeddingMap map = StubEncode(img);
  const auto expect = oracle::StubHistograms(img);
  for (int b = 0; b < 8; ++b) {
    EXPECT_NEAR(map.at(b, 0, 0), expect[0][0][b], 1e-7);
  }
  EXPECT_GT(map.at(1, 0, 0), 0.99f);
}

TEST(StubEncoderTest, MatchesOracleOnRandomImages) {
  for (std::uint64_t seed = 0; seed < 12; ++seed) {
    const int c = seed % 2 ? 3 : 1;
    ExpectMatchesOracle(RandomImage(seed, 16 + seed * 5, 16 + seed * 3, c),
                        1e-6);
  }
}

TEST(StubEncoderTest, MatchesOracleOnSyntheticImages) {
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    ExpectMatchesOracle(SyntheticImage(seed, 64, 80), 1e-6);
  }
}

TEST(StubEncoderTest, OrientationBinEdges) {
  EXPECT_EQ(OrientationBin(1, 0), 0);
  EXPECT_EQ(OrientationBin(1, 1), 1);
  EXPECT_EQ(OrientationBin(0, 1), 2);
  EXPECT_EQ(OrientationBin(-1, 1), 3);
  EXPECT_EQ(OrientationBin(-1, 0), 4);
  EXPECT_EQ(OrientationBin(-1, -1), 5);
  EXPECT_EQ(OrientationBin(0, -1), 6);
  EXPECT_EQ(OrientationBin(1, -1), 7);
  EXPECT_EQ(OrientationBin(2, 1), 0);
  EXPECT_EQ(OrientationBin(1, 2), 1);
}

TEST(StubEncoderTest, InvariantToGlobalOffset) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    ImageBuffer img = RandomImage(seed, 48, 64, 3);
    for (float& v : img.mutable_data()) v = std::floor(v * 0.7f);
    ImageBuffer shifted = img;
    for (float& v : shifted.mutable_data()) v += 60.0f;
    EXPECT_EQ(StubEncode(img), StubEncode(shifted)) << seed;
  }
}

TEST(StubEncoderTest, RotationPermutesBinsByTwo) {
  // R[i][j] = I[j][W-1-i] (counter-clockwise quarter turn). The gradient
  // maps (gx, gy) -> (gy, -gx), so R's bin b holds I's bin b + 2.
  for (std::uint64_t seed = 0; seed < 4; ++seed) {
    const ImageBuffer img = seed < 2 ? RandomImage(seed, 32, 48, 3)
                                     : SyntheticImage(seed, 48, 64);
    const int h = img.height(), w = img.width();
    ImageBuffer rot(w, h, 3, PixelScale::kU8);
    for (int i = 0; i < w; ++i) {
      for (int j = 0; j < h; ++j) {
        for (int c = 0; c < 3; ++c) rot.at(i, j, c) = img.at(j, w - 1 - i, c);
      }
    }
    const EmbeddingMap a = StubEncode(img);
    const EmbeddingMap r = StubEncode(rot);
    const int pw = a.width();
    for (int pi = 0; pi < r.height(); ++pi) {
      for (int pj = 0; pj < r.width(); ++pj) {
        for (int b = 0; b < 8; ++b) {
          ASSERT_NEAR(r.at(b, pi, pj), a.at((b + 2) % 8, pj, pw - 1 - pi),
                      1e-6);
        }
      }
    }
  }
}

TEST(StubEncoderTest, DeterministicAcrossCalls) {
  const ImageBuffer img = SyntheticImage(9, 64, 64);
  EXPECT_EQ(StubEncode(img), StubEncode(img));
}

TEST(PreprocessTest, IdentitySizeIsPlainStandardization) {
  const ImageBuffer img = RandomImage(4, 8, 8, 3);
  Preprocessing pre;
  pre.size = 8;
  const TensorF32 t = PreprocessImage(img, pre);
  ASSERT_EQ(t.shape(), (std::vector<std::int64_t>{1, 3, 8, 8}));
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        const double expect = (img.at(y, x, c) - pre.mean[c]) / pre.std[c];
        EXPECT_NEAR(t.data()[(c * 8 + y) * 8 + x], expect, 1e-5);
      }
    }
  }
}

TEST(PreprocessTest, UpsampleMatchesOracle) {
  const ImageBuffer img = RandomImage(6, 4, 4, 1);
  Preprocessing pre;
  pre.size = 8;
  const TensorF32 t = PreprocessImage(img, pre);
  const ImageBuffer unit = ToScale(ToRgb(img), PixelScale::kUnit);
  for (int c = 0; c < 3; ++c) {
    for (int y = 0; y < 8; ++y) {
      for (int x = 0; x < 8; ++x) {
        const double v = oracle::ResizeSample(unit, 8, 8, y, x, c) * 255.0;
        EXPECT_NEAR(t.data()[(c * 8 + y) * 8 + x],
                    (v - pre.mean[c]) / pre.std[c], 1e-4);
      }
    }
  }
}

TEST(PreprocessTest, SamDefaults) {
  const TensorF32 t = PreprocessForSam(ConstantImage(20, 30, 3, 0.0f));
  EXPECT_EQ(t.shape(), (std::vector<std::int64_t>{1, 3, 1024, 1024}));
  EXPECT_NEAR(t.data()[0], -123.675 / 58.395, 1e-6);
}

TEST(EmbeddingMapTest, RejectsNonFinite) {
  std::vector<float> data(8, 0.0f);
  data[3] = std::nanf("");
  EXPECT_TRANSCORE_ERROR(EmbeddingMap(2, 2, 2, data), kNonFinite);
}

TEST(EmbeddingMapTest, TensorRoundTripDropsBatch) {
  const TensorF32 t({1, 2, 1, 3}, {1, 2, 3, 4, 5, 6});
  const EmbeddingMap m = EmbeddingMap::FromTensor(t);
  EXPECT_EQ(m.shape(), (std::array<int, 3>{2, 1, 3}));
  EXPECT_EQ(m.at(1, 0, 2), 6.0f);
  EXPECT_EQ(m.ToTensor().shape(), (std::vector<std::int64_t>{2, 1, 3}));
  EXPECT_TRANSCORE_ERROR(EmbeddingMap::FromTensor(TensorF32({2, 3}, std::vector<float>(6))),
                         kShapeMismatch);
}

TEST(EncoderSpecTest, ParsesUris) {
  EXPECT_EQ(EncoderSpec::Parse("stub").kind, EncoderKind::kStub);
  const EncoderSpec onnx = EncoderSpec::Parse("onnx:/m/sam.onnx");
  EXPECT_EQ(onnx.kind, EncoderKind::kOnnxModel);
  EXPECT_EQ(*onnx.model_path, "/m/sam.onnx");
  EXPECT_EQ(*onnx.expected_shape, (std::array<int, 3>{256, 64, 64}));
  const EncoderSpec pre = EncoderSpec::Parse("precomputed:emb");
  EXPECT_EQ(pre.kind, EncoderKind::kPrecomputed);
  EXPECT_EQ(*pre.embed_dir, "emb");
  EXPECT_TRANSCORE_ERROR(EncoderSpec::Parse("torch:x"), kConfigError);
  EXPECT_TRANSCORE_ERROR(EncoderSpec::Parse("onnx:"), kConfigError);
}

TEST(EncoderSpecTest, ValidateChecksKindFields) {
  EncoderSpec spec = EncoderSpec::Stub();
  spec.model_path = "x.onnx";
  EXPECT_TRANSCORE_ERROR(spec.Validate(), kConfigError);
  EncoderSpec bad = EncoderSpec::Sam("x.onnx");
  bad.expected_shape = std::array<int, 3>{256, 0, 64};
  EXPECT_TRANSCORE_ERROR(bad.Validate(), kConfigError);
}

TEST(EncoderTest, OnnxWithoutRuntimeIsUnavailable) {
  if (OnnxRuntimeAvailable()) GTEST_SKIP() << "built with ONNX Runtime";
  EXPECT_TRANSCORE_ERROR(MakeEncoder(EncoderSpec::Sam("missing.onnx")),
                         kBackendUnavailable);
}

TEST(PrecomputedEncoderTest, LoadsByPairAndRole) {
  const auto dir = TestDir();
  const EmbeddingMap m(2, 1, 2, {1, 2, 3, 4});
  WriteTensorFile(dir / "p1.src.npy", m.ToTensor());
  PrecomputedEncoder enc(dir, std::array<int, 3>{2, 1, 2});
  const EmbeddingKey key{"p1", "src", false};
  EXPECT_EQ(enc.Embed(ImageBuffer(), &key), m);

  const EmbeddingKey gen{"p1", "gen", false};
  EXPECT_TRANSCORE_ERROR(enc.Embed(ImageBuffer(), &gen), kMissingEmbedding);
  const EmbeddingKey distorted{"p1", "src", true};
  EXPECT_TRANSCORE_ERROR(enc.Embed(ImageBuffer(), &distorted),
                         kMissingEmbedding);
  EXPECT_TRANSCORE_ERROR(enc.Embed(ImageBuffer(), nullptr), kMissingEmbedding);

  PrecomputedEncoder wrong(dir, std::array<int, 3>{256, 64, 64});
  EXPECT_TRANSCORE_ERROR(wrong.Embed(ImageBuffer(), &key), kShapeMismatch);
}

class CountingEncoder : public Encoder {
 public:
  EmbeddingMap Embed(const ImageBuffer& img, const EmbeddingKey*) override {
    ++calls;
    return StubEncode(img);
  }
  std::string Id() const override { return "counting"; }
  int calls = 0;
};

TEST(CachingEncoderTest, SecondCallHitsDisk) {
  const auto dir = TestDir();
  auto inner = std::make_unique<CountingEncoder>();
  CountingEncoder* counter = inner.get();
  CachingEncoder cache(std::move(inner), dir);
  const ImageBuffer img = RandomImage(2, 32, 32, 3);
  const EmbeddingMap first = cache.Embed(img, nullptr);
  EXPECT_TRUE(std::filesystem::exists(cache.CachePath(img)));
  const EmbeddingMap second = cache.Embed(img, nullptr);
  EXPECT_EQ(counter->calls, 1);
  EXPECT_EQ(first, second);
  const ImageBuffer other = RandomImage(3, 32, 32, 3);
  EXPECT_NE(cache.CachePath(img), cache.CachePath(other));
}

TEST(FnvTest, KnownVectors) {
  const std::uint8_t a[] = {'a'};
  EXPECT_EQ(Fnv1a64({}), 0xCBF29CE484222325ULL);
  EXPECT_EQ(Fnv1a64(a), 0xAF63DC4C8601EC8CULL);
}

}  // namespace
}  // namespace transcore
