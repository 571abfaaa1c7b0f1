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
#include <filesystem>
#include <fstream>
#include <string>

#include "gtest/gtest.h"
#include "transcore/config.h"
#include "transcore/image_io.h"
#include "unit/test_util.h"

namespace transcore {
namespace {

using ::transcore::testing::ConstantImage;
using ::transcore::testing::TestDir;

void Touch(const std::filesystem::path& p) {
  WritePngFile(p, ConstantImage(16, 16, 3, 1));
}

TEST(ManifestTest, ResolvesRelativePaths) {
  const auto dir = TestDir();
  Touch(dir / "a.png");
  Touch(dir / "b.png");
  Touch(dir / "l.png");
  const Manifest m = Manifest::FromJsonText(
      R"({"pairs": [{"id": "p", "source": "a.png", "translated": "b.png",
                     "source_labels": "l.png", "task": "city"}]})",
      dir);
  ASSERT_EQ(m.pairs.size(), 1u);
  EXPECT_EQ(m.pairs[0].source, dir / "a.png");
  EXPECT_EQ(*m.pairs[0].source_labels, dir / "l.png");
  EXPECT_FALSE(m.pairs[0].translated_domain_gt.has_value());
  EXPECT_EQ(m.pairs[0].task, "city");

  std::ofstream(dir / "m.json") << m.ToJsonText();
  const Manifest again = Manifest::Load(dir / "m.json");
  EXPECT_EQ(again.pairs[0].translated, dir / "b.png");
}

TEST(ManifestTest, BareArrayIsAccepted) {
  const auto dir = TestDir();
  Touch(dir / "a.png");
  const Manifest m = Manifest::FromJsonText(
      R"([{"id": "x", "source": "a.png", "translated": "a.png"}])", dir);
  EXPECT_EQ(m.pairs[0].task, "default");
}

TEST(ManifestTest, Errors) {
  const auto dir = TestDir();
  Touch(dir / "a.png");
  EXPECT_TRANSCORE_ERROR(
      Manifest::FromJsonText(
          R"({"pairs": [{"id": "x", "source": "a.png", "translated": "a.png"},
                        {"id": "x", "source": "a.png", "translated": "a.png"}]})",
          dir),
      kConfigError);
  EXPECT_TRANSCORE_ERROR(
      Manifest::FromJsonText(
          R"({"pairs": [{"id": "x", "source": "a.png", "translated": "nope.png"}]})",
          dir),
      kConfigError);
  EXPECT_TRANSCORE_ERROR(
      Manifest::FromJsonText(R"({"pairs": [{"id": "x"}]})", dir), kConfigError);
  EXPECT_TRANSCORE_ERROR(Manifest::FromJsonText("{oops", dir), kConfigError);
  EXPECT_TRANSCORE_ERROR(Manifest::Load(dir / "absent.json"), kIoError);
}

TEST(RunConfigTest, DefaultsAreValid) {
  const RunConfig c;
  EXPECT_NO_THROW(c.Validate());
  ASSERT_EQ(c.sweep.axes.size(), 2u);
  EXPECT_EQ(c.sweep.axes[0].degrees, DefaultDegrees(DistortionKind::kPiecewiseAffine));
}

TEST(RunConfigTest, MergeOverridesOnlyPresentKeys) {
  RunConfig c;
  c.Merge(R"({"metrics": ["l2", "ssim"], "seed": 9,
              "distortions": {"color-jitter": [0, 0.1, 0.2]},
              "color_jitter_deterministic": true, "resize_to": 64,
              "segmentation": {"num_classes": 5, "ignore_id": null}})");
  EXPECT_EQ(c.metrics, (std::vector<std::string>{"l2", "ssim"}));
  EXPECT_EQ(c.sweep.master_seed, 9u);
  ASSERT_EQ(c.sweep.axes.size(), 1u);
  EXPECT_EQ(c.sweep.axes[0].kind, DistortionKind::kColorJitter);
  EXPECT_TRUE(c.sweep.jitter_deterministic);
  EXPECT_EQ(*c.sweep.resize_to, 64);
  EXPECT_EQ(c.num_classes, 5);
  EXPECT_FALSE(c.ignore_id.has_value());
  EXPECT_EQ(c.encoders.at("samscore"), "stub");
  EXPECT_EQ(c.sweep.jobs, 1);
}

TEST(RunConfigTest, ValidateRequiresBackends) {
  RunConfig c;
  c.metrics = {"lpips"};
  EXPECT_TRANSCORE_ERROR(c.Validate(), kConfigError);
  c.encoders["lpips"] = "stub";
  EXPECT_TRANSCORE_ERROR(c.Validate(), kConfigError);
  c.encoders["lpips"] = "onnx:lpips.onnx";
  EXPECT_NO_THROW(c.Validate());
  c.metrics = {"fid"};
  EXPECT_TRANSCORE_ERROR(c.Validate(), kConfigError);
}

TEST(RunConfigTest, ValidateChecksDegrees) {
  RunConfig c;
  c.Merge(R"({"distortions": {"piecewise-affine": [0, 0.5]}})");
  EXPECT_TRANSCORE_ERROR(c.Validate(), kConfigError);
  EXPECT_TRANSCORE_ERROR(c.Merge(R"({"distortions": {"blur": [0]}})"),
                         kConfigError);
  EXPECT_TRANSCORE_ERROR(c.Merge(R"({"seed": "x"})"), kConfigError);
}

TEST(ParseDegreeListTest, CommaSeparated) {
  EXPECT_EQ(ParseDegreeList("0,0.01, 0.02"),
            (std::vector<double>{0, 0.01, 0.02}));
  EXPECT_TRANSCORE_ERROR(ParseDegreeList("0,abc"), kConfigError);
  EXPECT_TRANSCORE_ERROR(ParseDegreeList("1x"), kConfigError);
  EXPECT_TRANSCORE_ERROR(ParseDegreeList(""), kConfigError);
}

TEST(BuildBackendsTest, StubSamOnly) {
  RunConfig c;
  const MetricBackends b = BuildBackends(c);
  ASSERT_NE(b.sam, nullptr);
  EXPECT_EQ(b.sam->Id(), "stub-orientation-v1");
  EXPECT_EQ(b.lpips, nullptr);
}

}  // namespace
}  // namespace transcore
