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
#ifndef TRANSCORE_SWEEP_H_
#define TRANSCORE_SWEEP_H_

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "transcore/distortion.h"
#include "transcore/encoder.h"
#include "transcore/error.h"
#include "transcore/metrics.h"

namespace transcore {

struct ImagePair {
  std::string id;
  std::filesystem::path source;
  std::filesystem::path translated;
  std::optional<std::filesystem::path> source_labels;
  std::optional<std::filesystem::path> translated_domain_gt;
  std::string task = "default";
};

enum class RecordStatus { kOk, kIoError, kBackendError, kError };

std::string_view StatusName(RecordStatus status);
std::optional<RecordStatus> ParseStatus(std::string_view name);
RecordStatus StatusFor(ErrorCode code);

inline constexpr std::string_view kNoDistortion = "none";

struct SweepRecord {
  std::string pair_id;
  std::string metric;
  std::string distortion;
  double degree = 0.0;
  std::uint64_t seed = 0;
  RecordStatus status = RecordStatus::kOk;
  // Meaningful only when status is kOk; PSNR may be +infinity.
  double value = 0.0;
  // Failure detail, not serialized.
  std::string message;
};

// Known metric names: samscore, l2, psnr, ssim, lpips, vitscore, fcn_acc,
// fcn_iou.
bool IsKnownMetric(std::string_view name);
// True when larger values mean more similar.
bool HigherIsBetter(std::string_view metric);

// Backends for the learned metrics; null entries make the corresponding
// metrics fail with backend_error records.
struct MetricBackends {
  std::shared_ptr<Encoder> sam;
  std::shared_ptr<Encoder> vit;
  std::shared_ptr<PerceptualDistance> lpips;
  std::shared_ptr<Segmenter> segmenter;
  int num_classes = 19;
  std::optional<int> ignore_id = 255;
};

struct DistortionAxis {
  DistortionKind kind = DistortionKind::kPiecewiseAffine;
  std::vector<double> degrees;
};

struct SweepOptions {
  std::vector<DistortionAxis> axes;
  std::uint64_t master_seed = 0;
  int grid_rows = 4;
  int grid_cols = 4;
  bool jitter_deterministic = false;
  // When set, both images of a pair are resampled to this square size on
  // load.
  std::optional<int> resize_to;
  int jobs = 1;
};

// For every pair, distortion kind and degree: distorts the translated image
// and scores it against the undistorted source with every metric. Degree 0
// is added to each axis if missing. Failures become non-ok records and the
// sweep continues. Output is sorted by (pair_id, metric, distortion,
// degree) and does not depend on `jobs`.
std::vector<SweepRecord> RunSweep(std::span<const ImagePair> pairs,
                                  std::span<const std::string> metrics,
                                  const SweepOptions& options,
                                  const MetricBackends& backends);

// Degree-0 scoring only: one record per (pair, metric) with distortion
// "none" and seed 0, sorted by (pair_id, metric).
std::vector<SweepRecord> RunBatch(std::span<const ImagePair> pairs,
                                  std::span<const std::string> metrics,
                                  const SweepOptions& options,
                                  const MetricBackends& backends);

// Two-pass Pearson correlation in double precision.
double Pearson(std::span<const double> x, std::span<const double> y);

// 100 * (v_i - v_0) / |v_0|.
std::vector<double> PercentChange(std::span<const double> series);

struct CorrelationReport {
  std::string metric;
  std::string distortion;
  std::string status = "ok";  // ok | degenerate | insufficient_degrees
  std::optional<double> r;
  std::optional<double> abs_r;
  int n = 0;
  // Non-finite values (PSNR infinity) left out of the correlation.
  int excluded = 0;
};

// Groups ok records by (metric, distortion), skipping "none". By default
// correlates degree against the per-degree mean; `pooled` correlates every
// individual record instead. Output is sorted by (metric, distortion) and
// independent of the input order.
std::vector<CorrelationReport> Correlate(std::span<const SweepRecord> records,
                                         bool pooled = false);

struct TrendRow {
  std::string metric;
  std::vector<double> means;  // NaN where a degree has no finite value
};

struct TrendTable {
  std::string distortion;
  std::vector<double> degrees;
  std::vector<TrendRow> rows;
};

// Mean value per (metric, degree) for one distortion, optionally limited
// to a subset of pairs.
TrendTable BuildTrendTable(std::span<const SweepRecord> records,
                           std::string_view distortion,
                           std::span<const std::string> pair_filter = {});

// Fixed-point with 6 decimals (IEEE round-half-even on exact ties);
// infinities as "inf"/"-inf".
std::string FormatFixed6(double v);

void WriteRecordsCsv(std::ostream& out, std::span<const SweepRecord> records);
std::vector<SweepRecord> ReadRecordsCsv(std::istream& in);
void WriteRecordsCsvFile(const std::filesystem::path& path,
                         std::span<const SweepRecord> records);
std::vector<SweepRecord> ReadRecordsCsvFile(const std::filesystem::path& path);

std::string CorrelationJson(std::span<const CorrelationReport> reports);
std::string TrendCsv(const TrendTable& table, bool percent);

}  // namespace transcore

#endif  // TRANSCORE_SWEEP_H_
