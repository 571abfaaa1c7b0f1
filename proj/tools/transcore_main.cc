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
// transcore command-line tool.
//
//   transcore score SRC GEN [--encoder URI] [--heatmap PNG] [--pair-id ID]
//   transcore batch --manifest M [--config C] [--out CSV]
//   transcore sweep --manifest M [--distortion K]... [--degrees LIST]
//                   [--seed N] [--jobs N] [--out CSV]
//   transcore correlate --records CSV [--pooled] [--out JSON]
//   transcore report --records CSV [--manifest M] --out DIR
//   transcore synth --out DIR [--count N] [--size N] [--seed N]
//
// Exit codes: 0 ok, 1 unexpected failure, 2 usage, 3 IO, 4 backend,
// 5 configuration.

#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "transcore/config.h"
#include "transcore/encoder.h"
#include "transcore/error.h"
#include "transcore/image_io.h"
#include "transcore/plot.h"
#include "transcore/samscore.h"
#include "transcore/sweep.h"
#include "transcore/synthetic.h"

namespace transcore {
namespace {

namespace fs = std::filesystem;

constexpr int kExitOk = 0;
constexpr int kExitFailure = 1;
constexpr int kExitUsage = 2;
constexpr int kExitIo = 3;
constexpr int kExitBackend = 4;
constexpr int kExitConfig = 5;

int ExitCodeFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError:
    case ErrorCode::kMalformedFile:
    case ErrorCode::kUnsupportedPixelFormat:
    case ErrorCode::kUnsupportedDtype:
    case ErrorCode::kUnsupportedByteOrder:
      return kExitIo;
    case ErrorCode::kBackendUnavailable:
    case ErrorCode::kMissingEmbedding:
    case ErrorCode::kShapeMismatch:
    case ErrorCode::kImageTooSmall:
    case ErrorCode::kNonFinite:
      return kExitBackend;
    case ErrorCode::kConfigError:
      return kExitConfig;
    default:
      return kExitFailure;
  }
}

// Flags shared by the commands that build a RunConfig.
struct RunFlags {
  std::string config_path;
  std::string manifest_path;
  std::vector<std::string> metrics;
  std::string encoder;
  std::vector<std::string> backends;  // key=uri
  std::vector<std::string> distortions;
  std::string degrees;
  std::optional<std::uint64_t> seed;
  std::optional<int> jobs;
  std::optional<int> grid;
  std::optional<int> resize_to;
  bool jitter_deterministic = false;
  std::string out;
};

void AddRunFlags(CLI::App* cmd, RunFlags& f) {
  cmd->add_option("--config", f.config_path, "JSON run configuration")
      ->check(CLI::ExistingFile);
  cmd->add_option("--manifest", f.manifest_path, "JSON pair manifest")
      ->required();
  cmd->add_option("--metrics", f.metrics, "Metric names (comma separated)")
      ->delimiter(',');
  cmd->add_option("--encoder", f.encoder,
                  "SAMScore encoder: stub | onnx:<path> | precomputed:<dir>");
  cmd->add_option("--backend", f.backends,
                  "Other backends as key=uri (vitscore, lpips, segmenter)");
  cmd->add_option("--jobs", f.jobs, "Worker threads")->check(CLI::PositiveNumber);
  cmd->add_option("--resize", f.resize_to,
                  "Resample both images of every pair to NxN on load");
  cmd->add_option("--out", f.out, "Output records CSV");
}

RunConfig BuildConfig(const RunFlags& f) {
  RunConfig config;
  if (!f.config_path.empty()) config = RunConfig::Load(f.config_path);
  if (!f.metrics.empty()) config.metrics = f.metrics;
  if (!f.encoder.empty()) config.encoders["samscore"] = f.encoder;
  for (const std::string& kv : f.backends) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorCode::kConfigError, "--backend expects key=uri: " + kv);
    }
    config.encoders[kv.substr(0, eq)] = kv.substr(eq + 1);
  }
  if (!f.distortions.empty()) {
    config.sweep.axes.clear();
    for (const std::string& name : f.distortions) {
      const auto kind = ParseDistortionKind(name);
      if (!kind) {
        throw Error(ErrorCode::kConfigError, "unknown distortion " + name);
      }
      config.sweep.axes.push_back({*kind, DefaultDegrees(*kind)});
    }
  }
  if (!f.degrees.empty()) {
    const std::vector<double> degrees = ParseDegreeList(f.degrees);
    for (DistortionAxis& axis : config.sweep.axes) axis.degrees = degrees;
  }
  if (f.seed) config.sweep.master_seed = *f.seed;
  if (f.jobs) config.sweep.jobs = *f.jobs;
  if (f.grid) config.sweep.grid_rows = config.sweep.grid_cols = *f.grid;
  if (f.resize_to) config.sweep.resize_to = *f.resize_to;
  if (f.jitter_deterministic) config.sweep.jitter_deterministic = true;
  config.Validate();
  return config;
}

fs::path OutputPath(const RunFlags& f, const RunConfig& config,
                    const char* default_name) {
  if (!f.out.empty()) return f.out;
  return config.output_dir / default_name;
}

void EnsureParent(const fs::path& path) {
  if (path.has_parent_path()) fs::create_directories(path.parent_path());
}

int ReportFailures(std::span<const SweepRecord> records) {
  int failed = 0;
  for (const SweepRecord& r : records) {
    if (r.status == RecordStatus::kOk) continue;
    if (++failed <= 5) {
      std::cerr << "transcore: " << r.pair_id << " " << r.metric << " "
                << r.distortion << "@" << FormatFixed6(r.degree) << ": "
                << StatusName(r.status) << ": " << r.message << "\n";
    }
  }
  if (failed > 5) {
    std::cerr << "transcore: ... " << failed - 5 << " more failed records\n";
  }
  return failed;
}

int RunScore(const std::string& source, const std::string& translated,
             const std::string& encoder_uri, const std::string& heatmap,
             const std::string& pair_id) {
  const ImageBuffer src = ReadPngFile(source);
  const ImageBuffer gen = ReadPngFile(translated);
  const std::unique_ptr<Encoder> encoder =
      MakeEncoder(EncoderSpec::Parse(encoder_uri));
  ScoreResult result;
  if (pair_id.empty()) {
    result = ScoreImages(*encoder, src, gen);
  } else {
    const EmbeddingKey src_key{pair_id, "src", false};
    const EmbeddingKey gen_key{pair_id, "gen", false};
    result = ScoreImages(*encoder, src, gen, &src_key, &gen_key);
  }
  std::printf("SAMScore=%s\n", FormatFixed6(result.score).c_str());
  if (!heatmap.empty()) {
    EnsureParent(heatmap);
    RenderHeatmap(result.map, heatmap);
  }
  return kExitOk;
}

int RunBatchCommand(const RunFlags& f) {
  const RunConfig config = BuildConfig(f);
  const Manifest manifest = Manifest::Load(f.manifest_path);
  const MetricBackends backends = BuildBackends(config);
  const auto records =
      RunBatch(manifest.pairs, config.metrics, config.sweep, backends);
  const fs::path out = OutputPath(f, config, "batch.csv");
  EnsureParent(out);
  WriteRecordsCsvFile(out, records);
  ReportFailures(records);
  std::cout << out.string() << "\n";
  return kExitOk;
}

int RunSweepCommand(const RunFlags& f) {
  const RunConfig config = BuildConfig(f);
  const Manifest manifest = Manifest::Load(f.manifest_path);
  const MetricBackends backends = BuildBackends(config);
  const auto records =
      RunSweep(manifest.pairs, config.metrics, config.sweep, backends);
  const fs::path out = OutputPath(f, config, "records.csv");
  EnsureParent(out);
  WriteRecordsCsvFile(out, records);
  ReportFailures(records);
  std::cout << out.string() << "\n";
  return kExitOk;
}

int RunCorrelate(const std::string& records_path, bool pooled,
                 const std::string& out) {
  const auto records = ReadRecordsCsvFile(records_path);
  const std::string json = CorrelationJson(Correlate(records, pooled));
  if (out.empty()) {
    std::cout << json;
  } else {
    EnsureParent(out);
    WriteFileBytes(out, std::vector<std::uint8_t>(json.begin(), json.end()));
  }
  return kExitOk;
}

void WriteText(const fs::path& path, const std::string& text) {
  WriteFileBytes(path, std::vector<std::uint8_t>(text.begin(), text.end()));
}

// Per-(task, distortion) SVG of mean values against degree, trend tables in
// absolute and percent form, and the correlation report.
int RunReport(const std::string& records_path, const std::string& manifest,
              const fs::path& out_dir, bool pooled, bool percent) {
  const auto records = ReadRecordsCsvFile(records_path);
  std::map<std::string, std::vector<std::string>> tasks;
  if (!manifest.empty()) {
    for (const ImagePair& p : Manifest::Load(manifest).pairs) {
      tasks[p.task].push_back(p.id);
    }
  } else {
    std::set<std::string> ids;
    for (const SweepRecord& r : records) ids.insert(r.pair_id);
    tasks["default"].assign(ids.begin(), ids.end());
  }
  std::set<std::string> distortions;
  for (const SweepRecord& r : records) {
    if (r.distortion != kNoDistortion) distortions.insert(r.distortion);
  }

  fs::create_directories(out_dir);
  WriteText(out_dir / "correlation.json",
            CorrelationJson(Correlate(records, pooled)));
  for (const auto& [task, ids] : tasks) {
    for (const std::string& distortion : distortions) {
      const TrendTable table = BuildTrendTable(records, distortion, ids);
      if (table.degrees.empty()) continue;
      const std::string stem = task + "_" + distortion;
      WriteText(out_dir / (stem + ".csv"), TrendCsv(table, false));
      WriteText(out_dir / (stem + "_percent.csv"), TrendCsv(table, true));

      std::vector<PlotSeries> series;
      for (const TrendRow& row : table.rows) {
        PlotSeries s{row.metric, HigherIsBetter(row.metric), row.means};
        if (percent) {
          try {
            s.values = PercentChange(row.means);
          } catch (const Error& e) {
            std::cerr << "transcore: " << stem << ": skipping " << row.metric
                      << " in percent plot: " << e.what() << "\n";
            continue;
          }
        }
        series.push_back(std::move(s));
      }
      const std::string title =
          task + " / " + distortion + (percent ? " (% change)" : "");
      RenderLinePlot(title, table.degrees, series, out_dir / (stem + ".svg"));
    }
  }
  std::cout << out_dir.string() << "\n";
  return kExitOk;
}

int RunSynth(const fs::path& out_dir, int count, int size,
             std::uint64_t seed) {
  Manifest manifest;
  manifest.pairs = WriteSyntheticCorpus(out_dir, count, size, seed);
  for (ImagePair& p : manifest.pairs) {
    p.source = p.source.filename();
    p.translated = p.translated.filename();
  }
  WriteText(out_dir / "manifest.json", manifest.ToJsonText());
  std::cout << (out_dir / "manifest.json").string() << "\n";
  return kExitOk;
}

int Main(int argc, char** argv) {
  CLI::App app{"transcore: SAMScore and translation-metric toolkit"};
  app.require_subcommand(1);
  app.set_version_flag("--version", "transcore 0.1.0");

  auto* score = app.add_subcommand("score", "SAMScore of one image pair");
  std::string src, gen, encoder = "stub", heatmap, pair_id;
  score->add_option("source", src, "Source PNG")->required();
  score->add_option("translated", gen, "Translated PNG")->required();
  score->add_option("--encoder", encoder,
                    "stub | onnx:<path> | precomputed:<dir>")
      ->capture_default_str();
  score->add_option("--heatmap", heatmap, "Write the similarity map as PNG");
  score->add_option("--pair-id", pair_id,
                    "Pair id for precomputed embeddings");

  RunFlags batch_flags;
  auto* batch = app.add_subcommand("batch", "Degree-0 metrics for a manifest");
  AddRunFlags(batch, batch_flags);

  RunFlags sweep_flags;
  auto* sweep = app.add_subcommand("sweep", "Distortion sweep over a manifest");
  AddRunFlags(sweep, sweep_flags);
  sweep->add_option("--distortion", sweep_flags.distortions,
                    "piecewise-affine | gaussian-noise | color-jitter");
  sweep->add_option("--degrees", sweep_flags.degrees,
                    "Comma-separated degree list, e.g. 0,0.01,0.02");
  sweep->add_option("--seed", sweep_flags.seed, "Master seed");
  sweep->add_option("--grid", sweep_flags.grid,
                    "Piecewise-affine control grid size (NxN)");
  sweep->add_flag("--jitter-deterministic", sweep_flags.jitter_deterministic,
                  "Fixed color-jitter factors instead of sampled ones");

  auto* correlate =
      app.add_subcommand("correlate", "Abs Pearson of metric vs degree");
  std::string records, corr_out;
  bool pooled = false;
  correlate->add_option("--records", records, "Records CSV")->required();
  correlate->add_flag("--pooled", pooled,
                      "Correlate individual records, not per-degree means");
  correlate->add_option("--out", corr_out, "Write JSON here, not stdout");

  auto* report = app.add_subcommand("report", "Plots, trends, correlations");
  std::string report_records, report_manifest, report_out;
  bool report_pooled = false, raw = false;
  report->add_option("--records", report_records, "Records CSV")->required();
  report->add_option("--manifest", report_manifest,
                     "Manifest used to group pairs by task");
  report->add_option("--out", report_out, "Output directory")->required();
  report->add_flag("--pooled", report_pooled, "Pooled correlation");
  report->add_flag("--raw", raw, "Plot mean values, not percent change");

  auto* synth = app.add_subcommand("synth", "Write a synthetic corpus");
  std::string synth_out;
  int count = 50, size = 128;
  std::uint64_t synth_seed = 0;
  synth->add_option("--out", synth_out, "Output directory")->required();
  synth->add_option("--count", count, "Number of pairs")
      ->check(CLI::PositiveNumber)
      ->capture_default_str();
  synth->add_option("--size", size, "Image side in pixels")
      ->check(CLI::Range(16, 4096))
      ->capture_default_str();
  synth->add_option("--seed", synth_seed, "Corpus seed")->capture_default_str();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*score) return RunScore(src, gen, encoder, heatmap, pair_id);
    if (*batch) return RunBatchCommand(batch_flags);
    if (*sweep) return RunSweepCommand(sweep_flags);
    if (*correlate) return RunCorrelate(records, pooled, corr_out);
    if (*report) {
      return RunReport(report_records, report_manifest, report_out,
                       report_pooled, !raw);
    }
    if (*synth) return RunSynth(synth_out, count, size, synth_seed);
  } catch (const Error& e) {
    std::cerr << "transcore: error: " << e.what() << "\n";
    return ExitCodeFor(e.code());
  } catch (const fs::filesystem_error& e) {
    std::cerr << "transcore: error: " << e.what() << "\n";
    return kExitIo;
  } catch (const std::exception& e) {
    std::cerr << "transcore: error: " << e.what() << "\n";
    return kExitFailure;
  }
  return kExitUsage;
}

}  // namespace
}  // namespace transcore

int main(int argc, char** argv) { return transcore::Main(argc, argv); }
