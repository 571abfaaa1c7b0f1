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
#include "transcore/sweep.h"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <limits>
#include <map>
#include <ostream>
#include <sstream>
#include <tuple>
#include <utility>

#include "parallel.h"
#include "transcore/error.h"
#include "transcore/image_io.h"
#include "transcore/samscore.h"

namespace transcore {

std::string_view StatusName(RecordStatus status) {
  switch (status) {
    case RecordStatus::kOk: return "ok";
    case RecordStatus::kIoError: return "io_error";
    case RecordStatus::kBackendError: return "backend_error";
    case RecordStatus::kError: return "error";
  }
  return "error";
}

std::optional<RecordStatus> ParseStatus(std::string_view name) {
  for (RecordStatus s : {RecordStatus::kOk, RecordStatus::kIoError,
                         RecordStatus::kBackendError, RecordStatus::kError}) {
    if (StatusName(s) == name) return s;
  }
  return std::nullopt;
}

RecordStatus StatusFor(ErrorCode code) {
  switch (code) {
    case ErrorCode::kIoError:
    case ErrorCode::kMalformedFile:
    case ErrorCode::kUnsupportedPixelFormat:
    case ErrorCode::kUnsupportedDtype:
    case ErrorCode::kUnsupportedByteOrder:
      return RecordStatus::kIoError;
    case ErrorCode::kBackendUnavailable:
    case ErrorCode::kMissingEmbedding:
      return RecordStatus::kBackendError;
    default:
      return RecordStatus::kError;
  }
}

namespace {

constexpr std::string_view kMetrics[] = {"samscore", "l2",       "psnr",
                                         "ssim",     "lpips",    "vitscore",
                                         "fcn_acc",  "fcn_iou"};

struct Failure {
  RecordStatus status;
  std::string message;
};

// Carries an earlier failure (e.g. of the source embedding) into the
// records that depend on it, keeping its original status.
struct PropagatedFailure {
  Failure failure;
};

template <typename T>
struct Outcome {
  std::optional<T> value;
  std::optional<Failure> failure;

  template <typename Fn>
  static Outcome Capture(Fn&& fn) {
    Outcome o;
    try {
      o.value = fn();
    } catch (const PropagatedFailure& p) {
      o.failure = p.failure;
    } catch (const Error& e) {
      o.failure = Failure{StatusFor(e.code()), e.what()};
    } catch (const std::exception& e) {
      o.failure = Failure{RecordStatus::kError, e.what()};
    }
    return o;
  }
};

struct LoadedImages {
  ImageBuffer source;
  ImageBuffer translated;
};

struct PairContext {
  Outcome<LoadedImages> images;
  Outcome<LabelMap> labels;
  Outcome<EmbeddingMap> sam_source;
  Outcome<EmbeddingMap> vit_source;
};

bool Needs(std::span<const std::string> metrics, std::string_view name) {
  return std::find(metrics.begin(), metrics.end(), name) != metrics.end();
}

PairContext LoadPair(const ImagePair& pair,
                     std::span<const std::string> metrics,
                     const SweepOptions& options,
                     const MetricBackends& backends) {
  PairContext ctx;
  ctx.images = Outcome<LoadedImages>::Capture([&] {
    LoadedImages li{ReadPngFile(pair.source), ReadPngFile(pair.translated)};
    if (options.resize_to) {
      li.source = ResizeBilinear(li.source, *options.resize_to,
                                 *options.resize_to);
      li.translated = ResizeBilinear(li.translated, *options.resize_to,
                                     *options.resize_to);
    }
    return li;
  });
  if (!ctx.images.value) return ctx;
  const ImageBuffer& src = ctx.images.value->source;
  const EmbeddingKey src_key{pair.id, "src", false};

  auto embed_source = [&](const std::shared_ptr<Encoder>& enc,
                          std::string_view what) {
    return Outcome<EmbeddingMap>::Capture([&]() -> EmbeddingMap {
      if (!enc) {
        throw Error(ErrorCode::kBackendUnavailable,
                    std::string(what) + " encoder not configured");
      }
      return enc->Embed(src, &src_key);
    });
  };
  if (Needs(metrics, "samscore")) {
    ctx.sam_source = embed_source(backends.sam, "samscore");
  }
  if (Needs(metrics, "vitscore")) {
    ctx.vit_source = embed_source(backends.vit, "vitscore");
  }
  if (Needs(metrics, "fcn_acc") || Needs(metrics, "fcn_iou")) {
    ctx.labels = Outcome<LabelMap>::Capture([&] {
      if (!pair.source_labels) {
        throw Error(ErrorCode::kConfigError,
                    "pair " + pair.id + " has no source_labels");
      }
      return ReadLabelMap(*pair.source_labels, backends.num_classes,
                          backends.ignore_id);
    });
  }
  return ctx;
}

struct Task {
  std::size_t pair_index;
  std::optional<DistortionKind> kind;  // nullopt: batch mode, no distortion
  double degree;
  std::uint32_t degree_index;
};

void RunTask(const Task& task, const ImagePair& pair, const PairContext& ctx,
             std::span<const std::string> metrics, const SweepOptions& options,
             const MetricBackends& backends, std::vector<SweepRecord>& out) {
  const std::string distortion =
      task.kind ? std::string(DistortionName(*task.kind))
                : std::string(kNoDistortion);
  const std::uint64_t seed =
      task.kind ? DeriveSeed(options.master_seed, pair.id, *task.kind,
                             task.degree_index)
                : 0;
  auto emit = [&](const std::string& metric, const Outcome<double>& o) {
    SweepRecord r{pair.id, metric, distortion, task.degree, seed,
                  RecordStatus::kOk, 0.0, {}};
    if (o.failure) {
      r.status = o.failure->status;
      r.message = o.failure->message;
    } else {
      r.value = *o.value;
    }
    out.push_back(std::move(r));
  };

  if (ctx.images.failure) {
    for (const auto& m : metrics) {
      Outcome<double> o;
      o.failure = ctx.images.failure;
      emit(m, o);
    }
    return;
  }

  const ImageBuffer& source = ctx.images.value->source;
  Outcome<ImageBuffer> distorted = Outcome<ImageBuffer>::Capture([&] {
    if (!task.kind || task.degree == 0.0) return ctx.images.value->translated;
    DistortionSpec spec;
    spec.kind = *task.kind;
    spec.degree = task.degree;
    spec.seed = seed;
    spec.grid_rows = options.grid_rows;
    spec.grid_cols = options.grid_cols;
    spec.deterministic = options.jitter_deterministic;
    return ApplyDistortion(ctx.images.value->translated, spec);
  });
  const bool is_distorted = task.kind.has_value() && task.degree != 0.0;
  const EmbeddingKey gen_key{pair.id, "gen", is_distorted};

  std::optional<Outcome<FcnScores>> fcn;
  for (const auto& metric : metrics) {
    if (distorted.failure) {
      Outcome<double> o;
      o.failure = distorted.failure;
      emit(metric, o);
      continue;
    }
    const ImageBuffer& gen = *distorted.value;
    auto embed_score = [&](const std::shared_ptr<Encoder>& enc,
                           const Outcome<EmbeddingMap>& src_emb) {
      return Outcome<double>::Capture([&]() -> double {
        if (src_emb.failure) throw PropagatedFailure{*src_emb.failure};
        return SamScore(*src_emb.value, enc->Embed(gen, &gen_key)).score;
      });
    };

    if (metric == "samscore") {
      emit(metric, embed_score(backends.sam, ctx.sam_source));
    } else if (metric == "vitscore") {
      emit(metric, embed_score(backends.vit, ctx.vit_source));
    } else if (metric == "l2") {
      emit(metric, Outcome<double>::Capture([&] { return L2Distance(source, gen); }));
    } else if (metric == "psnr") {
      emit(metric, Outcome<double>::Capture([&] { return Psnr(source, gen); }));
    } else if (metric == "ssim") {
      emit(metric, Outcome<double>::Capture([&] { return Ssim(source, gen); }));
    } else if (metric == "lpips") {
      emit(metric, Outcome<double>::Capture([&]() -> double {
             if (!backends.lpips) {
               throw Error(ErrorCode::kBackendUnavailable,
                           "lpips backend not configured");
             }
             return backends.lpips->Distance(source, gen);
           }));
    } else if (metric == "fcn_acc" || metric == "fcn_iou") {
      if (!fcn) {
        fcn = Outcome<FcnScores>::Capture([&]() -> FcnScores {
          if (ctx.labels.failure) throw PropagatedFailure{*ctx.labels.failure};
          if (!backends.segmenter) {
            throw Error(ErrorCode::kBackendUnavailable,
                        "segmenter backend not configured");
          }
          return FcnScore(*backends.segmenter, gen, *ctx.labels.value);
        });
      }
      Outcome<double> o;
      o.failure = fcn->failure;
      if (fcn->value) {
        o.value = metric == "fcn_acc" ? fcn->value->per_pixel_acc
                                      : fcn->value->class_iou;
      }
      emit(metric, o);
    } else {
      Outcome<double> o;
      o.failure = Failure{RecordStatus::kError, "unknown metric " + metric};
      emit(metric, o);
    }
  }
}

bool RecordLess(const SweepRecord& a, const SweepRecord& b) {
  return std::tie(a.pair_id, a.metric, a.distortion, a.degree) <
         std::tie(b.pair_id, b.metric, b.distortion, b.degree);
}

std::vector<SweepRecord> RunTasks(std::span<const ImagePair> pairs,
                                  std::span<const std::string> metrics,
                                  const SweepOptions& options,
                                  const MetricBackends& backends,
                                  const std::vector<Task>& tasks) {
  std::vector<PairContext> contexts(pairs.size());
  ParallelFor(pairs.size(), options.jobs, [&](std::size_t i) {
    contexts[i] = LoadPair(pairs[i], metrics, options, backends);
  });
  std::vector<std::vector<SweepRecord>> slots(tasks.size());
  ParallelFor(tasks.size(), options.jobs, [&](std::size_t i) {
    const Task& t = tasks[i];
    RunTask(t, pairs[t.pair_index], contexts[t.pair_index], metrics, options,
            backends, slots[i]);
  });
  std::vector<SweepRecord> records;
  for (auto& s : slots) {
    for (auto& r : s) records.push_back(std::move(r));
  }
  std::stable_sort(records.begin(), records.end(), RecordLess);
  return records;
}

std::vector<std::string> SortedMetrics(std::span<const std::string> metrics) {
  std::vector<std::string> m(metrics.begin(), metrics.end());
  std::sort(m.begin(), m.end());
  m.erase(std::unique(m.begin(), m.end()), m.end());
  return m;
}

}  // namespace

bool IsKnownMetric(std::string_view name) {
  return std::find(std::begin(kMetrics), std::end(kMetrics), name) !=
         std::end(kMetrics);
}

bool HigherIsBetter(std::string_view metric) {
  return !(metric == "l2" || metric == "lpips");
}

std::vector<SweepRecord> RunSweep(std::span<const ImagePair> pairs,
                                  std::span<const std::string> metrics,
                                  const SweepOptions& options,
                                  const MetricBackends& backends) {
  const std::vector<std::string> sorted = SortedMetrics(metrics);
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    for (const DistortionAxis& axis : options.axes) {
      std::vector<double> degrees = axis.degrees;
      if (std::find(degrees.begin(), degrees.end(), 0.0) == degrees.end()) {
        degrees.insert(degrees.begin(), 0.0);
      }
      for (std::size_t k = 0; k < degrees.size(); ++k) {
        tasks.push_back({p, axis.kind, degrees[k],
                         static_cast<std::uint32_t>(k)});
      }
    }
  }
  return RunTasks(pairs, sorted, options, backends, tasks);
}

std::vector<SweepRecord> RunBatch(std::span<const ImagePair> pairs,
                                  std::span<const std::string> metrics,
                                  const SweepOptions& options,
                                  const MetricBackends& backends) {
  const std::vector<std::string> sorted = SortedMetrics(metrics);
  std::vector<Task> tasks;
  for (std::size_t p = 0; p < pairs.size(); ++p) {
    tasks.push_back({p, std::nullopt, 0.0, 0});
  }
  return RunTasks(pairs, sorted, options, backends, tasks);
}

double Pearson(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size()) {
    throw Error(ErrorCode::kLengthMismatch, "pearson series lengths differ");
  }
  if (x.size() < 3) {
    throw Error(ErrorCode::kInvalidArgument,
                "pearson needs at least 3 samples");
  }
  const double n = static_cast<double>(x.size());
  double mx = 0.0, my = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    mx += x[i];
    my += y[i];
  }
  mx /= n;
  my /= n;
  double sxy = 0.0, sxx = 0.0, syy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    const double dx = x[i] - mx;
    const double dy = y[i] - my;
    sxy += dx * dy;
    sxx += dx * dx;
    syy += dy * dy;
  }
  if (sxx == 0.0 || syy == 0.0) {
    throw Error(ErrorCode::kDegenerateSeries,
                "pearson of a constant series is undefined");
  }
  return std::clamp(sxy / std::sqrt(sxx * syy), -1.0, 1.0);
}

std::vector<double> PercentChange(std::span<const double> series) {
  if (series.empty()) {
    throw Error(ErrorCode::kInvalidArgument, "empty series");
  }
  const double base = series[0];
  if (base == 0.0 || !std::isfinite(base)) {
    throw Error(ErrorCode::kZeroBaseline,
                "percent change needs a finite non-zero first value");
  }
  std::vector<double> out(series.size());
  for (std::size_t i = 0; i < series.size(); ++i) {
    out[i] = 100.0 * (series[i] - base) / std::fabs(base);
  }
  out[0] = 0.0;
  return out;
}

namespace {

struct GroupKey {
  std::string metric;
  std::string distortion;
  auto operator<=>(const GroupKey&) const = default;
};

std::vector<const SweepRecord*> CanonicalOrder(
    std::span<const SweepRecord> records) {
  std::vector<const SweepRecord*> order;
  order.reserve(records.size());
  for (const auto& r : records) order.push_back(&r);
  std::sort(order.begin(), order.end(),
            [](const SweepRecord* a, const SweepRecord* b) {
              return std::tie(a->metric, a->distortion, a->degree,
                              a->pair_id, a->seed, a->value) <
                     std::tie(b->metric, b->distortion, b->degree,
                              b->pair_id, b->seed, b->value);
            });
  return order;
}

}  // namespace

std::vector<CorrelationReport> Correlate(std::span<const SweepRecord> records,
                                         bool pooled) {
  std::map<GroupKey, std::vector<const SweepRecord*>> groups;
  for (const SweepRecord* r : CanonicalOrder(records)) {
    if (r->distortion == kNoDistortion || r->status != RecordStatus::kOk) {
      continue;
    }
    groups[{r->metric, r->distortion}].push_back(r);
  }

  std::vector<CorrelationReport> reports;
  for (const auto& [key, group] : groups) {
    CorrelationReport rep;
    rep.metric = key.metric;
    rep.distortion = key.distortion;
    std::map<double, std::pair<double, int>> per_degree;
    std::vector<double> xs, ys;
    for (const SweepRecord* r : group) {
      if (!std::isfinite(r->value)) {
        ++rep.excluded;
        continue;
      }
      auto& acc = per_degree[r->degree];
      acc.first += r->value;
      acc.second += 1;
      if (pooled) {
        xs.push_back(r->degree);
        ys.push_back(r->value);
      }
    }
    if (!pooled) {
      for (const auto& [degree, acc] : per_degree) {
        xs.push_back(degree);
        ys.push_back(acc.first / acc.second);
      }
    }
    rep.n = static_cast<int>(xs.size());
    if (per_degree.size() < 3) {
      rep.status = "insufficient_degrees";
    } else {
      try {
        rep.r = Pearson(xs, ys);
        rep.abs_r = std::fabs(*rep.r);
      } catch (const Error& e) {
        if (e.code() != ErrorCode::kDegenerateSeries) throw;
        rep.status = "degenerate";
      }
    }
    reports.push_back(std::move(rep));
  }
  return reports;
}

TrendTable BuildTrendTable(std::span<const SweepRecord> records,
                           std::string_view distortion,
                           std::span<const std::string> pair_filter) {
  TrendTable table;
  table.distortion = std::string(distortion);
  std::map<std::string, std::map<double, std::pair<double, int>>> acc;
  std::vector<double> degrees;
  for (const SweepRecord* r : CanonicalOrder(records)) {
    if (r->distortion != distortion) continue;
    if (!pair_filter.empty() &&
        std::find(pair_filter.begin(), pair_filter.end(), r->pair_id) ==
            pair_filter.end()) {
      continue;
    }
    degrees.push_back(r->degree);
    auto& slot = acc[r->metric][r->degree];
    if (r->status == RecordStatus::kOk && std::isfinite(r->value)) {
      slot.first += r->value;
      slot.second += 1;
    }
  }
  std::sort(degrees.begin(), degrees.end());
  degrees.erase(std::unique(degrees.begin(), degrees.end()), degrees.end());
  table.degrees = degrees;
  for (const auto& [metric, by_degree] : acc) {
    TrendRow row{metric, {}};
    for (double d : degrees) {
      auto it = by_degree.find(d);
      row.means.push_back(it != by_degree.end() && it->second.second > 0
                              ? it->second.first / it->second.second
                              : std::numeric_limits<double>::quiet_NaN());
    }
    table.rows.push_back(std::move(row));
  }
  return table;
}

std::string FormatFixed6(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.6f", v);
  std::string s = buf;
  if (s == "-0.000000") s = "0.000000";
  return s;
}

namespace {

std::string CsvField(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

std::vector<std::string> SplitCsvLine(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char c = line[i];
    if (quoted) {
      if (c == '"') {
        if (i + 1 < line.size() && line[i + 1] == '"') {
          cur += '"';
          ++i;
        } else {
          quoted = false;
        }
      } else {
        cur += c;
      }
    } else if (c == '"') {
      quoted = true;
    } else if (c == ',') {
      fields.push_back(std::move(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(std::move(cur));
  return fields;
}

double ParseDouble(const std::string& s) {
  if (s == "inf") return std::numeric_limits<double>::infinity();
  if (s == "-inf") return -std::numeric_limits<double>::infinity();
  std::size_t pos = 0;
  const double v = std::stod(s, &pos);
  if (pos != s.size()) throw std::invalid_argument(s);
  return v;
}

constexpr std::string_view kCsvHeader =
    "pair_id,metric,distortion,degree,seed,status,value";

}  // namespace

void WriteRecordsCsv(std::ostream& out, std::span<const SweepRecord> records) {
  out << kCsvHeader << '\n';
  for (const auto& r : records) {
    out << CsvField(r.pair_id) << ',' << CsvField(r.metric) << ','
        << CsvField(r.distortion) << ',' << FormatFixed6(r.degree) << ','
        << r.seed << ',' << StatusName(r.status) << ',';
    if (r.status == RecordStatus::kOk) out << FormatFixed6(r.value);
    out << '\n';
  }
}

std::vector<SweepRecord> ReadRecordsCsv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line)) {
    throw Error(ErrorCode::kMalformedFile, "empty records CSV");
  }
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kCsvHeader) {
    throw Error(ErrorCode::kMalformedFile, "unexpected CSV header: " + line);
  }
  std::vector<SweepRecord> records;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto f = SplitCsvLine(line);
    if (f.size() != 7) {
      throw Error(ErrorCode::kMalformedFile,
                  "line " + std::to_string(line_no) + ": expected 7 fields");
    }
    try {
      SweepRecord r;
      r.pair_id = f[0];
      r.metric = f[1];
      r.distortion = f[2];
      r.degree = ParseDouble(f[3]);
      r.seed = std::stoull(f[4]);
      const auto status = ParseStatus(f[5]);
      if (!status) throw std::invalid_argument(f[5]);
      r.status = *status;
      if (r.status == RecordStatus::kOk) r.value = ParseDouble(f[6]);
      records.push_back(std::move(r));
    } catch (const std::logic_error&) {
      throw Error(ErrorCode::kMalformedFile,
                  "line " + std::to_string(line_no) + ": bad field in '" +
                      line + "'");
    }
  }
  return records;
}

void WriteRecordsCsvFile(const std::filesystem::path& path,
                         std::span<const SweepRecord> records) {
  std::ostringstream os;
  WriteRecordsCsv(os, records);
  const std::string s = os.str();
  WriteFileBytes(path, {reinterpret_cast<const std::uint8_t*>(s.data()),
                        s.size()});
}

std::vector<SweepRecord> ReadRecordsCsvFile(
    const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  return ReadRecordsCsv(in);
}

namespace {

std::string JsonString(const std::string& s) {
  std::string out = "\"";
  for (char c : s) {
    switch (c) {
      case '"': out += "\\\""; break;
      case '\\': out += "\\\\"; break;
      case '\n': out += "\\n"; break;
      default:
        if (static_cast<unsigned char>(c) < 0x20) {
          char buf[8];
          std::snprintf(buf, sizeof(buf), "\\u%04x", c);
          out += buf;
        } else {
          out += c;
        }
    }
  }
  return out + "\"";
}

std::string JsonNumber(const std::optional<double>& v) {
  return v ? FormatFixed6(*v) : "null";
}

}  // namespace

std::string CorrelationJson(std::span<const CorrelationReport> reports) {
  std::string out = "[\n";
  for (std::size_t i = 0; i < reports.size(); ++i) {
    const auto& r = reports[i];
    out += "  {\"metric\": " + JsonString(r.metric) +
           ", \"distortion\": " + JsonString(r.distortion) +
           ", \"abs_r\": " + JsonNumber(r.abs_r) +
           ", \"r\": " + JsonNumber(r.r) + ", \"n\": " + std::to_string(r.n) +
           ", \"excluded\": " + std::to_string(r.excluded) +
           ", \"status\": " + JsonString(r.status) + "}";
    out += i + 1 < reports.size() ? ",\n" : "\n";
  }
  out += "]\n";
  return out;
}

std::string TrendCsv(const TrendTable& table, bool percent) {
  std::string out = "metric";
  for (double d : table.degrees) out += "," + FormatFixed6(d);
  out += "\n";
  for (const auto& row : table.rows) {
    out += CsvField(row.metric);
    std::vector<double> values = row.means;
    if (percent) {
      try {
        values = PercentChange(row.means);
      } catch (const Error&) {
        values.assign(row.means.size(),
                      std::numeric_limits<double>::quiet_NaN());
      }
    }
    for (double v : values) out += "," + FormatFixed6(v);
    out += "\n";
  }
  return out;
}

}  // namespace transcore
