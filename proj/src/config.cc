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
#include "transcore/config.h"

#include <algorithm>
#include <set>
#include <sstream>
#include <string>

#include <nlohmann/json.hpp>
#include "transcore/error.h"
#include "transcore/image_io.h"

namespace transcore {

using json = nlohmann::json;

namespace {

[[noreturn]] void ConfigFail(const std::string& msg) {
  throw Error(ErrorCode::kConfigError, msg);
}

json ParseJson(std::string_view text, const std::string& what) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    ConfigFail(what + ": " + e.what());
  }
}

std::string ReadText(const std::filesystem::path& path) {
  const auto bytes = ReadFileBytes(path);
  return std::string(bytes.begin(), bytes.end());
}

}  // namespace

Manifest Manifest::FromJsonText(std::string_view text,
                                const std::filesystem::path& base_dir) {
  const json doc = ParseJson(text, "manifest");
  const json* list = &doc;
  if (doc.is_object()) {
    if (!doc.contains("pairs")) ConfigFail("manifest has no 'pairs' array");
    list = &doc["pairs"];
  }
  if (!list->is_array()) ConfigFail("manifest 'pairs' must be an array");

  auto resolve = [&](const std::string& p) {
    std::filesystem::path path(p);
    return path.is_absolute() ? path : base_dir / path;
  };
  Manifest m;
  std::set<std::string> ids;
  for (const json& entry : *list) {
    try {
      ImagePair pair;
      pair.id = entry.at("id").get<std::string>();
      pair.source = resolve(entry.at("source").get<std::string>());
      pair.translated = resolve(entry.at("translated").get<std::string>());
      if (entry.contains("source_labels")) {
        pair.source_labels =
            resolve(entry["source_labels"].get<std::string>());
      }
      if (entry.contains("translated_domain_gt")) {
        pair.translated_domain_gt =
            resolve(entry["translated_domain_gt"].get<std::string>());
      }
      if (entry.contains("task")) pair.task = entry["task"].get<std::string>();
      m.pairs.push_back(std::move(pair));
    } catch (const json::exception& e) {
      ConfigFail(std::string("bad manifest entry: ") + e.what());
    }
  }
  for (const ImagePair& p : m.pairs) {
    if (p.id.empty()) ConfigFail("empty pair id");
    if (!ids.insert(p.id).second) ConfigFail("duplicate pair id " + p.id);
    std::vector<std::filesystem::path> files = {p.source, p.translated};
    if (p.source_labels) files.push_back(*p.source_labels);
    if (p.translated_domain_gt) files.push_back(*p.translated_domain_gt);
    for (const auto& f : files) {
      if (!std::filesystem::exists(f)) {
        ConfigFail("pair " + p.id + ": file not found: " + f.string());
      }
    }
  }
  return m;
}

Manifest Manifest::Load(const std::filesystem::path& path) {
  return FromJsonText(ReadText(path), path.parent_path());
}

std::string Manifest::ToJsonText() const {
  json list = json::array();
  for (const ImagePair& p : pairs) {
    json e = {{"id", p.id},
              {"source", p.source.string()},
              {"translated", p.translated.string()},
              {"task", p.task}};
    if (p.source_labels) e["source_labels"] = p.source_labels->string();
    if (p.translated_domain_gt) {
      e["translated_domain_gt"] = p.translated_domain_gt->string();
    }
    list.push_back(std::move(e));
  }
  return json{{"pairs", list}}.dump(2) + "\n";
}

std::vector<double> DefaultDegrees(DistortionKind kind) {
  switch (kind) {
    case DistortionKind::kPiecewiseAffine:
      return {0.0, 0.01, 0.02, 0.03, 0.04, 0.05};
    case DistortionKind::kGaussianNoise:
      return {0.0, 50.0, 100.0, 150.0, 200.0, 250.0};
    case DistortionKind::kColorJitter:
      return {0.0, 0.05, 0.10, 0.15, 0.20, 0.25};
  }
  return {};
}

RunConfig::RunConfig() {
  for (DistortionKind k :
       {DistortionKind::kPiecewiseAffine, DistortionKind::kGaussianNoise}) {
    sweep.axes.push_back({k, DefaultDegrees(k)});
  }
}

void RunConfig::Merge(std::string_view text) {
  const json doc = ParseJson(text, "config");
  if (!doc.is_object()) ConfigFail("config must be a JSON object");
  try {
    if (doc.contains("metrics")) {
      metrics = doc["metrics"].get<std::vector<std::string>>();
    }
    if (doc.contains("encoders")) {
      for (const auto& [k, v] : doc["encoders"].items()) {
        encoders[k] = v.get<std::string>();
      }
    }
    if (doc.contains("distortions")) {
      sweep.axes.clear();
      for (const auto& [k, v] : doc["distortions"].items()) {
        const auto kind = ParseDistortionKind(k);
        if (!kind) ConfigFail("unknown distortion '" + k + "'");
        sweep.axes.push_back({*kind, v.get<std::vector<double>>()});
      }
    }
    if (doc.contains("grid")) {
      sweep.grid_rows = doc["grid"].value("rows", sweep.grid_rows);
      sweep.grid_cols = doc["grid"].value("cols", sweep.grid_cols);
    }
    sweep.jitter_deterministic =
        doc.value("color_jitter_deterministic", sweep.jitter_deterministic);
    if (doc.contains("resize_to")) {
      if (doc["resize_to"].is_null()) {
        sweep.resize_to.reset();
      } else {
        sweep.resize_to = doc["resize_to"].get<int>();
      }
    }
    sweep.master_seed = doc.value("seed", sweep.master_seed);
    sweep.jobs = doc.value("jobs", sweep.jobs);
    pooled = doc.value("pooled", pooled);
    if (doc.contains("output_dir")) {
      output_dir = doc["output_dir"].get<std::string>();
    }
    if (doc.contains("segmentation")) {
      const json& seg = doc["segmentation"];
      num_classes = seg.value("num_classes", num_classes);
      segmenter_input_size = seg.value("input_size", segmenter_input_size);
      if (seg.contains("ignore_id")) {
        if (seg["ignore_id"].is_null()) {
          ignore_id.reset();
        } else {
          ignore_id = seg["ignore_id"].get<int>();
        }
      }
    }
  } catch (const json::exception& e) {
    ConfigFail(std::string("bad config value: ") + e.what());
  }
}

RunConfig RunConfig::Load(const std::filesystem::path& path) {
  RunConfig config;
  config.Merge(ReadText(path));
  return config;
}

void RunConfig::Validate() const {
  if (metrics.empty()) ConfigFail("no metrics requested");
  for (const std::string& m : metrics) {
    if (!IsKnownMetric(m)) ConfigFail("unknown metric '" + m + "'");
    std::string backend;
    if (m == "samscore") backend = "samscore";
    if (m == "vitscore") backend = "vitscore";
    if (m == "lpips") backend = "lpips";
    if (m == "fcn_acc" || m == "fcn_iou") backend = "segmenter";
    if (!backend.empty() && !encoders.contains(backend)) {
      ConfigFail("metric '" + m + "' needs encoders." + backend);
    }
    if ((backend == "lpips" || backend == "segmenter") &&
        encoders.at(backend).rfind("onnx:", 0) != 0) {
      ConfigFail("encoders." + backend + " must be onnx:<path>");
    }
  }
  for (const auto& axis : sweep.axes) {
    for (double d : axis.degrees) {
      DistortionSpec spec;
      spec.kind = axis.kind;
      spec.degree = d;
      spec.grid_rows = sweep.grid_rows;
      spec.grid_cols = sweep.grid_cols;
      try {
        spec.Validate();
      } catch (const Error& e) {
        ConfigFail(e.what());
      }
    }
  }
  if (sweep.jobs < 1) ConfigFail("jobs must be >= 1");
  if (sweep.resize_to && *sweep.resize_to < 16) {
    ConfigFail("resize_to must be >= 16");
  }
}

MetricBackends BuildBackends(const RunConfig& config) {
  MetricBackends b;
  b.num_classes = config.num_classes;
  b.ignore_id = config.ignore_id;
  auto uri = [&](const std::string& key) -> const std::string* {
    auto it = config.encoders.find(key);
    return it == config.encoders.end() ? nullptr : &it->second;
  };
  auto needed = [&](std::initializer_list<std::string_view> names) {
    for (std::string_view n : names) {
      if (std::find(config.metrics.begin(), config.metrics.end(), n) !=
          config.metrics.end()) {
        return true;
      }
    }
    return false;
  };
  auto onnx_path = [](const std::string& u) {
    return std::filesystem::path(u.substr(u.find(':') + 1));
  };
  if (const std::string* u = uri("samscore"); u && needed({"samscore"})) {
    b.sam = MakeEncoder(EncoderSpec::Parse(*u));
  }
  if (const std::string* u = uri("vitscore"); u && needed({"vitscore"})) {
    b.vit = MakeEncoder(
        EncoderSpec::Parse(*u, {768, 14, 14}, Preprocessing::Vit()));
  }
  if (const std::string* u = uri("lpips"); u && needed({"lpips"})) {
    b.lpips = std::make_shared<OnnxLpips>(onnx_path(*u));
  }
  if (const std::string* u = uri("segmenter");
      u && needed({"fcn_acc", "fcn_iou"})) {
    Preprocessing pre;
    pre.size = config.segmenter_input_size;
    pre.mean = {0.485 * 255, 0.456 * 255, 0.406 * 255};
    pre.std = {0.229 * 255, 0.224 * 255, 0.225 * 255};
    b.segmenter = std::make_shared<OnnxSegmenter>(onnx_path(*u),
                                                  config.num_classes, pre);
  }
  return b;
}

std::vector<double> ParseDegreeList(std::string_view text) {
  std::vector<double> out;
  std::stringstream ss{std::string(text)};
  std::string item;
  while (std::getline(ss, item, ',')) {
    item.erase(0, item.find_first_not_of(" \t"));
    item.erase(item.find_last_not_of(" \t") + 1);
    if (item.empty()) continue;
    try {
      std::size_t pos = 0;
      out.push_back(std::stod(item, &pos));
      if (pos != item.size()) throw std::invalid_argument(item);
    } catch (const std::logic_error&) {
      ConfigFail("bad degree '" + item + "'");
    }
  }
  if (out.empty()) ConfigFail("empty degree list");
  return out;
}

}  // namespace transcore
