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
// Python bindings for transcore. Images cross the boundary as numpy arrays:
// uint8 arrays map to 0-255 buffers and floating arrays to [0,1] buffers.

#include <pybind11/numpy.h>
#include <pybind11/pybind11.h>
#include <pybind11/stl.h>
#include <pybind11/stl/filesystem.h>

#include <cstring>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "transcore/config.h"
#include "transcore/distortion.h"
#include "transcore/encoder.h"
#include "transcore/error.h"
#include "transcore/image.h"
#include "transcore/image_io.h"
#include "transcore/metrics.h"
#include "transcore/rng.h"
#include "transcore/samscore.h"
#include "transcore/sweep.h"

namespace py = pybind11;

namespace transcore {
namespace {

using FloatArray = py::array_t<float, py::array::c_style | py::array::forcecast>;

ImageBuffer ImageFromArray(const py::array& arr) {
  if (arr.ndim() != 2 && arr.ndim() != 3) {
    throw Error(ErrorCode::kInvalidArgument, "image must be HxW or HxWxC");
  }
  const int h = static_cast<int>(arr.shape(0));
  const int w = static_cast<int>(arr.shape(1));
  const int c = arr.ndim() == 3 ? static_cast<int>(arr.shape(2)) : 1;
  const PixelScale scale =
      arr.dtype().is(py::dtype::of<std::uint8_t>()) ? PixelScale::kU8 : PixelScale::kUnit;
  FloatArray f = FloatArray::ensure(arr);
  std::vector<float> data(f.data(), f.data() + f.size());
  ImageBuffer img(h, w, c, scale, std::move(data));
  img.Validate();
  return img;
}

py::array ImageToArray(const ImageBuffer& img) {
  std::vector<py::ssize_t> shape = {img.height(), img.width(), img.channels()};
  if (img.scale() == PixelScale::kU8) {
    py::array_t<std::uint8_t> out(shape);
    auto* dst = out.mutable_data();
    const auto src = img.data();
    for (std::size_t i = 0; i < src.size(); ++i) dst[i] = static_cast<std::uint8_t>(src[i]);
    return out;
  }
  py::array_t<float> out(shape);
  std::memcpy(out.mutable_data(), img.data().data(), img.size() * sizeof(float));
  return out;
}

EmbeddingMap EmbeddingFromArray(const FloatArray& arr) {
  if (arr.ndim() != 3) throw Error(ErrorCode::kShapeMismatch, "embedding must be CxHxW");
  return EmbeddingMap(static_cast<int>(arr.shape(0)), static_cast<int>(arr.shape(1)),
                      static_cast<int>(arr.shape(2)),
                      std::vector<float>(arr.data(), arr.data() + arr.size()));
}

FloatArray EmbeddingToArray(const EmbeddingMap& m) {
  const auto [c, h, w] = m.shape();
  FloatArray out({c, h, w});
  std::memcpy(out.mutable_data(), m.data().data(), m.data().size() * sizeof(float));
  return out;
}

FloatArray MapToArray(const SimilarityMap& map) {
  FloatArray out({map.height, map.width});
  std::memcpy(out.mutable_data(), map.values.data(), map.values.size() * sizeof(float));
  return out;
}

py::array TensorToArray(const TensorF32& t) {
  std::vector<py::ssize_t> shape(t.shape().begin(), t.shape().end());
  FloatArray out(shape);
  std::memcpy(out.mutable_data(), t.data().data(), t.size() * sizeof(float));
  return out;
}

DistortionKind KindFromName(const std::string& name) {
  const auto kind = ParseDistortionKind(name);
  if (!kind) throw Error(ErrorCode::kInvalidArgument, "unknown distortion '" + name + "'");
  return *kind;
}

py::dict RecordToDict(const SweepRecord& r) {
  py::dict d;
  d["pair_id"] = r.pair_id;
  d["metric"] = r.metric;
  d["distortion"] = r.distortion;
  d["degree"] = r.degree;
  d["seed"] = r.seed;
  d["status"] = std::string(StatusName(r.status));
  d["value"] = r.value;
  return d;
}

}  // namespace
}  // namespace transcore

PYBIND11_MODULE(_core, m) {
  using namespace transcore;
  m.doc() = "SAMScore and baseline metrics for image translation evaluation.";

  static py::exception<Error> error_type(m, "TranscoreError", PyExc_RuntimeError);
  py::register_exception_translator([](std::exception_ptr p) {
    try {
      if (p) std::rethrow_exception(p);
    } catch (const Error& e) {
      py::object exc = py::reinterpret_borrow<py::object>(error_type)(e.what());
      exc.attr("code") = std::string(ErrorCodeName(e.code()));
      PyErr_SetObject(error_type.ptr(), exc.ptr());
    }
  });

  // Image I/O.
  m.def("read_png", [](const std::filesystem::path& p) { return ImageToArray(ReadPngFile(p)); },
        py::arg("path"));
  m.def("write_png",
        [](const std::filesystem::path& p, const py::array& img) {
          WritePngFile(p, ImageFromArray(img));
        },
        py::arg("path"), py::arg("image"));
  m.def("read_npy", [](const std::filesystem::path& p) { return TensorToArray(ReadTensorFile(p)); },
        py::arg("path"));
  m.def("write_npy",
        [](const std::filesystem::path& p, const FloatArray& a) {
          std::vector<std::int64_t> shape(a.shape(), a.shape() + a.ndim());
          WriteTensorFile(p, TensorF32(shape, std::vector<float>(a.data(), a.data() + a.size())));
        },
        py::arg("path"), py::arg("array"));
  m.def("resize_bilinear",
        [](const py::array& img, int h, int w) {
          return ImageToArray(ResizeBilinear(ImageFromArray(img), h, w));
        },
        py::arg("image"), py::arg("height"), py::arg("width"));

  // Encoders and SAMScore.
  m.def("stub_encode", [](const py::array& img) { return EmbeddingToArray(StubEncode(ImageFromArray(img))); },
        py::arg("image"));
  m.def("encode",
        [](const std::string& uri, const py::array& img) {
          return EmbeddingToArray(MakeEncoder(EncoderSpec::Parse(uri))->Embed(ImageFromArray(img), nullptr));
        },
        py::arg("encoder"), py::arg("image"));
  m.def("onnx_runtime_available", &OnnxRuntimeAvailable);
  m.def("cosine",
        [](const FloatArray& u, const FloatArray& v, double eps) {
          return Cosine({u.data(), static_cast<std::size_t>(u.size())},
                        {v.data(), static_cast<std::size_t>(v.size())}, eps);
        },
        py::arg("u"), py::arg("v"), py::arg("eps") = kCosineEps);
  m.def("samscore_embeddings",
        [](const FloatArray& x, const FloatArray& y) {
          const ScoreResult r = SamScore(EmbeddingFromArray(x), EmbeddingFromArray(y));
          return py::make_tuple(r.score, MapToArray(r.map));
        },
        py::arg("x"), py::arg("y"),
        "Returns (score, HxW similarity map) for two CxHxW embeddings.");
  m.def("samscore",
        [](const py::array& source, const py::array& translated, const std::string& encoder) {
          auto enc = MakeEncoder(EncoderSpec::Parse(encoder));
          const ScoreResult r = ScoreImages(*enc, ImageFromArray(source), ImageFromArray(translated));
          return py::make_tuple(r.score, MapToArray(r.map));
        },
        py::arg("source"), py::arg("translated"), py::arg("encoder") = "stub");
  m.def("heatmap",
        [](const FloatArray& map) {
          SimilarityMap s{static_cast<int>(map.shape(0)), static_cast<int>(map.shape(1)),
                          std::vector<float>(map.data(), map.data() + map.size())};
          return ImageToArray(HeatmapImage(s));
        },
        py::arg("map"));

  // Baseline metrics.
  m.def("l2", [](const py::array& a, const py::array& b) { return L2Distance(ImageFromArray(a), ImageFromArray(b)); });
  m.def("psnr", [](const py::array& a, const py::array& b) { return Psnr(ImageFromArray(a), ImageFromArray(b)); });
  m.def("ssim", [](const py::array& a, const py::array& b) { return Ssim(ImageFromArray(a), ImageFromArray(b)); });
  m.def("fcn_scores",
        [](const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& gt,
           const py::array_t<std::int32_t, py::array::c_style | py::array::forcecast>& pred,
           int num_classes, std::optional<int> ignore_id) {
          auto to_map = [&](const auto& a) {
            LabelMap l{static_cast<int>(a.shape(0)), static_cast<int>(a.shape(1)), num_classes,
                       ignore_id, std::vector<std::int32_t>(a.data(), a.data() + a.size())};
            return l;
          };
          const ConfusionMatrix cm = Confusion(to_map(gt), to_map(pred));
          const FcnScores s = ComputeFcnScores(cm);
          py::array_t<std::uint64_t> counts({num_classes, num_classes});
          for (int r = 0; r < num_classes; ++r) {
            for (int c = 0; c < num_classes; ++c) counts.mutable_at(r, c) = cm.at(r, c);
          }
          py::dict d;
          d["per_pixel_acc"] = s.per_pixel_acc;
          d["class_iou"] = s.class_iou;
          d["per_class_iou"] = s.per_class_iou;
          d["confusion"] = counts;
          return d;
        },
        py::arg("gt"), py::arg("pred"), py::arg("num_classes"), py::arg("ignore_id") = 255);

  // Distortions and seeding.
  m.def("distort",
        [](const py::array& img, const std::string& kind, double degree, std::uint64_t seed,
           int grid_rows, int grid_cols, bool deterministic) {
          DistortionSpec spec;
          spec.kind = KindFromName(kind);
          spec.degree = degree;
          spec.seed = seed;
          spec.grid_rows = grid_rows;
          spec.grid_cols = grid_cols;
          spec.deterministic = deterministic;
          return ImageToArray(ApplyDistortion(ImageFromArray(img), spec));
        },
        py::arg("image"), py::arg("kind"), py::arg("degree"), py::arg("seed") = 0,
        py::arg("grid_rows") = 4, py::arg("grid_cols") = 4, py::arg("deterministic") = false);
  m.def("derive_seed",
        [](std::uint64_t master, const std::string& pair_id, const std::string& kind,
           std::uint32_t degree_index) {
          return DeriveSeed(master, pair_id, KindFromName(kind), degree_index);
        },
        py::arg("master"), py::arg("pair_id"), py::arg("kind"), py::arg("degree_index"));

  py::class_<RngStream>(m, "Rng")
      .def(py::init<std::uint64_t>(), py::arg("seed"))
      .def("next", &RngStream::Next)
      .def("uniform", py::overload_cast<>(&RngStream::Uniform))
      .def("normal", &RngStream::Normal)
      .def_property_readonly("state", &RngStream::state);

  // Sweeps and correlation.
  m.def("pearson",
        [](const std::vector<double>& x, const std::vector<double>& y) { return Pearson(x, y); });
  m.def("run_sweep",
        [](const std::filesystem::path& manifest, const std::vector<std::string>& metrics,
           const std::map<std::string, std::vector<double>>& distortions, std::uint64_t seed,
           int jobs, const std::string& encoder) {
          SweepOptions opt;
          opt.master_seed = seed;
          opt.jobs = jobs;
          for (const auto& [name, degrees] : distortions) opt.axes.push_back({KindFromName(name), degrees});
          MetricBackends backends;
          backends.sam = MakeEncoder(EncoderSpec::Parse(encoder));
          std::vector<SweepRecord> records;
          {
            py::gil_scoped_release release;
            records = RunSweep(Manifest::Load(manifest).pairs, metrics, opt, backends);
          }
          py::list out;
          for (const auto& r : records) out.append(RecordToDict(r));
          return out;
        },
        py::arg("manifest"), py::arg("metrics"), py::arg("distortions"), py::arg("seed") = 0,
        py::arg("jobs") = 1, py::arg("encoder") = "stub");
  m.def("correlate",
        [](const std::filesystem::path& records_csv, bool pooled) {
          const auto records = ReadRecordsCsvFile(records_csv);
          py::list out;
          for (const auto& c : Correlate(records, pooled)) {
            py::dict d;
            d["metric"] = c.metric;
            d["distortion"] = c.distortion;
            d["status"] = c.status;
            d["r"] = c.r;
            d["abs_r"] = c.abs_r;
            d["n"] = c.n;
            d["excluded"] = c.excluded;
            out.append(d);
          }
          return out;
        },
        py::arg("records_csv"), py::arg("pooled") = false);
}
