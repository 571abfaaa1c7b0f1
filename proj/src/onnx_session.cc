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
#include "transcore/onnx_session.h"

#include "transcore/error.h"

#ifdef TRANSCORE_HAVE_ONNXRUNTIME
#include <onnxruntime_cxx_api.h>
#endif

namespace transcore {

#ifdef TRANSCORE_HAVE_ONNXRUNTIME

struct OnnxSession::Impl {
  Ort::Env env{ORT_LOGGING_LEVEL_WARNING, "transcore"};
  Ort::SessionOptions options;
  std::unique_ptr<Ort::Session> session;
};

OnnxSession::OnnxSession(const std::filesystem::path& model_path)
    : impl_(std::make_unique<Impl>()) {
  if (!std::filesystem::exists(model_path)) {
    throw Error(ErrorCode::kBackendUnavailable,
                "model file not found: " + model_path.string());
  }
  try {
    impl_->options.SetIntraOpNumThreads(1);
    impl_->session = std::make_unique<Ort::Session>(
        impl_->env, model_path.c_str(), impl_->options);
  } catch (const Ort::Exception& e) {
    throw Error(ErrorCode::kBackendUnavailable,
                "cannot load " + model_path.string() + ": " + e.what());
  }
}

OnnxSession::~OnnxSession() = default;

std::vector<TensorF32> OnnxSession::Run(
    const std::vector<NamedInput>& inputs,
    const std::vector<std::string>& output_names) {
  std::lock_guard<std::mutex> lock(mu_);
  Ort::MemoryInfo memory =
      Ort::MemoryInfo::CreateCpu(OrtArenaAllocator, OrtMemTypeDefault);
  std::vector<Ort::Value> values;
  std::vector<const char*> in_names;
  for (const auto& [name, tensor] : inputs) {
    in_names.push_back(name.c_str());
    // ORT takes a mutable pointer but does not write to inputs.
    auto* data = const_cast<float*>(tensor->data().data());
    values.push_back(Ort::Value::CreateTensor<float>(
        memory, data, tensor->size(), tensor->shape().data(),
        tensor->shape().size()));
  }
  std::vector<const char*> out_names;
  for (const auto& name : output_names) out_names.push_back(name.c_str());

  std::vector<Ort::Value> outputs;
  try {
    outputs = impl_->session->Run(Ort::RunOptions{nullptr}, in_names.data(),
                                  values.data(), values.size(),
                                  out_names.data(), out_names.size());
  } catch (const Ort::Exception& e) {
    throw Error(ErrorCode::kBackendUnavailable,
                std::string("inference failed: ") + e.what());
  }

  std::vector<TensorF32> result;
  for (auto& out : outputs) {
    auto info = out.GetTensorTypeAndShapeInfo();
    if (info.GetElementType() != ONNX_TENSOR_ELEMENT_DATA_TYPE_FLOAT) {
      throw Error(ErrorCode::kShapeMismatch, "model output is not float32");
    }
    std::vector<std::int64_t> shape = info.GetShape();
    if (shape.empty()) shape.push_back(1);
    const float* p = out.GetTensorData<float>();
    result.emplace_back(shape,
                        std::vector<float>(p, p + info.GetElementCount()));
  }
  return result;
}

#else

struct OnnxSession::Impl {};

OnnxSession::OnnxSession(const std::filesystem::path& model_path) {
  throw Error(ErrorCode::kBackendUnavailable,
              "built without ONNX Runtime; cannot load " +
                  model_path.string());
}

OnnxSession::~OnnxSession() = default;

std::vector<TensorF32> OnnxSession::Run(const std::vector<NamedInput>&,
                                        const std::vector<std::string>&) {
  throw Error(ErrorCode::kBackendUnavailable, "built without ONNX Runtime");
}

#endif

}  // namespace transcore
