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
#ifndef TRANSCORE_ONNX_SESSION_H_
#define TRANSCORE_ONNX_SESSION_H_

#include <filesystem>
#include <memory>
#include <mutex>
#include <string>
#include <utility>
#include <vector>

#include "transcore/image.h"

namespace transcore {

// Thin wrapper over an ONNX Runtime inference session with float32 inputs
// and outputs. One inference runs at a time per session; hold several
// sessions for parallel inference. Without ONNX Runtime support compiled
// in, construction throws kBackendUnavailable.
class OnnxSession {
 public:
  explicit OnnxSession(const std::filesystem::path& model_path);
  ~OnnxSession();
  OnnxSession(const OnnxSession&) = delete;
  OnnxSession& operator=(const OnnxSession&) = delete;

  using NamedInput = std::pair<std::string, const TensorF32*>;

  std::vector<TensorF32> Run(const std::vector<NamedInput>& inputs,
                             const std::vector<std::string>& output_names);

 private:
  struct Impl;
  std::unique_ptr<Impl> impl_;
  std::mutex mu_;
};

}  // namespace transcore

#endif  // TRANSCORE_ONNX_SESSION_H_
