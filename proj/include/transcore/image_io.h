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
#ifndef TRANSCORE_IMAGE_IO_H_
#define TRANSCORE_IMAGE_IO_H_

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "transcore/image.h"

namespace transcore {

// PNG codec. Decoding accepts 8-bit grayscale and RGB (including palette
// images without transparency and sub-byte grayscale); alpha is dropped.
// Grayscale stays single channel. 16-bit and palette+tRNS streams raise
// kUnsupportedPixelFormat, undecodable streams kMalformedFile.
ImageBuffer DecodePng(std::span<const std::uint8_t> bytes);

// Encodes an image as 8-bit PNG. kUnit buffers are quantized first.
std::vector<std::uint8_t> EncodePng(const ImageBuffer& img);

ImageBuffer ReadPngFile(const std::filesystem::path& path);
void WritePngFile(const std::filesystem::path& path, const ImageBuffer& img);

// NPY v1.0 float32 tensors ('<f4', C order). Reading also accepts the v2.0
// header layout.
TensorF32 DecodeNpy(std::span<const std::uint8_t> bytes);
std::vector<std::uint8_t> EncodeNpy(const TensorF32& tensor);

TensorF32 ReadTensorFile(const std::filesystem::path& path);
void WriteTensorFile(const std::filesystem::path& path,
                     const TensorF32& tensor);

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path);
void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes);

}  // namespace transcore

#endif  // TRANSCORE_IMAGE_IO_H_
