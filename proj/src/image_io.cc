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
#include "transcore/image_io.h"

#include <png.h>

#include <algorithm>
#include <array>
#include <bit>
#include <csetjmp>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <iterator>
#include <optional>
#include <regex>
#include <string>
#include <utility>

#include "transcore/error.h"

namespace transcore {

namespace {

struct PngReadState {
  const std::uint8_t* data = nullptr;
  std::size_t size = 0;
  std::size_t offset = 0;
  char message[256] = {};
  bool unsupported = false;
  // Decoded result; owned by the caller's frame so a longjmp out of libpng
  // never skips its destructor.
  std::uint32_t height = 0;
  std::uint32_t width = 0;
  int channels = 0;
  std::vector<std::uint8_t> pixels;
  std::vector<png_bytep> rows;
};

void PngReadFromMemory(png_structp png, png_bytep out, png_size_t length) {
  auto* state = static_cast<PngReadState*>(png_get_io_ptr(png));
  if (state->offset + length > state->size) {
    png_error(png, "unexpected end of stream");
  }
  std::memcpy(out, state->data + state->offset, length);
  state->offset += length;
}

[[noreturn]] void PngOnError(png_structp png, png_const_charp msg) {
  auto* state = static_cast<PngReadState*>(png_get_error_ptr(png));
  std::snprintf(state->message, sizeof(state->message), "%s", msg);
  png_longjmp(png, 1);
}

void PngOnWarning(png_structp, png_const_charp) {}

// Plain C-style routine: only trivially destructible locals live between
// setjmp and any libpng call that may longjmp.
bool DecodePngInto(PngReadState* state) {
  png_structp png = png_create_read_struct(PNG_LIBPNG_VER_STRING, state,
                                           PngOnError, PngOnWarning);
  if (png == nullptr) return false;
  png_infop info = png_create_info_struct(png);
  if (info == nullptr) {
    png_destroy_read_struct(&png, nullptr, nullptr);
    return false;
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  png_set_read_fn(png, state, PngReadFromMemory);
  png_read_info(png, info);

  const int bit_depth = png_get_bit_depth(png, info);
  const int color_type = png_get_color_type(png, info);
  if (bit_depth > 8) {
    state->unsupported = true;
    std::snprintf(state->message, sizeof(state->message),
                  "%d-bit samples are not supported", bit_depth);
    png_destroy_read_struct(&png, &info, nullptr);
    return false;
  }
  if (color_type == PNG_COLOR_TYPE_PALETTE) {
    if (png_get_valid(png, info, PNG_INFO_tRNS)) {
      state->unsupported = true;
      std::snprintf(state->message, sizeof(state->message),
                    "palette images with transparency are not supported");
      png_destroy_read_struct(&png, &info, nullptr);
      return false;
    }
    png_set_palette_to_rgb(png);
  }
  if (color_type == PNG_COLOR_TYPE_GRAY && bit_depth < 8) {
    png_set_expand_gray_1_2_4_to_8(png);
  }
  if (color_type & PNG_COLOR_MASK_ALPHA) png_set_strip_alpha(png);
  png_set_interlace_handling(png);
  png_read_update_info(png, info);

  state->width = png_get_image_width(png, info);
  state->height = png_get_image_height(png, info);
  state->channels = png_get_channels(png, info);
  const std::size_t stride = png_get_rowbytes(png, info);
  state->pixels.resize(stride * state->height);
  state->rows.resize(state->height);
  for (std::uint32_t y = 0; y < state->height; ++y) {
    state->rows[y] = state->pixels.data() + y * stride;
  }
  png_read_image(png, state->rows.data());
  png_read_end(png, nullptr);
  png_destroy_read_struct(&png, &info, nullptr);
  return true;
}

constexpr std::array<std::uint8_t, 6> kNpyMagic = {0x93, 'N', 'U',
                                                   'M',  'P', 'Y'};

std::optional<std::string> DictValue(const std::string& header,
                                     const std::string& key) {
  // Matches 'key': <value> up to the next top-level comma or closing brace;
  // the shape tuple is handled by allowing a parenthesized group.
  const std::regex re("['\"]" + key +
                      "['\"]\\s*:\\s*(\\([^)]*\\)|'[^']*'|\"[^\"]*\"|[A-Za-z]+)");
  std::smatch m;
  if (!std::regex_search(header, m, re)) return std::nullopt;
  return m[1].str();
}

}  // namespace

ImageBuffer DecodePng(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 8 || png_sig_cmp(bytes.data(), 0, 8) != 0) {
    throw Error(ErrorCode::kMalformedFile, "not a PNG stream");
  }
  PngReadState state;
  state.data = bytes.data();
  state.size = bytes.size();
  if (!DecodePngInto(&state)) {
    throw Error(state.unsupported ? ErrorCode::kUnsupportedPixelFormat
                                  : ErrorCode::kMalformedFile,
                state.message[0] ? state.message : "libpng failure");
  }
  if (state.channels != 1 && state.channels != 3) {
    throw Error(ErrorCode::kUnsupportedPixelFormat,
                "unexpected channel count " + std::to_string(state.channels));
  }
  const int h = static_cast<int>(state.height);
  const int w = static_cast<int>(state.width);
  std::vector<float> data(state.pixels.begin(),
                          state.pixels.begin() +
                              static_cast<std::ptrdiff_t>(h) * w *
                                  state.channels);
  return ImageBuffer(h, w, state.channels, PixelScale::kU8, std::move(data));
}

std::vector<std::uint8_t> EncodePng(const ImageBuffer& img) {
  const ImageBuffer u8 = ToScale(img, PixelScale::kU8);
  std::vector<std::uint8_t> pixels(u8.size());
  auto in = u8.data();
  for (std::size_t i = 0; i < in.size(); ++i) {
    pixels[i] = static_cast<std::uint8_t>(QuantizeU8(in[i]));
  }
  png_image image;
  std::memset(&image, 0, sizeof(image));
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(u8.width());
  image.height = static_cast<png_uint_32>(u8.height());
  image.format = u8.channels() == 1 ? PNG_FORMAT_GRAY : PNG_FORMAT_RGB;

  png_alloc_size_t size = 0;
  if (!png_image_write_to_memory(&image, nullptr, &size, 0, pixels.data(), 0,
                                 nullptr)) {
    throw Error(ErrorCode::kIoError, std::string("PNG encode failed: ") +
                                         image.message);
  }
  std::vector<std::uint8_t> out(size);
  if (!png_image_write_to_memory(&image, out.data(), &size, 0, pixels.data(),
                                 0, nullptr)) {
    throw Error(ErrorCode::kIoError, std::string("PNG encode failed: ") +
                                         image.message);
  }
  out.resize(size);
  return out;
}

std::vector<std::uint8_t> ReadFileBytes(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  }
  std::vector<std::uint8_t> bytes((std::istreambuf_iterator<char>(in)),
                                  std::istreambuf_iterator<char>());
  if (in.bad()) throw Error(ErrorCode::kIoError, "read failed: " + path.string());
  return bytes;
}

void WriteFileBytes(const std::filesystem::path& path,
                    std::span<const std::uint8_t> bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) {
    throw Error(ErrorCode::kIoError, "cannot open " + path.string() +
                                         " for writing");
  }
  out.write(reinterpret_cast<const char*>(bytes.data()),
            static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed: " + path.string());
}

ImageBuffer ReadPngFile(const std::filesystem::path& path) {
  return DecodePng(ReadFileBytes(path));
}

void WritePngFile(const std::filesystem::path& path, const ImageBuffer& img) {
  WriteFileBytes(path, EncodePng(img));
}

TensorF32 DecodeNpy(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 10 ||
      !std::equal(kNpyMagic.begin(), kNpyMagic.end(), bytes.begin())) {
    throw Error(ErrorCode::kMalformedFile, "missing NPY magic");
  }
  const std::uint8_t major = bytes[6];
  std::size_t header_len = 0;
  std::size_t header_start = 0;
  if (major == 1) {
    header_len = bytes[8] | (static_cast<std::size_t>(bytes[9]) << 8);
    header_start = 10;
  } else if (major == 2 && bytes.size() >= 12) {
    header_len = bytes[8] | (static_cast<std::size_t>(bytes[9]) << 8) |
                 (static_cast<std::size_t>(bytes[10]) << 16) |
                 (static_cast<std::size_t>(bytes[11]) << 24);
    header_start = 12;
  } else {
    throw Error(ErrorCode::kMalformedFile,
                "unsupported NPY version " + std::to_string(major));
  }
  if (header_start + header_len > bytes.size()) {
    throw Error(ErrorCode::kMalformedFile, "truncated NPY header");
  }
  const std::string header(bytes.begin() + header_start,
                           bytes.begin() + header_start + header_len);

  const auto descr = DictValue(header, "descr");
  const auto fortran = DictValue(header, "fortran_order");
  const auto shape_text = DictValue(header, "shape");
  if (!descr || !fortran || !shape_text) {
    throw Error(ErrorCode::kMalformedFile, "incomplete NPY header: " + header);
  }
  const std::string dtype = descr->substr(1, descr->size() - 2);
  if (dtype.size() >= 2 && dtype.substr(1) == "f4") {
    if (dtype[0] == '>') {
      throw Error(ErrorCode::kUnsupportedByteOrder,
                  "big-endian float32 payload");
    }
    if (dtype[0] != '<' && dtype[0] != '=') {
      throw Error(ErrorCode::kUnsupportedDtype, "dtype " + dtype);
    }
  } else {
    throw Error(ErrorCode::kUnsupportedDtype,
                "expected little-endian float32, got " + dtype);
  }
  if (*fortran != "False") {
    throw Error(ErrorCode::kUnsupportedDtype,
                "Fortran-ordered arrays are not supported");
  }

  std::vector<std::int64_t> shape;
  const std::regex dim_re("(-?\\d+)");
  for (std::sregex_iterator it(shape_text->begin(), shape_text->end(), dim_re),
       end;
       it != end; ++it) {
    const long long d = std::stoll((*it)[1].str());
    if (d < 1) {
      throw Error(ErrorCode::kMalformedFile,
                  "non-positive dimension in shape " + *shape_text);
    }
    shape.push_back(d);
  }
  if (shape.empty()) {
    throw Error(ErrorCode::kMalformedFile, "scalar NPY arrays are not tensors");
  }
  const std::size_t count = ShapeProduct(shape);
  const std::size_t payload = bytes.size() - header_start - header_len;
  if (payload != count * sizeof(float)) {
    throw Error(ErrorCode::kMalformedFile,
                "payload of " + std::to_string(payload) +
                    " bytes does not match shape " + *shape_text);
  }
  std::vector<float> data(count);
  static_assert(std::endian::native == std::endian::little,
                "NPY payload is copied without byte swapping");
  std::memcpy(data.data(), bytes.data() + header_start + header_len,
              payload);
  return TensorF32(std::move(shape), std::move(data));
}

std::vector<std::uint8_t> EncodeNpy(const TensorF32& tensor) {
  std::string header = "{'descr': '<f4', 'fortran_order': False, 'shape': (";
  for (std::size_t i = 0; i < tensor.shape().size(); ++i) {
    header += std::to_string(tensor.shape()[i]);
    if (i + 1 < tensor.shape().size() || tensor.shape().size() == 1) {
      header += ",";
    }
    if (i + 1 < tensor.shape().size()) header += " ";
  }
  header += "), }";
  // Pad with spaces so the payload starts on a 64-byte boundary, newline last.
  const std::size_t unpadded = kNpyMagic.size() + 4 + header.size() + 1;
  header.append((64 - unpadded % 64) % 64, ' ');
  header += '\n';
  if (header.size() > 0xFFFF) {
    throw Error(ErrorCode::kInvalidArgument, "NPY header too long for v1.0");
  }

  std::vector<std::uint8_t> out;
  out.reserve(10 + header.size() + tensor.size() * sizeof(float));
  out.insert(out.end(), kNpyMagic.begin(), kNpyMagic.end());
  out.push_back(1);
  out.push_back(0);
  out.push_back(static_cast<std::uint8_t>(header.size() & 0xFF));
  out.push_back(static_cast<std::uint8_t>(header.size() >> 8));
  out.insert(out.end(), header.begin(), header.end());
  const auto* raw = reinterpret_cast<const std::uint8_t*>(tensor.data().data());
  out.insert(out.end(), raw, raw + tensor.size() * sizeof(float));
  return out;
}

TensorF32 ReadTensorFile(const std::filesystem::path& path) {
  return DecodeNpy(ReadFileBytes(path));
}

void WriteTensorFile(const std::filesystem::path& path,
                     const TensorF32& tensor) {
  WriteFileBytes(path, EncodeNpy(tensor));
}

}  // namespace transcore
