/* Copyright 2026 The smx Authors. All Rights Reserved.

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

#include "smx/image_io.hpp"

#include <png.h>

#include <algorithm>
#include <cmath>
#include <cstring>

namespace smx::image_io {
namespace {

class PngImage {
 public:
  PngImage() {
    std::memset(&image_, 0, sizeof image_);
    image_.version = PNG_IMAGE_VERSION;
  }
  ~PngImage() { png_image_free(&image_); }
  PngImage(const PngImage&) = delete;
  PngImage& operator=(const PngImage&) = delete;

  png_image* get() { return &image_; }
  png_image* operator->() { return &image_; }

 private:
  png_image image_;
};

}  // namespace

Tensor4<Real> read_png(const std::filesystem::path& path) {
  PngImage png;
  if (png_image_begin_read_from_file(png.get(), path.string().c_str()) == 0) {
    throw ImageIoError("cannot read PNG '" + path.string() + "': " + png->message);
  }
  png->format = PNG_FORMAT_RGB;
  const std::size_t h = png->height;
  const std::size_t w = png->width;
  if (h == 0 || w == 0) throw ImageIoError("PNG '" + path.string() + "' is empty");
  std::vector<std::uint8_t> buffer(PNG_IMAGE_SIZE(*png.get()));
  if (png_image_finish_read(png.get(), nullptr, buffer.data(), 0, nullptr) == 0) {
    throw ImageIoError("cannot decode PNG '" + path.string() + "': " + png->message);
  }
  return dequantize(buffer, h, w);
}

std::vector<std::uint8_t> quantize(const Tensor4<Real>& img) {
  if (img.n() != 1 || img.c() != 3) {
    throw ShapeError("image must have shape (1,3,h,w), got " + img.shape().str());
  }
  const std::size_t plane = img.shape().plane();
  std::vector<std::uint8_t> out(3 * plane);
  for (std::size_t c = 0; c < 3; ++c) {
    const Real* src = img.plane(0, c);
    for (std::size_t p = 0; p < plane; ++p) {
      const double v = std::clamp(static_cast<double>(src[p]), 0.0, 1.0);
      out[3 * p + c] = static_cast<std::uint8_t>(std::round(v * 255.0));
    }
  }
  return out;
}

Tensor4<Real> dequantize(const std::vector<std::uint8_t>& rgb, std::size_t h, std::size_t w) {
  if (rgb.size() != 3 * h * w) throw ShapeError("RGB buffer size does not match image extents");
  Tensor4<Real> img(1, 3, h, w);
  for (std::size_t c = 0; c < 3; ++c) {
    Real* dst = img.plane(0, c);
    for (std::size_t p = 0; p < h * w; ++p) dst[p] = static_cast<Real>(rgb[3 * p + c]) / Real(255);
  }
  return img;
}

void write_png(const std::filesystem::path& path, const Tensor4<Real>& img) {
  const auto bytes = quantize(img);
  PngImage png;
  png->format = PNG_FORMAT_RGB;
  png->width = static_cast<png_uint_32>(img.w());
  png->height = static_cast<png_uint_32>(img.h());
  if (png_image_write_to_file(png.get(), path.string().c_str(), 0, bytes.data(), 0, nullptr) == 0) {
    throw ImageIoError("cannot write PNG '" + path.string() + "': " + png->message);
  }
}

}  // namespace smx::image_io
