// Copyright 2026 The releval Authors.
//
// Licensed under the Apache License, Version 2.0 (the "License");
// you may not use this file except in compliance with the License.
// You may obtain a copy of the License at
//
//      http://www.apache.org/licenses/LICENSE-2.0
//
// Unless required by applicable law or agreed to in writing, software
// distributed under the License is distributed on an "AS IS" BASIS,
// WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
// See the License for the specific language governing permissions and
// limitations under the License.

#include "releval/png_io.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <memory>
#include <vector>

#include <png.h>

#include "releval/errors.hpp"

namespace releval {
namespace {

struct FileCloser {
  void operator()(std::FILE* f) const {
    if (f) std::fclose(f);
  }
};
using FilePtr = std::unique_ptr<std::FILE, FileCloser>;

FilePtr open_file(const std::filesystem::path& path, const char* mode) {
  FilePtr f(std::fopen(path.string().c_str(), mode));
  if (!f) throw DataError(path.string(), 0, "cannot open file");
  return f;
}

void write_png(const std::filesystem::path& path, int width, int height,
               int bit_depth, int color_type, std::vector<png_bytep>& rows) {
  FilePtr file = open_file(path, "wb");
  png_structp png = png_create_write_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr,
                                            nullptr);
  if (!png) throw DataError(path.string(), 0, "png_create_write_struct failed");
  png_infop info = png_create_info_struct(png);
  if (!info) {
    png_destroy_write_struct(&png, nullptr);
    throw DataError(path.string(), 0, "png_create_info_struct failed");
  }
  if (setjmp(png_jmpbuf(png))) {
    png_destroy_write_struct(&png, &info);
    throw DataError(path.string(), 0, "png encoder error");
  }
  png_init_io(png, file.get());
  png_set_IHDR(png, info, width, height, bit_depth, color_type, PNG_INTERLACE_NONE,
               PNG_COMPRESSION_TYPE_DEFAULT, PNG_FILTER_TYPE_DEFAULT);
  png_write_info(png, info);
  if (bit_depth == 16) png_set_swap(png);  // rows are host little-endian
  png_write_image(png, rows.data());
  png_write_end(png, nullptr);
  png_destroy_write_struct(&png, &info);
}

struct PngReader {
  png_structp png = nullptr;
  png_infop info = nullptr;
  ~PngReader() {
    if (png) png_destroy_read_struct(&png, info ? &info : nullptr, nullptr);
  }
};

}  // namespace

void write_png_rgb8(const std::filesystem::path& path, const ColorImage& img) {
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y)
    rows[y] = reinterpret_cast<png_bytep>(
        const_cast<Rgb8*>(img.data() + static_cast<size_t>(y) * img.width()));
  write_png(path, img.width(), img.height(), 8, PNG_COLOR_TYPE_RGB, rows);
}

void write_png_gray16(const std::filesystem::path& path,
                      const Image<std::uint16_t>& img) {
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y)
    rows[y] = reinterpret_cast<png_bytep>(
        const_cast<std::uint16_t*>(img.data() + static_cast<size_t>(y) * img.width()));
  write_png(path, img.width(), img.height(), 16, PNG_COLOR_TYPE_GRAY, rows);
}

ColorImage read_png_rgb8(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  PngReader r;
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!r.png) throw DataError(path.string(), 0, "png_create_read_struct failed");
  r.info = png_create_info_struct(r.png);
  if (!r.info) throw DataError(path.string(), 0, "png_create_info_struct failed");
  if (setjmp(png_jmpbuf(r.png))) throw DataError(path.string(), 0, "png decoder error");

  png_init_io(r.png, file.get());
  png_read_info(r.png, r.info);
  if (png_get_bit_depth(r.png, r.info) != 8 ||
      png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_RGB)
    throw DataError(path.string(), 0, "expected an 8-bit RGB PNG");

  ColorImage img(static_cast<int>(png_get_image_width(r.png, r.info)),
                 static_cast<int>(png_get_image_height(r.png, r.info)));
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y)
    rows[y] = reinterpret_cast<png_bytep>(img.data() +
                                          static_cast<size_t>(y) * img.width());
  png_read_image(r.png, rows.data());
  return img;
}

Image<std::uint16_t> read_png_gray16(const std::filesystem::path& path) {
  FilePtr file = open_file(path, "rb");
  PngReader r;
  r.png = png_create_read_struct(PNG_LIBPNG_VER_STRING, nullptr, nullptr, nullptr);
  if (!r.png) throw DataError(path.string(), 0, "png_create_read_struct failed");
  r.info = png_create_info_struct(r.png);
  if (!r.info) throw DataError(path.string(), 0, "png_create_info_struct failed");
  if (setjmp(png_jmpbuf(r.png))) throw DataError(path.string(), 0, "png decoder error");

  png_init_io(r.png, file.get());
  png_read_info(r.png, r.info);
  if (png_get_bit_depth(r.png, r.info) != 16 ||
      png_get_color_type(r.png, r.info) != PNG_COLOR_TYPE_GRAY)
    throw DataError(path.string(), 0, "expected a 16-bit grayscale PNG");
  png_set_swap(r.png);

  Image<std::uint16_t> img(static_cast<int>(png_get_image_width(r.png, r.info)),
                           static_cast<int>(png_get_image_height(r.png, r.info)));
  std::vector<png_bytep> rows(img.height());
  for (int y = 0; y < img.height(); ++y)
    rows[y] = reinterpret_cast<png_bytep>(img.data() +
                                          static_cast<size_t>(y) * img.width());
  png_read_image(r.png, rows.data());
  return img;
}

Image<std::uint16_t> depth_to_millimeters(const DepthMap& depth) {
  Image<std::uint16_t> mm(depth.width(), depth.height(), 0);
  for (std::size_t i = 0; i < depth.size(); ++i) {
    double d = depth.pixels()[i];
    if (!depth_valid(d)) continue;
    long v = std::lround(d * 1000.0);
    mm.pixels()[i] = static_cast<std::uint16_t>(std::clamp(v, 1l, 65535l));
  }
  return mm;
}

}  // namespace releval
