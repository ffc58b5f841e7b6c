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

#pragma once

#include <cstdint>
#include <vector>

namespace releval {

struct Rgb8 {
  std::uint8_t r = 0;
  std::uint8_t g = 0;
  std::uint8_t b = 0;

  bool operator==(const Rgb8&) const = default;
};

/// Dense row-major raster. Index (x, y) with x the column.
template <typename T>
class Image {
 public:
  Image() = default;
  Image(int width, int height, T fill = T{})
      : width_(width), height_(height),
        data_(static_cast<size_t>(width) * height, fill) {}

  int width() const { return width_; }
  int height() const { return height_; }
  bool empty() const { return data_.empty(); }
  std::size_t size() const { return data_.size(); }

  T& at(int x, int y) { return data_[static_cast<size_t>(y) * width_ + x]; }
  const T& at(int x, int y) const { return data_[static_cast<size_t>(y) * width_ + x]; }

  T* data() { return data_.data(); }
  const T* data() const { return data_.data(); }

  std::vector<T>& pixels() { return data_; }
  const std::vector<T>& pixels() const { return data_; }

  template <typename U>
  bool same_size(const Image<U>& other) const {
    return width_ == other.width() && height_ == other.height();
  }

  bool operator==(const Image&) const = default;

 private:
  int width_ = 0;
  int height_ = 0;
  std::vector<T> data_;
};

/// Per-pixel camera-space depth in meters; 0 marks an invalid pixel. Depth is
/// kept in double precision in memory so sub-micrometer depth differences
/// survive; on-disk depth exports quantize to 16-bit millimeters.
using DepthMap = Image<double>;
/// 8-bit RGB rendering.
using ColorImage = Image<Rgb8>;
/// Per-pixel instance ID; 0 marks an invalid pixel.
using LabelImage = Image<std::uint16_t>;
/// Double-precision single channel, used for metric computations.
using GrayImage = Image<double>;
/// 0/1 validity mask.
using Mask = Image<std::uint8_t>;

inline bool depth_valid(double d) { return d > 0.0; }

/// Rec. 601 luma of an 8-bit RGB pixel, in [0, 255].
inline double luma(const Rgb8& c) {
  return 0.299 * c.r + 0.587 * c.g + 0.114 * c.b;
}

inline GrayImage to_gray(const ColorImage& img) {
  GrayImage out(img.width(), img.height());
  for (std::size_t i = 0; i < img.size(); ++i) out.pixels()[i] = luma(img.pixels()[i]);
  return out;
}

inline Mask valid_mask(const DepthMap& d) {
  Mask m(d.width(), d.height());
  for (std::size_t i = 0; i < d.size(); ++i)
    m.pixels()[i] = depth_valid(d.pixels()[i]) ? 1 : 0;
  return m;
}

/// Pixels valid in both depth maps. Images must share dimensions.
inline Mask both_valid_mask(const DepthMap& a, const DepthMap& b) {
  Mask m(a.width(), a.height());
  for (std::size_t i = 0; i < a.size(); ++i)
    m.pixels()[i] =
        (depth_valid(a.pixels()[i]) && depth_valid(b.pixels()[i])) ? 1 : 0;
  return m;
}

}  // namespace releval
