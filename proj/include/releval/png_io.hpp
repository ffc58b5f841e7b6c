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

#include <filesystem>

#include "releval/image.hpp"

namespace releval {

/// 8-bit RGB PNG. Throws DataError on I/O or encoder failure.
void write_png_rgb8(const std::filesystem::path& path, const ColorImage& img);
ColorImage read_png_rgb8(const std::filesystem::path& path);

/// 16-bit single-channel PNG (used for depth in millimeters and for labels).
void write_png_gray16(const std::filesystem::path& path, const Image<std::uint16_t>& img);
Image<std::uint16_t> read_png_gray16(const std::filesystem::path& path);

/// Depth map quantized to 16-bit millimeters (0 stays the invalid marker;
/// values clamp at 65535 mm).
Image<std::uint16_t> depth_to_millimeters(const DepthMap& depth);

}  // namespace releval
