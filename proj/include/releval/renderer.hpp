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

#include "releval/geometry.hpp"
#include "releval/image.hpp"
#include "releval/mesh.hpp"

namespace releval {

struct RenderOptions {
  /// Camera-space near plane in meters. Triangles straddling it are clipped
  /// geometrically rather than discarded.
  double near_clip = 0.05;
  /// Integer resolution multiplier applied to the intrinsics before
  /// rasterization. 1 renders at native resolution.
  int supersample = 1;
};

/// Depth, color and label views rendered from one pose. The images share
/// dimensions; color and label validity follows the depth map's valid mask.
struct RenderedViews {
  DepthMap depth;
  ColorImage color;
  LabelImage labels;
  Pose pose;
  Intrinsics intrinsics;  // the (possibly supersampled) intrinsics used
};

/// Z-buffer rasterization of the model as seen from `pose` (camera-to-model)
/// with pinhole intrinsics `k`. Depth is camera-space z under
/// perspective-correct interpolation; color interpolates vertex colors
/// perspective-correctly; each pixel's label is the label of the triangle
/// vertex with the largest barycentric weight at the winning fragment.
/// Triangles are rendered double-sided. Pixels with no geometry get depth 0
/// and label 0. An empty model yields all-invalid images.
RenderedViews render(const SceneModel& model, const Pose& pose, const Intrinsics& k,
                     const RenderOptions& options = {});

/// Depth-only rasterization; identical depth output to render().
DepthMap render_depth(const SceneModel& model, const Pose& pose, const Intrinsics& k,
                      const RenderOptions& options = {});

}  // namespace releval
