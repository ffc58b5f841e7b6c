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

#include <array>
#include <cstdint>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "releval/geometry.hpp"
#include "releval/image.hpp"

namespace releval {

/// Triangle mesh with per-vertex color and per-vertex instance label, in the
/// scene's reference coordinate frame. Instance ID 0 is reserved for invalid.
struct SceneModel {
  std::vector<Eigen::Vector3d> vertices;
  std::vector<Rgb8> colors;
  std::vector<std::uint16_t> labels;
  std::vector<std::array<std::int32_t, 3>> triangles;

  bool empty() const { return triangles.empty(); }

  /// Checks index ranges and attribute array lengths. Returns an empty string
  /// when consistent, otherwise a description of the first problem.
  std::string consistency_error() const;

  /// FNV-1a hash over all vertex, color, label and index data. Used as the
  /// content-addressed cache key component for rendered depth maps.
  std::uint64_t content_hash() const;
};

/// Rigidly transforms every vertex (in place) by the given pose.
void transform_model(SceneModel& model, const Pose& transform);

/// Rigidly transforms only the vertices carrying the given instance label.
void transform_instance(SceneModel& model, std::uint16_t instance,
                        const Pose& transform);

}  // namespace releval
