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
#include <optional>
#include <vector>

#include <Eigen/Core>

namespace releval {

/// Convex hull of a 3D point set, as outward-oriented triangles indexing into
/// the original point array.
struct ConvexHull {
  std::vector<std::array<int, 3>> faces;

  /// Signed volume accumulated over the outward-oriented faces; nonnegative
  /// for a well-formed hull.
  double volume(const std::vector<Eigen::Vector3d>& points) const;
};

/// Quickhull. Returns nullopt when the input is degenerate (fewer than 4
/// points, or all points within epsilon of a common plane/line/point).
std::optional<ConvexHull> convex_hull(const std::vector<Eigen::Vector3d>& points);

/// Convex hull volume in the input's cubed units; 0 for degenerate inputs.
double convex_hull_volume(const std::vector<Eigen::Vector3d>& points);

}  // namespace releval
