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

// Independent reference implementations used as test oracles. Everything here
// is deliberately written in the most literal way possible (per-pixel ray
// casting, double loops, exhaustive enumeration) and shares no code with the
// optimized paths it checks.

#include <random>
#include <vector>

#include "releval/geometry.hpp"
#include "releval/image.hpp"
#include "releval/mesh.hpp"

namespace releval::oracle {

struct RayCastViews {
  DepthMap depth;
  LabelImage labels;
};

/// Per-pixel nearest ray-triangle intersection (Moeller-Trumbore,
/// double-sided), entirely independent of the z-buffer rasterizer.
RayCastViews raycast_views(const SceneModel& model, const Pose& pose,
                           const Intrinsics& k, double near_clip = 0.05);

struct NaiveVisual {
  double rho_v = 0.0;
  double zeta_v = 0.0;
  bool degenerate = false;
};

NaiveVisual naive_visual_change(const GrayImage& a, const GrayImage& b,
                                const Mask& valid);
double naive_semantic_change(const LabelImage& a, const LabelImage& b);
double naive_geometric_change_mm(const DepthMap& a, const DepthMap& b);
double naive_variance_of_laplacian(const GrayImage& img);

/// Literal per-pixel DCRE using full 4x4 matrix algebra.
struct NaiveDcre {
  double mean_normalized = 0.0;
  double mean_pixels = 0.0;
  long count = 0;
};
NaiveDcre naive_dcre(const DepthMap& depth, const Intrinsics& k, const Pose& gt,
                     const Pose& pred, double penalty_diagonals = 2.0);

/// Exhaustive convex hull volume: every point triple that has all other
/// points on one side is a facet. O(n^4); fine for n <= ~60.
double brute_force_hull_volume(const std::vector<Eigen::Vector3d>& points);

/// Size of the largest threshold-neighbourhood over all candidates, plus the
/// members of the lowest-index candidate achieving it.
struct BestStar {
  int size = 0;
  int seed = -1;
  std::vector<int> members;
};
BestStar exhaustive_best_star(const std::vector<Pose>& candidates,
                              double trans_thresh_m, double rot_thresh_deg);

Eigen::Matrix3d random_rotation(std::mt19937& rng);
Pose random_pose(std::mt19937& rng, double translation_scale = 1.0);

}  // namespace releval::oracle
