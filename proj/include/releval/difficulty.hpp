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

#include <optional>
#include <string>
#include <vector>

#include "releval/image.hpp"
#include "releval/pose_metrics.hpp"

namespace releval {

/// Per-frame difficulty scores: sigma (variance of Laplacian), nu (field of
/// view context volume, cubic meters) and eta (pose novelty, pixels).
struct DifficultyScores {
  double vol_sigma = 0.0;
  double context_nu_m3 = 0.0;
  double novelty_eta_px = 0.0;
  int nearest_train_index = -1;
  bool context_degenerate = false;
};

/// Population variance of the 4-neighbour Laplacian response over the
/// interior pixels of the grayscale image. 0 for a constant image. Throws
/// std::invalid_argument for images smaller than the 3x3 kernel.
double variance_of_laplacian(const GrayImage& img);
double variance_of_laplacian(const ColorImage& img);

struct FovContextOptions {
  /// Valid pixels are sampled every `stride` rows/columns; the last row and
  /// column are always included so the hull keeps the full frustum extent.
  int stride = 8;
};

struct FovContextResult {
  double volume_m3 = 0.0;
  bool degenerate = false;  // fewer than 4 non-coplanar points
};

/// Volume of the convex hull of the back-projected valid depth pixels plus
/// the camera center, in the model frame.
FovContextResult fov_context(const DepthMap& depth, const Intrinsics& k,
                             const Pose& pose,
                             const FovContextOptions& options = {});

struct PoseNoveltyResult {
  double eta_px = 0.0;
  int nearest_index = -1;  // argmin training pose; lowest index wins ties
};

/// Minimum over the training poses of the unclamped mean pixel displacement
/// (DCRE in pixels) obtained when treating each training pose as the
/// prediction for the query's ground-truth pose. Depth is rendered from the
/// reference model at the query pose. Throws std::invalid_argument when the
/// training trajectory is empty.
PoseNoveltyResult pose_novelty(const Pose& query_gt,
                               const std::vector<Pose>& train_poses,
                               const SceneModel& reference_model,
                               const Intrinsics& k, const DcreOptions& options = {});

/// Same, against a depth map already rendered from the query pose.
PoseNoveltyResult pose_novelty_from_depth(const DepthMap& query_depth,
                                          const Intrinsics& k_render,
                                          int supersample, const Pose& query_gt,
                                          const std::vector<Pose>& train_poses,
                                          double behind_camera_penalty_diagonals = 2.0);

/// One-sided bound on a score; `inclusive` selects >=/<= over >/<.
struct Bound {
  double value = 0.0;
  bool inclusive = false;
};

struct Range {
  std::optional<Bound> lower;
  std::optional<Bound> upper;

  bool constrained() const { return lower || upper; }
  bool contains(double x) const {
    if (lower && !(lower->inclusive ? x >= lower->value : x > lower->value))
      return false;
    if (upper && !(upper->inclusive ? x <= upper->value : x < upper->value))
      return false;
    return true;
  }
};

/// A named conjunction of score bounds; a frame passes iff every configured
/// bound holds.
struct FilterPreset {
  std::string name;
  Range rho_v;
  Range zeta_s;
  Range zeta_g;  // millimeters
  Range sigma;
  Range nu;   // cubic meters
  Range eta;  // pixels
};

/// The shipped filter presets: no-filter, default, well-textured,
/// texture-less, high/medium/low-context, novel-poses, not-novel-poses,
/// easy-changes, hard-changes.
const std::vector<FilterPreset>& builtin_presets();

/// Lookup by name; nullptr when unknown.
const FilterPreset* find_preset(const std::string& name);

/// Indices of frames passing every bound of the preset. Throws UsageError
/// naming the first frame that is missing a score the preset requires.
std::vector<std::size_t> apply_filter(const std::vector<FrameMetrics>& frames,
                                      const FilterPreset& preset);

}  // namespace releval
