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

#include "releval/dataset_io.hpp"
#include "releval/mesh.hpp"

namespace releval {

/// Deterministic synthetic scene: a color-textured room with three labeled
/// boxes (~5k triangles). Walls carry instance labels 1..6, boxes 7..9. The
/// rescan moves one box rigidly; the matching object-transform list is
/// exposed for the moved-object check.
struct RoomFixtureOptions {
  int wall_subdiv = 20;  // 6 * subdiv^2 * 2 wall triangles
  Eigen::Vector3d room_size = Eigen::Vector3d(4.0, 2.5, 5.0);
  std::uint16_t moved_instance = 8;
};

SceneModel make_room_reference(const RoomFixtureOptions& options = {});
SceneModel make_room_rescan(const RoomFixtureOptions& options = {});
Pose room_moved_object_transform();
std::vector<ObjectTransform> room_object_transforms();

/// Camera-to-model pose looking from `eye` toward `target` (z forward,
/// y down in the image).
Pose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
             const Eigen::Vector3d& up = Eigen::Vector3d(0, 1, 0));

/// Deterministic orbit of poses inside the room, looking at the room center.
std::vector<Pose> orbit_trajectory(int count, double radius, double height,
                                   double phase = 0.0,
                                   const RoomFixtureOptions& options = {});

/// Deterministic uniform double in [0, 1) from a counter-based hash; used for
/// all fixture randomness so outputs are identical across platforms.
double hash_unit(std::uint64_t stream, std::uint64_t index);

/// Random but reproducible poses inside the room, each looking at a point on
/// the opposite wall region so plenty of geometry is visible.
std::vector<Pose> random_poses_in_room(int count, std::uint64_t seed,
                                       const RoomFixtureOptions& options = {});

/// Applies a reproducible perturbation of the given magnitudes to a pose.
Pose perturb_pose(const Pose& pose, double trans_m, double rot_deg,
                  std::uint64_t stream, std::uint64_t index);

/// Writes a complete scene bundle: manifest, reference and rescan meshes,
/// train/test trajectories, object transforms and three prediction files
/// (perfect, noisy with gross outliers, and one with a fixed fraction of
/// corrupted lines).
struct FixtureBundleOptions {
  int train_frames = 40;
  int test_frames = 30;
  Intrinsics intrinsics{640, 480, 500.0, 500.0, 320.0, 240.0};
  double noise_trans_m = 0.02;
  double noise_rot_deg = 2.0;
  double outlier_fraction = 0.2;
  double corrupt_fraction = 0.3;
  std::uint64_t seed = 7;
};

void write_fixture_bundle(const std::filesystem::path& dir,
                          const FixtureBundleOptions& options = {});

}  // namespace releval
