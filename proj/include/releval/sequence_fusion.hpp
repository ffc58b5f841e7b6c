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
#include <vector>

#include "releval/pose_metrics.hpp"

namespace releval {

/// A window of consecutive frames with known relative poses, anchored at its
/// last frame: relative_poses[i] maps frame i's camera coordinates to the
/// last frame's camera coordinates, so the last entry is the identity.
struct SequenceWindow {
  std::vector<FrameRecord> frames;
  std::vector<Pose> relative_poses;
  bool short_window = false;  // fewer frames than requested (sequence start)
  int last_frame_index = 0;   // index of the last frame in the source sequence
};

/// Sliding windows of up to `s_delta` consecutive frames, one ending at every
/// frame of the sequence. Relative poses are derived from the ground-truth
/// absolute poses. Throws std::invalid_argument on an empty sequence or
/// s_delta < 1.
std::vector<SequenceWindow> build_windows(const std::vector<FrameRecord>& sequence,
                                          int s_delta);

struct PoseCluster {
  std::vector<int> members;  // candidate indices within the window
  Pose centroid;
};

struct FusionOptions {
  double trans_thresh_m = 0.10;
  double rot_thresh_deg = 10.0;
};

struct FusionOutcome {
  /// Blended pose of the winning cluster; empty when no frame in the window
  /// carried a prediction.
  std::optional<Pose> pose;
  std::vector<PoseCluster> clusters;
  int winning_cluster = -1;
  /// Window-frame index of each clustering candidate, in candidate order.
  std::vector<int> candidate_frames;
};

/// Transfers every per-frame prediction to the window's last frame via the
/// known relative poses, clusters the resulting pose hypotheses greedily
/// (each round seeds on the unassigned candidate with the most unassigned
/// neighbours within the thresholds), and blends the largest cluster with
/// equal weights via dual-quaternion blending. Equal-size clusters tie-break
/// on lower translation spread, then on earliest frame index.
FusionOutcome fuse_window(const SequenceWindow& window,
                          const FusionOptions& options = {});

/// Scores each window's fused pose as the prediction for its last frame.
/// The resulting records can be fed through the standard evaluation path.
std::vector<FrameRecord> fused_frame_records(
    const std::vector<SequenceWindow>& windows,
    const std::vector<FusionOutcome>& outcomes);

/// Full fused-sequence evaluation: fuse every window, score the fused poses
/// against the model, and assemble a report of the same shape as the
/// single-frame evaluation.
EvaluationReport evaluate_fused(const std::vector<SequenceWindow>& windows,
                                const SceneModel& model,
                                const ReportThresholds& thresholds,
                                const FusionOptions& fusion_options = {},
                                const DcreOptions& dcre_options = {});

}  // namespace releval
