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
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "releval/mesh.hpp"
#include "releval/pose_metrics.hpp"

namespace releval {

namespace fs = std::filesystem;

// ---------------------------------------------------------------------------
// Meshes: PLY with per-vertex red/green/blue and a 16-bit objectId property.
// ---------------------------------------------------------------------------

/// Reads an ASCII or binary_little_endian PLY scene model. Requires float
/// x/y/z, 8-bit red/green/blue and an objectId (or label) vertex property;
/// faces must be triangles. Throws DataError naming the file and line.
SceneModel read_ply(const fs::path& path);

/// Writes the model as PLY. Vertices are stored as float32; models built from
/// float32 data round-trip bit-exactly in both formats.
void write_ply(const fs::path& path, const SceneModel& model, bool binary = true);

// ---------------------------------------------------------------------------
// Trajectories: one line per frame with the top 3x4 of the camera-to-model
// matrix in row-major order.
// ---------------------------------------------------------------------------

struct TrajectoryEntry {
  std::string frame_id;
  Pose pose;
};

/// Parses `frame_id r00 r01 r02 tx r10 r11 r12 ty r20 r21 r22 tz` lines.
/// Rotations with det < 0 are rejected as improper; orthonormality violations
/// above 1e-3 are rejected; violations between 1e-9 and 1e-3 are snapped to
/// the nearest rotation; anything tighter is kept bit-exact.
std::vector<TrajectoryEntry> read_trajectory(const fs::path& path);

void write_trajectory(const fs::path& path, const std::vector<TrajectoryEntry>& entries);

// ---------------------------------------------------------------------------
// Predictions: one line per frame, `frame_id qw qx qy qz tx ty tz`
// (camera-to-model). Unparseable or non-finite values count as absent.
// ---------------------------------------------------------------------------

struct PredictionSet {
  std::string method_name;
  std::map<std::string, std::optional<Pose>> poses;  // one entry per known frame
  int invalid_count = 0;   // lines with non-finite values or bad quaternions
  int unknown_skipped = 0; // lines whose frame_id is not in the trajectory

  std::optional<Pose> lookup(const std::string& frame_id) const {
    auto it = poses.find(frame_id);
    return it == poses.end() ? std::nullopt : it->second;
  }
};

/// Loads predictions against the known frame set. Duplicate frame ids raise
/// DataError; unknown ids are skipped and counted; frames without a line get
/// an absent prediction. Quaternions more than 1e-3 from unit norm are
/// treated as invalid predictions.
PredictionSet read_predictions(const fs::path& path,
                               const std::vector<std::string>& known_frame_ids);

void write_predictions(const fs::path& path, const PredictionSet& predictions);

// ---------------------------------------------------------------------------
// Object transforms: `instance_id` + 12 row-major values of the top 3x4 of
// the reference-to-rescan placement transform.
// ---------------------------------------------------------------------------

std::vector<ObjectTransform> read_object_transforms(const fs::path& path);
void write_object_transforms(const fs::path& path,
                             const std::vector<ObjectTransform>& transforms);

// ---------------------------------------------------------------------------
// Scene manifest (JSON).
// ---------------------------------------------------------------------------

struct SequenceEntry {
  std::string sequence_id;
  std::string split;  // train | val | test
  fs::path model;
  fs::path trajectory;
  Intrinsics intrinsics;
  std::optional<fs::path> object_transforms;
};

struct SceneManifest {
  std::string scene_id;
  SequenceEntry reference;
  std::vector<SequenceEntry> rescans;
  fs::path base_dir;  // directory of the manifest; entry paths are resolved
};

/// Parses the manifest and verifies every referenced file exists and every
/// test/val sequence carries intrinsics.
SceneManifest read_manifest(const fs::path& path);

struct LoadedSequence {
  SequenceEntry entry;
  SceneModel model;
  std::vector<TrajectoryEntry> trajectory;
  std::vector<ObjectTransform> object_transforms;  // empty when not provided
};

struct LoadedScene {
  std::string scene_id;
  LoadedSequence reference;
  std::vector<LoadedSequence> rescans;
};

/// Loads the manifest plus all models and trajectories it references.
LoadedScene load_scene(const fs::path& manifest_path);

/// Frame records of one rescan sequence joined with a prediction set.
std::vector<FrameRecord> make_frame_records(const LoadedSequence& sequence,
                                            const PredictionSet& predictions);

// ---------------------------------------------------------------------------
// Report persistence.
// ---------------------------------------------------------------------------

/// Writes summary.json, frames.csv, curve_dcre.csv and curve_abs.csv into the
/// directory (created if needed). All numbers are serialized at full
/// precision so re-aggregation reproduces them exactly.
void write_report(const EvaluationReport& report, const fs::path& out_dir,
                  const std::string& method_name);

/// Reads a frames.csv written by write_report back into metric rows.
std::vector<FrameMetrics> read_frames_csv(const fs::path& path);

/// Full-precision decimal formatting used across all CSV output.
std::string format_double(double v);

// ---------------------------------------------------------------------------
// Rendered-depth cache, content-addressed by model hash, pose, intrinsics and
// supersampling factor. Enabled by the RELEVAL_CACHE_DIR environment variable
// or an explicit directory.
// ---------------------------------------------------------------------------

class DepthCache {
 public:
  explicit DepthCache(fs::path dir);

  static std::string key(std::uint64_t model_hash, const Pose& pose,
                         const Intrinsics& k, int supersample);

  std::optional<DepthMap> load(const std::string& key) const;
  void store(const std::string& key, const DepthMap& depth) const;

 private:
  fs::path dir_;
};

}  // namespace releval
