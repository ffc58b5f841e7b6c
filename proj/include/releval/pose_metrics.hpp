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

#include <limits>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "releval/change_metrics.hpp"
#include "releval/geometry.hpp"
#include "releval/mesh.hpp"
#include "releval/renderer.hpp"

namespace releval {

/// One query frame: ground truth, intrinsics, and the method's prediction
/// (absent when the method produced none or an invalid one).
struct FrameRecord {
  std::string frame_id;
  std::string sequence_id;
  Pose gt_pose;
  Intrinsics intrinsics;
  std::optional<Pose> prediction;
};

enum class DcreStatus { Ok, NoPrediction, NoValidPixels };

/// Dense correspondence reprojection error of one frame.
struct DcreResult {
  /// Mean over valid pixels of min(flow / diagonal, 1); in [0, 1].
  double mean_normalized = 0.0;
  /// Mean flow in native pixels, without the clamp. Pixels landing behind the
  /// predicted camera contribute the configured penalty.
  double mean_pixels_unclamped = 0.0;
  long valid_pixel_count = 0;
  DcreStatus status = DcreStatus::NoPrediction;

  bool scored() const { return status == DcreStatus::Ok; }
};

struct DcreOptions {
  int supersample = 1;
  double near_clip = 0.05;
  /// Flow assigned to pixels that transform behind the predicted camera,
  /// expressed in image diagonals. Values >= 1 saturate the clamped mean.
  double behind_camera_penalty_diagonals = 2.0;
};

/// Absolute pose errors between ground truth and a prediction.
struct AbsErrors {
  double trans_m = 0.0;
  double rot_deg = 0.0;
};

inline AbsErrors abs_errors(const Pose& gt, const Pose& pred) {
  return {translation_error_m(gt, pred),
          angular_error_deg(gt.rotation(), pred.rotation())};
}

/// DCRE against a depth map already rendered from the ground-truth pose.
/// `k_render` is the intrinsics the depth map was rendered with (possibly
/// supersampled); `supersample` converts flow back to native pixel units for
/// mean_pixels_unclamped.
DcreResult dcre_from_depth(const DepthMap& gt_depth, const Intrinsics& k_render,
                           int supersample, const Pose& gt_pose,
                           const Pose& predicted_pose,
                           double behind_camera_penalty_diagonals = 2.0);

/// Renders the model's depth from the frame's ground-truth pose and evaluates
/// the prediction's DCRE against it. The model must be the rescan of the
/// frame's own sequence.
DcreResult dcre_frame(const SceneModel& model, const FrameRecord& frame,
                      const DcreOptions& options = {});

// ---------------------------------------------------------------------------
// Aggregates over frame sets. Denominators always count all frames passed in;
// frames without predictions contribute zero to inlier recalls, are excluded
// from the outlier indicators and are tracked as the N/A fraction instead.
// ---------------------------------------------------------------------------

/// Fraction of frames with trans error < eps_t and rot error < eps_theta.
/// Throws std::invalid_argument on an empty frame list.
double recall_abs(const std::vector<FrameRecord>& frames, double eps_t,
                  double eps_theta);

/// Fraction of predicted frames with trans error >= eps_t or rot error >=
/// eps_theta (denominator: all frames).
double outlier_abs(const std::vector<FrameRecord>& frames, double eps_t,
                   double eps_theta);

/// Fraction of frames without a prediction.
double na_fraction(const std::vector<FrameRecord>& frames);

/// Medians computed independently over predicted frames only; even counts use
/// the lower median. `defined` is false when no frame has a prediction.
struct MedianErrors {
  double trans_m = std::numeric_limits<double>::quiet_NaN();
  double rot_deg = std::numeric_limits<double>::quiet_NaN();
  bool defined = false;
};

MedianErrors median_errors(const std::vector<FrameRecord>& frames);

/// Fraction of frames whose DCRE is scored and < eps_f (denominator: all).
double recall_dcre(const std::vector<DcreResult>& per_frame, double eps_f);

/// Fraction of frames whose DCRE is scored and >= eps_f (denominator: all).
double outlier_dcre(const std::vector<DcreResult>& per_frame, double eps_f);

/// Fraction of frames whose DCRE could not be scored (no prediction or no
/// valid pixels). recall + outlier + na == 1 at every threshold.
double dcre_na_fraction(const std::vector<DcreResult>& per_frame);

// ---------------------------------------------------------------------------
// Per-frame metric rows and report assembly.
// ---------------------------------------------------------------------------

enum class ObjOutcome { NotEvaluated, NotFlagged, Flagged };

/// Everything computed for one frame. Difficulty and change fields stay unset
/// when the corresponding stage was skipped.
struct FrameMetrics {
  std::string frame_id;
  std::string sequence_id;
  bool has_prediction = false;
  double trans_err_m = std::numeric_limits<double>::quiet_NaN();
  double rot_err_deg = std::numeric_limits<double>::quiet_NaN();
  DcreResult dcre;
  std::optional<double> vol_sigma;
  std::optional<double> context_nu_m3;
  std::optional<double> novelty_eta_px;
  int nearest_train_index = -1;
  std::optional<ChangeScores> change;
  ObjOutcome obj = ObjOutcome::NotEvaluated;
};

double recall_abs(const std::vector<FrameMetrics>& frames, double eps_t,
                  double eps_theta);
double outlier_abs(const std::vector<FrameMetrics>& frames, double eps_t,
                   double eps_theta);
double na_fraction(const std::vector<FrameMetrics>& frames);
MedianErrors median_errors(const std::vector<FrameMetrics>& frames);
double recall_dcre(const std::vector<FrameMetrics>& frames, double eps_f);
double outlier_dcre(const std::vector<FrameMetrics>& frames, double eps_f);
double dcre_na_fraction(const std::vector<FrameMetrics>& frames);

enum class CurveMetric { Dcre, Translation, Rotation };

/// Samples the cumulative recall curve(eps) = fraction of all frames with
/// metric < eps over the grid. Grid must be non-empty and strictly
/// increasing; throws std::invalid_argument otherwise. Frames without a
/// scored metric never count, so the right endpoint is bounded by
/// 1 - na_fraction.
std::vector<double> cumulative_curve(const std::vector<FrameMetrics>& frames,
                                     CurveMetric metric,
                                     const std::vector<double>& grid);

/// Per-instance rigid transform from an object's placement in the reference
/// scan to its placement in the rescan.
struct ObjectTransform {
  std::uint16_t instance_id = 0;
  Pose ref_to_rescan;
};

/// Checks whether a failed frame's prediction becomes an inlier (DCRE <
/// eps_f) once corrected by some moved object's transform, i.e. the method
/// localized against the object rather than the scene. The caller decides
/// failure; this re-evaluates DCRE with T_o * prediction for each transform.
/// Returns NotEvaluated when there is no prediction or no transforms.
ObjOutcome object_reloc_check(const SceneModel& rescan_model,
                              const std::vector<ObjectTransform>& object_transforms,
                              const FrameRecord& frame, double eps_f,
                              const DcreOptions& options = {});

/// Same check against a depth map already rendered from the ground-truth pose.
ObjOutcome object_reloc_check_from_depth(
    const DepthMap& gt_depth, const Intrinsics& k_render, int supersample,
    const std::vector<ObjectTransform>& object_transforms, const Pose& gt_pose,
    const Pose& predicted_pose, double eps_f,
    double behind_camera_penalty_diagonals = 2.0);

/// Threshold configuration mirroring the benchmark's report columns:
/// inlier recall pairs, the outlier pair, DCRE thresholds and curve grids.
struct ReportThresholds {
  std::vector<std::pair<double, double>> abs_inlier = {{0.05, 5.0}};
  std::pair<double, double> abs_outlier = {0.5, 25.0};
  std::vector<double> eps_f = {0.05, 0.15, 0.5};
  double dcre_outlier_eps = 0.5;
  /// DCRE failure threshold for the moved-object fraction.
  double obj_eps = 0.5;
  std::vector<double> dcre_grid;
  std::vector<double> trans_grid;
  std::vector<double> rot_grid;

  static std::vector<double> uniform_grid(double lo, double hi, int samples);
  /// Fills any empty grid with its default sampling.
  void fill_default_grids();
};

struct EvaluationReport {
  std::vector<FrameMetrics> frames;      // every frame, unfiltered
  std::vector<std::size_t> evaluated;    // indices the aggregates ran over
  std::string filter_name = "no-filter";
  ReportThresholds thresholds;

  std::vector<double> recall_abs_values;  // parallel to thresholds.abs_inlier
  double outlier_abs_value = 0.0;
  MedianErrors medians;
  std::vector<double> recall_dcre_values;  // parallel to thresholds.eps_f
  double outlier_dcre_value = 0.0;
  double na_frac = 0.0;
  double no_valid_pixel_frac = 0.0;
  double obj_fraction = 0.0;
  int obj_flagged = 0;
  int obj_failures = 0;
  bool obj_evaluated = false;
  std::vector<double> curve_dcre;
  std::vector<double> curve_trans;
  std::vector<double> curve_rot;
};

/// Aggregates the evaluated subset (all frames when `evaluated` is empty and
/// `frames` is not — pass explicit indices to restrict).
EvaluationReport build_report(std::vector<FrameMetrics> frames,
                              std::vector<std::size_t> evaluated,
                              std::string filter_name, ReportThresholds thresholds);

/// Sequentially renders and scores every frame against the model: absolute
/// errors plus DCRE. Convenience for tests and small runs; the pipeline adds
/// change/difficulty scores and threading on top of the same kernels.
std::vector<FrameMetrics> evaluate_frames(const SceneModel& model,
                                          const std::vector<FrameRecord>& frames,
                                          const DcreOptions& options = {});

}  // namespace releval
