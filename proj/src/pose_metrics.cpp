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

#include "releval/pose_metrics.hpp"

#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace releval {

DcreResult dcre_from_depth(const DepthMap& gt_depth, const Intrinsics& k_render,
                           int supersample, const Pose& gt_pose,
                           const Pose& predicted_pose,
                           double behind_camera_penalty_diagonals) {
  DcreResult result;
  result.status = DcreStatus::Ok;

  // Transform from the ground-truth camera frame to the predicted camera
  // frame. For bit-equal poses it is the identity and every flow is zero by
  // definition, so the per-pixel arithmetic (which would leave rounding
  // residue) is skipped entirely.
  const bool same_pose =
      (predicted_pose.rotation() - gt_pose.rotation()).squaredNorm() == 0.0 &&
      (predicted_pose.translation() - gt_pose.translation()).squaredNorm() == 0.0;
  if (same_pose) {
    long count = 0;
    for (double d : gt_depth.pixels())
      if (depth_valid(d)) ++count;
    if (count == 0) {
      result.status = DcreStatus::NoValidPixels;
    } else {
      result.valid_pixel_count = count;
    }
    return result;
  }
  const Pose rel = predicted_pose.inverse() * gt_pose;
  const Eigen::Matrix3d& r = rel.rotation();
  const Eigen::Vector3d& t = rel.translation();

  const double diag = k_render.diagonal();
  const double penalty_px = behind_camera_penalty_diagonals * diag;
  const double scale = static_cast<double>(supersample);

  double sum_norm = 0.0;
  double sum_px = 0.0;
  long count = 0;
  for (int y = 0; y < gt_depth.height(); ++y) {
    const double v = y + 0.5;
    for (int x = 0; x < gt_depth.width(); ++x) {
      const double z = gt_depth.at(x, y);
      if (!depth_valid(z)) continue;
      const double u = x + 0.5;
      Eigen::Vector3d p((u - k_render.cx) / k_render.fx * z,
                        (v - k_render.cy) / k_render.fy * z, z);
      Eigen::Vector3d q = r * p + t;
      double flow_px;
      if (q.z() > 0.0) {
        double du = k_render.fx * q.x() / q.z() + k_render.cx - u;
        double dv = k_render.fy * q.y() / q.z() + k_render.cy - v;
        flow_px = std::sqrt(du * du + dv * dv);
      } else {
        flow_px = penalty_px;
      }
      sum_norm += std::min(flow_px / diag, 1.0);
      sum_px += flow_px;
      ++count;
    }
  }

  if (count == 0) {
    result.status = DcreStatus::NoValidPixels;
    return result;
  }
  result.valid_pixel_count = count;
  result.mean_normalized = sum_norm / static_cast<double>(count);
  result.mean_pixels_unclamped = sum_px / static_cast<double>(count) / scale;
  return result;
}

DcreResult dcre_frame(const SceneModel& model, const FrameRecord& frame,
                      const DcreOptions& options) {
  if (!frame.prediction) {
    DcreResult result;
    result.status = DcreStatus::NoPrediction;
    return result;
  }
  Intrinsics k_render = options.supersample > 1
                            ? frame.intrinsics.scaled(options.supersample)
                            : frame.intrinsics;
  RenderOptions ro;
  ro.near_clip = options.near_clip;
  DepthMap depth = render_depth(model, frame.gt_pose, k_render, ro);
  return dcre_from_depth(depth, k_render, options.supersample, frame.gt_pose,
                         *frame.prediction, options.behind_camera_penalty_diagonals);
}

namespace {

// Shared counting kernels over (has_prediction, trans, rot) triples.
struct AbsSample {
  bool predicted;
  double trans;
  double rot;
};

template <typename Frames, typename Getter>
std::vector<AbsSample> abs_samples(const Frames& frames, Getter get) {
  std::vector<AbsSample> s;
  s.reserve(frames.size());
  for (const auto& f : frames) s.push_back(get(f));
  return s;
}

std::vector<AbsSample> samples_of(const std::vector<FrameRecord>& frames) {
  return abs_samples(frames, [](const FrameRecord& f) -> AbsSample {
    if (!f.prediction) return {false, 0.0, 0.0};
    AbsErrors e = abs_errors(f.gt_pose, *f.prediction);
    return {true, e.trans_m, e.rot_deg};
  });
}

std::vector<AbsSample> samples_of(const std::vector<FrameMetrics>& frames) {
  return abs_samples(frames, [](const FrameMetrics& f) -> AbsSample {
    return {f.has_prediction, f.trans_err_m, f.rot_err_deg};
  });
}

double recall_abs_impl(const std::vector<AbsSample>& s, double eps_t, double eps_th) {
  if (s.empty()) throw std::invalid_argument("recall_abs: empty frame list");
  long hits = 0;
  for (const auto& f : s)
    if (f.predicted && f.trans < eps_t && f.rot < eps_th) ++hits;
  return static_cast<double>(hits) / static_cast<double>(s.size());
}

double outlier_abs_impl(const std::vector<AbsSample>& s, double eps_t, double eps_th) {
  if (s.empty()) throw std::invalid_argument("outlier_abs: empty frame list");
  long hits = 0;
  for (const auto& f : s)
    if (f.predicted && (f.trans >= eps_t || f.rot >= eps_th)) ++hits;
  return static_cast<double>(hits) / static_cast<double>(s.size());
}

double na_impl(const std::vector<AbsSample>& s) {
  if (s.empty()) return 0.0;
  long n = 0;
  for (const auto& f : s)
    if (!f.predicted) ++n;
  return static_cast<double>(n) / static_cast<double>(s.size());
}

double lower_median(std::vector<double> v) {
  std::size_t k = (v.size() - 1) / 2;
  std::nth_element(v.begin(), v.begin() + k, v.end());
  return v[k];
}

MedianErrors medians_impl(const std::vector<AbsSample>& s) {
  std::vector<double> trans, rot;
  for (const auto& f : s) {
    if (!f.predicted) continue;
    trans.push_back(f.trans);
    rot.push_back(f.rot);
  }
  MedianErrors m;
  if (trans.empty()) return m;
  m.defined = true;
  m.trans_m = lower_median(std::move(trans));
  m.rot_deg = lower_median(std::move(rot));
  return m;
}

}  // namespace

double recall_abs(const std::vector<FrameRecord>& frames, double eps_t,
                  double eps_theta) {
  return recall_abs_impl(samples_of(frames), eps_t, eps_theta);
}

double outlier_abs(const std::vector<FrameRecord>& frames, double eps_t,
                   double eps_theta) {
  return outlier_abs_impl(samples_of(frames), eps_t, eps_theta);
}

double na_fraction(const std::vector<FrameRecord>& frames) {
  return na_impl(samples_of(frames));
}

MedianErrors median_errors(const std::vector<FrameRecord>& frames) {
  return medians_impl(samples_of(frames));
}

double recall_abs(const std::vector<FrameMetrics>& frames, double eps_t,
                  double eps_theta) {
  return recall_abs_impl(samples_of(frames), eps_t, eps_theta);
}

double outlier_abs(const std::vector<FrameMetrics>& frames, double eps_t,
                   double eps_theta) {
  return outlier_abs_impl(samples_of(frames), eps_t, eps_theta);
}

double na_fraction(const std::vector<FrameMetrics>& frames) {
  return na_impl(samples_of(frames));
}

MedianErrors median_errors(const std::vector<FrameMetrics>& frames) {
  return medians_impl(samples_of(frames));
}

double recall_dcre(const std::vector<DcreResult>& per_frame, double eps_f) {
  if (per_frame.empty()) throw std::invalid_argument("recall_dcre: empty frame list");
  long hits = 0;
  for (const auto& d : per_frame)
    if (d.scored() && d.mean_normalized < eps_f) ++hits;
  return static_cast<double>(hits) / static_cast<double>(per_frame.size());
}

double outlier_dcre(const std::vector<DcreResult>& per_frame, double eps_f) {
  if (per_frame.empty()) throw std::invalid_argument("outlier_dcre: empty frame list");
  long hits = 0;
  for (const auto& d : per_frame)
    if (d.scored() && d.mean_normalized >= eps_f) ++hits;
  return static_cast<double>(hits) / static_cast<double>(per_frame.size());
}

double dcre_na_fraction(const std::vector<DcreResult>& per_frame) {
  if (per_frame.empty()) return 0.0;
  long n = 0;
  for (const auto& d : per_frame)
    if (!d.scored()) ++n;
  return static_cast<double>(n) / static_cast<double>(per_frame.size());
}

namespace {

std::vector<DcreResult> dcre_of(const std::vector<FrameMetrics>& frames) {
  std::vector<DcreResult> d;
  d.reserve(frames.size());
  for (const auto& f : frames) d.push_back(f.dcre);
  return d;
}

}  // namespace

double recall_dcre(const std::vector<FrameMetrics>& frames, double eps_f) {
  return recall_dcre(dcre_of(frames), eps_f);
}

double outlier_dcre(const std::vector<FrameMetrics>& frames, double eps_f) {
  return outlier_dcre(dcre_of(frames), eps_f);
}

double dcre_na_fraction(const std::vector<FrameMetrics>& frames) {
  return dcre_na_fraction(dcre_of(frames));
}

std::vector<double> cumulative_curve(const std::vector<FrameMetrics>& frames,
                                     CurveMetric metric,
                                     const std::vector<double>& grid) {
  if (grid.empty()) throw std::invalid_argument("cumulative_curve: empty grid");
  for (std::size_t i = 1; i < grid.size(); ++i) {
    if (!(grid[i] > grid[i - 1]))
      throw std::invalid_argument("cumulative_curve: grid must be strictly increasing");
  }

  std::vector<double> values;
  values.reserve(frames.size());
  for (const auto& f : frames) {
    switch (metric) {
      case CurveMetric::Dcre:
        if (f.dcre.scored()) values.push_back(f.dcre.mean_normalized);
        break;
      case CurveMetric::Translation:
        if (f.has_prediction) values.push_back(f.trans_err_m);
        break;
      case CurveMetric::Rotation:
        if (f.has_prediction) values.push_back(f.rot_err_deg);
        break;
    }
  }
  std::sort(values.begin(), values.end());

  std::vector<double> curve(grid.size());
  const double denom = frames.empty() ? 1.0 : static_cast<double>(frames.size());
  for (std::size_t i = 0; i < grid.size(); ++i) {
    auto it = std::lower_bound(values.begin(), values.end(), grid[i]);
    curve[i] = static_cast<double>(it - values.begin()) / denom;
  }
  return curve;
}

ObjOutcome object_reloc_check_from_depth(
    const DepthMap& gt_depth, const Intrinsics& k_render, int supersample,
    const std::vector<ObjectTransform>& object_transforms, const Pose& gt_pose,
    const Pose& predicted_pose, double eps_f,
    double behind_camera_penalty_diagonals) {
  if (object_transforms.empty()) return ObjOutcome::NotEvaluated;
  for (const ObjectTransform& obj : object_transforms) {
    Pose corrected = obj.ref_to_rescan * predicted_pose;
    DcreResult d = dcre_from_depth(gt_depth, k_render, supersample, gt_pose,
                                   corrected, behind_camera_penalty_diagonals);
    if (d.scored() && d.mean_normalized < eps_f) return ObjOutcome::Flagged;
  }
  return ObjOutcome::NotFlagged;
}

ObjOutcome object_reloc_check(const SceneModel& rescan_model,
                              const std::vector<ObjectTransform>& object_transforms,
                              const FrameRecord& frame, double eps_f,
                              const DcreOptions& options) {
  if (!frame.prediction || object_transforms.empty()) return ObjOutcome::NotEvaluated;

  Intrinsics k_render = options.supersample > 1
                            ? frame.intrinsics.scaled(options.supersample)
                            : frame.intrinsics;
  RenderOptions ro;
  ro.near_clip = options.near_clip;
  DepthMap depth = render_depth(rescan_model, frame.gt_pose, k_render, ro);
  return object_reloc_check_from_depth(
      depth, k_render, options.supersample, object_transforms, frame.gt_pose,
      *frame.prediction, eps_f, options.behind_camera_penalty_diagonals);
}

std::vector<double> ReportThresholds::uniform_grid(double lo, double hi, int samples) {
  std::vector<double> g(samples);
  for (int i = 0; i < samples; ++i)
    g[i] = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(samples - 1);
  return g;
}

void ReportThresholds::fill_default_grids() {
  if (dcre_grid.empty()) dcre_grid = uniform_grid(0.0, 1.0, 200);
  if (trans_grid.empty()) trans_grid = uniform_grid(0.0, 1.0, 200);
  if (rot_grid.empty()) rot_grid = uniform_grid(0.0, 60.0, 200);
}

EvaluationReport build_report(std::vector<FrameMetrics> frames,
                              std::vector<std::size_t> evaluated,
                              std::string filter_name, ReportThresholds thresholds) {
  thresholds.fill_default_grids();

  EvaluationReport report;
  report.frames = std::move(frames);
  report.evaluated = std::move(evaluated);
  report.filter_name = std::move(filter_name);
  report.thresholds = thresholds;

  std::vector<FrameMetrics> subset;
  subset.reserve(report.evaluated.size());
  for (std::size_t idx : report.evaluated) subset.push_back(report.frames[idx]);

  if (subset.empty()) return report;  // everything stays at its zero state

  for (const auto& [eps_t, eps_th] : thresholds.abs_inlier)
    report.recall_abs_values.push_back(recall_abs(subset, eps_t, eps_th));
  report.outlier_abs_value =
      outlier_abs(subset, thresholds.abs_outlier.first, thresholds.abs_outlier.second);
  report.medians = median_errors(subset);
  for (double eps : thresholds.eps_f)
    report.recall_dcre_values.push_back(recall_dcre(subset, eps));
  report.outlier_dcre_value = outlier_dcre(subset, thresholds.dcre_outlier_eps);
  report.na_frac = na_fraction(subset);

  long nvp = 0;
  for (const auto& f : subset)
    if (f.dcre.status == DcreStatus::NoValidPixels) ++nvp;
  report.no_valid_pixel_frac =
      static_cast<double>(nvp) / static_cast<double>(subset.size());

  long failures = 0, flagged = 0;
  bool any_evaluated = false;
  for (const auto& f : subset) {
    if (!(f.dcre.scored() && f.dcre.mean_normalized >= thresholds.obj_eps)) continue;
    ++failures;
    if (f.obj != ObjOutcome::NotEvaluated) any_evaluated = true;
    if (f.obj == ObjOutcome::Flagged) ++flagged;
  }
  report.obj_failures = static_cast<int>(failures);
  report.obj_flagged = static_cast<int>(flagged);
  report.obj_evaluated = any_evaluated;
  report.obj_fraction =
      failures > 0 ? static_cast<double>(flagged) / static_cast<double>(failures) : 0.0;

  report.curve_dcre = cumulative_curve(subset, CurveMetric::Dcre, thresholds.dcre_grid);
  report.curve_trans =
      cumulative_curve(subset, CurveMetric::Translation, thresholds.trans_grid);
  report.curve_rot = cumulative_curve(subset, CurveMetric::Rotation, thresholds.rot_grid);
  return report;
}

std::vector<FrameMetrics> evaluate_frames(const SceneModel& model,
                                          const std::vector<FrameRecord>& frames,
                                          const DcreOptions& options) {
  std::vector<FrameMetrics> out;
  out.reserve(frames.size());
  for (const FrameRecord& f : frames) {
    FrameMetrics m;
    m.frame_id = f.frame_id;
    m.sequence_id = f.sequence_id;
    m.has_prediction = f.prediction.has_value();
    if (f.prediction) {
      AbsErrors e = abs_errors(f.gt_pose, *f.prediction);
      m.trans_err_m = e.trans_m;
      m.rot_err_deg = e.rot_deg;
    }
    m.dcre = dcre_frame(model, f, options);
    out.push_back(std::move(m));
  }
  return out;
}

}  // namespace releval
