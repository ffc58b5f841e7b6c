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

#include "releval/difficulty.hpp"

#include <cmath>
#include <stdexcept>

#include "releval/convex_hull.hpp"
#include "releval/errors.hpp"

namespace releval {

double variance_of_laplacian(const GrayImage& img) {
  if (img.width() < 3 || img.height() < 3)
    throw std::invalid_argument("variance_of_laplacian: image smaller than 3x3");

  // 4-neighbour Laplacian over interior pixels; borders are not padded.
  double sum = 0.0, sum_sq = 0.0;
  long n = 0;
  for (int y = 1; y < img.height() - 1; ++y) {
    for (int x = 1; x < img.width() - 1; ++x) {
      double r = img.at(x, y - 1) + img.at(x - 1, y) + img.at(x + 1, y) +
                 img.at(x, y + 1) - 4.0 * img.at(x, y);
      sum += r;
      sum_sq += r * r;
      ++n;
    }
  }
  double mean = sum / n;
  return sum_sq / n - mean * mean;
}

double variance_of_laplacian(const ColorImage& img) {
  return variance_of_laplacian(to_gray(img));
}

FovContextResult fov_context(const DepthMap& depth, const Intrinsics& k,
                             const Pose& pose, const FovContextOptions& options) {
  FovContextResult out;
  const int stride = std::max(1, options.stride);

  auto sample_coords = [stride](int extent) {
    std::vector<int> coords;
    for (int i = 0; i < extent; i += stride) coords.push_back(i);
    if (extent > 0 && coords.back() != extent - 1) coords.push_back(extent - 1);
    return coords;
  };
  std::vector<int> xs = sample_coords(depth.width());
  std::vector<int> ys = sample_coords(depth.height());

  std::vector<Eigen::Vector3d> points;
  points.reserve(xs.size() * ys.size() + 1);
  for (int y : ys) {
    for (int x : xs) {
      double d = depth.at(x, y);
      if (!depth_valid(d)) continue;
      auto p = backproject({x + 0.5, y + 0.5}, d, k);
      points.push_back(pose * (*p));
    }
  }
  points.push_back(pose.translation());  // camera center closes the frustum

  auto hull = convex_hull(points);
  if (!hull) {
    out.degenerate = true;
    return out;
  }
  out.volume_m3 = hull->volume(points);
  return out;
}

PoseNoveltyResult pose_novelty_from_depth(const DepthMap& query_depth,
                                          const Intrinsics& k_render,
                                          int supersample, const Pose& query_gt,
                                          const std::vector<Pose>& train_poses,
                                          double behind_camera_penalty_diagonals) {
  if (train_poses.empty())
    throw std::invalid_argument("pose_novelty: empty training trajectory");

  PoseNoveltyResult best;
  best.eta_px = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < train_poses.size(); ++i) {
    DcreResult d = dcre_from_depth(query_depth, k_render, supersample, query_gt,
                                   train_poses[i], behind_camera_penalty_diagonals);
    if (!d.scored()) return {0.0, -1};  // view with no geometry: nothing to compare
    if (d.mean_pixels_unclamped < best.eta_px) {
      best.eta_px = d.mean_pixels_unclamped;
      best.nearest_index = static_cast<int>(i);
    }
  }
  return best;
}

PoseNoveltyResult pose_novelty(const Pose& query_gt,
                               const std::vector<Pose>& train_poses,
                               const SceneModel& reference_model,
                               const Intrinsics& k, const DcreOptions& options) {
  Intrinsics k_render =
      options.supersample > 1 ? k.scaled(options.supersample) : k;
  RenderOptions ro;
  ro.near_clip = options.near_clip;
  DepthMap depth = render_depth(reference_model, query_gt, k_render, ro);
  return pose_novelty_from_depth(depth, k_render, options.supersample, query_gt,
                                 train_poses,
                                 options.behind_camera_penalty_diagonals);
}

namespace {

std::vector<FilterPreset> make_presets() {
  auto gt = [](double v) { return Bound{v, false}; };
  auto le = [](double v) { return Bound{v, true}; };
  auto ge = [](double v) { return Bound{v, true}; };

  // Shared bounds of the default setup.
  Range sigma_default{gt(7.2), std::nullopt};
  Range nu_default{ge(0.2), le(8.0)};
  Range eta_default{std::nullopt, le(650.0)};

  std::vector<FilterPreset> presets;
  presets.push_back({"no-filter", {}, {}, {}, {}, {}, {}});
  presets.push_back({"default", {}, {}, {}, sigma_default, nu_default, eta_default});
  presets.push_back(
      {"well-textured", {}, {}, {}, {gt(33.0), std::nullopt}, nu_default, eta_default});
  presets.push_back(
      {"texture-less", {}, {}, {}, {std::nullopt, le(33.0)}, nu_default, eta_default});
  presets.push_back(
      {"high-context", {}, {}, {}, sigma_default, {gt(2.4), std::nullopt}, eta_default});
  presets.push_back(
      {"medium-context", {}, {}, {}, sigma_default, {ge(0.9), le(2.4)}, eta_default});
  presets.push_back(
      {"low-context", {}, {}, {}, sigma_default, {std::nullopt, le(0.9)}, eta_default});
  presets.push_back({"novel-poses", {}, {}, {}, sigma_default, nu_default,
                     {gt(500.0), std::nullopt}});
  presets.push_back({"not-novel-poses", {}, {}, {}, sigma_default, nu_default,
                     {std::nullopt, le(150.0)}});
  presets.push_back({"easy-changes",
                     {gt(0.8), std::nullopt},
                     {std::nullopt, le(0.1)},
                     {std::nullopt, le(30.0)},
                     sigma_default,
                     nu_default,
                     eta_default});
  presets.push_back({"hard-changes",
                     {std::nullopt, le(0.7)},
                     {gt(0.4), std::nullopt},
                     {gt(30.0), std::nullopt},
                     sigma_default,
                     nu_default,
                     eta_default});
  return presets;
}

}  // namespace

const std::vector<FilterPreset>& builtin_presets() {
  static const std::vector<FilterPreset> presets = make_presets();
  return presets;
}

const FilterPreset* find_preset(const std::string& name) {
  for (const FilterPreset& p : builtin_presets()) {
    if (p.name == name) return &p;
  }
  return nullptr;
}

std::vector<std::size_t> apply_filter(const std::vector<FrameMetrics>& frames,
                                      const FilterPreset& preset) {
  std::vector<std::size_t> passing;
  for (std::size_t i = 0; i < frames.size(); ++i) {
    const FrameMetrics& f = frames[i];

    auto require = [&](const std::optional<double>& value,
                       const char* score) -> double {
      if (!value)
        throw UsageError("frame '" + f.frame_id + "' is missing score '" + score +
                         "' required by preset '" + preset.name + "'");
      return *value;
    };

    const bool needs_change = preset.rho_v.constrained() ||
                              preset.zeta_s.constrained() ||
                              preset.zeta_g.constrained();
    if (needs_change && !f.change)
      throw UsageError("frame '" + f.frame_id +
                       "' is missing change scores required by preset '" +
                       preset.name + "'");

    bool pass = true;
    if (preset.sigma.constrained())
      pass &= preset.sigma.contains(require(f.vol_sigma, "sigma"));
    if (preset.nu.constrained())
      pass &= preset.nu.contains(require(f.context_nu_m3, "nu"));
    if (preset.eta.constrained())
      pass &= preset.eta.contains(require(f.novelty_eta_px, "eta"));
    if (preset.rho_v.constrained()) pass &= preset.rho_v.contains(f.change->rho_v);
    if (preset.zeta_s.constrained()) pass &= preset.zeta_s.contains(f.change->zeta_s);
    if (preset.zeta_g.constrained())
      pass &= preset.zeta_g.contains(f.change->zeta_g_mm);
    if (pass) passing.push_back(i);
  }
  return passing;
}

}  // namespace releval
