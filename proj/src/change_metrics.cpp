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

#include "releval/change_metrics.hpp"

#include <cassert>
#include <cmath>

namespace releval {
namespace {

// Shared kernel: the visual measures over parallel sample arrays.
VisualChangeResult visual_change_samples(const std::vector<double>& a,
                                         const std::vector<double>& b) {
  VisualChangeResult out;
  const std::size_t n = a.size();
  if (n == 0) {
    out.degenerate = true;
    return out;
  }

  double sum_a = 0.0, sum_b = 0.0, sum_aa = 0.0, sum_bb = 0.0, sum_d2 = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    sum_a += a[i];
    sum_b += b[i];
    sum_aa += a[i] * a[i];
    sum_bb += b[i] * b[i];
    double d = a[i] - b[i];
    sum_d2 += d * d;
  }

  double denom = std::sqrt(sum_aa * sum_bb);
  if (denom > 0.0) {
    out.rho_v = sum_d2 / denom;
  } else {
    out.rho_v = 0.0;  // both images all-black: no difference either
    out.degenerate = true;
  }

  double mean_a = sum_a / n;
  double mean_b = sum_b / n;
  double s_ab = 0.0, s_aa = 0.0, s_bb = 0.0;
  for (std::size_t i = 0; i < n; ++i) {
    double da = a[i] - mean_a;
    double db = b[i] - mean_b;
    s_ab += da * db;
    s_aa += da * da;
    s_bb += db * db;
  }
  double zdenom = std::sqrt(s_aa * s_bb);
  if (zdenom > 0.0) {
    out.zeta_v = s_ab / zdenom;
  } else {
    out.zeta_v = 0.0;
    out.degenerate = true;
  }
  return out;
}

}  // namespace

VisualChangeResult visual_change(const GrayImage& img, const GrayImage& ref,
                                 const Mask& valid) {
  assert(img.same_size(ref) && img.same_size(valid));
  std::vector<double> a, b;
  a.reserve(img.size());
  b.reserve(img.size());
  for (std::size_t i = 0; i < img.size(); ++i) {
    if (valid.pixels()[i]) {
      a.push_back(img.pixels()[i]);
      b.push_back(ref.pixels()[i]);
    }
  }
  return visual_change_samples(a, b);
}

SemanticChangeResult semantic_change(const LabelImage& labels,
                                     const LabelImage& labels_ref) {
  assert(labels.same_size(labels_ref));
  SemanticChangeResult out;
  long valid = 0, changed = 0;
  for (std::size_t i = 0; i < labels.size(); ++i) {
    std::uint16_t l = labels.pixels()[i];
    std::uint16_t r = labels_ref.pixels()[i];
    if (l == 0 || r == 0) continue;
    ++valid;
    if (l != r) ++changed;
  }
  if (valid == 0) {
    out.empty_overlap = true;
    return out;
  }
  out.zeta_s = static_cast<double>(changed) / static_cast<double>(valid);
  return out;
}

GeometricChangeResult geometric_change(const DepthMap& depth,
                                       const DepthMap& depth_ref) {
  assert(depth.same_size(depth_ref));
  GeometricChangeResult out;
  long valid = 0;
  double sum = 0.0;
  for (std::size_t i = 0; i < depth.size(); ++i) {
    double d = depth.pixels()[i];
    double r = depth_ref.pixels()[i];
    if (!depth_valid(d) || !depth_valid(r)) continue;
    ++valid;
    sum += std::abs(d - r);
  }
  if (valid == 0) {
    out.empty_overlap = true;
    return out;
  }
  out.zeta_g_mm = sum / static_cast<double>(valid) * 1000.0;
  return out;
}

ChangeScores compute_change_scores(const RenderedViews& test,
                                   const RenderedViews& reference,
                                   const ChangeOptions& options) {
  ChangeScores out;
  Mask valid = both_valid_mask(test.depth, reference.depth);
  long overlap = 0;
  for (auto v : valid.pixels()) overlap += v;
  out.valid_overlap = test.depth.size() > 0
                          ? static_cast<double>(overlap) /
                                static_cast<double>(test.depth.size())
                          : 0.0;

  VisualChangeResult vis;
  if (options.per_channel_rgb) {
    std::vector<double> a, b;
    a.reserve(3 * overlap);
    b.reserve(3 * overlap);
    for (std::size_t i = 0; i < valid.size(); ++i) {
      if (!valid.pixels()[i]) continue;
      const Rgb8& ct = test.color.pixels()[i];
      const Rgb8& cr = reference.color.pixels()[i];
      a.insert(a.end(), {double(ct.r), double(ct.g), double(ct.b)});
      b.insert(b.end(), {double(cr.r), double(cr.g), double(cr.b)});
    }
    vis = visual_change_samples(a, b);
  } else {
    vis = visual_change(to_gray(test.color), to_gray(reference.color), valid);
  }
  out.rho_v = vis.rho_v;
  out.zeta_v = vis.zeta_v;
  out.visual_degenerate = vis.degenerate;

  SemanticChangeResult sem = semantic_change(test.labels, reference.labels);
  out.zeta_s = sem.zeta_s;
  GeometricChangeResult geo = geometric_change(test.depth, reference.depth);
  out.zeta_g_mm = geo.zeta_g_mm;
  out.empty_overlap = sem.empty_overlap || geo.empty_overlap;
  return out;
}

SceneChangeStats scene_change_stats(const std::vector<ChangeScores>& frames) {
  SceneChangeStats stats;
  stats.frame_count = static_cast<int>(frames.size());
  double rho = 0.0, zv = 0.0, zs = 0.0, zg = 0.0, ov = 0.0;
  for (const ChangeScores& f : frames) {
    ov += f.valid_overlap;
    if (!f.visual_degenerate) {
      rho += f.rho_v;
      zv += f.zeta_v;
      ++stats.visual_frames;
    }
    if (!f.empty_overlap) {
      zs += f.zeta_s;
      zg += f.zeta_g_mm;
      ++stats.overlap_frames;
    }
  }
  if (stats.visual_frames > 0) {
    stats.mean_rho_v = rho / stats.visual_frames;
    stats.mean_zeta_v = zv / stats.visual_frames;
  }
  if (stats.overlap_frames > 0) {
    stats.mean_zeta_s = zs / stats.overlap_frames;
    stats.mean_zeta_g_mm = zg / stats.overlap_frames;
  }
  if (stats.frame_count > 0) stats.mean_valid_overlap = ov / stats.frame_count;
  return stats;
}

}  // namespace releval
