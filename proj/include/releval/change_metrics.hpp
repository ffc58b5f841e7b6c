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

#include <vector>

#include "releval/image.hpp"
#include "releval/renderer.hpp"

namespace releval {

/// Visual appearance change between two single-channel images over a shared
/// validity mask.
///   rho_v:  sum((I - I')^2) / sqrt(sum(I^2) * sum(I'^2)); 0 for identical
///           images, larger means more change.
///   zeta_v: mean-subtracted normalized cross-correlation in [-1, 1]; 1 for
///           identical images, higher means more similar.
/// `degenerate` is set when either image has no energy after mean subtraction
/// (all-constant) or the mask is empty; zeta_v is reported as 0 then, never
/// NaN.
struct VisualChangeResult {
  double rho_v = 0.0;
  double zeta_v = 0.0;
  bool degenerate = false;
};

VisualChangeResult visual_change(const GrayImage& img, const GrayImage& ref,
                                 const Mask& valid);

/// Fraction of pixels, among those with a valid instance ID in both images,
/// whose labels differ. `empty_overlap` is set (and the value is 0) when no
/// pixel is valid in both.
struct SemanticChangeResult {
  double zeta_s = 0.0;
  bool empty_overlap = false;
};

SemanticChangeResult semantic_change(const LabelImage& labels,
                                     const LabelImage& labels_ref);

/// Mean absolute per-pixel depth difference over pixels valid in both maps,
/// reported in millimeters.
struct GeometricChangeResult {
  double zeta_g_mm = 0.0;
  bool empty_overlap = false;
};

GeometricChangeResult geometric_change(const DepthMap& depth,
                                       const DepthMap& depth_ref);

struct ChangeOptions {
  /// When set, the visual measures run over the stacked R, G and B channels
  /// instead of the Rec. 601 grayscale conversion.
  bool per_channel_rgb = false;
};

/// All four change measures for a (rescan, reference) rendering pair from the
/// same pose. Visual measures are computed over pixels valid in both depth
/// renderings, so background never contributes.
struct ChangeScores {
  double rho_v = 0.0;
  double zeta_v = 0.0;
  double zeta_s = 0.0;
  double zeta_g_mm = 0.0;
  double valid_overlap = 0.0;  // |V_both| / (w*h)
  bool visual_degenerate = false;
  bool empty_overlap = false;
};

ChangeScores compute_change_scores(const RenderedViews& test,
                                   const RenderedViews& reference,
                                   const ChangeOptions& options = {});

/// Arithmetic means over frames, per measure skipping frames flagged
/// degenerate (visual) or empty-overlap (all measures).
struct SceneChangeStats {
  double mean_rho_v = 0.0;
  double mean_zeta_v = 0.0;
  double mean_zeta_s = 0.0;
  double mean_zeta_g_mm = 0.0;
  double mean_valid_overlap = 0.0;
  int frame_count = 0;
  int visual_frames = 0;   // frames contributing to the visual means
  int overlap_frames = 0;  // frames contributing to zeta_s / zeta_g
};

SceneChangeStats scene_change_stats(const std::vector<ChangeScores>& frames);

}  // namespace releval
