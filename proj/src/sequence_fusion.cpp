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

#include "releval/sequence_fusion.hpp"

#include <algorithm>
#include <limits>
#include <numeric>
#include <stdexcept>

namespace releval {

std::vector<SequenceWindow> build_windows(const std::vector<FrameRecord>& sequence,
                                          int s_delta) {
  if (sequence.empty())
    throw std::invalid_argument("build_windows: empty sequence");
  if (s_delta < 1) throw std::invalid_argument("build_windows: s_delta must be >= 1");

  std::vector<SequenceWindow> windows;
  windows.reserve(sequence.size());
  for (int last = 0; last < static_cast<int>(sequence.size()); ++last) {
    int first = std::max(0, last - s_delta + 1);
    SequenceWindow w;
    w.last_frame_index = last;
    w.short_window = (last - first + 1) < s_delta;
    const Pose last_inv = sequence[last].gt_pose.inverse();
    for (int i = first; i <= last; ++i) {
      w.frames.push_back(sequence[i]);
      w.relative_poses.push_back(last_inv * sequence[i].gt_pose);
    }
    windows.push_back(std::move(w));
  }
  return windows;
}

namespace {

double translation_spread(const std::vector<Pose>& candidates,
                          const std::vector<int>& members) {
  Eigen::Vector3d mean = Eigen::Vector3d::Zero();
  for (int m : members) mean += candidates[m].translation();
  mean /= static_cast<double>(members.size());
  double spread = 0.0;
  for (int m : members) spread += (candidates[m].translation() - mean).norm();
  return spread;
}

bool similar(const Pose& a, const Pose& b, const FusionOptions& opt) {
  return translation_error_m(a, b) <= opt.trans_thresh_m &&
         angular_error_deg(a.rotation(), b.rotation()) <= opt.rot_thresh_deg;
}

}  // namespace

FusionOutcome fuse_window(const SequenceWindow& window, const FusionOptions& options) {
  FusionOutcome out;

  // Pose hypotheses for the last frame: prediction composed with the inverse
  // relative pose moves each frame's estimate onto the window anchor.
  std::vector<Pose> candidates;
  for (std::size_t i = 0; i < window.frames.size(); ++i) {
    if (!window.frames[i].prediction) continue;
    candidates.push_back(*window.frames[i].prediction *
                         window.relative_poses[i].inverse());
    out.candidate_frames.push_back(static_cast<int>(i));
  }
  if (candidates.empty()) return out;  // no result; counted as N/A downstream

  const int n = static_cast<int>(candidates.size());
  std::vector<char> assigned(n, 0);
  int remaining = n;
  while (remaining > 0) {
    // Seed on the unassigned candidate with the most unassigned neighbours;
    // lowest candidate index wins seed ties.
    int best_seed = -1, best_count = -1;
    for (int i = 0; i < n; ++i) {
      if (assigned[i]) continue;
      int count = 0;
      for (int j = 0; j < n; ++j) {
        if (!assigned[j] && similar(candidates[i], candidates[j], options)) ++count;
      }
      if (count > best_count) {
        best_count = count;
        best_seed = i;
      }
    }

    PoseCluster cluster;
    for (int j = 0; j < n; ++j) {
      if (!assigned[j] && similar(candidates[best_seed], candidates[j], options)) {
        cluster.members.push_back(j);
        assigned[j] = 1;
        --remaining;
      }
    }
    std::vector<Pose> member_poses;
    std::vector<double> weights(cluster.members.size(), 1.0);
    for (int m : cluster.members) member_poses.push_back(candidates[m]);
    cluster.centroid = dlb_blend(member_poses, weights);
    out.clusters.push_back(std::move(cluster));
  }

  // Largest cluster wins; ties break on lower translation spread, then on the
  // earliest window-frame index among the members.
  int best = 0;
  for (int c = 1; c < static_cast<int>(out.clusters.size()); ++c) {
    const auto& a = out.clusters[c];
    const auto& b = out.clusters[best];
    if (a.members.size() != b.members.size()) {
      if (a.members.size() > b.members.size()) best = c;
      continue;
    }
    double sa = translation_spread(candidates, a.members);
    double sb = translation_spread(candidates, b.members);
    if (sa != sb) {
      if (sa < sb) best = c;
      continue;
    }
    if (out.candidate_frames[a.members.front()] <
        out.candidate_frames[b.members.front()])
      best = c;
  }
  out.winning_cluster = best;
  out.pose = out.clusters[best].centroid;
  return out;
}

std::vector<FrameRecord> fused_frame_records(
    const std::vector<SequenceWindow>& windows,
    const std::vector<FusionOutcome>& outcomes) {
  std::vector<FrameRecord> records;
  records.reserve(windows.size());
  for (std::size_t i = 0; i < windows.size(); ++i) {
    FrameRecord rec = windows[i].frames.back();
    rec.prediction =
        outcomes[i].pose ? std::optional<Pose>(*outcomes[i].pose) : std::nullopt;
    records.push_back(std::move(rec));
  }
  return records;
}

EvaluationReport evaluate_fused(const std::vector<SequenceWindow>& windows,
                                const SceneModel& model,
                                const ReportThresholds& thresholds,
                                const FusionOptions& fusion_options,
                                const DcreOptions& dcre_options) {
  std::vector<FusionOutcome> outcomes;
  outcomes.reserve(windows.size());
  for (const SequenceWindow& w : windows)
    outcomes.push_back(fuse_window(w, fusion_options));

  std::vector<FrameRecord> records = fused_frame_records(windows, outcomes);
  std::vector<FrameMetrics> metrics = evaluate_frames(model, records, dcre_options);

  std::vector<std::size_t> all(metrics.size());
  std::iota(all.begin(), all.end(), std::size_t{0});
  return build_report(std::move(metrics), std::move(all), "no-filter", thresholds);
}

}  // namespace releval
