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

#include "releval/pipeline.hpp"

#include <algorithm>
#include <atomic>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <iterator>
#include <numeric>
#include <sstream>
#include <thread>

#include <nlohmann/json.hpp>

#include "releval/errors.hpp"
#include "releval/png_io.hpp"

namespace releval {

using json = nlohmann::json;

void parallel_for(int count, int threads, const std::function<void(int)>& body) {
  if (count <= 0) return;
  int workers = std::max(1, std::min(threads, count));

  std::vector<std::exception_ptr> errors(count);
  if (workers == 1) {
    for (int i = 0; i < count; ++i) {
      try {
        body(i);
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  } else {
    std::atomic<int> next{0};
    std::vector<std::thread> pool;
    pool.reserve(workers);
    for (int w = 0; w < workers; ++w) {
      pool.emplace_back([&] {
        for (;;) {
          int i = next.fetch_add(1);
          if (i >= count) return;
          try {
            body(i);
          } catch (...) {
            errors[i] = std::current_exception();
          }
        }
      });
    }
    for (auto& t : pool) t.join();
  }
  for (int i = 0; i < count; ++i) {
    if (errors[i]) std::rethrow_exception(errors[i]);  // lowest index first
  }
}

namespace {

std::optional<DepthCache> make_cache(const std::optional<fs::path>& cache_dir,
                                     bool no_cache) {
  if (no_cache) return std::nullopt;
  if (cache_dir) return DepthCache(*cache_dir);
  if (const char* env = std::getenv("RELEVAL_CACHE_DIR"); env && *env)
    return DepthCache(env);
  return std::nullopt;
}

DepthMap cached_render_depth(const std::optional<DepthCache>& cache,
                             const SceneModel& model, std::uint64_t model_hash,
                             const Pose& pose, const Intrinsics& k_native,
                             int supersample, double near_clip) {
  std::string key;
  if (cache) {
    key = DepthCache::key(model_hash, pose, k_native, supersample);
    if (auto hit = cache->load(key)) return std::move(*hit);
  }
  Intrinsics k_render = supersample > 1 ? k_native.scaled(supersample) : k_native;
  RenderOptions ro;
  ro.near_clip = near_clip;
  DepthMap depth = render_depth(model, pose, k_render, ro);
  if (cache) cache->store(key, depth);
  return depth;
}

struct SequenceSelection {
  const LoadedSequence* sequence;
  std::uint64_t model_hash;
};

std::vector<SequenceSelection> select_sequences(const LoadedScene& scene,
                                                const std::string& split) {
  std::vector<SequenceSelection> out;
  for (const LoadedSequence& seq : scene.rescans) {
    if (seq.entry.split == split)
      out.push_back({&seq, seq.model.content_hash()});
  }
  if (out.empty())
    throw UsageError("manifest has no rescan sequence with split '" + split + "'");
  return out;
}

struct FrameRef {
  int seq;
  int idx;
};

std::vector<FrameRef> flatten_frames(const std::vector<SequenceSelection>& seqs) {
  std::vector<FrameRef> refs;
  for (int s = 0; s < static_cast<int>(seqs.size()); ++s) {
    for (int i = 0; i < static_cast<int>(seqs[s].sequence->trajectory.size()); ++i)
      refs.push_back({s, i});
  }
  return refs;
}

std::vector<std::string> all_frame_ids(const std::vector<SequenceSelection>& seqs) {
  std::vector<std::string> ids;
  for (const auto& s : seqs)
    for (const auto& e : s.sequence->trajectory) ids.push_back(e.frame_id);
  return ids;
}

std::vector<Pose> train_poses_of(const LoadedScene& scene) {
  std::vector<Pose> poses;
  poses.reserve(scene.reference.trajectory.size());
  for (const auto& e : scene.reference.trajectory) poses.push_back(e.pose);
  return poses;
}

json report_summary_json(const std::string& method, const EvaluationReport& r) {
  json j;
  j["method"] = method;
  j["filter"] = r.filter_name;
  j["frame_count_total"] = r.frames.size();
  j["frame_count_evaluated"] = r.evaluated.size();
  for (std::size_t i = 0; i < r.thresholds.abs_inlier.size(); ++i)
    j["recall_abs"].push_back(
        {{"eps_t", r.thresholds.abs_inlier[i].first},
         {"eps_theta", r.thresholds.abs_inlier[i].second},
         {"value", i < r.recall_abs_values.size() ? r.recall_abs_values[i] : 0.0}});
  for (std::size_t i = 0; i < r.thresholds.eps_f.size(); ++i)
    j["recall_dcre"].push_back(
        {{"eps_f", r.thresholds.eps_f[i]},
         {"value", i < r.recall_dcre_values.size() ? r.recall_dcre_values[i] : 0.0}});
  j["median_trans_m"] = r.medians.defined ? json(r.medians.trans_m) : json(nullptr);
  j["median_rot_deg"] = r.medians.defined ? json(r.medians.rot_deg) : json(nullptr);
  j["na_fraction"] = r.na_frac;
  j["outlier_abs"] = r.outlier_abs_value;
  j["outlier_dcre"] = r.outlier_dcre_value;
  j["obj_fraction"] = r.obj_fraction;
  j["obj_evaluated"] = r.obj_evaluated;
  return j;
}

}  // namespace

std::string summary_line(const std::string& method, const EvaluationReport& r) {
  std::ostringstream os;
  os << method << ": ";
  for (std::size_t i = 0; i < r.recall_abs_values.size(); ++i) {
    const auto& [et, eth] = r.thresholds.abs_inlier[i];
    os << "E_a(" << et << "m," << eth << "deg)=" << r.recall_abs_values[i] << "  ";
  }
  if (r.medians.defined)
    os << "medians=(" << r.medians.trans_m << "m," << r.medians.rot_deg << "deg)  ";
  else
    os << "medians=(n/a)  ";
  for (std::size_t i = 0; i < r.recall_dcre_values.size(); ++i)
    os << "E_f(" << r.thresholds.eps_f[i] << ")=" << r.recall_dcre_values[i] << "  ";
  os << "NA=" << r.na_frac << "  Out_a=" << r.outlier_abs_value
     << "  Out_f=" << r.outlier_dcre_value;
  if (r.obj_evaluated) os << "  Obj=" << r.obj_fraction;
  return os.str();
}

std::vector<MethodEvaluation> run_evaluate(const RunConfig& config) {
  if (config.predictions.empty())
    throw UsageError("no predictions file given (use --predictions)");
  const FilterPreset* preset = find_preset(config.filter_preset);
  if (!preset) throw UsageError("unknown filter preset '" + config.filter_preset + "'");
  if ((preset->sigma.constrained() || preset->nu.constrained() ||
       preset->eta.constrained()) &&
      !config.compute_difficulty)
    throw UsageError("preset '" + preset->name + "' needs difficulty scores");

  LoadedScene scene = load_scene(config.manifest);
  std::vector<SequenceSelection> seqs = select_sequences(scene, config.split);
  std::vector<FrameRef> refs = flatten_frames(seqs);
  std::vector<std::string> frame_ids = all_frame_ids(seqs);
  std::vector<Pose> train_poses = train_poses_of(scene);

  std::vector<PredictionSet> methods;
  for (const fs::path& p : config.predictions)
    methods.push_back(read_predictions(p, frame_ids));

  auto cache = make_cache(config.cache_dir, config.no_cache);

  const int n = static_cast<int>(refs.size());
  const int m = static_cast<int>(methods.size());

  struct Shared {
    std::optional<ChangeScores> change;
    std::optional<double> sigma, nu, eta;
    int nearest = -1;
    bool failed = false;
  };
  std::vector<Shared> shared(n);
  std::vector<std::vector<FrameMetrics>> per_method(m,
                                                    std::vector<FrameMetrics>(n));

  ReportThresholds thresholds = config.thresholds;
  thresholds.fill_default_grids();

  parallel_for(n, config.threads, [&](int i) {
    const LoadedSequence& seq = *seqs[refs[i].seq].sequence;
    const std::uint64_t model_hash = seqs[refs[i].seq].model_hash;
    const TrajectoryEntry& frame = seq.trajectory[refs[i].idx];
    const Intrinsics& k = seq.entry.intrinsics;

    try {
      RenderedViews views_test, views_ref;
      const bool need_views = config.compute_change || config.compute_difficulty;
      if (need_views) {
        RenderOptions ro;
        ro.near_clip = config.dcre.near_clip;
        views_test = render(seq.model, frame.pose, k, ro);
        views_ref = render(scene.reference.model, frame.pose, k, ro);
      }

      Shared& s = shared[i];
      if (config.compute_change)
        s.change = compute_change_scores(views_test, views_ref);
      if (config.compute_difficulty) {
        s.sigma = variance_of_laplacian(views_test.color);
        s.nu = fov_context(views_test.depth, k, frame.pose).volume_m3;
        if (!train_poses.empty()) {
          PoseNoveltyResult nov = pose_novelty_from_depth(
              views_ref.depth, k, 1, frame.pose, train_poses,
              config.dcre.behind_camera_penalty_diagonals);
          s.eta = nov.eta_px;
          s.nearest = nov.nearest_index;
        }
      }

      // The DCRE depth render is shared by all methods; at native resolution
      // it is the depth already rendered for the change measures.
      DepthMap dcre_depth;
      Intrinsics k_render = config.dcre.supersample > 1
                                ? k.scaled(config.dcre.supersample)
                                : k;
      if (config.dcre.supersample == 1 && need_views)
        dcre_depth = std::move(views_test.depth);
      else
        dcre_depth = cached_render_depth(cache, seq.model, model_hash, frame.pose,
                                         k, config.dcre.supersample,
                                         config.dcre.near_clip);

      for (int mi = 0; mi < m; ++mi) {
        FrameMetrics& fm = per_method[mi][i];
        fm.frame_id = frame.frame_id;
        fm.sequence_id = seq.entry.sequence_id;
        std::optional<Pose> pred = methods[mi].lookup(frame.frame_id);
        fm.has_prediction = pred.has_value();
        if (pred) {
          AbsErrors e = abs_errors(frame.pose, *pred);
          fm.trans_err_m = e.trans_m;
          fm.rot_err_deg = e.rot_deg;
          fm.dcre = dcre_from_depth(dcre_depth, k_render, config.dcre.supersample,
                                    frame.pose, *pred,
                                    config.dcre.behind_camera_penalty_diagonals);
          if (fm.dcre.scored() && fm.dcre.mean_normalized >= thresholds.obj_eps &&
              !seq.object_transforms.empty()) {
            fm.obj = object_reloc_check_from_depth(
                dcre_depth, k_render, config.dcre.supersample,
                seq.object_transforms, frame.pose, *pred, thresholds.obj_eps,
                config.dcre.behind_camera_penalty_diagonals);
          }
        }
        fm.vol_sigma = s.sigma;
        fm.context_nu_m3 = s.nu;
        fm.novelty_eta_px = s.eta;
        fm.nearest_train_index = s.nearest;
        fm.change = s.change;
      }
    } catch (...) {
      if (!config.keep_going) throw;
      shared[i].failed = true;
      for (int mi = 0; mi < m; ++mi) {
        per_method[mi][i].frame_id = frame.frame_id;
        per_method[mi][i].sequence_id = seq.entry.sequence_id;
      }
      std::cerr << "warning: frame " << frame.frame_id << " failed; continuing\n";
    }
  });

  std::vector<MethodEvaluation> evaluations;
  std::vector<std::string> names;
  std::vector<std::vector<double>> dcre_curves, trans_curves, rot_curves;
  for (int mi = 0; mi < m; ++mi) {
    std::vector<std::size_t> subset = apply_filter(per_method[mi], *preset);
    EvaluationReport report = build_report(std::move(per_method[mi]), std::move(subset),
                                           preset->name, thresholds);
    const std::string& method = methods[mi].method_name;
    if (!config.out_dir.empty()) write_report(report, config.out_dir / method, method);
    names.push_back(method);
    dcre_curves.push_back(report.curve_dcre);
    trans_curves.push_back(report.curve_trans);
    rot_curves.push_back(report.curve_rot);
    evaluations.push_back({method, std::move(report)});
  }

  if (!config.out_dir.empty()) {
    write_curves_csv(config.out_dir / "curves_dcre.csv", thresholds.dcre_grid, names,
                     dcre_curves);
    write_curves_csv(config.out_dir / "curves_trans.csv", thresholds.trans_grid, names,
                     trans_curves);
    write_curves_csv(config.out_dir / "curves_rot.csv", thresholds.rot_grid, names,
                     rot_curves);
    if (config.write_svg) {
      auto dump = [&](const char* file, const char* title, const char* xlabel,
                      const std::vector<double>& grid,
                      const std::vector<std::vector<double>>& curves) {
        std::ofstream out(config.out_dir / file);
        out << curves_svg(title, xlabel, names, grid, curves);
      };
      dump("curves_dcre.svg", "Cumulative DCRE recall", "DCRE threshold",
           thresholds.dcre_grid, dcre_curves);
      dump("curves_trans.svg", "Cumulative translation recall",
           "translation error [m]", thresholds.trans_grid, trans_curves);
      dump("curves_rot.svg", "Cumulative rotation recall", "rotation error [deg]",
           thresholds.rot_grid, rot_curves);
    }
  }

  if (config.json_stdout) {
    json j = json::array();
    for (const auto& ev : evaluations)
      j.push_back(report_summary_json(ev.method, ev.report));
    std::cout << j.dump(2) << std::endl;
  } else if (!config.quiet) {
    for (const auto& ev : evaluations)
      std::cout << summary_line(ev.method, ev.report) << '\n';
  }
  return evaluations;
}

void run_fuse(const RunConfig& config) {
  if (config.predictions.empty())
    throw UsageError("no predictions file given (use --predictions)");
  if (config.window_sizes.empty()) throw UsageError("no window sizes given");

  LoadedScene scene = load_scene(config.manifest);
  std::vector<SequenceSelection> seqs = select_sequences(scene, config.split);
  std::vector<std::string> frame_ids = all_frame_ids(seqs);
  auto cache = make_cache(config.cache_dir, config.no_cache);

  ReportThresholds thresholds = config.thresholds;
  thresholds.fill_default_grids();

  for (const fs::path& pred_path : config.predictions) {
    PredictionSet preds = read_predictions(pred_path, frame_ids);
    for (int w : config.window_sizes) {
      if (w < 1) throw UsageError("window size must be >= 1");

      // Fuse per sequence, then score all fused last-frame records.
      std::vector<FrameRecord> fused_records;
      std::vector<int> record_seq;
      for (int si = 0; si < static_cast<int>(seqs.size()); ++si) {
        const LoadedSequence& seq = *seqs[si].sequence;
        std::vector<FrameRecord> records = make_frame_records(seq, preds);
        std::vector<SequenceWindow> windows = build_windows(records, w);
        std::vector<FusionOutcome> outcomes(windows.size());
        parallel_for(static_cast<int>(windows.size()), config.threads,
                     [&](int i) { outcomes[i] = fuse_window(windows[i], config.fusion); });
        std::vector<FrameRecord> fused = fused_frame_records(windows, outcomes);
        for (auto& rec : fused) {
          fused_records.push_back(std::move(rec));
          record_seq.push_back(si);
        }
      }

      std::vector<FrameMetrics> metrics(fused_records.size());
      parallel_for(static_cast<int>(fused_records.size()), config.threads, [&](int i) {
        const FrameRecord& rec = fused_records[i];
        const LoadedSequence& seq = *seqs[record_seq[i]].sequence;
        FrameMetrics& fm = metrics[i];
        fm.frame_id = rec.frame_id;
        fm.sequence_id = rec.sequence_id;
        fm.has_prediction = rec.prediction.has_value();
        if (!rec.prediction) return;
        AbsErrors e = abs_errors(rec.gt_pose, *rec.prediction);
        fm.trans_err_m = e.trans_m;
        fm.rot_err_deg = e.rot_deg;
        DepthMap depth = cached_render_depth(
            cache, seq.model, seqs[record_seq[i]].model_hash, rec.gt_pose,
            rec.intrinsics, config.dcre.supersample, config.dcre.near_clip);
        Intrinsics k_render = config.dcre.supersample > 1
                                  ? rec.intrinsics.scaled(config.dcre.supersample)
                                  : rec.intrinsics;
        fm.dcre = dcre_from_depth(depth, k_render, config.dcre.supersample,
                                  rec.gt_pose, *rec.prediction,
                                  config.dcre.behind_camera_penalty_diagonals);
      });

      std::vector<std::size_t> all(metrics.size());
      std::iota(all.begin(), all.end(), std::size_t{0});
      EvaluationReport report =
          build_report(std::move(metrics), std::move(all), "no-filter", thresholds);

      std::string method = preds.method_name + "/fused_w" + std::to_string(w);
      if (!config.out_dir.empty())
        write_report(report, config.out_dir / preds.method_name /
                                 ("fused_w" + std::to_string(w)),
                     method);
      if (!config.quiet) std::cout << summary_line(method, report) << '\n';
    }
  }
}

void run_change(const RunConfig& config) {
  LoadedScene scene = load_scene(config.manifest);
  std::vector<SequenceSelection> seqs = select_sequences(scene, config.split);
  std::vector<FrameRef> refs = flatten_frames(seqs);

  const int n = static_cast<int>(refs.size());
  std::vector<ChangeScores> scores(n);
  parallel_for(n, config.threads, [&](int i) {
    const LoadedSequence& seq = *seqs[refs[i].seq].sequence;
    const TrajectoryEntry& frame = seq.trajectory[refs[i].idx];
    RenderOptions ro;
    ro.near_clip = config.dcre.near_clip;
    RenderedViews test = render(seq.model, frame.pose, seq.entry.intrinsics, ro);
    RenderedViews ref =
        render(scene.reference.model, frame.pose, seq.entry.intrinsics, ro);
    scores[i] = compute_change_scores(test, ref);
  });

  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  fs::path csv = config.out_dir / "change.csv";
  std::ofstream out(csv);
  if (!out) throw DataError(csv.string(), 0, "cannot open for writing");
  out << "frame_id,rho_v,zeta_v,zeta_s,zeta_g_mm,valid_overlap,flags\n";
  for (int i = 0; i < n; ++i) {
    const LoadedSequence& seq = *seqs[refs[i].seq].sequence;
    const ChangeScores& c = scores[i];
    std::string flags;
    if (c.visual_degenerate) flags += "visual-degenerate";
    if (c.empty_overlap) flags += flags.empty() ? "empty-overlap" : ";empty-overlap";
    out << seq.trajectory[refs[i].idx].frame_id << ',' << format_double(c.rho_v)
        << ',' << format_double(c.zeta_v) << ',' << format_double(c.zeta_s) << ','
        << format_double(c.zeta_g_mm) << ',' << format_double(c.valid_overlap)
        << ',' << flags << '\n';
  }

  SceneChangeStats stats = scene_change_stats(scores);
  if (config.json_stdout) {
    json j = {{"frames", stats.frame_count},
              {"mean_rho_v", stats.mean_rho_v},
              {"mean_zeta_v", stats.mean_zeta_v},
              {"mean_zeta_s", stats.mean_zeta_s},
              {"mean_zeta_g_mm", stats.mean_zeta_g_mm},
              {"mean_valid_overlap", stats.mean_valid_overlap}};
    std::cout << j.dump(2) << std::endl;
  } else {
    std::cout << "frames=" << stats.frame_count << "  rho_v=" << stats.mean_rho_v
              << "  zeta_v=" << stats.mean_zeta_v << "  zeta_s=" << stats.mean_zeta_s
              << "  zeta_g=" << stats.mean_zeta_g_mm << "mm"
              << "  overlap=" << stats.mean_valid_overlap << '\n';
  }
}

void run_difficulty(const DifficultyConfig& config) {
  const FilterPreset* preset = nullptr;
  if (config.preset) {
    preset = find_preset(*config.preset);
    if (!preset) throw UsageError("unknown filter preset '" + *config.preset + "'");
  }

  LoadedScene scene = load_scene(config.manifest);
  std::vector<SequenceSelection> seqs = select_sequences(scene, config.split);
  std::vector<FrameRef> refs = flatten_frames(seqs);
  std::vector<Pose> train_poses = train_poses_of(scene);
  if (train_poses.empty())
    throw UsageError("reference trajectory is empty; pose novelty needs training poses");

  const int n = static_cast<int>(refs.size());
  std::vector<DifficultyScores> scores(n);
  parallel_for(n, config.threads, [&](int i) {
    const LoadedSequence& seq = *seqs[refs[i].seq].sequence;
    const TrajectoryEntry& frame = seq.trajectory[refs[i].idx];
    const Intrinsics& k = seq.entry.intrinsics;
    RenderOptions ro;
    ro.near_clip = config.dcre.near_clip;
    RenderedViews test = render(seq.model, frame.pose, k, ro);
    DepthMap ref_depth = render_depth(scene.reference.model, frame.pose, k, ro);

    DifficultyScores& d = scores[i];
    d.vol_sigma = variance_of_laplacian(test.color);
    FovContextResult fov = fov_context(test.depth, k, frame.pose);
    d.context_nu_m3 = fov.volume_m3;
    d.context_degenerate = fov.degenerate;
    PoseNoveltyResult nov = pose_novelty_from_depth(
        ref_depth, k, 1, frame.pose, train_poses,
        config.dcre.behind_camera_penalty_diagonals);
    d.novelty_eta_px = nov.eta_px;
    d.nearest_train_index = nov.nearest_index;
  });

  std::error_code ec;
  fs::create_directories(config.out_dir, ec);
  fs::path csv = config.out_dir / "difficulty.csv";
  std::ofstream out(csv);
  if (!out) throw DataError(csv.string(), 0, "cannot open for writing");
  out << "frame_id,sigma,nu_m3,eta_px,nearest_train_frame";
  if (preset) out << ",pass";
  out << '\n';
  for (int i = 0; i < n; ++i) {
    const LoadedSequence& seq = *seqs[refs[i].seq].sequence;
    const DifficultyScores& d = scores[i];
    std::string nearest = d.nearest_train_index >= 0
                              ? scene.reference.trajectory[d.nearest_train_index].frame_id
                              : std::string();
    out << seq.trajectory[refs[i].idx].frame_id << ',' << format_double(d.vol_sigma)
        << ',' << format_double(d.context_nu_m3) << ','
        << format_double(d.novelty_eta_px) << ',' << nearest;
    if (preset) {
      bool pass = preset->sigma.contains(d.vol_sigma) &&
                  preset->nu.contains(d.context_nu_m3) &&
                  preset->eta.contains(d.novelty_eta_px);
      out << ',' << (pass ? 1 : 0);
    }
    out << '\n';
  }
}

void run_render(const RenderConfig& config) {
  LoadedScene scene = load_scene(config.manifest);
  std::vector<SequenceSelection> seqs = select_sequences(scene, config.split);

  const LoadedSequence* seq = seqs.front().sequence;
  if (!config.sequence_id.empty()) {
    seq = nullptr;
    for (const auto& s : seqs) {
      if (s.sequence->entry.sequence_id == config.sequence_id) seq = s.sequence;
    }
    if (!seq)
      throw UsageError("sequence '" + config.sequence_id + "' not found in split '" +
                       config.split + "'");
  }

  std::error_code ec;
  fs::create_directories(config.out_dir, ec);

  const SceneModel& model =
      config.use_reference_model ? scene.reference.model : seq->model;
  RenderOptions ro;
  ro.supersample = config.supersample;

  bool any = false;
  for (const TrajectoryEntry& frame : seq->trajectory) {
    if (!config.frame_id.empty() && frame.frame_id != config.frame_id) continue;
    any = true;
    RenderedViews views = render(model, frame.pose, seq->entry.intrinsics, ro);
    std::string stem = frame.frame_id;
    for (char& c : stem)
      if (c == '/' || c == '\\') c = '_';
    write_png_rgb8(config.out_dir / (stem + "_color.png"), views.color);
    write_png_gray16(config.out_dir / (stem + "_depth.png"),
                     depth_to_millimeters(views.depth));
    Image<std::uint16_t> labels16(views.labels.width(), views.labels.height());
    for (std::size_t i = 0; i < views.labels.size(); ++i)
      labels16.pixels()[i] = views.labels.pixels()[i];
    write_png_gray16(config.out_dir / (stem + "_labels.png"), labels16);
  }
  if (!any)
    throw UsageError("frame '" + config.frame_id + "' not found in sequence '" +
                     seq->entry.sequence_id + "'");
}

EvaluationReport run_report(const ReportConfig& config) {
  const FilterPreset* preset = find_preset(config.filter_preset);
  if (!preset) throw UsageError("unknown filter preset '" + config.filter_preset + "'");
  if (config.frames_csvs.empty()) throw UsageError("no frames.csv given (use --frames)");

  std::vector<std::vector<FrameMetrics>> per_method;
  std::vector<std::string> names;
  for (std::size_t i = 0; i < config.frames_csvs.size(); ++i) {
    per_method.push_back(read_frames_csv(config.frames_csvs[i]));
    if (i < config.method_names.size() && !config.method_names[i].empty()) {
      names.push_back(config.method_names[i]);
    } else {
      fs::path parent = config.frames_csvs[i].parent_path();
      names.push_back(parent.empty() ? "method" + std::to_string(i)
                                     : parent.filename().string());
    }
  }

  // Curves are only comparable over identical frame sets.
  auto id_set = [](const std::vector<FrameMetrics>& frames) {
    std::vector<std::string> ids;
    for (const auto& f : frames) ids.push_back(f.frame_id);
    std::sort(ids.begin(), ids.end());
    return ids;
  };
  std::vector<std::string> base_ids = id_set(per_method[0]);
  for (std::size_t i = 1; i < per_method.size(); ++i) {
    std::vector<std::string> ids = id_set(per_method[i]);
    if (ids == base_ids) continue;
    std::vector<std::string> diff;
    std::set_symmetric_difference(base_ids.begin(), base_ids.end(), ids.begin(),
                                  ids.end(), std::back_inserter(diff));
    std::string listed;
    for (std::size_t d = 0; d < diff.size() && d < 8; ++d)
      listed += (d ? ", " : "") + diff[d];
    if (diff.size() > 8) listed += ", ...";
    throw UsageError("frame sets differ between '" + names[0] + "' and '" +
                     names[i] + "': " + listed);
  }

  ReportThresholds thresholds = config.thresholds;
  thresholds.fill_default_grids();

  std::vector<EvaluationReport> reports;
  std::vector<std::vector<double>> dcre_curves, trans_curves, rot_curves;
  for (std::size_t i = 0; i < per_method.size(); ++i) {
    std::vector<std::size_t> subset = apply_filter(per_method[i], *preset);
    EvaluationReport report = build_report(std::move(per_method[i]),
                                           std::move(subset), preset->name,
                                           thresholds);
    if (!config.out_dir.empty()) {
      fs::path dir = per_method.size() == 1 ? config.out_dir
                                            : config.out_dir / names[i];
      write_report(report, dir, names[i]);
    }
    dcre_curves.push_back(report.curve_dcre);
    trans_curves.push_back(report.curve_trans);
    rot_curves.push_back(report.curve_rot);
    reports.push_back(std::move(report));
  }

  if (!config.out_dir.empty() && reports.size() > 1) {
    write_curves_csv(config.out_dir / "curves_dcre.csv", thresholds.dcre_grid,
                     names, dcre_curves);
    write_curves_csv(config.out_dir / "curves_trans.csv", thresholds.trans_grid,
                     names, trans_curves);
    write_curves_csv(config.out_dir / "curves_rot.csv", thresholds.rot_grid, names,
                     rot_curves);
    if (config.write_svg) {
      std::ofstream d(config.out_dir / "curves_dcre.svg");
      d << curves_svg("Cumulative DCRE recall", "DCRE threshold", names,
                      thresholds.dcre_grid, dcre_curves);
      std::ofstream t(config.out_dir / "curves_trans.svg");
      t << curves_svg("Cumulative translation recall", "translation error [m]",
                      names, thresholds.trans_grid, trans_curves);
      std::ofstream r(config.out_dir / "curves_rot.svg");
      r << curves_svg("Cumulative rotation recall", "rotation error [deg]", names,
                      thresholds.rot_grid, rot_curves);
    }
  }

  if (config.json_stdout) {
    json j = json::array();
    for (std::size_t i = 0; i < reports.size(); ++i)
      j.push_back(report_summary_json(names[i], reports[i]));
    std::cout << j.dump(2) << std::endl;
  } else if (!config.quiet) {
    for (std::size_t i = 0; i < reports.size(); ++i)
      std::cout << summary_line(names[i], reports[i]) << '\n';
  }
  return std::move(reports.front());
}

// ---------------------------------------------------------------------------
// Curve output
// ---------------------------------------------------------------------------

void write_curves_csv(const fs::path& path, const std::vector<double>& grid,
                      const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& curves) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string(), 0, "cannot open for writing");
  out << "eps";
  for (const std::string& n : names) out << ',' << n;
  out << '\n';
  for (std::size_t i = 0; i < grid.size(); ++i) {
    out << format_double(grid[i]);
    for (const auto& c : curves) out << ',' << format_double(i < c.size() ? c[i] : 0.0);
    out << '\n';
  }
}

std::string curves_svg(const std::string& title, const std::string& x_label,
                       const std::vector<std::string>& series_names,
                       const std::vector<double>& grid,
                       const std::vector<std::vector<double>>& curves) {
  static const char* kPalette[] = {"#1f77b4", "#d62728", "#2ca02c", "#ff7f0e",
                                   "#9467bd", "#8c564b", "#17becf", "#7f7f7f"};
  const int width = 640, height = 420;
  const double left = 60, right = 20, top = 40, bottom = 50;
  const double plot_w = width - left - right;
  const double plot_h = height - top - bottom;
  const double x0 = grid.empty() ? 0.0 : grid.front();
  const double x1 = grid.empty() || grid.back() == x0 ? x0 + 1.0 : grid.back();

  auto px = [&](double x) { return left + (x - x0) / (x1 - x0) * plot_w; };
  auto py = [&](double y) { return top + (1.0 - y) * plot_h; };

  std::ostringstream svg;
  svg << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << width
      << "\" height=\"" << height << "\" viewBox=\"0 0 " << width << ' ' << height
      << "\">\n";
  svg << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  svg << "<text x=\"" << width / 2 << "\" y=\"22\" text-anchor=\"middle\" "
      << "font-family=\"sans-serif\" font-size=\"15\">" << title << "</text>\n";

  // Axes and ticks.
  svg << "<g stroke=\"#444\" stroke-width=\"1\">\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top << "\" x2=\"" << left
      << "\" y2=\"" << top + plot_h << "\"/>\n";
  svg << "<line x1=\"" << left << "\" y1=\"" << top + plot_h << "\" x2=\""
      << left + plot_w << "\" y2=\"" << top + plot_h << "\"/>\n";
  svg << "</g>\n<g font-family=\"sans-serif\" font-size=\"11\" fill=\"#333\">\n";
  for (int t = 0; t <= 5; ++t) {
    double fy = t / 5.0;
    double fx = x0 + (x1 - x0) * t / 5.0;
    svg << "<text x=\"" << left - 8 << "\" y=\"" << py(fy) + 4
        << "\" text-anchor=\"end\">" << fy << "</text>\n";
    svg << "<text x=\"" << px(fx) << "\" y=\"" << top + plot_h + 18
        << "\" text-anchor=\"middle\">" << fx << "</text>\n";
  }
  svg << "<text x=\"" << left + plot_w / 2 << "\" y=\"" << height - 10
      << "\" text-anchor=\"middle\">" << x_label << "</text>\n</g>\n";

  for (std::size_t s = 0; s < curves.size(); ++s) {
    svg << "<polyline fill=\"none\" stroke=\"" << kPalette[s % 8]
        << "\" stroke-width=\"1.8\" points=\"";
    for (std::size_t i = 0; i < grid.size() && i < curves[s].size(); ++i) {
      if (i) svg << ' ';
      svg << px(grid[i]) << ',' << py(curves[s][i]);
    }
    svg << "\"/>\n";
  }

  for (std::size_t s = 0; s < series_names.size(); ++s) {
    double ly = top + 14 + 16 * static_cast<double>(s);
    svg << "<line x1=\"" << left + plot_w - 130 << "\" y1=\"" << ly << "\" x2=\""
        << left + plot_w - 110 << "\" y2=\"" << ly << "\" stroke=\""
        << kPalette[s % 8] << "\" stroke-width=\"2\"/>\n";
    svg << "<text x=\"" << left + plot_w - 104 << "\" y=\"" << ly + 4
        << "\" font-family=\"sans-serif\" font-size=\"11\">" << series_names[s]
        << "</text>\n";
  }
  svg << "</svg>\n";
  return svg.str();
}

}  // namespace releval
