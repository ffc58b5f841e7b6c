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

#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "releval/errors.hpp"
#include "releval/fixture.hpp"
#include "releval/pipeline.hpp"

namespace {

using namespace releval;

std::pair<double, double> parse_pair(const std::string& s, const char* what) {
  auto colon = s.find(':');
  if (colon == std::string::npos)
    throw UsageError(std::string(what) + " must look like '0.05:5' (meters:degrees)");
  try {
    return {std::stod(s.substr(0, colon)), std::stod(s.substr(colon + 1))};
  } catch (const std::exception&) {
    throw UsageError(std::string(what) + ": cannot parse '" + s + "'");
  }
}

void add_threshold_options(CLI::App* cmd, std::vector<std::string>& abs_pairs,
                           std::string& abs_outlier, std::vector<double>& eps_f,
                           double& dcre_outlier, double& obj_eps) {
  cmd->add_option("--abs-thresh", abs_pairs,
                  "absolute inlier thresholds, each 'meters:degrees'");
  cmd->add_option("--abs-outlier", abs_outlier,
                  "absolute outlier threshold 'meters:degrees'");
  cmd->add_option("--eps-f", eps_f, "DCRE recall thresholds");
  cmd->add_option("--dcre-outlier-eps", dcre_outlier, "DCRE outlier threshold");
  cmd->add_option("--obj-eps", obj_eps,
                  "DCRE failure threshold for the moved-object check");
}

ReportThresholds build_thresholds(const std::vector<std::string>& abs_pairs,
                                  const std::string& abs_outlier,
                                  const std::vector<double>& eps_f,
                                  double dcre_outlier, double obj_eps) {
  ReportThresholds t;
  if (!abs_pairs.empty()) {
    t.abs_inlier.clear();
    for (const std::string& s : abs_pairs)
      t.abs_inlier.push_back(parse_pair(s, "--abs-thresh"));
  }
  if (!abs_outlier.empty()) t.abs_outlier = parse_pair(abs_outlier, "--abs-outlier");
  if (!eps_f.empty()) t.eps_f = eps_f;
  t.dcre_outlier_eps = dcre_outlier;
  t.obj_eps = obj_eps;
  for (const auto& [et, eth] : t.abs_inlier) {
    if (et <= 0.0 || eth <= 0.0) throw UsageError("thresholds must be positive");
  }
  for (double e : t.eps_f)
    if (e <= 0.0) throw UsageError("thresholds must be positive");
  return t;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"6DoF re-localization evaluation toolkit for changing indoor scenes"};
  app.require_subcommand(1);

  // Shared option storage.
  RunConfig run;
  std::vector<std::string> abs_pairs;
  std::string abs_outlier;
  std::vector<double> eps_f;
  double dcre_outlier = 0.5, obj_eps = 0.5;
  std::string cache_dir;
  bool no_change = false, no_difficulty = false, no_svg = false;

  auto* evaluate = app.add_subcommand(
      "evaluate", "score prediction files against a scene (renders + DCRE + report)");
  evaluate->add_option("--manifest", run.manifest, "scene manifest JSON")->required();
  evaluate->add_option("--predictions", run.predictions, "prediction file, one per method")
      ->required();
  evaluate->add_option("--out", run.out_dir, "output directory")->required();
  evaluate->add_option("--split", run.split, "sequence split to evaluate");
  evaluate->add_option("--preset", run.filter_preset, "filter preset name");
  evaluate->add_option("--threads", run.threads, "worker threads");
  evaluate->add_option("--supersample", run.dcre.supersample,
                       "DCRE depth supersampling factor");
  evaluate->add_flag("--no-change", no_change, "skip the change measures");
  evaluate->add_flag("--no-difficulty", no_difficulty, "skip the difficulty scores");
  evaluate->add_flag("--keep-going", run.keep_going,
                     "continue past frame-level errors");
  evaluate->add_flag("--json", run.json_stdout, "machine-readable summary on stdout");
  evaluate->add_flag("--no-svg", no_svg, "skip SVG curve plots");
  evaluate->add_option("--cache-dir", cache_dir, "rendered-depth cache directory");
  evaluate->add_flag("--no-cache", run.no_cache, "disable the depth cache");
  add_threshold_options(evaluate, abs_pairs, abs_outlier, eps_f, dcre_outlier, obj_eps);

  auto* fuse = app.add_subcommand(
      "fuse", "sequence fusion: cluster and blend per-frame predictions per window");
  fuse->add_option("--manifest", run.manifest, "scene manifest JSON")->required();
  fuse->add_option("--predictions", run.predictions, "prediction file, one per method")
      ->required();
  fuse->add_option("--out", run.out_dir, "output directory")->required();
  fuse->add_option("--window", run.window_sizes, "window sizes (frames)");
  fuse->add_option("--trans-thresh", run.fusion.trans_thresh_m,
                   "cluster translation threshold [m]");
  fuse->add_option("--rot-thresh", run.fusion.rot_thresh_deg,
                   "cluster rotation threshold [deg]");
  fuse->add_option("--split", run.split, "sequence split to evaluate");
  fuse->add_option("--threads", run.threads, "worker threads");
  fuse->add_option("--supersample", run.dcre.supersample,
                   "DCRE depth supersampling factor");
  fuse->add_option("--cache-dir", cache_dir, "rendered-depth cache directory");
  fuse->add_flag("--no-cache", run.no_cache, "disable the depth cache");
  add_threshold_options(fuse, abs_pairs, abs_outlier, eps_f, dcre_outlier, obj_eps);

  auto* change = app.add_subcommand("change", "per-frame scene-change measures CSV");
  change->add_option("--manifest", run.manifest, "scene manifest JSON")->required();
  change->add_option("--out", run.out_dir, "output directory")->required();
  change->add_option("--split", run.split, "sequence split");
  change->add_option("--threads", run.threads, "worker threads");
  change->add_flag("--json", run.json_stdout, "per-scene averages as JSON");

  DifficultyConfig diff;
  std::string diff_preset;
  auto* difficulty =
      app.add_subcommand("difficulty", "per-frame difficulty scores CSV");
  difficulty->add_option("--manifest", diff.manifest, "scene manifest JSON")->required();
  difficulty->add_option("--out", diff.out_dir, "output directory")->required();
  difficulty->add_option("--split", diff.split, "sequence split");
  difficulty->add_option("--preset", diff_preset,
                         "also report pass/fail for this preset");
  difficulty->add_option("--threads", diff.threads, "worker threads");

  RenderConfig rc;
  auto* render_cmd =
      app.add_subcommand("render", "dump color/depth/label PNGs for frames");
  render_cmd->add_option("--manifest", rc.manifest, "scene manifest JSON")->required();
  render_cmd->add_option("--out", rc.out_dir, "output directory")->required();
  render_cmd->add_option("--sequence", rc.sequence_id, "sequence id (default: first)");
  render_cmd->add_option("--frame", rc.frame_id, "frame id (default: all frames)");
  render_cmd->add_option("--split", rc.split, "sequence split");
  render_cmd->add_flag("--reference", rc.use_reference_model,
                       "render the reference model instead of the rescan");
  render_cmd->add_option("--supersample", rc.supersample, "resolution multiplier");

  ReportConfig rep;
  auto* report_cmd = app.add_subcommand(
      "report",
      "re-aggregate saved frames.csv files under a filter preset, with "
      "combined curves when several methods are given");
  report_cmd->add_option("--frames", rep.frames_csvs,
                         "frames.csv from a previous run (repeat per method)")
      ->required();
  report_cmd->add_option("--out", rep.out_dir, "output directory");
  report_cmd->add_option("--preset", rep.filter_preset, "filter preset name");
  report_cmd->add_option("--method", rep.method_names,
                         "method name per frames.csv (defaults to its directory)");
  report_cmd->add_flag("--json", rep.json_stdout, "machine-readable summary on stdout");
  add_threshold_options(report_cmd, abs_pairs, abs_outlier, eps_f, dcre_outlier,
                        obj_eps);

  FixtureBundleOptions fx;
  std::filesystem::path fx_dir;
  auto* fixture = app.add_subcommand(
      "fixture", "generate a synthetic scene bundle for trying the toolkit");
  fixture->add_option("--out", fx_dir, "output directory")->required();
  fixture->add_option("--test-frames", fx.test_frames, "test frame count");
  fixture->add_option("--train-frames", fx.train_frames, "training frame count");
  fixture->add_option("--corrupt", fx.corrupt_fraction,
                      "fraction of corrupted prediction lines");
  fixture->add_option("--outliers", fx.outlier_fraction,
                      "fraction of gross outlier predictions");
  fixture->add_option("--noise-trans", fx.noise_trans_m, "prediction noise [m]");
  fixture->add_option("--noise-rot", fx.noise_rot_deg, "prediction noise [deg]");
  fixture->add_option("--seed", fx.seed, "noise seed");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  try {
    run.thresholds =
        build_thresholds(abs_pairs, abs_outlier, eps_f, dcre_outlier, obj_eps);
    rep.thresholds = run.thresholds;
    run.compute_change = !no_change;
    run.compute_difficulty = !no_difficulty;
    run.write_svg = !no_svg;
    rep.write_svg = !no_svg;
    if (!cache_dir.empty()) run.cache_dir = cache_dir;
    if (!diff_preset.empty()) diff.preset = diff_preset;
    if (run.threads < 1) throw UsageError("--threads must be >= 1");

    if (evaluate->parsed()) {
      run_evaluate(run);
    } else if (fuse->parsed()) {
      run_fuse(run);
    } else if (change->parsed()) {
      run_change(run);
    } else if (difficulty->parsed()) {
      diff.threads = diff.threads < 1 ? 1 : diff.threads;
      run_difficulty(diff);
    } else if (render_cmd->parsed()) {
      run_render(rc);
    } else if (report_cmd->parsed()) {
      run_report(rep);
    } else if (fixture->parsed()) {
      write_fixture_bundle(fx_dir, fx);
      std::cout << "fixture written to " << fx_dir.string() << '\n';
    }
  } catch (const UsageError& e) {
    std::cerr << "usage error: " << e.what() << '\n';
    return 2;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
