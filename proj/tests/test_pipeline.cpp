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

#include <doctest.h>

#include <atomic>
#include <cstdlib>
#include <fstream>
#include <numeric>
#include <sstream>

#include <nlohmann/json.hpp>

#include "releval/errors.hpp"
#include "releval/fixture.hpp"
#include "releval/pipeline.hpp"
#include "releval/png_io.hpp"

using namespace releval;
using json = nlohmann::json;

namespace {

fs::path temp_dir(const std::string& name) {
  fs::path dir = fs::temp_directory_path() / ("releval_pipe_" + name);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

FixtureBundleOptions small_bundle() {
  FixtureBundleOptions opts;
  opts.train_frames = 6;
  opts.test_frames = 10;
  opts.intrinsics = {64, 48, 50.0, 50.0, 32.0, 24.0};
  return opts;
}

RunConfig quiet_config() {
  RunConfig config;
  config.quiet = true;
  return config;
}

std::string read_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

int run_cli(const std::string& args) {
  const char* bin = std::getenv("RELEVAL_BIN");
  REQUIRE(bin != nullptr);
  std::string cmd = std::string(bin) + " " + args + " >/dev/null 2>&1";
  int status = std::system(cmd.c_str());
  REQUIRE(status != -1);
  return WEXITSTATUS(status);
}

}  // namespace

TEST_CASE("parallel_for covers every index once for any worker count") {
  for (int threads : {1, 3, 16}) {
    std::vector<std::atomic<int>> hits(257);
    for (auto& h : hits) h = 0;
    parallel_for(257, threads, [&](int i) { hits[i]++; });
    for (auto& h : hits) CHECK(h == 1);
  }
  parallel_for(0, 4, [](int) { FAIL("body must not run for count 0"); });
}

TEST_CASE("parallel_for rethrows the lowest-index exception") {
  auto run = [](int threads) {
    try {
      parallel_for(64, threads, [&](int i) {
        if (i == 7 || i == 41) throw std::runtime_error("boom " + std::to_string(i));
      });
      return std::string("none");
    } catch (const std::runtime_error& e) {
      return std::string(e.what());
    }
  };
  CHECK(run(1) == "boom 7");
  CHECK(run(8) == "boom 7");
}

TEST_CASE("evaluate pipeline: perfect predictions score perfectly") {
  fs::path dir = temp_dir("perfect");
  write_fixture_bundle(dir, small_bundle());

  RunConfig config = quiet_config();
  config.manifest = dir / "manifest.json";
  config.predictions = {dir / "predictions_perfect.txt"};
  config.out_dir = dir / "out";
  config.threads = 2;
  config.no_cache = true;
  config.write_svg = false;
  auto evals = run_evaluate(config);
  REQUIRE(evals.size() == 1);
  const EvaluationReport& r = evals[0].report;
  CHECK(r.recall_abs_values[0] == 1.0);
  CHECK(r.recall_dcre_values[0] == 1.0);  // eps_f = 0.05
  CHECK(r.na_frac == 0.0);
  CHECK(r.outlier_abs_value == 0.0);
  CHECK(r.outlier_dcre_value == 0.0);
  REQUIRE(r.medians.defined);
  CHECK(r.medians.trans_m < 1e-6);

  CHECK(fs::exists(dir / "out/predictions_perfect/summary.json"));
  CHECK(fs::exists(dir / "out/predictions_perfect/frames.csv"));
  CHECK(fs::exists(dir / "out/curves_dcre.csv"));

  // Difficulty and change scores are attached to every frame by default.
  for (const FrameMetrics& f : r.frames) {
    CHECK(f.vol_sigma.has_value());
    CHECK(f.context_nu_m3.has_value());
    CHECK(f.novelty_eta_px.has_value());
    CHECK(f.change.has_value());
    CHECK(f.change->zeta_s >= 0.0);
  }
}

TEST_CASE("evaluate pipeline: corrupted predictions land in N/A exactly") {
  fs::path dir = temp_dir("corrupt");
  FixtureBundleOptions opts = small_bundle();
  opts.corrupt_fraction = 0.3;
  write_fixture_bundle(dir, opts);

  RunConfig config = quiet_config();
  config.manifest = dir / "manifest.json";
  config.predictions = {dir / "predictions_corrupt.txt"};
  config.out_dir = dir / "out";
  config.threads = 2;
  config.no_cache = true;
  config.write_svg = false;
  auto evals = run_evaluate(config);
  CHECK(evals[0].report.na_frac == doctest::Approx(0.3).epsilon(1e-12));
}

TEST_CASE("evaluate pipeline: frames.csv identical across thread counts") {
  fs::path dir = temp_dir("threads");
  write_fixture_bundle(dir, small_bundle());

  std::vector<std::string> outputs;
  for (int threads : {1, 4}) {
    RunConfig config = quiet_config();
    config.manifest = dir / "manifest.json";
    config.predictions = {dir / "predictions_noisy.txt"};
    config.out_dir = dir / ("out_t" + std::to_string(threads));
    config.threads = threads;
    config.no_cache = true;
    config.write_svg = false;
    run_evaluate(config);
    outputs.push_back(
        read_file(config.out_dir / "predictions_noisy/frames.csv"));
  }
  REQUIRE(outputs[0].size() > 100);
  CHECK(outputs[0] == outputs[1]);
}

TEST_CASE("report subcommand reproduces evaluate's aggregates exactly") {
  fs::path dir = temp_dir("report_idem");
  write_fixture_bundle(dir, small_bundle());

  RunConfig config = quiet_config();
  config.manifest = dir / "manifest.json";
  config.predictions = {dir / "predictions_noisy.txt"};
  config.out_dir = dir / "out";
  config.threads = 2;
  config.no_cache = true;
  config.write_svg = false;
  auto evals = run_evaluate(config);

  ReportConfig rep;
  rep.frames_csvs = {dir / "out/predictions_noisy/frames.csv"};
  rep.method_names = {"again"};
  rep.out_dir = dir / "out2";
  rep.write_svg = false;
  rep.quiet = true;
  EvaluationReport again = run_report(rep);

  const EvaluationReport& orig = evals[0].report;
  CHECK(again.recall_abs_values == orig.recall_abs_values);
  CHECK(again.recall_dcre_values == orig.recall_dcre_values);
  CHECK(again.na_frac == orig.na_frac);
  CHECK(again.outlier_abs_value == orig.outlier_abs_value);
  CHECK(again.outlier_dcre_value == orig.outlier_dcre_value);
  CHECK(again.medians.trans_m == orig.medians.trans_m);
  CHECK(again.medians.rot_deg == orig.medians.rot_deg);
  CHECK(again.curve_dcre == orig.curve_dcre);
  CHECK(again.curve_trans == orig.curve_trans);
  CHECK(again.curve_rot == orig.curve_rot);

  // Filtering through a preset re-aggregates a subset without re-rendering.
  ReportConfig filtered = rep;
  filtered.out_dir = dir / "out3";
  filtered.filter_preset = "default";
  EvaluationReport sub = run_report(filtered);
  CHECK(sub.evaluated.size() <= sub.frames.size());
}

TEST_CASE("report merges methods into combined curves, rejects mismatches") {
  fs::path dir = temp_dir("report_multi");
  write_fixture_bundle(dir, small_bundle());

  RunConfig config = quiet_config();
  config.manifest = dir / "manifest.json";
  config.predictions = {dir / "predictions_noisy.txt",
                        dir / "predictions_perfect.txt"};
  config.out_dir = dir / "out";
  config.threads = 2;
  config.no_cache = true;
  config.write_svg = false;
  run_evaluate(config);

  ReportConfig rep;
  rep.frames_csvs = {dir / "out/predictions_noisy/frames.csv",
                     dir / "out/predictions_perfect/frames.csv"};
  rep.out_dir = dir / "merged";
  rep.quiet = true;
  run_report(rep);
  CHECK(fs::exists(dir / "merged/predictions_noisy/summary.json"));
  CHECK(fs::exists(dir / "merged/predictions_perfect/summary.json"));
  CHECK(fs::exists(dir / "merged/curves_dcre.csv"));
  CHECK(fs::exists(dir / "merged/curves_dcre.svg"));

  // Legend/column order follows the input order.
  std::ifstream in(dir / "merged/curves_dcre.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "eps,predictions_noisy,predictions_perfect");

  // A frame-set mismatch is a usage error listing the difference.
  std::vector<FrameMetrics> rows =
      read_frames_csv(dir / "out/predictions_noisy/frames.csv");
  rows.pop_back();
  std::vector<std::size_t> idx(rows.size());
  std::iota(idx.begin(), idx.end(), 0u);
  write_report(build_report(rows, idx, "no-filter", {}), dir / "short", "short");
  ReportConfig bad = rep;
  bad.frames_csvs = {dir / "out/predictions_noisy/frames.csv",
                     dir / "short/frames.csv"};
  CHECK_THROWS_WITH_AS(run_report(bad), doctest::Contains("frame sets differ"),
                       UsageError);
}

TEST_CASE("depth cache round-trips through the evaluate pipeline") {
  fs::path dir = temp_dir("cached");
  write_fixture_bundle(dir, small_bundle());

  RunConfig config = quiet_config();
  config.manifest = dir / "manifest.json";
  config.predictions = {dir / "predictions_noisy.txt"};
  config.out_dir = dir / "out_a";
  config.threads = 2;
  config.cache_dir = dir / "cache";
  config.write_svg = false;
  config.compute_change = false;      // force the DCRE render through the cache
  config.compute_difficulty = false;
  run_evaluate(config);
  CHECK_FALSE(fs::is_empty(dir / "cache"));

  config.out_dir = dir / "out_b";  // second run hits the cache
  run_evaluate(config);
  CHECK(read_file(dir / "out_a/predictions_noisy/frames.csv") ==
        read_file(dir / "out_b/predictions_noisy/frames.csv"));
}

TEST_CASE("fuse pipeline writes fused reports that beat single frames") {
  fs::path dir = temp_dir("fuse");
  write_fixture_bundle(dir, small_bundle());

  RunConfig config = quiet_config();
  config.manifest = dir / "manifest.json";
  config.predictions = {dir / "predictions_noisy.txt"};
  config.out_dir = dir / "out";
  config.threads = 2;
  config.no_cache = true;
  config.window_sizes = {5};
  run_fuse(config);
  CHECK(fs::exists(dir / "out/predictions_noisy/fused_w5/summary.json"));
  CHECK(fs::exists(dir / "out/predictions_noisy/fused_w5/frames.csv"));
}

TEST_CASE("change pipeline emits the documented CSV columns") {
  fs::path dir = temp_dir("change");
  write_fixture_bundle(dir, small_bundle());

  RunConfig config = quiet_config();
  config.manifest = dir / "manifest.json";
  config.out_dir = dir / "out";
  config.threads = 2;
  run_change(config);

  std::ifstream in(dir / "out/change.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "frame_id,rho_v,zeta_v,zeta_s,zeta_g_mm,valid_overlap,flags");
  int rows = 0;
  std::string line;
  while (std::getline(in, line))
    if (!line.empty()) ++rows;
  CHECK(rows == 10);
}

TEST_CASE("difficulty pipeline writes scores and preset verdicts") {
  fs::path dir = temp_dir("difficulty");
  write_fixture_bundle(dir, small_bundle());

  DifficultyConfig config;
  config.manifest = dir / "manifest.json";
  config.out_dir = dir / "out";
  config.threads = 2;
  config.preset = "default";
  run_difficulty(config);

  std::ifstream in(dir / "out/difficulty.csv");
  std::string header;
  std::getline(in, header);
  CHECK(header == "frame_id,sigma,nu_m3,eta_px,nearest_train_frame,pass");
  std::string line;
  int rows = 0;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    ++rows;
    CHECK(line.find("train/frame-") != std::string::npos);  // nearest id
  }
  CHECK(rows == 10);
}

TEST_CASE("render pipeline dumps readable PNG triplets") {
  fs::path dir = temp_dir("render");
  write_fixture_bundle(dir, small_bundle());

  RenderConfig config;
  config.manifest = dir / "manifest.json";
  config.out_dir = dir / "out";
  config.frame_id = "seq01/frame-000003";
  run_render(config);

  ColorImage color = read_png_rgb8(dir / "out/seq01_frame-000003_color.png");
  CHECK(color.width() == 64);
  auto depth_mm = read_png_gray16(dir / "out/seq01_frame-000003_depth.png");
  long valid = 0;
  for (auto v : depth_mm.pixels())
    if (v > 0) ++valid;
  CHECK(valid > 1000);  // the closed room fills most of the view
  auto labels = read_png_gray16(dir / "out/seq01_frame-000003_labels.png");
  CHECK(labels.width() == 64);

  RenderConfig bad = config;
  bad.frame_id = "seq01/frame-999999";
  CHECK_THROWS_AS(run_render(bad), UsageError);
}

TEST_CASE("svg curves embed exactly the csv sample points") {
  std::vector<double> grid = {0.0, 0.5, 1.0};
  std::vector<std::vector<double>> curves = {{0.0, 0.5, 1.0}};
  std::string svg = curves_svg("t", "x", {"m"}, grid, curves);

  // Plot area: x in [60, 620], y in [40, 370]. The three samples map to
  // (60,370), (340,205), (620,40).
  CHECK(svg.find("points=\"60,370 340,205 620,40\"") != std::string::npos);

  fs::path dir = temp_dir("curves");
  write_curves_csv(dir / "c.csv", grid, {"m"}, curves);
  std::ifstream in(dir / "c.csv");
  std::string header, row;
  std::getline(in, header);
  CHECK(header == "eps,m");
  std::getline(in, row);
  CHECK(row == "0,0");
}

TEST_CASE("cli: exit codes for success, usage errors and data errors") {
  if (std::getenv("RELEVAL_BIN") == nullptr) {
    MESSAGE("RELEVAL_BIN not set; skipping CLI subprocess checks");
    return;
  }
  fs::path dir = temp_dir("cli");
  std::string d = dir.string();

  CHECK(run_cli("fixture --out " + d + "/fx --test-frames 6 --train-frames 4") == 0);
  CHECK(run_cli("evaluate --manifest " + d + "/fx/manifest.json --predictions " + d +
                "/fx/predictions_perfect.txt --out " + d +
                "/out --threads 2 --no-cache --no-svg --json") == 0);

  // Usage errors: missing predictions file, unknown preset, bad flags.
  CHECK(run_cli("evaluate --manifest " + d + "/fx/manifest.json --predictions " + d +
                "/fx/nonexistent.txt --out " + d + "/out2") == 2);
  CHECK(run_cli("evaluate --manifest " + d + "/fx/manifest.json --predictions " + d +
                "/fx/predictions_perfect.txt --out " + d +
                "/out3 --preset bogus") == 2);
  CHECK(run_cli("evaluate") == 2);
  CHECK(run_cli("--help") == 0);

  // Data errors map to exit 1: corrupt the rescan mesh.
  std::ofstream(dir / "fx/rescan01.ply") << "garbage";
  CHECK(run_cli("evaluate --manifest " + d + "/fx/manifest.json --predictions " + d +
                "/fx/predictions_perfect.txt --out " + d + "/out4") == 1);
}
