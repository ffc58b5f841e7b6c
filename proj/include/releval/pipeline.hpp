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
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "releval/dataset_io.hpp"
#include "releval/difficulty.hpp"
#include "releval/sequence_fusion.hpp"

namespace releval {

/// Runs body(0..count-1) on up to `threads` workers. Results must be written
/// to per-index slots; the caller's reduction over those slots is then
/// independent of the thread count. Exceptions are collected and the one with
/// the lowest index is rethrown after all items ran.
void parallel_for(int count, int threads, const std::function<void(int)>& body);

struct RunConfig {
  fs::path manifest;
  std::vector<fs::path> predictions;
  fs::path out_dir;
  std::string split = "test";
  std::string filter_preset = "no-filter";
  ReportThresholds thresholds;
  DcreOptions dcre;
  FusionOptions fusion;
  std::vector<int> window_sizes = {10, 30, 100};
  int threads = 1;
  bool compute_change = true;
  bool compute_difficulty = true;
  bool keep_going = false;
  bool json_stdout = false;
  bool write_svg = true;
  bool quiet = false;
  std::optional<fs::path> cache_dir;  // unset: RELEVAL_CACHE_DIR, if present
  bool no_cache = false;
};

struct MethodEvaluation {
  std::string method;
  EvaluationReport report;
};

/// Full evaluation pipeline: render, DCRE, change and difficulty scores,
/// filtering, aggregation, and report files under out_dir/<method>/.
std::vector<MethodEvaluation> run_evaluate(const RunConfig& config);

/// Fused-sequence evaluation for every configured window size; reports land
/// under out_dir/<method>/fused_w<N>/.
void run_fuse(const RunConfig& config);

/// Change-measure CSV (frame_id, rho_v, zeta_v, zeta_s, zeta_g_mm,
/// valid_overlap, flags) for every test frame, plus per-scene averages on
/// stdout.
void run_change(const RunConfig& config);

struct DifficultyConfig {
  fs::path manifest;
  fs::path out_dir;
  std::string split = "test";
  std::optional<std::string> preset;  // adds a pass column when set
  DcreOptions dcre;
  int threads = 1;
  bool json_stdout = false;
};

void run_difficulty(const DifficultyConfig& config);

struct RenderConfig {
  fs::path manifest;
  fs::path out_dir;
  std::string sequence_id;  // empty: first sequence of the split
  std::string frame_id;     // empty: all frames
  std::string split = "test";
  bool use_reference_model = false;
  int supersample = 1;
};

void run_render(const RenderConfig& config);

struct ReportConfig {
  /// One frames.csv per method. All files must cover the same frame set.
  std::vector<fs::path> frames_csvs;
  /// Parallel method names; missing entries fall back to the parent
  /// directory name of the CSV.
  std::vector<std::string> method_names;
  fs::path out_dir;
  std::string filter_preset = "no-filter";
  ReportThresholds thresholds;
  bool json_stdout = false;
  bool write_svg = true;
  bool quiet = false;
};

/// Re-aggregates saved frames.csv files under a (possibly different) filter
/// preset without re-rendering anything. With several methods, also writes
/// combined cumulative-curve CSVs and SVG plots with shared axes; mismatched
/// frame sets raise UsageError listing the difference. Returns the first
/// method's report.
EvaluationReport run_report(const ReportConfig& config);

/// Line-plot SVG of one or more cumulative curves over a shared grid.
std::string curves_svg(const std::string& title, const std::string& x_label,
                       const std::vector<std::string>& series_names,
                       const std::vector<double>& grid,
                       const std::vector<std::vector<double>>& curves);

/// Combined per-method curve CSV (grid column plus one column per method).
void write_curves_csv(const fs::path& path, const std::vector<double>& grid,
                      const std::vector<std::string>& names,
                      const std::vector<std::vector<double>>& curves);

/// One-line summary of a report (the benchmark table columns).
std::string summary_line(const std::string& method, const EvaluationReport& report);

}  // namespace releval
