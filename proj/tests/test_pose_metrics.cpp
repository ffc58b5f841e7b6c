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

#include <random>

#include "releval/fixture.hpp"
#include "releval/pose_metrics.hpp"
#include "support/oracles.hpp"

using namespace releval;

namespace {

const Intrinsics k64{64, 48, 50.0, 50.0, 32.0, 24.0};

FrameRecord frame_with(const Pose& gt, std::optional<Pose> pred,
                       const Intrinsics& k = k64, const std::string& id = "f") {
  FrameRecord f;
  f.frame_id = id;
  f.sequence_id = "seq";
  f.gt_pose = gt;
  f.intrinsics = k;
  f.prediction = std::move(pred);
  return f;
}

Pose translated(const Pose& p, const Eigen::Vector3d& d) {
  return Pose(p.rotation(), p.translation() + d);
}

}  // namespace

TEST_CASE("dcre_frame: perfect prediction gives exactly zero") {
  SceneModel room = make_room_reference(RoomFixtureOptions{.wall_subdiv = 6});
  for (Pose pose : orbit_trajectory(5, 1.1, 1.3)) {
    FrameRecord f = frame_with(pose, pose);
    DcreResult d = dcre_frame(room, f);
    REQUIRE(d.scored());
    CHECK(d.valid_pixel_count > 0);
    CHECK(d.mean_normalized == 0.0);
    CHECK(d.mean_pixels_unclamped == 0.0);
  }
}

TEST_CASE("dcre_frame: analytic flow of a fronto-parallel plane") {
  // Plane at z=2, prediction shifted 0.02 m along camera x, fx=500:
  // every pixel flows exactly fx*dx/z = 5 px.
  SceneModel plane;
  plane.vertices = {{-4, -4, 2}, {4, -4, 2}, {4, 4, 2}, {-4, 4, 2}};
  plane.colors = {{9, 9, 9}, {9, 9, 9}, {9, 9, 9}, {9, 9, 9}};
  plane.labels = {1, 1, 1, 1};
  plane.triangles = {{0, 1, 2}, {0, 2, 3}};

  Intrinsics k{640, 480, 500.0, 500.0, 320.0, 240.0};
  Pose gt = Pose::identity();
  Pose pred = translated(gt, {0.02, 0.0, 0.0});
  FrameRecord f = frame_with(gt, pred, k);
  DcreResult d = dcre_frame(plane, f);
  REQUIRE(d.scored());
  CHECK(d.valid_pixel_count == 640 * 480);
  CHECK(d.mean_pixels_unclamped == doctest::Approx(5.0).epsilon(1e-3));
  CHECK(d.mean_normalized ==
        doctest::Approx(5.0 / std::sqrt(640.0 * 640 + 480.0 * 480)).epsilon(1e-3));
}

TEST_CASE("dcre_frame: displacement beyond a diagonal clamps to 1") {
  SceneModel room = make_room_reference(RoomFixtureOptions{.wall_subdiv = 4});
  Pose gt = orbit_trajectory(4, 1.2, 1.3)[0];
  // Point the prediction the opposite way: every reprojection leaves the
  // image (or lands behind the camera).
  Pose pred(gt.rotation() * Eigen::AngleAxisd(M_PI, Eigen::Vector3d::UnitY())
                                .toRotationMatrix(),
            gt.translation());
  DcreResult d = dcre_frame(room, frame_with(gt, pred));
  REQUIRE(d.scored());
  CHECK(d.mean_normalized == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("dcre_frame: statuses for absent prediction and empty view") {
  SceneModel room = make_room_reference(RoomFixtureOptions{.wall_subdiv = 4});
  Pose gt = orbit_trajectory(4, 1.2, 1.3)[0];
  CHECK(dcre_frame(room, frame_with(gt, std::nullopt)).status ==
        DcreStatus::NoPrediction);

  SceneModel empty;
  CHECK(dcre_frame(empty, frame_with(gt, gt)).status == DcreStatus::NoValidPixels);
}

TEST_CASE("dcre matches the naive matrix-algebra reference on random frames") {
  SceneModel room = make_room_reference(RoomFixtureOptions{.wall_subdiv = 5});
  std::vector<Pose> poses = random_poses_in_room(10, 77);
  for (std::size_t i = 0; i < poses.size(); ++i) {
    Pose pred = perturb_pose(poses[i], 0.05, 4.0, 123, i);
    FrameRecord f = frame_with(poses[i], pred);
    DcreResult fast = dcre_frame(room, f);
    REQUIRE(fast.scored());

    DepthMap depth = render_depth(room, poses[i], k64);
    oracle::NaiveDcre naive = oracle::naive_dcre(depth, k64, poses[i], pred);
    CHECK(fast.valid_pixel_count == naive.count);
    CHECK(fast.mean_normalized == doctest::Approx(naive.mean_normalized).epsilon(1e-9));
    CHECK(fast.mean_pixels_unclamped ==
          doctest::Approx(naive.mean_pixels).epsilon(1e-9));
  }
}

TEST_CASE("dcre is invariant under a world-frame gauge transform") {
  SceneModel room = make_room_reference(RoomFixtureOptions{.wall_subdiv = 5});
  std::mt19937 rng(31);
  Pose gt = orbit_trajectory(4, 1.2, 1.3)[1];
  Pose pred = perturb_pose(gt, 0.04, 3.0, 5, 0);
  DcreResult base = dcre_frame(room, frame_with(gt, pred));

  Pose gauge = oracle::random_pose(rng, 2.0);
  SceneModel moved = room;
  transform_model(moved, gauge);
  DcreResult transformed =
      dcre_frame(moved, frame_with(gauge * gt, gauge * pred));
  REQUIRE(base.scored());
  REQUIRE(transformed.scored());
  CHECK(transformed.mean_normalized ==
        doctest::Approx(base.mean_normalized).epsilon(1e-6));
}

TEST_CASE("recall_abs / outlier_abs: counting and the N/A partition") {
  Pose origin;
  std::vector<FrameRecord> frames;
  frames.push_back(frame_with(origin, origin, k64, "a"));  // perfect
  frames.push_back(frame_with(origin, translated(origin, {0.02, 0, 0}), k64, "b"));
  frames.push_back(frame_with(origin, translated(origin, {0.30, 0, 0}), k64, "c"));
  frames.push_back(frame_with(origin, std::nullopt, k64, "d"));

  CHECK(recall_abs(frames, 0.05, 5.0) == doctest::Approx(0.5));
  CHECK(outlier_abs(frames, 0.05, 5.0) == doctest::Approx(0.25));
  CHECK(na_fraction(frames) == doctest::Approx(0.25));
  // Same threshold on both sides partitions predicted frames exactly.
  CHECK(recall_abs(frames, 0.05, 5.0) + outlier_abs(frames, 0.05, 5.0) +
            na_fraction(frames) ==
        doctest::Approx(1.0).epsilon(1e-12));

  CHECK(recall_abs(frames, 1.0, 180.0) == doctest::Approx(0.75));  // all predicted

  std::vector<FrameRecord> all_absent{frame_with(origin, std::nullopt)};
  CHECK(outlier_abs(all_absent, 0.5, 25.0) == 0.0);
  CHECK(na_fraction(all_absent) == 1.0);

  CHECK_THROWS_AS(recall_abs(std::vector<FrameRecord>{}, 0.05, 5.0),
                  std::invalid_argument);
}

TEST_CASE("recall_abs matches a per-frame oracle loop on random data") {
  std::mt19937 rng(41);
  std::vector<FrameRecord> frames;
  for (int i = 0; i < 200; ++i) {
    Pose gt = oracle::random_pose(rng);
    std::optional<Pose> pred;
    if (rng() % 5) pred = perturb_pose(gt, 0.1, 10.0, 99, i);
    frames.push_back(frame_with(gt, pred));
  }
  double eps_t = 0.05, eps_th = 5.0;
  long hits = 0, outliers = 0;
  for (const auto& f : frames) {
    if (!f.prediction) continue;
    double dt = (f.gt_pose.translation() - f.prediction->translation()).norm();
    double dth = angular_error_deg(f.gt_pose.rotation(), f.prediction->rotation());
    if (dt < eps_t && dth < eps_th) ++hits;
    if (dt >= eps_t || dth >= eps_th) ++outliers;
  }
  CHECK(recall_abs(frames, eps_t, eps_th) ==
        doctest::Approx(hits / 200.0).epsilon(1e-15));
  CHECK(outlier_abs(frames, eps_t, eps_th) ==
        doctest::Approx(outliers / 200.0).epsilon(1e-15));
}

TEST_CASE("recall_abs is monotone in both thresholds") {
  std::mt19937 rng(43);
  std::vector<FrameRecord> frames;
  for (int i = 0; i < 100; ++i) {
    Pose gt = oracle::random_pose(rng);
    frames.push_back(frame_with(gt, perturb_pose(gt, 0.2, 20.0, 7, i)));
  }
  double prev = -1.0;
  for (double eps : {0.01, 0.05, 0.1, 0.2, 0.5}) {
    double r = recall_abs(frames, eps, 10.0);
    CHECK(r >= prev);
    prev = r;
  }
  prev = -1.0;
  for (double eps : {1.0, 5.0, 10.0, 30.0}) {
    double r = recall_abs(frames, 0.1, eps);
    CHECK(r >= prev);
    prev = r;
  }
}

TEST_CASE("median_errors: lower median, independence of the two medians") {
  Pose origin;
  std::vector<FrameRecord> frames;
  for (double e : {1.0, 2.0, 3.0})
    frames.push_back(frame_with(origin, translated(origin, {e, 0, 0})));
  MedianErrors m = median_errors(frames);
  REQUIRE(m.defined);
  CHECK(m.trans_m == doctest::Approx(2.0));

  // Two frames where the medians come from different frames: frame A has the
  // smaller translation error, frame B the smaller rotation error.
  Eigen::Matrix3d rot5 =
      Eigen::AngleAxisd(5.0 * M_PI / 180.0, Eigen::Vector3d::UnitZ())
          .toRotationMatrix();
  std::vector<FrameRecord> pair;
  pair.push_back(frame_with(origin, Pose(rot5, {0.1, 0, 0})));       // A
  pair.push_back(frame_with(origin, Pose(origin.rotation(), {0.4, 0, 0})));  // B
  MedianErrors mm = median_errors(pair);
  REQUIRE(mm.defined);
  CHECK(mm.trans_m == doctest::Approx(0.1));  // from A (lower median)
  CHECK(mm.rot_deg == doctest::Approx(0.0));  // from B
  // No single frame attains (0.1 m, 0 deg).

  std::vector<FrameRecord> none{frame_with(origin, std::nullopt)};
  CHECK_FALSE(median_errors(none).defined);
}

TEST_CASE("median matches a sorting oracle on random sets") {
  std::mt19937 rng(47);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<FrameRecord> frames;
    std::vector<double> errs;
    int n = 1 + static_cast<int>(rng() % 30);
    Pose origin;
    for (int i = 0; i < n; ++i) {
      double e = std::uniform_real_distribution<double>(0.0, 2.0)(rng);
      errs.push_back(e);
      frames.push_back(frame_with(origin, translated(origin, {e, 0, 0})));
    }
    std::sort(errs.begin(), errs.end());
    double expected = errs[(errs.size() - 1) / 2];
    CHECK(median_errors(frames).trans_m == doctest::Approx(expected).epsilon(1e-12));
  }
}

TEST_CASE("recall_dcre partition identity on synthetic DCRE sets") {
  std::mt19937 rng(53);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<DcreResult> frames;
    int n = 1 + static_cast<int>(rng() % 40);
    for (int i = 0; i < n; ++i) {
      DcreResult d;
      int kind = static_cast<int>(rng() % 10);
      if (kind == 0)
        d.status = DcreStatus::NoPrediction;
      else if (kind == 1)
        d.status = DcreStatus::NoValidPixels;
      else {
        d.status = DcreStatus::Ok;
        d.mean_normalized = uni(rng);
      }
      frames.push_back(d);
    }
    for (double eps : {0.01, 0.05, 0.15, 0.5, 0.99}) {
      double sum = recall_dcre(frames, eps) + outlier_dcre(frames, eps) +
                   dcre_na_fraction(frames);
      CHECK(sum == doctest::Approx(1.0).epsilon(1e-12));
    }
  }
}

TEST_CASE("recall_dcre agrees with a counting oracle around the threshold") {
  std::vector<DcreResult> frames;
  for (double v : {0.01, 0.02, 0.049, 0.05, 0.051, 0.1, 0.2, 0.5, 0.9, 1.0}) {
    DcreResult d;
    d.status = DcreStatus::Ok;
    d.mean_normalized = v;
    frames.push_back(d);
  }
  CHECK(recall_dcre(frames, 0.05) == doctest::Approx(0.3));  // strict <
  CHECK(outlier_dcre(frames, 0.05) == doctest::Approx(0.7));
}

TEST_CASE("cumulative_curve: trivial step, consistency, monotonicity") {
  std::vector<FrameMetrics> frames(4);
  for (auto& f : frames) {
    f.has_prediction = true;
    f.dcre.status = DcreStatus::Ok;
    f.dcre.mean_normalized = 0.0;
    f.trans_err_m = 0.0;
    f.rot_err_deg = 0.0;
  }
  std::vector<double> grid = ReportThresholds::uniform_grid(0.0, 1.0, 50);
  auto curve = cumulative_curve(frames, CurveMetric::Dcre, grid);
  CHECK(curve[0] == 0.0);  // strict inequality at eps = 0
  for (std::size_t i = 1; i < curve.size(); ++i) CHECK(curve[i] == 1.0);

  // Random set: pointwise nondecreasing, equals recall_dcre at grid points.
  std::mt19937 rng(59);
  std::uniform_real_distribution<double> uni(0.0, 1.0);
  std::vector<FrameMetrics> random_frames(100);
  std::vector<DcreResult> dcres;
  for (auto& f : random_frames) {
    f.has_prediction = rng() % 7 != 0;
    if (f.has_prediction) {
      f.dcre.status = DcreStatus::Ok;
      f.dcre.mean_normalized = uni(rng);
    } else {
      f.dcre.status = DcreStatus::NoPrediction;
    }
    dcres.push_back(f.dcre);
  }
  auto rc = cumulative_curve(random_frames, CurveMetric::Dcre, grid);
  double na = dcre_na_fraction(dcres);
  for (std::size_t i = 0; i < grid.size(); ++i) {
    if (i > 0) CHECK(rc[i] >= rc[i - 1]);
    CHECK(rc[i] == doctest::Approx(recall_dcre(dcres, grid[i])).epsilon(1e-15));
  }
  CHECK(rc.back() <= 1.0 - na + 1e-12);

  CHECK_THROWS_AS(cumulative_curve(random_frames, CurveMetric::Dcre, {}),
                  std::invalid_argument);
  CHECK_THROWS_AS(cumulative_curve(random_frames, CurveMetric::Dcre, {0.5, 0.2}),
                  std::invalid_argument);
}

TEST_CASE("object_reloc_check: tracked object flags, random pose does not") {
  RoomFixtureOptions opts{.wall_subdiv = 6};
  SceneModel rescan = make_room_rescan(opts);
  std::vector<ObjectTransform> transforms = room_object_transforms();

  // Camera staring at the moved box in the rescan.
  Pose gt = look_at({2.2, 0.9, 0.9}, {3.4, 0.25, 2.3});
  const double eps_f = 0.15;

  // A method that localized against the object reports T_o^-1 * gt.
  Pose object_locked = transforms[0].ref_to_rescan.inverse() * gt;
  FrameRecord frame = frame_with(gt, object_locked);
  DcreResult raw = dcre_frame(rescan, frame);
  REQUIRE(raw.scored());
  REQUIRE(raw.mean_normalized >= eps_f);  // genuinely a failure case
  CHECK(object_reloc_check(rescan, transforms, frame, eps_f) == ObjOutcome::Flagged);

  // A garbage prediction stays unflagged.
  Pose garbage = look_at({0.3, 2.0, 4.5}, {0.0, 0.0, 0.0});
  CHECK(object_reloc_check(rescan, transforms, frame_with(gt, garbage), eps_f) ==
        ObjOutcome::NotFlagged);

  // Missing transforms or prediction: not evaluated.
  CHECK(object_reloc_check(rescan, {}, frame, eps_f) == ObjOutcome::NotEvaluated);
  CHECK(object_reloc_check(rescan, transforms, frame_with(gt, std::nullopt), eps_f) ==
        ObjOutcome::NotEvaluated);
}

TEST_CASE("build_report aggregates the Table-style columns") {
  SceneModel room = make_room_reference(RoomFixtureOptions{.wall_subdiv = 5});
  std::vector<Pose> poses = orbit_trajectory(10, 1.2, 1.3);
  std::vector<FrameRecord> frames;
  for (std::size_t i = 0; i < poses.size(); ++i) {
    std::optional<Pose> pred;
    if (i % 5 == 4)
      pred = std::nullopt;  // N/A
    else if (i % 5 == 3)
      pred = perturb_pose(poses[i], 1.5, 60.0, 3, i);  // gross outlier
    else
      pred = poses[i];
    frames.push_back(frame_with(poses[i], pred, k64, "f" + std::to_string(i)));
  }
  std::vector<FrameMetrics> metrics = evaluate_frames(room, frames);
  std::vector<std::size_t> all(metrics.size());
  std::iota(all.begin(), all.end(), 0u);
  EvaluationReport report =
      build_report(std::move(metrics), std::move(all), "no-filter", {});

  CHECK(report.recall_abs_values.size() == 1);
  CHECK(report.recall_abs_values[0] == doctest::Approx(0.6));
  CHECK(report.na_frac == doctest::Approx(0.2));
  CHECK(report.recall_dcre_values.size() == 3);
  CHECK(report.recall_dcre_values[0] == doctest::Approx(0.6));  // eps 0.05
  CHECK(report.curve_dcre.size() == report.thresholds.dcre_grid.size());
  // The partition identity holds at every grid point.
  std::vector<DcreResult> dcres;
  for (const auto& f : report.frames) dcres.push_back(f.dcre);
  for (std::size_t i = 0; i < report.thresholds.dcre_grid.size(); ++i) {
    double eps = report.thresholds.dcre_grid[i];
    if (eps <= 0.0) continue;
    CHECK(recall_dcre(dcres, eps) + outlier_dcre(dcres, eps) +
              dcre_na_fraction(dcres) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }
}
