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

#include "releval/change_metrics.hpp"
#include "releval/fixture.hpp"
#include "support/oracles.hpp"

using namespace releval;

namespace {

GrayImage random_gray(int w, int h, std::mt19937& rng) {
  std::uniform_real_distribution<double> uni(0.0, 255.0);
  GrayImage img(w, h);
  for (auto& p : img.pixels()) p = uni(rng);
  return img;
}

Mask full_mask(int w, int h) { return Mask(w, h, 1); }

}  // namespace

TEST_CASE("visual_change: identical images give rho 0, zeta 1") {
  std::mt19937 rng(1);
  GrayImage img = random_gray(8, 8, rng);
  auto r = visual_change(img, img, full_mask(8, 8));
  CHECK_FALSE(r.degenerate);
  CHECK(r.rho_v == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(r.zeta_v == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("visual_change: inverted image anticorrelates perfectly") {
  std::mt19937 rng(2);
  GrayImage img = random_gray(8, 8, rng);
  GrayImage inv(8, 8);
  for (std::size_t i = 0; i < img.size(); ++i)
    inv.pixels()[i] = 255.0 - img.pixels()[i];
  auto r = visual_change(img, inv, full_mask(8, 8));
  CHECK_FALSE(r.degenerate);
  CHECK(r.zeta_v == doctest::Approx(-1.0).epsilon(1e-12));
}

TEST_CASE("visual_change: constant image flags degenerate, never NaN") {
  GrayImage flat(8, 8, 100.0);
  std::mt19937 rng(3);
  GrayImage other = random_gray(8, 8, rng);
  auto r = visual_change(flat, other, full_mask(8, 8));
  CHECK(r.degenerate);
  CHECK(std::isfinite(r.zeta_v));
  CHECK(std::isfinite(r.rho_v));

  auto empty = visual_change(flat, other, Mask(8, 8, 0));
  CHECK(empty.degenerate);
}

TEST_CASE("visual_change matches the double-loop oracle on random images") {
  std::mt19937 rng(4);
  for (int trial = 0; trial < 20; ++trial) {
    GrayImage a = random_gray(8, 8, rng);
    GrayImage b = random_gray(8, 8, rng);
    Mask m(8, 8);
    for (auto& v : m.pixels()) v = rng() % 3 ? 1 : 0;
    auto fast = visual_change(a, b, m);
    auto naive = oracle::naive_visual_change(a, b, m);
    CHECK(fast.rho_v == doctest::Approx(naive.rho_v).epsilon(1e-12));
    CHECK(fast.zeta_v == doctest::Approx(naive.zeta_v).epsilon(1e-12));
    CHECK(fast.degenerate == naive.degenerate);
  }
}

TEST_CASE("semantic_change: counting semantics") {
  LabelImage a(4, 4, 1), b(4, 4, 1);
  CHECK(semantic_change(a, b).zeta_s == 0.0);

  for (auto& l : b.pixels()) l = 2;
  CHECK(semantic_change(a, b).zeta_s == 1.0);

  // Exactly half of the overlap differs.
  b = a;
  for (int i = 0; i < 8; ++i) b.pixels()[i] = 2;
  CHECK(semantic_change(a, b).zeta_s == doctest::Approx(0.5));

  // Pixels invalid in either image never count.
  a.pixels()[0] = 0;
  b.pixels()[15] = 0;
  auto r = semantic_change(a, b);
  CHECK(r.zeta_s == doctest::Approx(7.0 / 14.0));

  LabelImage all_invalid(4, 4, 0);
  auto e = semantic_change(a, all_invalid);
  CHECK(e.empty_overlap);
  CHECK(e.zeta_s == 0.0);
}

TEST_CASE("semantic_change: symmetric and relabeling-invariant") {
  std::mt19937 rng(5);
  LabelImage a(16, 16), b(16, 16);
  for (auto& l : a.pixels()) l = static_cast<std::uint16_t>(rng() % 5);
  for (auto& l : b.pixels()) l = static_cast<std::uint16_t>(rng() % 5);
  CHECK(semantic_change(a, b).zeta_s == semantic_change(b, a).zeta_s);

  // Bijective relabeling applied to both sides.
  auto remap = [](std::uint16_t l) -> std::uint16_t {
    return l == 0 ? 0 : static_cast<std::uint16_t>(100 + 7 * l);
  };
  LabelImage ra(16, 16), rb(16, 16);
  for (std::size_t i = 0; i < a.size(); ++i) {
    ra.pixels()[i] = remap(a.pixels()[i]);
    rb.pixels()[i] = remap(b.pixels()[i]);
  }
  CHECK(semantic_change(ra, rb).zeta_s == semantic_change(a, b).zeta_s);
}

TEST_CASE("geometric_change: constant offset and symmetry") {
  DepthMap a(8, 8, 2.0);
  DepthMap b(8, 8, 2.010);
  CHECK(geometric_change(a, b).zeta_g_mm == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(geometric_change(b, a).zeta_g_mm == doctest::Approx(10.0).epsilon(1e-12));
  CHECK(geometric_change(a, a).zeta_g_mm == 0.0);

  DepthMap invalid(8, 8, 0.0);
  auto r = geometric_change(a, invalid);
  CHECK(r.empty_overlap);
  CHECK(r.zeta_g_mm == 0.0);
}

TEST_CASE("geometric_change scales linearly in a constant shift") {
  std::mt19937 rng(6);
  std::uniform_real_distribution<double> ud(0.5, 5.0);
  DepthMap a(16, 16);
  for (auto& d : a.pixels()) d = ud(rng);
  for (double c : {0.001, 0.02, 0.5}) {
    DepthMap b = a;
    for (auto& d : b.pixels()) d += c;
    CHECK(geometric_change(a, b).zeta_g_mm ==
          doctest::Approx(1000.0 * c).epsilon(1e-12));
  }
}

TEST_CASE("geometric_change matches oracle under random masks") {
  std::mt19937 rng(7);
  std::uniform_real_distribution<double> ud(0.0, 4.0);
  for (int trial = 0; trial < 20; ++trial) {
    DepthMap a(8, 8), b(8, 8);
    for (auto& d : a.pixels()) d = rng() % 4 ? ud(rng) : 0.0;
    for (auto& d : b.pixels()) d = rng() % 4 ? ud(rng) : 0.0;
    auto r = geometric_change(a, b);
    double expected = oracle::naive_geometric_change_mm(a, b);
    CHECK(r.zeta_g_mm == doctest::Approx(expected).epsilon(1e-9));
  }
}

TEST_CASE("identical rendered views give the no-change fixpoint") {
  SceneModel room = make_room_reference(RoomFixtureOptions{.wall_subdiv = 6});
  Intrinsics k{64, 48, 50.0, 50.0, 32.0, 24.0};
  Pose pose = orbit_trajectory(4, 1.2, 1.3)[0];
  RenderedViews views = render(room, pose, k);
  ChangeScores c = compute_change_scores(views, views);
  CHECK(c.zeta_s == 0.0);
  CHECK(c.zeta_g_mm == 0.0);
  CHECK(c.rho_v == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c.zeta_v == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(c.valid_overlap > 0.95);
}

TEST_CASE("moved box shows up in all change measures") {
  RoomFixtureOptions opts{.wall_subdiv = 8};
  SceneModel reference = make_room_reference(opts);
  SceneModel rescan = make_room_rescan(opts);
  Intrinsics k{96, 72, 80.0, 80.0, 48.0, 36.0};
  // Look at the moved box (instance 8 sits near (2.8, 0.25, 2.0)).
  Pose pose = look_at({1.2, 1.0, 0.6}, {2.8, 0.3, 2.2});
  RenderedViews test = render(rescan, pose, k);
  RenderedViews ref = render(reference, pose, k);
  ChangeScores c = compute_change_scores(test, ref);
  CHECK(c.zeta_s > 0.01);
  CHECK(c.zeta_g_mm > 5.0);
  CHECK(c.zeta_v < 0.999);
  CHECK(c.rho_v > 0.0);
  CHECK_FALSE(c.empty_overlap);
}

TEST_CASE("moved-box semantic change matches the ray-cast oracle") {
  RoomFixtureOptions opts{.wall_subdiv = 6};
  SceneModel reference = make_room_reference(opts);
  SceneModel rescan = make_room_rescan(opts);
  Intrinsics k{64, 48, 50.0, 50.0, 32.0, 24.0};
  Pose pose = look_at({1.2, 1.0, 0.6}, {2.8, 0.3, 2.2});

  RenderedViews test = render(rescan, pose, k);
  RenderedViews ref = render(reference, pose, k);
  double fast = compute_change_scores(test, ref).zeta_s;

  oracle::RayCastViews cast_test = oracle::raycast_views(rescan, pose, k);
  oracle::RayCastViews cast_ref = oracle::raycast_views(reference, pose, k);
  double expected = oracle::naive_semantic_change(cast_test.labels, cast_ref.labels);

  CHECK(fast == doctest::Approx(expected).epsilon(0.01));
}

TEST_CASE("scene_change_stats averages and skips flagged frames") {
  ChangeScores a;
  a.rho_v = 0.2;
  a.zeta_v = 0.9;
  a.zeta_s = 0.1;
  a.zeta_g_mm = 10.0;
  a.valid_overlap = 1.0;
  ChangeScores b = a;
  b.zeta_g_mm = 30.0;
  b.zeta_s = 0.3;

  SceneChangeStats one = scene_change_stats({a});
  CHECK(one.mean_zeta_g_mm == doctest::Approx(10.0));
  CHECK(one.mean_zeta_s == doctest::Approx(0.1));

  SceneChangeStats two = scene_change_stats({a, b});
  CHECK(two.mean_zeta_g_mm == doctest::Approx(20.0));
  CHECK(two.mean_zeta_s == doctest::Approx(0.2));

  ChangeScores degenerate = a;
  degenerate.visual_degenerate = true;
  degenerate.rho_v = 1e9;  // must not contaminate the mean
  SceneChangeStats three = scene_change_stats({a, b, degenerate});
  CHECK(three.mean_rho_v == doctest::Approx(0.2));
  CHECK(three.visual_frames == 2);
  CHECK(three.frame_count == 3);
}

TEST_CASE("per-channel visual mode is a documented toggle") {
  SceneModel room = make_room_reference(RoomFixtureOptions{.wall_subdiv = 4});
  Intrinsics k{64, 48, 50.0, 50.0, 32.0, 24.0};
  Pose pose = orbit_trajectory(4, 1.2, 1.3)[2];
  RenderedViews views = render(room, pose, k);
  ChangeOptions per_channel;
  per_channel.per_channel_rgb = true;
  ChangeScores c = compute_change_scores(views, views, per_channel);
  CHECK(c.rho_v == doctest::Approx(0.0).epsilon(1e-15));
  CHECK(c.zeta_v == doctest::Approx(1.0).epsilon(1e-12));
}
