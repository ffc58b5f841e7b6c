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

#include "releval/fixture.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>

#include "releval/errors.hpp"

namespace releval {
namespace {

// Coordinates pass through float so meshes round-trip PLY storage bit-exactly.
Eigen::Vector3d snap_f32(double x, double y, double z) {
  return Eigen::Vector3d(static_cast<float>(x), static_cast<float>(y),
                         static_cast<float>(z));
}

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ull;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
  return x ^ (x >> 31);
}

std::uint8_t channel_noise(std::uint64_t key, int base, int spread) {
  int v = base + static_cast<int>(splitmix64(key) % (2 * spread + 1)) - spread;
  return static_cast<std::uint8_t>(std::clamp(v, 0, 255));
}

// An axis-aligned grid wall spanning the rectangle [origin, origin+du+dv],
// subdivided so vertex-color noise gives the renderer something to texture.
void add_wall(SceneModel& model, const Eigen::Vector3d& origin,
              const Eigen::Vector3d& du, const Eigen::Vector3d& dv, int subdiv,
              std::uint16_t label, const Rgb8& tint) {
  int base = static_cast<int>(model.vertices.size());
  for (int j = 0; j <= subdiv; ++j) {
    for (int i = 0; i <= subdiv; ++i) {
      Eigen::Vector3d p = origin + du * (static_cast<double>(i) / subdiv) +
                          dv * (static_cast<double>(j) / subdiv);
      model.vertices.push_back(snap_f32(p.x(), p.y(), p.z()));
      std::uint64_t key = (static_cast<std::uint64_t>(label) << 32) |
                          (static_cast<std::uint64_t>(j) << 16) |
                          static_cast<std::uint64_t>(i);
      model.colors.push_back({channel_noise(key * 3 + 0, tint.r, 60),
                              channel_noise(key * 3 + 1, tint.g, 60),
                              channel_noise(key * 3 + 2, tint.b, 60)});
      model.labels.push_back(label);
    }
  }
  auto idx = [&](int i, int j) { return base + j * (subdiv + 1) + i; };
  for (int j = 0; j < subdiv; ++j) {
    for (int i = 0; i < subdiv; ++i) {
      model.triangles.push_back({idx(i, j), idx(i + 1, j), idx(i + 1, j + 1)});
      model.triangles.push_back({idx(i, j), idx(i + 1, j + 1), idx(i, j + 1)});
    }
  }
}

void add_box(SceneModel& model, const Eigen::Vector3d& center,
             const Eigen::Vector3d& half, std::uint16_t label, const Rgb8& tint) {
  // Six quads with duplicated vertices so every face keeps the box's label.
  static const int faces[6][4][3] = {
      {{-1, -1, -1}, {+1, -1, -1}, {+1, +1, -1}, {-1, +1, -1}},  // z-
      {{+1, -1, +1}, {-1, -1, +1}, {-1, +1, +1}, {+1, +1, +1}},  // z+
      {{-1, -1, +1}, {-1, -1, -1}, {-1, +1, -1}, {-1, +1, +1}},  // x-
      {{+1, -1, -1}, {+1, -1, +1}, {+1, +1, +1}, {+1, +1, -1}},  // x+
      {{-1, -1, +1}, {+1, -1, +1}, {+1, -1, -1}, {-1, -1, -1}},  // y-
      {{-1, +1, -1}, {+1, +1, -1}, {+1, +1, +1}, {-1, +1, +1}},  // y+
  };
  for (int f = 0; f < 6; ++f) {
    int base = static_cast<int>(model.vertices.size());
    for (int v = 0; v < 4; ++v) {
      Eigen::Vector3d p = center + Eigen::Vector3d(faces[f][v][0] * half.x(),
                                                   faces[f][v][1] * half.y(),
                                                   faces[f][v][2] * half.z());
      model.vertices.push_back(snap_f32(p.x(), p.y(), p.z()));
      std::uint64_t key = (static_cast<std::uint64_t>(label) << 40) |
                          (static_cast<std::uint64_t>(f) << 8) |
                          static_cast<std::uint64_t>(v);
      model.colors.push_back({channel_noise(key * 3 + 0, tint.r, 40),
                              channel_noise(key * 3 + 1, tint.g, 40),
                              channel_noise(key * 3 + 2, tint.b, 40)});
      model.labels.push_back(label);
    }
    model.triangles.push_back({base, base + 1, base + 2});
    model.triangles.push_back({base, base + 2, base + 3});
  }
}

}  // namespace

SceneModel make_room_reference(const RoomFixtureOptions& options) {
  SceneModel model;
  const double sx = options.room_size.x();
  const double sy = options.room_size.y();
  const double sz = options.room_size.z();
  const int n = options.wall_subdiv;
  const Eigen::Vector3d o(0, 0, 0);

  add_wall(model, o, {sx, 0, 0}, {0, 0, sz}, n, 1, {150, 140, 120});       // floor
  add_wall(model, {0, sy, 0}, {sx, 0, 0}, {0, 0, sz}, n, 2, {200, 200, 210});  // ceiling
  add_wall(model, o, {sx, 0, 0}, {0, sy, 0}, n, 3, {170, 90, 80});         // z = 0
  add_wall(model, {0, 0, sz}, {sx, 0, 0}, {0, sy, 0}, n, 4, {90, 140, 170});   // z = sz
  add_wall(model, o, {0, 0, sz}, {0, sy, 0}, n, 5, {110, 160, 100});       // x = 0
  add_wall(model, {sx, 0, 0}, {0, 0, sz}, {0, sy, 0}, n, 6, {160, 150, 60});   // x = sx

  add_box(model, {1.0, 0.30, 1.2}, {0.30, 0.30, 0.30}, 7, {220, 60, 50});
  add_box(model, {2.8, 0.25, 2.0}, {0.25, 0.25, 0.25}, 8, {50, 80, 220});
  add_box(model, {2.0, 0.40, 3.8}, {0.35, 0.40, 0.30}, 9, {60, 200, 90});
  return model;
}

Pose room_moved_object_transform() {
  // Slide across the floor and rotate about the vertical axis through the
  // box's own center (2.8, 2.0 in x/z).
  double yaw = 25.0 * M_PI / 180.0;
  Eigen::Matrix3d r =
      Eigen::AngleAxisd(yaw, Eigen::Vector3d::UnitY()).toRotationMatrix();
  Eigen::Vector3d pivot(2.8, 0.0, 2.0);
  Eigen::Vector3d shift(0.6, 0.0, 0.3);
  return Pose(r, pivot + shift - r * pivot);
}

SceneModel make_room_rescan(const RoomFixtureOptions& options) {
  SceneModel model = make_room_reference(options);
  transform_instance(model, options.moved_instance, room_moved_object_transform());
  // Mesh coordinates stay float32-exact for PLY round trips.
  for (auto& v : model.vertices) v = snap_f32(v.x(), v.y(), v.z());
  return model;
}

std::vector<ObjectTransform> room_object_transforms() {
  return {{8, room_moved_object_transform()}};
}

Pose look_at(const Eigen::Vector3d& eye, const Eigen::Vector3d& target,
             const Eigen::Vector3d& up) {
  Eigen::Vector3d forward = (target - eye).normalized();
  Eigen::Vector3d right = forward.cross(up);
  if (right.norm() < 1e-9) right = forward.cross(Eigen::Vector3d(1, 0, 0));
  right.normalize();
  Eigen::Vector3d down = forward.cross(right);
  Eigen::Matrix3d r;
  r.col(0) = right;
  r.col(1) = down;
  r.col(2) = forward;
  return Pose(r, eye);
}

std::vector<Pose> orbit_trajectory(int count, double radius, double height,
                                   double phase, const RoomFixtureOptions& options) {
  std::vector<Pose> poses;
  poses.reserve(count);
  Eigen::Vector3d center(options.room_size.x() / 2.0, options.room_size.y() / 2.0,
                         options.room_size.z() / 2.0);
  for (int i = 0; i < count; ++i) {
    double a = phase + 2.0 * M_PI * static_cast<double>(i) / count;
    Eigen::Vector3d eye = center + Eigen::Vector3d(radius * std::cos(a),
                                                   height - center.y(),
                                                   radius * std::sin(a));
    // Look outward past the center so walls and boxes fill the frame.
    Eigen::Vector3d target = center + (center - eye) * 1.5;
    target.y() = center.y() - 0.3;
    poses.push_back(look_at(eye, target));
  }
  return poses;
}

double hash_unit(std::uint64_t stream, std::uint64_t index) {
  std::uint64_t h = splitmix64(stream * 0x9e3779b97f4a7c15ull + index);
  return static_cast<double>(h >> 11) / 9007199254740992.0;  // 53-bit mantissa
}

std::vector<Pose> random_poses_in_room(int count, std::uint64_t seed,
                                       const RoomFixtureOptions& options) {
  std::vector<Pose> poses;
  poses.reserve(count);
  const Eigen::Vector3d s = options.room_size;
  for (int i = 0; i < count; ++i) {
    std::uint64_t n = static_cast<std::uint64_t>(i);
    Eigen::Vector3d eye(0.8 + hash_unit(seed, 6 * n + 0) * (s.x() - 1.6),
                        0.9 + hash_unit(seed, 6 * n + 1) * (s.y() - 1.5),
                        0.8 + hash_unit(seed, 6 * n + 2) * (s.z() - 1.6));
    // Aim at a far point offset from the room center; the closed room
    // guarantees geometry in view.
    Eigen::Vector3d target(s.x() * (0.2 + 0.6 * hash_unit(seed, 6 * n + 3)),
                           s.y() * (0.2 + 0.6 * hash_unit(seed, 6 * n + 4)),
                           s.z() * (0.2 + 0.6 * hash_unit(seed, 6 * n + 5)));
    if ((target - eye).norm() < 0.5) target = Eigen::Vector3d(s.x() / 2, s.y() / 2, s.z() / 2);
    poses.push_back(look_at(eye, target));
  }
  return poses;
}

Pose perturb_pose(const Pose& pose, double trans_m, double rot_deg,
                  std::uint64_t stream, std::uint64_t index) {
  auto sym = [&](std::uint64_t k) { return 2.0 * hash_unit(stream, index * 8 + k) - 1.0; };
  Eigen::Vector3d dt(sym(0) * trans_m, sym(1) * trans_m, sym(2) * trans_m);
  Eigen::Vector3d axis(sym(3), sym(4), sym(5));
  if (axis.norm() < 1e-12) axis = Eigen::Vector3d::UnitZ();
  axis.normalize();
  double angle = sym(6) * rot_deg * M_PI / 180.0;
  Eigen::Matrix3d dr = Eigen::AngleAxisd(angle, axis).toRotationMatrix();
  return Pose(pose.rotation() * dr, pose.translation() + dt);
}

void write_fixture_bundle(const std::filesystem::path& dir,
                          const FixtureBundleOptions& options) {
  namespace stdfs = std::filesystem;
  std::error_code ec;
  stdfs::create_directories(dir, ec);
  if (!stdfs::exists(dir))
    throw DataError(dir.string(), 0, "cannot create fixture directory");

  RoomFixtureOptions room;
  write_ply(dir / "reference.ply", make_room_reference(room));
  write_ply(dir / "rescan01.ply", make_room_rescan(room));
  write_object_transforms(dir / "objects01.txt", room_object_transforms());

  auto id_of = [](const char* prefix, int i) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%s/frame-%06d", prefix, i);
    return std::string(buf);
  };

  std::vector<TrajectoryEntry> train;
  std::vector<Pose> train_poses = orbit_trajectory(options.train_frames, 1.25, 1.35);
  for (int i = 0; i < options.train_frames; ++i)
    train.push_back({id_of("train", i), train_poses[i]});
  write_trajectory(dir / "train.txt", train);

  // Test poses interleave two offset orbits so novelty varies across frames.
  std::vector<TrajectoryEntry> test;
  std::vector<Pose> orbit_a =
      orbit_trajectory(options.test_frames, 1.15, 1.25, 0.13);
  std::vector<Pose> orbit_b =
      orbit_trajectory(options.test_frames, 0.7, 1.6, 0.47);
  for (int i = 0; i < options.test_frames; ++i)
    test.push_back({id_of("seq01", i), (i % 3 == 2) ? orbit_b[i] : orbit_a[i]});
  write_trajectory(dir / "seq01.txt", test);

  // Perfect predictions.
  {
    PredictionSet p;
    for (const auto& e : test) p.poses[e.frame_id] = e.pose;
    write_predictions(dir / "predictions_perfect.txt", p);
  }
  // Noise plus a fixed fraction of gross outliers.
  {
    PredictionSet p;
    int stride = options.outlier_fraction > 0.0
                     ? std::max(1, static_cast<int>(std::lround(
                                       1.0 / options.outlier_fraction)))
                     : 0;
    for (int i = 0; i < options.test_frames; ++i) {
      const auto& e = test[i];
      bool gross = stride > 0 && (i % stride) == stride - 1;
      if (gross) {
        p.poses[e.frame_id] = perturb_pose(e.pose, 3.0, 90.0, options.seed + 1, i);
      } else {
        p.poses[e.frame_id] = perturb_pose(e.pose, options.noise_trans_m,
                                           options.noise_rot_deg, options.seed, i);
      }
    }
    write_predictions(dir / "predictions_noisy.txt", p);
  }
  // A fixed fraction of corrupted (non-finite) lines.
  {
    std::ofstream out(dir / "predictions_corrupt.txt");
    out << "# frame_id qw qx qy qz tx ty tz (camera-to-model)\n";
    int corrupt = static_cast<int>(std::lround(options.corrupt_fraction *
                                               options.test_frames));
    char buf[256];
    for (int i = 0; i < options.test_frames; ++i) {
      const auto& e = test[i];
      if (i < corrupt) {
        out << e.frame_id << " nan nan nan nan nan nan nan\n";
        continue;
      }
      Eigen::Quaterniond q(e.pose.rotation());
      const Eigen::Vector3d& t = e.pose.translation();
      std::snprintf(buf, sizeof(buf), "%s %.9g %.9g %.9g %.9g %.9g %.9g %.9g\n",
                    e.frame_id.c_str(), q.w(), q.x(), q.y(), q.z(), t.x(), t.y(),
                    t.z());
      out << buf;
    }
  }

  // Manifest.
  {
    std::ofstream out(dir / "manifest.json");
    auto intr = [&](std::ostream& os) {
      os << "{ \"width\": " << options.intrinsics.width
         << ", \"height\": " << options.intrinsics.height
         << ", \"fx\": " << options.intrinsics.fx
         << ", \"fy\": " << options.intrinsics.fy
         << ", \"cx\": " << options.intrinsics.cx
         << ", \"cy\": " << options.intrinsics.cy << " }";
    };
    out << "{\n  \"scene_id\": \"synth_room\",\n  \"reference\": {\n"
        << "    \"sequence\": \"train\", \"split\": \"train\",\n"
        << "    \"model\": \"reference.ply\", \"trajectory\": \"train.txt\",\n"
        << "    \"intrinsics\": ";
    intr(out);
    out << "\n  },\n  \"rescans\": [\n    {\n"
        << "      \"sequence\": \"seq01\", \"split\": \"test\",\n"
        << "      \"model\": \"rescan01.ply\", \"trajectory\": \"seq01.txt\",\n"
        << "      \"object_transforms\": \"objects01.txt\",\n"
        << "      \"intrinsics\": ";
    intr(out);
    out << "\n    }\n  ]\n}\n";
  }
}

}  // namespace releval
