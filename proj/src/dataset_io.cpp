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

#include "releval/dataset_io.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "releval/errors.hpp"

namespace releval {

using json = nlohmann::json;

namespace {

// ---------------------------------------------------------------------------
// PLY
// ---------------------------------------------------------------------------

enum class PlyType { Int8, UInt8, Int16, UInt16, Int32, UInt32, Float32, Float64 };

std::size_t ply_type_size(PlyType t) {
  switch (t) {
    case PlyType::Int8:
    case PlyType::UInt8:
      return 1;
    case PlyType::Int16:
    case PlyType::UInt16:
      return 2;
    case PlyType::Int32:
    case PlyType::UInt32:
    case PlyType::Float32:
      return 4;
    case PlyType::Float64:
      return 8;
  }
  return 0;
}

std::optional<PlyType> parse_ply_type(const std::string& s) {
  if (s == "char" || s == "int8") return PlyType::Int8;
  if (s == "uchar" || s == "uint8") return PlyType::UInt8;
  if (s == "short" || s == "int16") return PlyType::Int16;
  if (s == "ushort" || s == "uint16") return PlyType::UInt16;
  if (s == "int" || s == "int32") return PlyType::Int32;
  if (s == "uint" || s == "uint32") return PlyType::UInt32;
  if (s == "float" || s == "float32") return PlyType::Float32;
  if (s == "double" || s == "float64") return PlyType::Float64;
  return std::nullopt;
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::Float32;
  bool is_list = false;
  PlyType count_type = PlyType::UInt8;
};

struct PlyElement {
  std::string name;
  std::size_t count = 0;
  std::vector<PlyProperty> properties;
};

double read_binary_scalar(std::istream& in, PlyType t) {
  unsigned char buf[8];
  in.read(reinterpret_cast<char*>(buf), ply_type_size(t));
  switch (t) {
    case PlyType::Int8:
      return static_cast<double>(static_cast<std::int8_t>(buf[0]));
    case PlyType::UInt8:
      return static_cast<double>(buf[0]);
    case PlyType::Int16: {
      std::int16_t v;
      std::memcpy(&v, buf, 2);
      return v;
    }
    case PlyType::UInt16: {
      std::uint16_t v;
      std::memcpy(&v, buf, 2);
      return v;
    }
    case PlyType::Int32: {
      std::int32_t v;
      std::memcpy(&v, buf, 4);
      return v;
    }
    case PlyType::UInt32: {
      std::uint32_t v;
      std::memcpy(&v, buf, 4);
      return v;
    }
    case PlyType::Float32: {
      float v;
      std::memcpy(&v, buf, 4);
      return v;
    }
    case PlyType::Float64: {
      double v;
      std::memcpy(&v, buf, 8);
      return v;
    }
  }
  return 0.0;
}

std::vector<std::string> split_ws(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream ss(line);
  std::string tok;
  while (ss >> tok) tokens.push_back(tok);
  return tokens;
}

}  // namespace

SceneModel read_ply(const fs::path& path) {
  const std::string file = path.string();
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError(file, 0, "cannot open file");

  std::string line;
  int line_no = 0;
  auto next_line = [&]() -> std::string& {
    if (!std::getline(in, line)) throw DataError(file, line_no, "unexpected end of header");
    if (!line.empty() && line.back() == '\r') line.pop_back();
    ++line_no;
    return line;
  };

  if (next_line() != "ply") throw DataError(file, line_no, "not a PLY file");
  bool binary = false;
  std::vector<PlyElement> elements;
  for (;;) {
    next_line();
    auto tokens = split_ws(line);
    if (tokens.empty() || tokens[0] == "comment" || tokens[0] == "obj_info") continue;
    if (tokens[0] == "format") {
      if (tokens.size() < 2) throw DataError(file, line_no, "malformed format line");
      if (tokens[1] == "ascii")
        binary = false;
      else if (tokens[1] == "binary_little_endian")
        binary = true;
      else
        throw DataError(file, line_no, "unsupported PLY format '" + tokens[1] + "'");
    } else if (tokens[0] == "element") {
      if (tokens.size() != 3) throw DataError(file, line_no, "malformed element line");
      elements.push_back({tokens[1], std::stoul(tokens[2]), {}});
    } else if (tokens[0] == "property") {
      if (elements.empty()) throw DataError(file, line_no, "property before element");
      PlyProperty prop;
      if (tokens.size() >= 5 && tokens[1] == "list") {
        prop.is_list = true;
        auto ct = parse_ply_type(tokens[2]);
        auto it = parse_ply_type(tokens[3]);
        if (!ct || !it) throw DataError(file, line_no, "unsupported list property type");
        prop.count_type = *ct;
        prop.type = *it;
        prop.name = tokens[4];
      } else if (tokens.size() >= 3) {
        auto t = parse_ply_type(tokens[1]);
        if (!t)
          throw DataError(file, line_no, "unsupported property type '" + tokens[1] + "'");
        prop.type = *t;
        prop.name = tokens[2];
      } else {
        throw DataError(file, line_no, "malformed property line");
      }
      elements.back().properties.push_back(prop);
    } else if (tokens[0] == "end_header") {
      break;
    } else {
      throw DataError(file, line_no, "unexpected header line '" + tokens[0] + "'");
    }
  }

  SceneModel model;
  for (const PlyElement& elem : elements) {
    if (elem.name == "vertex") {
      int ix = -1, iy = -1, iz = -1, ir = -1, ig = -1, ib = -1, ilabel = -1;
      for (int i = 0; i < static_cast<int>(elem.properties.size()); ++i) {
        const std::string& n = elem.properties[i].name;
        if (n == "x") ix = i;
        else if (n == "y") iy = i;
        else if (n == "z") iz = i;
        else if (n == "red") ir = i;
        else if (n == "green") ig = i;
        else if (n == "blue") ib = i;
        else if (n == "objectId" || n == "label") ilabel = i;
      }
      if (ix < 0 || iy < 0 || iz < 0)
        throw DataError(file, line_no, "vertex element is missing x/y/z properties");
      if (ir < 0 || ig < 0 || ib < 0)
        throw DataError(file, line_no, "vertex element is missing red/green/blue properties");
      if (ilabel < 0)
        throw DataError(file, line_no, "vertex element is missing an objectId property");

      model.vertices.reserve(elem.count);
      model.colors.reserve(elem.count);
      model.labels.reserve(elem.count);
      std::vector<double> values(elem.properties.size());
      for (std::size_t v = 0; v < elem.count; ++v) {
        if (binary) {
          for (std::size_t p = 0; p < elem.properties.size(); ++p) {
            if (elem.properties[p].is_list)
              throw DataError(file, 0, "list property on vertex element unsupported");
            values[p] = read_binary_scalar(in, elem.properties[p].type);
          }
          if (!in) throw DataError(file, 0, "unexpected end of vertex data");
        } else {
          auto tokens = split_ws(next_line());
          if (tokens.size() < elem.properties.size())
            throw DataError(file, line_no, "short vertex line");
          for (std::size_t p = 0; p < elem.properties.size(); ++p) {
            // float32 properties parse through float so the exact stored
            // value round-trips (9 significant digits identify a float, not
            // the nearest double).
            if (elem.properties[p].type == PlyType::Float32)
              values[p] = std::strtof(tokens[p].c_str(), nullptr);
            else
              values[p] = std::strtod(tokens[p].c_str(), nullptr);
          }
        }
        model.vertices.emplace_back(values[ix], values[iy], values[iz]);
        model.colors.push_back({static_cast<std::uint8_t>(values[ir]),
                                static_cast<std::uint8_t>(values[ig]),
                                static_cast<std::uint8_t>(values[ib])});
        model.labels.push_back(static_cast<std::uint16_t>(values[ilabel]));
      }
    } else if (elem.name == "face") {
      if (elem.properties.empty() || !elem.properties[0].is_list)
        throw DataError(file, line_no, "face element must start with a list property");
      const PlyProperty& list = elem.properties[0];
      model.triangles.reserve(elem.count);
      for (std::size_t f = 0; f < elem.count; ++f) {
        long n;
        std::array<std::int32_t, 3> tri{};
        if (binary) {
          n = static_cast<long>(read_binary_scalar(in, list.count_type));
          if (n != 3) throw DataError(file, 0, "non-triangular face (" + std::to_string(n) + " vertices)");
          for (int i = 0; i < 3; ++i)
            tri[i] = static_cast<std::int32_t>(read_binary_scalar(in, list.type));
          if (!in) throw DataError(file, 0, "unexpected end of face data");
        } else {
          auto tokens = split_ws(next_line());
          if (tokens.empty()) throw DataError(file, line_no, "empty face line");
          n = std::strtol(tokens[0].c_str(), nullptr, 10);
          if (n != 3) throw DataError(file, line_no, "non-triangular face (" + std::to_string(n) + " vertices)");
          if (tokens.size() < 4) throw DataError(file, line_no, "short face line");
          for (int i = 0; i < 3; ++i)
            tri[i] = static_cast<std::int32_t>(std::strtol(tokens[i + 1].c_str(), nullptr, 10));
        }
        model.triangles.push_back(tri);
      }
    } else {
      // Skip unknown elements.
      for (std::size_t e = 0; e < elem.count; ++e) {
        if (binary) {
          for (const PlyProperty& p : elem.properties) {
            if (p.is_list) {
              long n = static_cast<long>(read_binary_scalar(in, p.count_type));
              for (long i = 0; i < n; ++i) read_binary_scalar(in, p.type);
            } else {
              read_binary_scalar(in, p.type);
            }
          }
        } else {
          next_line();
        }
      }
    }
  }

  std::string err = model.consistency_error();
  if (!err.empty()) throw DataError(file, 0, err);
  return model;
}

void write_ply(const fs::path& path, const SceneModel& model, bool binary) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError(path.string(), 0, "cannot open file for writing");

  out << "ply\n"
      << (binary ? "format binary_little_endian 1.0\n" : "format ascii 1.0\n")
      << "comment camera-to-model scene mesh with per-vertex instance labels\n"
      << "element vertex " << model.vertices.size() << "\n"
      << "property float x\nproperty float y\nproperty float z\n"
      << "property uchar red\nproperty uchar green\nproperty uchar blue\n"
      << "property ushort objectId\n"
      << "element face " << model.triangles.size() << "\n"
      << "property list uchar int vertex_indices\n"
      << "end_header\n";

  if (binary) {
    for (std::size_t i = 0; i < model.vertices.size(); ++i) {
      float xyz[3] = {static_cast<float>(model.vertices[i].x()),
                      static_cast<float>(model.vertices[i].y()),
                      static_cast<float>(model.vertices[i].z())};
      out.write(reinterpret_cast<const char*>(xyz), sizeof(xyz));
      out.write(reinterpret_cast<const char*>(&model.colors[i]), 3);
      out.write(reinterpret_cast<const char*>(&model.labels[i]), 2);
    }
    for (const auto& tri : model.triangles) {
      std::uint8_t n = 3;
      out.write(reinterpret_cast<const char*>(&n), 1);
      out.write(reinterpret_cast<const char*>(tri.data()), 12);
    }
  } else {
    char buf[128];
    for (std::size_t i = 0; i < model.vertices.size(); ++i) {
      std::snprintf(buf, sizeof(buf), "%.9g %.9g %.9g %d %d %d %d\n",
                    static_cast<float>(model.vertices[i].x()),
                    static_cast<float>(model.vertices[i].y()),
                    static_cast<float>(model.vertices[i].z()), model.colors[i].r,
                    model.colors[i].g, model.colors[i].b, model.labels[i]);
      out << buf;
    }
    for (const auto& tri : model.triangles)
      out << "3 " << tri[0] << ' ' << tri[1] << ' ' << tri[2] << '\n';
  }
  if (!out) throw DataError(path.string(), 0, "write failed");
}

// ---------------------------------------------------------------------------
// Pose text formats
// ---------------------------------------------------------------------------

namespace {

bool parse_double(const std::string& token, double& out) {
  char* end = nullptr;
  out = std::strtod(token.c_str(), &end);
  return end == token.c_str() + token.size() && !token.empty();
}

// Matrix rows are validated and, when slightly off, snapped to the nearest
// rotation. Exactly orthonormal input is kept bit-identical.
Pose pose_from_rows(const std::string& file, int line_no, const double m[12]) {
  Eigen::Matrix3d r;
  r << m[0], m[1], m[2], m[4], m[5], m[6], m[8], m[9], m[10];
  Eigen::Vector3d t(m[3], m[7], m[11]);

  if (r.determinant() < 0.0)
    throw DataError(file, line_no, "improper rotation (determinant < 0)");
  Pose pose(r, t);
  double err = pose.orthonormality_error();
  if (err > 1e-3)
    throw DataError(file, line_no,
                    "rotation violates orthonormality by " + std::to_string(err));
  if (err > 1e-9) pose = pose.orthonormalized();
  return pose;
}

void write_pose_rows(std::ostream& out, const Pose& pose) {
  const Eigen::Matrix3d& r = pose.rotation();
  const Eigen::Vector3d& t = pose.translation();
  char buf[64];
  const double values[12] = {r(0, 0), r(0, 1), r(0, 2), t.x(),
                             r(1, 0), r(1, 1), r(1, 2), t.y(),
                             r(2, 0), r(2, 1), r(2, 2), t.z()};
  for (int i = 0; i < 12; ++i) {
    std::snprintf(buf, sizeof(buf), " %.17g", values[i]);
    out << buf;
  }
}

}  // namespace

std::vector<TrajectoryEntry> read_trajectory(const fs::path& path) {
  const std::string file = path.string();
  std::ifstream in(path);
  if (!in) throw DataError(file, 0, "cannot open file");

  std::vector<TrajectoryEntry> entries;
  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 13)
      throw DataError(file, line_no,
                      "expected frame_id + 12 matrix values, got " +
                          std::to_string(tokens.size()) + " tokens");
    double m[12];
    for (int i = 0; i < 12; ++i) {
      if (!parse_double(tokens[i + 1], m[i]) || !std::isfinite(m[i]))
        throw DataError(file, line_no, "non-finite or unparseable matrix entry");
    }
    if (!seen.insert(tokens[0]).second)
      throw DataError(file, line_no, "duplicate frame id '" + tokens[0] + "'");
    entries.push_back({tokens[0], pose_from_rows(file, line_no, m)});
  }
  return entries;
}

void write_trajectory(const fs::path& path, const std::vector<TrajectoryEntry>& entries) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string(), 0, "cannot open file for writing");
  out << "# frame_id followed by the row-major top 3x4 of the camera-to-model matrix\n";
  for (const TrajectoryEntry& e : entries) {
    out << e.frame_id;
    write_pose_rows(out, e.pose);
    out << '\n';
  }
  if (!out) throw DataError(path.string(), 0, "write failed");
}

PredictionSet read_predictions(const fs::path& path,
                               const std::vector<std::string>& known_frame_ids) {
  const std::string file = path.string();
  std::ifstream in(path);
  if (!in) throw UsageError("predictions file not found: " + file);

  PredictionSet set;
  set.method_name = path.stem().string();
  for (const std::string& id : known_frame_ids) set.poses[id] = std::nullopt;

  std::set<std::string> seen;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    const std::string& id = tokens[0];
    if (!seen.insert(id).second)
      throw DataError(file, line_no, "duplicate frame id '" + id + "'");
    if (set.poses.find(id) == set.poses.end()) {
      ++set.unknown_skipped;
      continue;
    }
    if (tokens.size() != 8) {
      ++set.invalid_count;  // treated like a missing prediction
      continue;
    }
    double v[7];
    bool ok = true;
    for (int i = 0; i < 7; ++i) {
      if (!parse_double(tokens[i + 1], v[i]) || !std::isfinite(v[i])) ok = false;
    }
    if (!ok) {
      ++set.invalid_count;
      continue;
    }
    Eigen::Quaterniond q(v[0], v[1], v[2], v[3]);
    if (std::abs(q.norm() - 1.0) > 1e-3) {
      ++set.invalid_count;
      continue;
    }
    q.normalize();
    set.poses[id] = Pose::from_quaternion(q, Eigen::Vector3d(v[4], v[5], v[6]));
  }
  return set;
}

void write_predictions(const fs::path& path, const PredictionSet& predictions) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string(), 0, "cannot open file for writing");
  out << "# frame_id qw qx qy qz tx ty tz (camera-to-model)\n";
  char buf[256];
  for (const auto& [id, pose] : predictions.poses) {
    if (!pose) continue;
    Eigen::Quaterniond q(pose->rotation());
    const Eigen::Vector3d& t = pose->translation();
    std::snprintf(buf, sizeof(buf), "%s %.9g %.9g %.9g %.9g %.9g %.9g %.9g\n",
                  id.c_str(), q.w(), q.x(), q.y(), q.z(), t.x(), t.y(), t.z());
    out << buf;
  }
  if (!out) throw DataError(path.string(), 0, "write failed");
}

std::vector<ObjectTransform> read_object_transforms(const fs::path& path) {
  const std::string file = path.string();
  std::ifstream in(path);
  if (!in) throw DataError(file, 0, "cannot open file");

  std::vector<ObjectTransform> transforms;
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    auto tokens = split_ws(line);
    if (tokens.empty()) continue;
    if (tokens.size() != 13)
      throw DataError(file, line_no, "expected instance_id + 12 matrix values");
    long id = std::strtol(tokens[0].c_str(), nullptr, 10);
    if (id < 1 || id > 65535)
      throw DataError(file, line_no, "instance id out of range [1, 65535]");
    double m[12];
    for (int i = 0; i < 12; ++i) {
      if (!parse_double(tokens[i + 1], m[i]) || !std::isfinite(m[i]))
        throw DataError(file, line_no, "non-finite or unparseable matrix entry");
    }
    transforms.push_back(
        {static_cast<std::uint16_t>(id), pose_from_rows(file, line_no, m)});
  }
  return transforms;
}

void write_object_transforms(const fs::path& path,
                             const std::vector<ObjectTransform>& transforms) {
  std::ofstream out(path);
  if (!out) throw DataError(path.string(), 0, "cannot open file for writing");
  out << "# instance_id followed by the row-major top 3x4 of the reference-to-rescan transform\n";
  for (const ObjectTransform& t : transforms) {
    out << t.instance_id;
    write_pose_rows(out, t.ref_to_rescan);
    out << '\n';
  }
  if (!out) throw DataError(path.string(), 0, "write failed");
}

// ---------------------------------------------------------------------------
// Manifest
// ---------------------------------------------------------------------------

namespace {

Intrinsics intrinsics_from_json(const json& j, const std::string& file) {
  for (const char* key : {"width", "height", "fx", "fy", "cx", "cy"}) {
    if (!j.contains(key))
      throw DataError(file, 0, std::string("intrinsics missing field '") + key + "'");
  }
  Intrinsics k;
  k.width = j["width"].get<int>();
  k.height = j["height"].get<int>();
  k.fx = j["fx"].get<double>();
  k.fy = j["fy"].get<double>();
  k.cx = j["cx"].get<double>();
  k.cy = j["cy"].get<double>();
  if (!k.valid()) throw DataError(file, 0, "intrinsics must have positive size and focal lengths");
  return k;
}

SequenceEntry sequence_from_json(const json& j, const fs::path& base,
                                 const std::string& file) {
  for (const char* key : {"sequence", "split", "model", "trajectory", "intrinsics"}) {
    if (!j.contains(key))
      throw DataError(file, 0, std::string("sequence entry missing field '") + key + "'");
  }
  SequenceEntry e;
  e.sequence_id = j["sequence"].get<std::string>();
  e.split = j["split"].get<std::string>();
  if (e.split != "train" && e.split != "val" && e.split != "test")
    throw DataError(file, 0, "split must be train, val or test (sequence '" +
                                 e.sequence_id + "')");
  e.model = base / j["model"].get<std::string>();
  e.trajectory = base / j["trajectory"].get<std::string>();
  e.intrinsics = intrinsics_from_json(j["intrinsics"], file);
  if (j.contains("object_transforms"))
    e.object_transforms = base / j["object_transforms"].get<std::string>();
  return e;
}

void require_exists(const fs::path& p) {
  if (!fs::exists(p)) throw UsageError("referenced file not found: " + p.string());
}

}  // namespace

SceneManifest read_manifest(const fs::path& path) {
  if (!fs::exists(path)) throw UsageError("manifest not found: " + path.string());
  std::ifstream in(path);
  json j;
  try {
    in >> j;
  } catch (const json::exception& e) {
    throw DataError(path.string(), 0, std::string("JSON parse error: ") + e.what());
  }

  const std::string file = path.string();
  SceneManifest manifest;
  manifest.base_dir = path.parent_path();
  if (!j.contains("scene_id") || !j.contains("reference") || !j.contains("rescans"))
    throw DataError(file, 0, "manifest requires scene_id, reference and rescans");
  manifest.scene_id = j["scene_id"].get<std::string>();
  manifest.reference = sequence_from_json(j["reference"], manifest.base_dir, file);
  for (const json& r : j["rescans"])
    manifest.rescans.push_back(sequence_from_json(r, manifest.base_dir, file));

  require_exists(manifest.reference.model);
  require_exists(manifest.reference.trajectory);
  for (const SequenceEntry& r : manifest.rescans) {
    require_exists(r.model);
    require_exists(r.trajectory);
    if (r.object_transforms) require_exists(*r.object_transforms);
  }
  return manifest;
}

LoadedScene load_scene(const fs::path& manifest_path) {
  SceneManifest manifest = read_manifest(manifest_path);
  LoadedScene scene;
  scene.scene_id = manifest.scene_id;

  auto load_sequence = [](const SequenceEntry& entry) {
    LoadedSequence seq;
    seq.entry = entry;
    seq.model = read_ply(entry.model);
    seq.trajectory = read_trajectory(entry.trajectory);
    if (entry.object_transforms)
      seq.object_transforms = read_object_transforms(*entry.object_transforms);
    return seq;
  };

  scene.reference = load_sequence(manifest.reference);
  for (const SequenceEntry& r : manifest.rescans)
    scene.rescans.push_back(load_sequence(r));
  return scene;
}

std::vector<FrameRecord> make_frame_records(const LoadedSequence& sequence,
                                            const PredictionSet& predictions) {
  std::vector<FrameRecord> records;
  records.reserve(sequence.trajectory.size());
  for (const TrajectoryEntry& e : sequence.trajectory) {
    FrameRecord rec;
    rec.frame_id = e.frame_id;
    rec.sequence_id = sequence.entry.sequence_id;
    rec.gt_pose = e.pose;
    rec.intrinsics = sequence.entry.intrinsics;
    rec.prediction = predictions.lookup(e.frame_id);
    records.push_back(std::move(rec));
  }
  return records;
}

// ---------------------------------------------------------------------------
// Reports
// ---------------------------------------------------------------------------

std::string format_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

const char* kFramesCsvHeader =
    "frame_id,sequence_id,has_prediction,trans_err_m,rot_err_deg,dcre_status,"
    "dcre_norm,dcre_px,dcre_valid_px,sigma,nu_m3,eta_px,nearest_train,rho_v,"
    "zeta_v,zeta_s,zeta_g_mm,valid_overlap,visual_degenerate,empty_overlap,obj";

const char* dcre_status_name(DcreStatus s) {
  switch (s) {
    case DcreStatus::Ok:
      return "ok";
    case DcreStatus::NoPrediction:
      return "no-prediction";
    case DcreStatus::NoValidPixels:
      return "no-valid-pixels";
  }
  return "?";
}

std::optional<DcreStatus> dcre_status_from(const std::string& s) {
  if (s == "ok") return DcreStatus::Ok;
  if (s == "no-prediction") return DcreStatus::NoPrediction;
  if (s == "no-valid-pixels") return DcreStatus::NoValidPixels;
  return std::nullopt;
}

const char* obj_name(ObjOutcome o) {
  switch (o) {
    case ObjOutcome::NotEvaluated:
      return "not-evaluated";
    case ObjOutcome::NotFlagged:
      return "not-flagged";
    case ObjOutcome::Flagged:
      return "flagged";
  }
  return "?";
}

std::optional<ObjOutcome> obj_from(const std::string& s) {
  if (s == "not-evaluated") return ObjOutcome::NotEvaluated;
  if (s == "not-flagged") return ObjOutcome::NotFlagged;
  if (s == "flagged") return ObjOutcome::Flagged;
  return std::nullopt;
}

std::string opt_field(const std::optional<double>& v) {
  return v ? format_double(*v) : std::string();
}

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> fields;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      fields.push_back(cur);
      cur.clear();
    } else {
      cur += c;
    }
  }
  fields.push_back(cur);
  return fields;
}

}  // namespace

void write_report(const EvaluationReport& report, const fs::path& out_dir,
                  const std::string& method_name) {
  std::error_code ec;
  fs::create_directories(out_dir, ec);
  if (ec && !fs::exists(out_dir))
    throw DataError(out_dir.string(), 0, "cannot create output directory");

  // frames.csv: every frame, full precision, preset-independent.
  {
    std::ofstream out(out_dir / "frames.csv");
    if (!out) throw DataError((out_dir / "frames.csv").string(), 0, "cannot open for writing");
    out << kFramesCsvHeader << '\n';
    for (const FrameMetrics& f : report.frames) {
      if (f.frame_id.find(',') != std::string::npos)
        throw DataError("frames.csv", 0, "frame id contains a comma: " + f.frame_id);
      out << f.frame_id << ',' << f.sequence_id << ',' << (f.has_prediction ? 1 : 0)
          << ',' << (f.has_prediction ? format_double(f.trans_err_m) : std::string())
          << ',' << (f.has_prediction ? format_double(f.rot_err_deg) : std::string())
          << ',' << dcre_status_name(f.dcre.status) << ','
          << (f.dcre.scored() ? format_double(f.dcre.mean_normalized) : std::string())
          << ','
          << (f.dcre.scored() ? format_double(f.dcre.mean_pixels_unclamped)
                              : std::string())
          << ',' << f.dcre.valid_pixel_count << ',' << opt_field(f.vol_sigma) << ','
          << opt_field(f.context_nu_m3) << ',' << opt_field(f.novelty_eta_px) << ','
          << f.nearest_train_index << ','
          << (f.change ? format_double(f.change->rho_v) : std::string()) << ','
          << (f.change ? format_double(f.change->zeta_v) : std::string()) << ','
          << (f.change ? format_double(f.change->zeta_s) : std::string()) << ','
          << (f.change ? format_double(f.change->zeta_g_mm) : std::string()) << ','
          << (f.change ? format_double(f.change->valid_overlap) : std::string()) << ','
          << (f.change ? (f.change->visual_degenerate ? "1" : "0") : "") << ','
          << (f.change ? (f.change->empty_overlap ? "1" : "0") : "") << ','
          << obj_name(f.obj) << '\n';
    }
  }

  // summary.json: the aggregate columns.
  {
    json j;
    j["method"] = method_name;
    j["filter"] = report.filter_name;
    j["frame_count_total"] = report.frames.size();
    j["frame_count_evaluated"] = report.evaluated.size();
    j["recall_abs"] = json::array();
    for (std::size_t i = 0; i < report.thresholds.abs_inlier.size(); ++i) {
      j["recall_abs"].push_back(
          {{"eps_t", report.thresholds.abs_inlier[i].first},
           {"eps_theta", report.thresholds.abs_inlier[i].second},
           {"value", i < report.recall_abs_values.size() ? report.recall_abs_values[i]
                                                         : 0.0}});
    }
    if (report.medians.defined) {
      j["median_trans_m"] = report.medians.trans_m;
      j["median_rot_deg"] = report.medians.rot_deg;
    } else {
      j["median_trans_m"] = nullptr;
      j["median_rot_deg"] = nullptr;
    }
    j["recall_dcre"] = json::array();
    for (std::size_t i = 0; i < report.thresholds.eps_f.size(); ++i) {
      j["recall_dcre"].push_back(
          {{"eps_f", report.thresholds.eps_f[i]},
           {"value",
            i < report.recall_dcre_values.size() ? report.recall_dcre_values[i] : 0.0}});
    }
    j["na_fraction"] = report.na_frac;
    j["no_valid_pixel_fraction"] = report.no_valid_pixel_frac;
    j["outlier_abs"] = {{"eps_t", report.thresholds.abs_outlier.first},
                        {"eps_theta", report.thresholds.abs_outlier.second},
                        {"value", report.outlier_abs_value}};
    j["outlier_dcre"] = {{"eps_f", report.thresholds.dcre_outlier_eps},
                         {"value", report.outlier_dcre_value}};
    j["obj"] = {{"fraction", report.obj_fraction},
                {"flagged", report.obj_flagged},
                {"failures", report.obj_failures},
                {"evaluated", report.obj_evaluated},
                {"eps_f", report.thresholds.obj_eps}};

    std::ofstream out(out_dir / "summary.json");
    if (!out) throw DataError((out_dir / "summary.json").string(), 0, "cannot open for writing");
    out << j.dump(2) << '\n';
  }

  // Cumulative curves.
  {
    std::ofstream out(out_dir / "curve_dcre.csv");
    out << "eps_f,fraction\n";
    for (std::size_t i = 0; i < report.thresholds.dcre_grid.size(); ++i)
      out << format_double(report.thresholds.dcre_grid[i]) << ','
          << format_double(i < report.curve_dcre.size() ? report.curve_dcre[i] : 0.0)
          << '\n';
  }
  {
    std::ofstream out(out_dir / "curve_abs.csv");
    out << "eps_t_m,fraction_trans,eps_theta_deg,fraction_rot\n";
    std::size_t rows =
        std::max(report.thresholds.trans_grid.size(), report.thresholds.rot_grid.size());
    for (std::size_t i = 0; i < rows; ++i) {
      if (i < report.thresholds.trans_grid.size())
        out << format_double(report.thresholds.trans_grid[i]) << ','
            << format_double(i < report.curve_trans.size() ? report.curve_trans[i] : 0.0);
      else
        out << ',';
      out << ',';
      if (i < report.thresholds.rot_grid.size())
        out << format_double(report.thresholds.rot_grid[i]) << ','
            << format_double(i < report.curve_rot.size() ? report.curve_rot[i] : 0.0);
      else
        out << ',';
      out << '\n';
    }
  }
}

std::vector<FrameMetrics> read_frames_csv(const fs::path& path) {
  const std::string file = path.string();
  std::ifstream in(path);
  if (!in) throw UsageError("frames csv not found: " + file);

  std::string line;
  if (!std::getline(in, line)) throw DataError(file, 1, "empty file");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  if (line != kFramesCsvHeader)
    throw DataError(file, 1, "unexpected frames.csv header");

  std::vector<FrameMetrics> frames;
  int line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    auto f = split_csv(line);
    if (f.size() != 21)
      throw DataError(file, line_no, "expected 21 fields, got " + std::to_string(f.size()));

    auto num = [&](const std::string& s) -> double {
      double v;
      if (!parse_double(s, v)) throw DataError(file, line_no, "bad number '" + s + "'");
      return v;
    };
    auto opt_num = [&](const std::string& s) -> std::optional<double> {
      if (s.empty()) return std::nullopt;
      return num(s);
    };

    FrameMetrics m;
    m.frame_id = f[0];
    m.sequence_id = f[1];
    m.has_prediction = f[2] == "1";
    if (m.has_prediction) {
      m.trans_err_m = num(f[3]);
      m.rot_err_deg = num(f[4]);
    }
    auto status = dcre_status_from(f[5]);
    if (!status) throw DataError(file, line_no, "bad dcre status '" + f[5] + "'");
    m.dcre.status = *status;
    if (m.dcre.scored()) {
      m.dcre.mean_normalized = num(f[6]);
      m.dcre.mean_pixels_unclamped = num(f[7]);
    }
    m.dcre.valid_pixel_count = static_cast<long>(num(f[8]));
    m.vol_sigma = opt_num(f[9]);
    m.context_nu_m3 = opt_num(f[10]);
    m.novelty_eta_px = opt_num(f[11]);
    m.nearest_train_index = static_cast<int>(num(f[12]));
    if (!f[13].empty()) {
      ChangeScores c;
      c.rho_v = num(f[13]);
      c.zeta_v = num(f[14]);
      c.zeta_s = num(f[15]);
      c.zeta_g_mm = num(f[16]);
      c.valid_overlap = num(f[17]);
      c.visual_degenerate = f[18] == "1";
      c.empty_overlap = f[19] == "1";
      m.change = c;
    }
    auto obj = obj_from(f[20]);
    if (!obj) throw DataError(file, line_no, "bad obj outcome '" + f[20] + "'");
    m.obj = *obj;
    frames.push_back(std::move(m));
  }
  return frames;
}

// ---------------------------------------------------------------------------
// Depth cache
// ---------------------------------------------------------------------------

namespace {

std::uint64_t fnv64(const void* bytes, std::size_t n, std::uint64_t h) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= 1099511628211ull;
  }
  return h;
}

}  // namespace

DepthCache::DepthCache(fs::path dir) : dir_(std::move(dir)) {
  std::error_code ec;
  fs::create_directories(dir_, ec);
}

std::string DepthCache::key(std::uint64_t model_hash, const Pose& pose,
                            const Intrinsics& k, int supersample) {
  std::uint64_t h = 1469598103934665603ull;
  h = fnv64(&model_hash, sizeof(model_hash), h);
  const Eigen::Matrix3d& r = pose.rotation();
  const Eigen::Vector3d& t = pose.translation();
  double pose_bits[12] = {r(0, 0), r(0, 1), r(0, 2), t.x(), r(1, 0), r(1, 1),
                          r(1, 2), t.y(),   r(2, 0), r(2, 1), r(2, 2), t.z()};
  h = fnv64(pose_bits, sizeof(pose_bits), h);
  double kd[4] = {k.fx, k.fy, k.cx, k.cy};
  int ki[3] = {k.width, k.height, supersample};
  h = fnv64(kd, sizeof(kd), h);
  h = fnv64(ki, sizeof(ki), h);
  char buf[24];
  std::snprintf(buf, sizeof(buf), "%016" PRIx64, h);
  return buf;
}

std::optional<DepthMap> DepthCache::load(const std::string& key) const {
  std::ifstream in(dir_ / (key + ".rdc"), std::ios::binary);
  if (!in) return std::nullopt;
  char magic[4];
  std::int32_t w = 0, h = 0;
  in.read(magic, 4);
  in.read(reinterpret_cast<char*>(&w), 4);
  in.read(reinterpret_cast<char*>(&h), 4);
  if (!in || std::memcmp(magic, "RDC2", 4) != 0 || w <= 0 || h <= 0)
    return std::nullopt;
  DepthMap depth(w, h);
  in.read(reinterpret_cast<char*>(depth.data()),
          static_cast<std::streamsize>(depth.size() * sizeof(double)));
  if (!in) return std::nullopt;
  return depth;
}

void DepthCache::store(const std::string& key, const DepthMap& depth) const {
  fs::path final_path = dir_ / (key + ".rdc");
  fs::path tmp_path = dir_ / (key + ".tmp" + std::to_string(::getpid()));
  {
    std::ofstream out(tmp_path, std::ios::binary);
    if (!out) return;  // caching is best effort
    std::int32_t w = depth.width(), h = depth.height();
    out.write("RDC2", 4);
    out.write(reinterpret_cast<const char*>(&w), 4);
    out.write(reinterpret_cast<const char*>(&h), 4);
    out.write(reinterpret_cast<const char*>(depth.data()),
              static_cast<std::streamsize>(depth.size() * sizeof(double)));
    if (!out) {
      std::error_code ec;
      fs::remove(tmp_path, ec);
      return;
    }
  }
  std::error_code ec;
  fs::rename(tmp_path, final_path, ec);
  if (ec) fs::remove(tmp_path, ec);
}

}  // namespace releval
