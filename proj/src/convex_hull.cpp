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

#include "releval/convex_hull.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <utility>

#include <Eigen/Geometry>

namespace releval {
namespace {

struct Face {
  std::array<int, 3> v;
  std::array<int, 3> neighbor;  // neighbor[i] across edge (v[i], v[(i+1)%3])
  Eigen::Vector3d normal;       // outward, not normalized
  double offset = 0.0;          // plane equation: normal . x = offset
  std::vector<int> outside;
  bool alive = true;

  double dist(const Eigen::Vector3d& p) const { return normal.dot(p) - offset; }
};

class QuickHull {
 public:
  explicit QuickHull(const std::vector<Eigen::Vector3d>& pts) : pts_(pts) {}

  std::optional<ConvexHull> run() {
    if (pts_.size() < 4) return std::nullopt;
    compute_epsilon();
    if (!build_initial_simplex()) return std::nullopt;
    assign_points();

    // Each iteration removes at least one point from the outside sets, so the
    // loop is bounded; the cap is a guard against epsilon pathologies.
    std::size_t max_iter = 16 * pts_.size() + 64;
    for (std::size_t iter = 0; iter < max_iter; ++iter) {
      int f = face_with_outside();
      if (f < 0) break;
      expand(f);
    }

    ConvexHull hull;
    for (const Face& f : faces_) {
      if (f.alive) hull.faces.push_back(f.v);
    }
    return hull;
  }

 private:
  void compute_epsilon() {
    Eigen::Vector3d lo = pts_[0], hi = pts_[0];
    for (const auto& p : pts_) {
      lo = lo.cwiseMin(p);
      hi = hi.cwiseMax(p);
    }
    double extent = (hi - lo).maxCoeff();
    eps_ = std::max(1e-12, extent * 1e-10);
  }

  void add_face(int a, int b, int c) {
    Face f;
    f.v = {a, b, c};
    f.neighbor = {-1, -1, -1};
    f.normal = (pts_[b] - pts_[a]).cross(pts_[c] - pts_[a]);
    f.offset = f.normal.dot(pts_[a]);
    faces_.push_back(std::move(f));
  }

  bool build_initial_simplex() {
    // Most distant pair among the axis extremes.
    int ext[6];
    for (int axis = 0; axis < 3; ++axis) {
      int lo = 0, hi = 0;
      for (int i = 1; i < static_cast<int>(pts_.size()); ++i) {
        if (pts_[i][axis] < pts_[lo][axis]) lo = i;
        if (pts_[i][axis] > pts_[hi][axis]) hi = i;
      }
      ext[2 * axis] = lo;
      ext[2 * axis + 1] = hi;
    }
    int a = 0, b = 0;
    double best = -1.0;
    for (int i = 0; i < 6; ++i) {
      for (int j = i + 1; j < 6; ++j) {
        double d = (pts_[ext[i]] - pts_[ext[j]]).squaredNorm();
        if (d > best) {
          best = d;
          a = ext[i];
          b = ext[j];
        }
      }
    }
    if (std::sqrt(best) <= eps_) return false;

    // Farthest point from the line (a, b).
    Eigen::Vector3d ab = pts_[b] - pts_[a];
    int c = -1;
    best = eps_;
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      double d = ab.cross(pts_[i] - pts_[a]).norm() / ab.norm();
      if (d > best) {
        best = d;
        c = i;
      }
    }
    if (c < 0) return false;

    // Farthest point from the plane (a, b, c).
    Eigen::Vector3d n = ab.cross(pts_[c] - pts_[a]).normalized();
    double plane_off = n.dot(pts_[a]);
    int d = -1;
    best = eps_;
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      double dist = std::abs(n.dot(pts_[i]) - plane_off);
      if (dist > best) {
        best = dist;
        d = i;
      }
    }
    if (d < 0) return false;

    if (n.dot(pts_[d]) - plane_off > 0.0) std::swap(b, c);  // put d below (a,b,c)

    add_face(a, b, c);
    add_face(d, b, a);
    add_face(d, c, b);
    add_face(d, a, c);
    wire_neighbors_exhaustive();
    return true;
  }

  // O(faces^2) wiring; only used for the 4-face initial simplex.
  void wire_neighbors_exhaustive() {
    std::map<std::pair<int, int>, std::pair<int, int>> edge_to_face;
    for (int fi = 0; fi < static_cast<int>(faces_.size()); ++fi) {
      for (int e = 0; e < 3; ++e) {
        int u = faces_[fi].v[e];
        int v = faces_[fi].v[(e + 1) % 3];
        edge_to_face[{u, v}] = {fi, e};
      }
    }
    for (auto& [edge, fe] : edge_to_face) {
      auto rev = edge_to_face.find({edge.second, edge.first});
      faces_[fe.first].neighbor[fe.second] = rev->second.first;
    }
  }

  void assign_points() {
    for (int i = 0; i < static_cast<int>(pts_.size()); ++i) {
      for (Face& f : faces_) {
        if (f.dist(pts_[i]) > eps_) {
          f.outside.push_back(i);
          break;
        }
      }
    }
  }

  int face_with_outside() const {
    for (int i = 0; i < static_cast<int>(faces_.size()); ++i) {
      if (faces_[i].alive && !faces_[i].outside.empty()) return i;
    }
    return -1;
  }

  void expand(int start_face) {
    // Apex: farthest outside point of the chosen face.
    const Face& sf = faces_[start_face];
    int apex = sf.outside[0];
    double best = sf.dist(pts_[apex]);
    for (int p : sf.outside) {
      double d = sf.dist(pts_[p]);
      if (d > best) {
        best = d;
        apex = p;
      }
    }
    const Eigen::Vector3d& ap = pts_[apex];

    // Flood fill of faces visible from the apex.
    std::vector<int> visible{start_face};
    std::vector<char> seen(faces_.size(), 0);
    seen[start_face] = 1;
    for (std::size_t qi = 0; qi < visible.size(); ++qi) {
      const Face& f = faces_[visible[qi]];
      for (int nb : f.neighbor) {
        if (!seen[nb] && faces_[nb].alive && faces_[nb].dist(ap) > eps_) {
          seen[nb] = 1;
          visible.push_back(nb);
        }
      }
    }

    // Horizon: directed edges (u, v) of visible faces whose neighbor survives.
    struct HorizonEdge {
      int u, v, outer_face, outer_slot;
    };
    std::vector<HorizonEdge> horizon;
    for (int fi : visible) {
      const Face& f = faces_[fi];
      for (int e = 0; e < 3; ++e) {
        int nb = f.neighbor[e];
        if (seen[nb]) continue;
        // Locate the reverse edge's slot in the surviving neighbor.
        int u = f.v[e], v = f.v[(e + 1) % 3];
        int slot = -1;
        for (int k = 0; k < 3; ++k) {
          if (faces_[nb].v[k] == v && faces_[nb].v[(k + 1) % 3] == u) slot = k;
        }
        horizon.push_back({u, v, nb, slot});
      }
    }

    // Order the horizon edges into a loop.
    for (std::size_t i = 0; i + 1 < horizon.size(); ++i) {
      for (std::size_t j = i + 1; j < horizon.size(); ++j) {
        if (horizon[j].u == horizon[i].v) {
          std::swap(horizon[i + 1], horizon[j]);
          break;
        }
      }
    }

    // Collect the points that need re-homing, retire the visible faces.
    std::vector<int> orphans;
    for (int fi : visible) {
      Face& f = faces_[fi];
      for (int p : f.outside) {
        if (p != apex) orphans.push_back(p);
      }
      f.outside.clear();
      f.alive = false;
    }

    // Cone of new faces over the horizon loop.
    int first_new = static_cast<int>(faces_.size());
    int count = static_cast<int>(horizon.size());
    for (int i = 0; i < count; ++i) {
      const HorizonEdge& he = horizon[i];
      add_face(he.u, he.v, apex);
      Face& nf = faces_.back();
      int self = first_new + i;
      nf.neighbor[0] = he.outer_face;                       // across (u, v)
      nf.neighbor[1] = first_new + (i + 1) % count;         // across (v, apex)
      nf.neighbor[2] = first_new + (i + count - 1) % count; // across (apex, u)
      faces_[he.outer_face].neighbor[he.outer_slot] = self;
    }

    for (int p : orphans) {
      for (int i = 0; i < count; ++i) {
        Face& nf = faces_[first_new + i];
        if (nf.dist(pts_[p]) > eps_) {
          nf.outside.push_back(p);
          break;
        }
      }
    }
  }

  const std::vector<Eigen::Vector3d>& pts_;
  std::vector<Face> faces_;
  double eps_ = 1e-12;
};

}  // namespace

double ConvexHull::volume(const std::vector<Eigen::Vector3d>& points) const {
  if (faces.empty()) return 0.0;
  Eigen::Vector3d ref = Eigen::Vector3d::Zero();
  for (const auto& f : faces) ref += points[f[0]];
  ref /= static_cast<double>(faces.size());
  double six_vol = 0.0;
  for (const auto& f : faces) {
    Eigen::Vector3d a = points[f[0]] - ref;
    Eigen::Vector3d b = points[f[1]] - ref;
    Eigen::Vector3d c = points[f[2]] - ref;
    six_vol += a.dot(b.cross(c));
  }
  return six_vol / 6.0;
}

std::optional<ConvexHull> convex_hull(const std::vector<Eigen::Vector3d>& points) {
  return QuickHull(points).run();
}

double convex_hull_volume(const std::vector<Eigen::Vector3d>& points) {
  auto hull = convex_hull(points);
  return hull ? hull->volume(points) : 0.0;
}

}  // namespace releval
