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

#include "releval/renderer.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace releval {
namespace {

constexpr double kDepthTie = 1e-9;

// A triangle vertex during clipping: camera-space position plus its
// barycentric coordinates with respect to the *original* triangle, so
// attribute interpolation is unaffected by near-plane clipping.
struct ClipVertex {
  Eigen::Vector3d pos;
  Eigen::Vector3d bary;
};

// Clips the triangle against z >= near. Writes up to 4 vertices.
int clip_near(const ClipVertex in[3], double near, ClipVertex out[4]) {
  int n = 0;
  for (int i = 0; i < 3; ++i) {
    const ClipVertex& cur = in[i];
    const ClipVertex& nxt = in[(i + 1) % 3];
    bool cur_in = cur.pos.z() >= near;
    bool nxt_in = nxt.pos.z() >= near;
    if (cur_in) out[n++] = cur;
    if (cur_in != nxt_in) {
      double t = (near - cur.pos.z()) / (nxt.pos.z() - cur.pos.z());
      ClipVertex v;
      v.pos = cur.pos + t * (nxt.pos - cur.pos);
      v.pos.z() = near;  // exact, avoids re-clipping drift
      v.bary = cur.bary + t * (nxt.bary - cur.bary);
      out[n++] = v;
    }
  }
  return n;
}

// On-edge pixels belong to the triangle only along top edges (horizontal,
// going right) and left edges (going up), so triangles sharing an edge never
// both claim a pixel. Orientation: y down, positive doubled area.
inline bool edge_is_top_left(double dx, double dy) {
  return (dy == 0.0 && dx > 0.0) || dy < 0.0;
}

struct ScreenVertex {
  double x, y;
  double inv_z;
  Eigen::Vector3d bary;  // original-triangle barycentric
};

struct Framebuffers {
  DepthMap* depth;
  ColorImage* color;
  LabelImage* labels;
  std::vector<double>* zbuf;
};

void raster_triangle(const ScreenVertex sv[3], const Eigen::Vector3d orig_colors[3],
                     const std::uint16_t orig_labels[3], bool with_attributes,
                     const Framebuffers& fb, int w, int h) {
  ScreenVertex a = sv[0], b = sv[1], c = sv[2];
  double area2 = (b.x - a.x) * (c.y - a.y) - (b.y - a.y) * (c.x - a.x);
  if (area2 == 0.0) return;  // degenerate in screen space
  if (area2 < 0.0) {         // double-sided: reorient instead of culling
    std::swap(b, c);
    area2 = -area2;
  }

  double min_x = std::min({a.x, b.x, c.x});
  double max_x = std::max({a.x, b.x, c.x});
  double min_y = std::min({a.y, b.y, c.y});
  double max_y = std::max({a.y, b.y, c.y});
  int x0 = std::max(0, static_cast<int>(std::ceil(min_x - 0.5)));
  int x1 = std::min(w - 1, static_cast<int>(std::floor(max_x - 0.5)));
  int y0 = std::max(0, static_cast<int>(std::ceil(min_y - 0.5)));
  int y1 = std::min(h - 1, static_cast<int>(std::floor(max_y - 0.5)));
  if (x0 > x1 || y0 > y1) return;

  // Edge k is opposite vertex k; E_k >= 0 inside for the CCW orientation.
  struct EdgeFn {
    double ax, ay, dx, dy;
    bool top_left;
    double eval(double px, double py) const {
      return dx * (py - ay) - dy * (px - ax);
    }
  };
  EdgeFn edges[3] = {
      {b.x, b.y, c.x - b.x, c.y - b.y, edge_is_top_left(c.x - b.x, c.y - b.y)},
      {c.x, c.y, a.x - c.x, a.y - c.y, edge_is_top_left(a.x - c.x, a.y - c.y)},
      {a.x, a.y, b.x - a.x, b.y - a.y, edge_is_top_left(b.x - a.x, b.y - a.y)},
  };

  double inv_area = 1.0 / area2;
  for (int py = y0; py <= y1; ++py) {
    double cy = py + 0.5;
    for (int px = x0; px <= x1; ++px) {
      double cx = px + 0.5;
      double e0 = edges[0].eval(cx, cy);
      double e1 = edges[1].eval(cx, cy);
      double e2 = edges[2].eval(cx, cy);
      bool in0 = e0 > 0.0 || (e0 == 0.0 && edges[0].top_left);
      bool in1 = e1 > 0.0 || (e1 == 0.0 && edges[1].top_left);
      bool in2 = e2 > 0.0 || (e2 == 0.0 && edges[2].top_left);
      if (!(in0 && in1 && in2)) continue;

      double l0 = e0 * inv_area;
      double l1 = e1 * inv_area;
      double l2 = e2 * inv_area;
      double inv_z = l0 * a.inv_z + l1 * b.inv_z + l2 * c.inv_z;
      if (!(inv_z > 0.0)) continue;
      double z = 1.0 / inv_z;

      double& zref = (*fb.zbuf)[static_cast<size_t>(py) * w + px];
      // Ties within kDepthTie keep the earlier triangle (lower index).
      if (z >= zref - kDepthTie) continue;
      zref = z;
      fb.depth->at(px, py) = z;

      if (!with_attributes) continue;

      // Perspective-correct barycentric of the original triangle.
      Eigen::Vector3d bw = (l0 * a.inv_z) * a.bary + (l1 * b.inv_z) * b.bary +
                           (l2 * c.inv_z) * c.bary;
      bw *= z;

      Eigen::Vector3d col = bw.x() * orig_colors[0] + bw.y() * orig_colors[1] +
                            bw.z() * orig_colors[2];
      auto to_u8 = [](double v) {
        return static_cast<std::uint8_t>(std::clamp(std::lround(v), 0l, 255l));
      };
      fb.color->at(px, py) = {to_u8(col.x()), to_u8(col.y()), to_u8(col.z())};

      int best = 0;
      if (bw.y() > bw.x()) best = 1;
      if (bw.z() > bw[best]) best = 2;
      fb.labels->at(px, py) = orig_labels[best];
    }
  }
}

void rasterize(const SceneModel& model, const Pose& pose, const Intrinsics& k_native,
               const RenderOptions& options, bool with_attributes, DepthMap& depth,
               ColorImage* color, LabelImage* labels) {
  Intrinsics k = options.supersample > 1 ? k_native.scaled(options.supersample)
                                         : k_native;
  const int w = k.width, h = k.height;
  depth = DepthMap(w, h, 0.0);
  if (with_attributes) {
    *color = ColorImage(w, h);
    *labels = LabelImage(w, h, 0);
  }
  if (model.empty()) return;

  std::vector<double> zbuf(static_cast<size_t>(w) * h,
                           std::numeric_limits<double>::infinity());
  Framebuffers fb{&depth, color, labels, &zbuf};

  const Pose model_to_cam = pose.inverse();
  std::vector<Eigen::Vector3d> cam(model.vertices.size());
  for (std::size_t i = 0; i < model.vertices.size(); ++i)
    cam[i] = model_to_cam * model.vertices[i];

  static const Eigen::Vector3d kBasis[3] = {
      {1.0, 0.0, 0.0}, {0.0, 1.0, 0.0}, {0.0, 0.0, 1.0}};

  for (const auto& tri : model.triangles) {
    const Eigen::Vector3d* v[3] = {&cam[tri[0]], &cam[tri[1]], &cam[tri[2]]};
    if (v[0]->z() < options.near_clip && v[1]->z() < options.near_clip &&
        v[2]->z() < options.near_clip)
      continue;

    Eigen::Vector3d orig_colors[3];
    std::uint16_t orig_labels[3] = {0, 0, 0};
    if (with_attributes) {
      for (int i = 0; i < 3; ++i) {
        const Rgb8& c = model.colors[tri[i]];
        orig_colors[i] = Eigen::Vector3d(c.r, c.g, c.b);
        orig_labels[i] = model.labels[tri[i]];
      }
    }

    ClipVertex in[3] = {{*v[0], kBasis[0]}, {*v[1], kBasis[1]}, {*v[2], kBasis[2]}};
    ClipVertex poly[4];
    int n = clip_near(in, options.near_clip, poly);
    if (n < 3) continue;

    ScreenVertex sv[4];
    for (int i = 0; i < n; ++i) {
      double z = poly[i].pos.z();
      sv[i].x = k.fx * poly[i].pos.x() / z + k.cx;
      sv[i].y = k.fy * poly[i].pos.y() / z + k.cy;
      sv[i].inv_z = 1.0 / z;
      sv[i].bary = poly[i].bary;
    }
    for (int i = 2; i < n; ++i) {  // fan triangulation of the clipped polygon
      ScreenVertex tri_sv[3] = {sv[0], sv[i - 1], sv[i]};
      raster_triangle(tri_sv, orig_colors, orig_labels, with_attributes, fb, w, h);
    }
  }
}

}  // namespace

RenderedViews render(const SceneModel& model, const Pose& pose, const Intrinsics& k,
                     const RenderOptions& options) {
  RenderedViews views;
  views.pose = pose;
  views.intrinsics = options.supersample > 1 ? k.scaled(options.supersample) : k;
  rasterize(model, pose, k, options, true, views.depth, &views.color, &views.labels);
  return views;
}

DepthMap render_depth(const SceneModel& model, const Pose& pose, const Intrinsics& k,
                      const RenderOptions& options) {
  DepthMap depth;
  rasterize(model, pose, k, options, false, depth, nullptr, nullptr);
  return depth;
}

}  // namespace releval
