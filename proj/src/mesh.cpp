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

#include "releval/mesh.hpp"

#include <cstring>

namespace releval {
namespace {

constexpr std::uint64_t kFnvOffset = 1469598103934665603ull;
constexpr std::uint64_t kFnvPrime = 1099511628211ull;

void fnv_accumulate(std::uint64_t& h, const void* bytes, std::size_t n) {
  const auto* p = static_cast<const unsigned char*>(bytes);
  for (std::size_t i = 0; i < n; ++i) {
    h ^= p[i];
    h *= kFnvPrime;
  }
}

}  // namespace

std::string SceneModel::consistency_error() const {
  if (colors.size() != vertices.size())
    return "color count (" + std::to_string(colors.size()) +
           ") does not match vertex count (" + std::to_string(vertices.size()) + ")";
  if (labels.size() != vertices.size())
    return "label count (" + std::to_string(labels.size()) +
           ") does not match vertex count (" + std::to_string(vertices.size()) + ")";
  const auto n = static_cast<std::int32_t>(vertices.size());
  for (std::size_t t = 0; t < triangles.size(); ++t) {
    for (int c = 0; c < 3; ++c) {
      std::int32_t idx = triangles[t][c];
      if (idx < 0 || idx >= n)
        return "triangle " + std::to_string(t) + " references vertex " +
               std::to_string(idx) + " out of range [0, " + std::to_string(n) + ")";
    }
  }
  return {};
}

std::uint64_t SceneModel::content_hash() const {
  std::uint64_t h = kFnvOffset;
  for (const auto& v : vertices) {
    double xyz[3] = {v.x(), v.y(), v.z()};
    fnv_accumulate(h, xyz, sizeof(xyz));
  }
  for (const auto& c : colors) fnv_accumulate(h, &c, sizeof(c));
  if (!labels.empty())
    fnv_accumulate(h, labels.data(), labels.size() * sizeof(labels[0]));
  if (!triangles.empty())
    fnv_accumulate(h, triangles.data(), triangles.size() * sizeof(triangles[0]));
  return h;
}

void transform_model(SceneModel& model, const Pose& transform) {
  for (auto& v : model.vertices) v = transform * v;
}

void transform_instance(SceneModel& model, std::uint16_t instance,
                        const Pose& transform) {
  for (std::size_t i = 0; i < model.vertices.size(); ++i) {
    if (model.labels[i] == instance) model.vertices[i] = transform * model.vertices[i];
  }
}

}  // namespace releval
