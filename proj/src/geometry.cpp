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

#include "releval/geometry.hpp"

#include <algorithm>
#include <stdexcept>

namespace releval {

double angular_error_deg(const Eigen::Matrix3d& r1, const Eigen::Matrix3d& r2) {
  Eigen::Quaterniond q1(r1);
  Eigen::Quaterniond q2(r2);
  // Clamp absorbs floating-point drift just above 1, which would yield NaN.
  double d = std::clamp(std::abs(q1.dot(q2)), 0.0, 1.0);
  return 2.0 * std::acos(d) * 180.0 / M_PI;
}

DualQuaternion DualQuaternion::from_pose(const Pose& pose) {
  DualQuaternion dq;
  dq.real = Eigen::Quaterniond(pose.rotation());
  const Eigen::Vector3d& t = pose.translation();
  Eigen::Quaterniond t_quat(0.0, t.x(), t.y(), t.z());
  Eigen::Quaterniond prod = t_quat * dq.real;
  dq.dual = Eigen::Quaterniond(0.5 * prod.w(), 0.5 * prod.x(), 0.5 * prod.y(),
                               0.5 * prod.z());
  return dq;
}

Pose DualQuaternion::to_pose() const {
  DualQuaternion n = normalized();
  Eigen::Quaterniond t_quat = n.dual * n.real.conjugate();
  Eigen::Vector3d t(2.0 * t_quat.x(), 2.0 * t_quat.y(), 2.0 * t_quat.z());
  return Pose(n.real.toRotationMatrix(), t);
}

DualQuaternion DualQuaternion::normalized() const {
  double n = real.norm();
  if (n <= 0.0) throw std::invalid_argument("dual quaternion has zero real part");
  double inv = 1.0 / n;
  // Unit-norm dual quaternion: real' = r/|r|, dual' = d/|r| - r * <r,d>/|r|^3.
  double rd = real.coeffs().dot(dual.coeffs());
  DualQuaternion out;
  out.real = Eigen::Quaterniond(real.coeffs() * inv);
  out.dual = Eigen::Quaterniond(dual.coeffs() * inv -
                                real.coeffs() * (rd * inv * inv * inv));
  return out;
}

Pose dlb_blend(const std::vector<Pose>& poses, const std::vector<double>& weights) {
  if (poses.empty()) throw std::invalid_argument("no poses to blend");
  if (weights.size() != poses.size())
    throw std::invalid_argument("dlb_blend: weight count does not match pose count");

  double total = 0.0;
  for (double w : weights) {
    if (w < 0.0) throw std::invalid_argument("dlb_blend: negative weight");
    total += w;
  }
  if (total <= 0.0) throw std::invalid_argument("dlb_blend: weights sum to zero");

  DualQuaternion first = DualQuaternion::from_pose(poses.front());
  Eigen::Vector4d real_sum = Eigen::Vector4d::Zero();
  Eigen::Vector4d dual_sum = Eigen::Vector4d::Zero();
  for (size_t i = 0; i < poses.size(); ++i) {
    DualQuaternion dq = DualQuaternion::from_pose(poses[i]);
    double sign = dq.real.coeffs().dot(first.real.coeffs()) < 0.0 ? -1.0 : 1.0;
    double w = sign * weights[i] / total;
    real_sum += w * dq.real.coeffs();
    dual_sum += w * dq.dual.coeffs();
  }

  DualQuaternion blended;
  blended.real = Eigen::Quaterniond(real_sum);
  blended.dual = Eigen::Quaterniond(dual_sum);
  return blended.to_pose();
}

}  // namespace releval
