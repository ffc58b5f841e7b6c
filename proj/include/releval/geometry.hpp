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

#include <cmath>
#include <optional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace releval {

/// Pinhole camera intrinsics. The continuous image coordinate of the center
/// of pixel (i, j) is (i + 0.5, j + 0.5); projection and rasterization share
/// this convention so that rendered depth maps reproject onto pixel centers.
struct Intrinsics {
  int width = 0;
  int height = 0;
  double fx = 0.0;
  double fy = 0.0;
  double cx = 0.0;
  double cy = 0.0;

  bool valid() const { return width >= 1 && height >= 1 && fx > 0.0 && fy > 0.0; }

  double diagonal() const {
    return std::sqrt(static_cast<double>(width) * width +
                     static_cast<double>(height) * height);
  }

  /// Intrinsics of the same camera rendered at `factor` times the resolution.
  Intrinsics scaled(int factor) const {
    Intrinsics k = *this;
    k.width *= factor;
    k.height *= factor;
    k.fx *= factor;
    k.fy *= factor;
    k.cx *= factor;
    k.cy *= factor;
    return k;
  }

  bool operator==(const Intrinsics&) const = default;
};

/// Rigid camera-to-model transform: X_model = R * X_camera + t.
class Pose {
 public:
  Pose() : rotation_(Eigen::Matrix3d::Identity()), translation_(Eigen::Vector3d::Zero()) {}
  Pose(const Eigen::Matrix3d& rotation, const Eigen::Vector3d& translation)
      : rotation_(rotation), translation_(translation) {}

  static Pose identity() { return Pose(); }

  static Pose from_matrix(const Eigen::Matrix4d& m) {
    return Pose(m.topLeftCorner<3, 3>(), m.topRightCorner<3, 1>());
  }

  static Pose from_quaternion(const Eigen::Quaterniond& q, const Eigen::Vector3d& t) {
    return Pose(q.toRotationMatrix(), t);
  }

  const Eigen::Matrix3d& rotation() const { return rotation_; }
  const Eigen::Vector3d& translation() const { return translation_; }

  Eigen::Matrix4d matrix() const {
    Eigen::Matrix4d m = Eigen::Matrix4d::Identity();
    m.topLeftCorner<3, 3>() = rotation_;
    m.topRightCorner<3, 1>() = translation_;
    return m;
  }

  Pose inverse() const {
    Eigen::Matrix3d rt = rotation_.transpose();
    return Pose(rt, -(rt * translation_));
  }

  Pose operator*(const Pose& other) const {
    return Pose(rotation_ * other.rotation_,
                rotation_ * other.translation_ + translation_);
  }

  /// Transforms a point.
  Eigen::Vector3d operator*(const Eigen::Vector3d& p) const {
    return rotation_ * p + translation_;
  }

  /// Max deviation of R^T R from identity, in absolute terms per entry.
  double orthonormality_error() const {
    return (rotation_.transpose() * rotation_ - Eigen::Matrix3d::Identity())
        .cwiseAbs()
        .maxCoeff();
  }

  bool is_rigid(double tol = 1e-9) const {
    return orthonormality_error() <= tol &&
           std::abs(rotation_.determinant() - 1.0) <= tol;
  }

  /// Nearest rotation via quaternion renormalization; translation unchanged.
  Pose orthonormalized() const {
    Eigen::Quaterniond q(rotation_);
    q.normalize();
    return Pose(q.toRotationMatrix(), translation_);
  }

 private:
  Eigen::Matrix3d rotation_;
  Eigen::Vector3d translation_;
};

/// Projects a camera-space point to continuous image coordinates.
/// Returns nullopt when the point does not lie strictly in front of the
/// camera (z <= 0).
inline std::optional<Eigen::Vector2d> project(const Eigen::Vector3d& p,
                                              const Intrinsics& k) {
  if (!(p.z() > 0.0)) return std::nullopt;
  return Eigen::Vector2d(k.fx * p.x() / p.z() + k.cx, k.fy * p.y() / p.z() + k.cy);
}

/// Back-projects a continuous image coordinate at the given depth (camera-space
/// z, meters) to a camera-space point. Returns nullopt for depth <= 0, the
/// invalid-pixel signal.
inline std::optional<Eigen::Vector3d> backproject(const Eigen::Vector2d& uv,
                                                  double depth,
                                                  const Intrinsics& k) {
  if (!(depth > 0.0)) return std::nullopt;
  return Eigen::Vector3d((uv.x() - k.cx) / k.fx * depth,
                         (uv.y() - k.cy) / k.fy * depth, depth);
}

/// Absolute orientation difference in degrees, in [0, 180]. Uses the absolute
/// quaternion dot product inside the arccos, which makes the two antipodal
/// quaternion representations of a rotation compare equal.
double angular_error_deg(const Eigen::Matrix3d& r1, const Eigen::Matrix3d& r2);

/// Euclidean distance between the two translations, meters.
inline double translation_error_m(const Pose& p1, const Pose& p2) {
  return (p1.translation() - p2.translation()).norm();
}

/// Unit dual quaternion encoding a rigid transform: real part is the rotation
/// quaternion, dual part encodes translation as 0.5 * (0, t) * real.
struct DualQuaternion {
  Eigen::Quaterniond real;
  Eigen::Quaterniond dual;

  static DualQuaternion from_pose(const Pose& pose);
  Pose to_pose() const;

  /// Rescales so the real part is unit and the dual part is orthogonal to it.
  DualQuaternion normalized() const;
};

/// Dual-quaternion linear blending of rigid poses. Each dual quaternion is
/// sign-flipped to a nonnegative real-part dot product with the first before
/// the weighted sum, so the result does not depend on the quaternion sign of
/// any input. Weights must be nonnegative and not all zero; they are
/// normalized internally. Throws std::invalid_argument on empty input or bad
/// weights.
Pose dlb_blend(const std::vector<Pose>& poses, const std::vector<double>& weights);

}  // namespace releval
