#include "grasp/geometry.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace grasp {

Mat3 so3_hat(const Vec3& r) {
  Mat3 m;
  m << 0.0, -r.z(), r.y(),
       r.z(), 0.0, -r.x(),
      -r.y(), r.x(), 0.0;
  return m;
}

RotationMatrix so3_exp(const AxisAngle& r) {
  const double theta2 = r.squaredNorm();
  const Mat3 k = so3_hat(r);
  double a;  // sin(theta) / theta
  double b;  // (1 - cos(theta)) / theta^2
  if (theta2 < 1e-10) {
    a = 1.0 - theta2 / 6.0;
    b = 0.5 - theta2 / 24.0;
  } else {
    const double theta = std::sqrt(theta2);
    a = std::sin(theta) / theta;
    b = (1.0 - std::cos(theta)) / theta2;
  }
  return Mat3::Identity() + a * k + b * k * k;
}

AxisAngle so3_log(const RotationMatrix& rotation) {
  const double cos_theta = std::clamp((rotation.trace() - 1.0) * 0.5, -1.0, 1.0);
  const double theta = std::acos(cos_theta);
  const Vec3 vee{rotation(2, 1) - rotation(1, 2), rotation(0, 2) - rotation(2, 0),
                 rotation(1, 0) - rotation(0, 1)};
  if (theta < 1e-6) {
    // sin(theta)/theta -> 1
    return 0.5 * (1.0 + theta * theta / 6.0) * vee;
  }
  if (std::numbers::pi - theta > 1e-4) {
    return theta / (2.0 * std::sin(theta)) * vee;
  }
  // Near pi the antisymmetric part vanishes; recover the axis from R + I.
  const Mat3 s = 0.5 * (rotation + Mat3::Identity());
  int col = 0;
  s.diagonal().maxCoeff(&col);
  Vec3 axis = s.col(col) / std::sqrt(std::max(s(col, col), 1e-300));
  if (axis.dot(vee) < 0.0) axis = -axis;
  return theta * axis.normalized();
}

bool is_rotation(const Mat3& m, double tol) {
  if (!m.allFinite()) return false;
  if (((m.transpose() * m) - Mat3::Identity()).cwiseAbs().maxCoeff() > tol) return false;
  return std::abs(m.determinant() - 1.0) <= tol;
}

RotationMatrix axis_rotation(const Vec3& axis, double angle) {
  return so3_exp(axis.normalized() * angle);
}

RotationMatrix rpy_rotation(double roll, double pitch, double yaw) {
  return axis_rotation(Vec3::UnitZ(), yaw) * axis_rotation(Vec3::UnitY(), pitch) *
         axis_rotation(Vec3::UnitX(), roll);
}

bool RigidTransform::is_approx(const RigidTransform& other, double tol) const {
  return (rotation_ - other.rotation_).cwiseAbs().maxCoeff() <= tol &&
         (translation_ - other.translation_).cwiseAbs().maxCoeff() <= tol;
}

Vec3 mean_of(std::span<const Vec3> points) {
  Vec3 sum = Vec3::Zero();
  for (const auto& p : points) sum += p;
  return points.empty() ? sum : Vec3(sum / static_cast<double>(points.size()));
}

SurfacePointCloud::SurfacePointCloud(std::vector<Vec3> points, std::vector<Vec3> normals)
    : points_(std::move(points)), normals_(std::move(normals)) {
  if (points_.size() != normals_.size()) {
    throw std::invalid_argument("point cloud: points and normals differ in count");
  }
  for (auto& n : normals_) {
    const double len = n.norm();
    if (!(len > 1e-12) || !std::isfinite(len)) {
      throw std::invalid_argument("point cloud: zero or non-finite normal");
    }
    // Already-unit normals are kept bit-for-bit so save/load round trips exactly.
    if (std::abs(len - 1.0) > 4.0 * std::numeric_limits<double>::epsilon()) n /= len;
  }
  center_of_mass_ = mean_of(points_);
}

SurfacePointCloud::SurfacePointCloud(std::vector<Vec3> points, std::vector<Vec3> normals,
                                     const Vec3& center_of_mass)
    : SurfacePointCloud(std::move(points), std::move(normals)) {
  center_of_mass_ = center_of_mass;
}

SurfacePointCloud SurfacePointCloud::transformed(const RigidTransform& tf) const {
  SurfacePointCloud out;
  out.points_.reserve(points_.size());
  out.normals_.reserve(normals_.size());
  for (const auto& p : points_) out.points_.push_back(tf.apply(p));
  for (const auto& n : normals_) out.normals_.push_back(tf.rotate(n));
  out.center_of_mass_ = tf.apply(center_of_mass_);
  return out;
}

bool SurfacePointCloud::operator==(const SurfacePointCloud& other) const {
  return points_ == other.points_ && normals_ == other.normals_ &&
         center_of_mass_ == other.center_of_mass_;
}

OrientedBoundingBox::OrientedBoundingBox(const RigidTransform& frame, const Vec3& half_extents)
    : frame_(frame), half_extents_(half_extents) {
  if (!(half_extents.array() > 0.0).all()) {
    throw std::invalid_argument("bounding box: half extents must be positive");
  }
}

Vec3 OrientedBoundingBox::to_local(const Vec3& p) const {
  return frame_.rotation().transpose() * (p - frame_.translation());
}

bool OrientedBoundingBox::contains(const Vec3& p, double margin) const {
  const Vec3 u = to_local(p);
  return std::abs(u.x()) <= half_extents_.x() + margin &&
         std::abs(u.y()) <= half_extents_.y() + margin &&
         std::abs(u.z()) <= half_extents_.z() + margin;
}

bool OrientedBoundingBox::operator==(const OrientedBoundingBox& other) const {
  return frame_.rotation() == other.frame_.rotation() &&
         frame_.translation() == other.frame_.translation() &&
         half_extents_ == other.half_extents_;
}

}  // namespace grasp
