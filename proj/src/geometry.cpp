#include "pointspeak/geometry.hpp"

#include <cmath>

namespace pointspeak {

Vec3 operator+(const Vec3& a, const Vec3& b) { return {a.x + b.x, a.y + b.y, a.z + b.z}; }
Vec3 operator-(const Vec3& a, const Vec3& b) { return {a.x - b.x, a.y - b.y, a.z - b.z}; }
Vec3 operator*(const Vec3& v, double s) { return {v.x * s, v.y * s, v.z * s}; }

bool is_finite(const Vec3& v) {
  return std::isfinite(v.x) && std::isfinite(v.y) && std::isfinite(v.z);
}

double planar_distance(const Vec3& a, const Vec3& b) { return std::hypot(a.x - b.x, a.y - b.y); }

Quat Quat::from_components(double x, double y, double z, double w) {
  if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z) || !std::isfinite(w)) {
    throw std::invalid_argument("quaternion components must be finite");
  }
  const double n = std::sqrt(x * x + y * y + z * z + w * w);
  if (n < 1e-12) {
    throw std::invalid_argument("quaternion must have non-zero norm");
  }
  if (std::abs(n - 1.0) <= 1e-9) {
    return Quat(x, y, z, w);
  }
  return Quat(x / n, y / n, z / n, w / n);
}

double Quat::norm() const { return std::sqrt(x_ * x_ + y_ * y_ + z_ * z_ + w_ * w_); }

bool Quat::is_yaw_only(double tol) const { return std::abs(x_) < tol && std::abs(y_) < tol; }

Quat Quat::conjugate() const { return Quat(-x_, -y_, -z_, w_); }

Quat operator*(const Quat& a, const Quat& b) {
  return Quat::from_components(a.w_ * b.x_ + a.x_ * b.w_ + a.y_ * b.z_ - a.z_ * b.y_,
                               a.w_ * b.y_ - a.x_ * b.z_ + a.y_ * b.w_ + a.z_ * b.x_,
                               a.w_ * b.z_ + a.x_ * b.y_ - a.y_ * b.x_ + a.z_ * b.w_,
                               a.w_ * b.w_ - a.x_ * b.x_ - a.y_ * b.y_ - a.z_ * b.z_);
}

Vec3 Quat::rotate(const Vec3& v) const {
  // v' = v + 2w(q x v) + 2 q x (q x v)
  const double tx = 2.0 * (y_ * v.z - z_ * v.y);
  const double ty = 2.0 * (z_ * v.x - x_ * v.z);
  const double tz = 2.0 * (x_ * v.y - y_ * v.x);
  return {v.x + w_ * tx + (y_ * tz - z_ * ty),
          v.y + w_ * ty + (z_ * tx - x_ * tz),
          v.z + w_ * tz + (x_ * ty - y_ * tx)};
}

std::string to_string(FrameId frame) { return frame == FrameId::World ? "World" : "Map"; }

AnchorTransform AnchorTransform::inverse() const {
  const Quat inv = rotation.conjugate();
  return {inv.rotate(translation) * -1.0, inv};
}

double wrap_angle(double radians) {
  double a = std::remainder(radians, 2.0 * kPi);
  if (a <= -kPi) a += 2.0 * kPi;
  return a;
}

Quat yaw_to_quat(double yaw) {
  if (!std::isfinite(yaw)) {
    throw std::invalid_argument("yaw must be finite");
  }
  return Quat::from_components(0.0, 0.0, std::sin(yaw / 2.0), std::cos(yaw / 2.0));
}

double quat_to_yaw(const Quat& q) {
  if (!q.is_yaw_only()) {
    throw FrameMisuseError("quaternion is not a pure yaw rotation");
  }
  return wrap_angle(2.0 * std::atan2(q.z(), q.w()));
}

Pose make_pose(const Vec3& position, double yaw) {
  if (!is_finite(position)) {
    throw std::invalid_argument("pose position must be finite");
  }
  return {position, yaw_to_quat(yaw)};
}

Pose transform_pose(const Pose& pose, FrameId from, FrameId to, const AnchorTransform& anchor) {
  if (from == to) {
    return pose;
  }
  const AnchorTransform t = (from == FrameId::Map) ? anchor : anchor.inverse();
  return {t.rotation.rotate(pose.position) + t.translation, t.rotation * pose.rotation};
}

}  // namespace pointspeak
