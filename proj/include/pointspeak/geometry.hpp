#pragma once

#include <numbers>
#include <stdexcept>
#include <string>

namespace pointspeak {

inline constexpr double kPi = std::numbers::pi;

struct Vec3 {
  double x = 0.0;
  double y = 0.0;
  double z = 0.0;

  friend bool operator==(const Vec3&, const Vec3&) = default;
};

Vec3 operator+(const Vec3& a, const Vec3& b);
Vec3 operator-(const Vec3& a, const Vec3& b);
Vec3 operator*(const Vec3& v, double s);

bool is_finite(const Vec3& v);

// Euclidean distance in the floor plane; z is ignored.
double planar_distance(const Vec3& a, const Vec3& b);

// Thrown when a rotation is used in a frame or role it does not belong to,
// e.g. a tilted quaternion handed to a yaw-only consumer.
class FrameMisuseError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Unit quaternion. Every constructor leaves the norm within 1e-9 of 1.
class Quat {
 public:
  Quat() = default;  // identity

  // Normalizes (x, y, z, w). Components already within 1e-9 of unit norm are
  // kept verbatim so that values read back from disk stay bit-identical.
  static Quat from_components(double x, double y, double z, double w);

  double x() const { return x_; }
  double y() const { return y_; }
  double z() const { return z_; }
  double w() const { return w_; }

  double norm() const;
  bool is_yaw_only(double tol = 1e-6) const;

  Quat conjugate() const;
  Vec3 rotate(const Vec3& v) const;

  friend Quat operator*(const Quat& a, const Quat& b);
  friend bool operator==(const Quat&, const Quat&) = default;

 private:
  Quat(double x, double y, double z, double w) : x_(x), y_(y), z_(z), w_(w) {}

  double x_ = 0.0;
  double y_ = 0.0;
  double z_ = 0.0;
  double w_ = 1.0;
};

struct Pose {
  Vec3 position;
  Quat rotation;

  friend bool operator==(const Pose&, const Pose&) = default;
};

enum class FrameId { World, Map };

std::string to_string(FrameId frame);

// world_from_map: maps Map-frame coordinates into the World (anchor) frame.
struct AnchorTransform {
  Vec3 translation;
  Quat rotation;

  static AnchorTransform identity() { return {}; }
  AnchorTransform inverse() const;
};

// Wraps an angle to (-pi, pi].
double wrap_angle(double radians);

Quat yaw_to_quat(double yaw);

// Throws FrameMisuseError when q has roll or pitch components above 1e-6.
double quat_to_yaw(const Quat& q);

Pose make_pose(const Vec3& position, double yaw);

Pose transform_pose(const Pose& pose, FrameId from, FrameId to, const AnchorTransform& anchor);

}  // namespace pointspeak
