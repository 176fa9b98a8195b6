#pragma once

#include <cmath>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

#include <Eigen/Core>
#include <Eigen/Geometry>

namespace artic {

using Vec2 = Eigen::Vector2d;
using Vec3 = Eigen::Vector3d;
using Mat3 = Eigen::Matrix3d;

/// Raised when an input sits on a singular configuration (parallel ray and
/// plane, coincident endpoints, zero vector, ...).
class DegenerateError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline constexpr double kPi = 3.14159265358979323846;
inline constexpr double kDegenerateEps = 1e-9;

inline double deg2rad(double deg) { return deg * kPi / 180.0; }
inline double rad2deg(double rad) { return rad * 180.0 / kPi; }

enum class ArticulationType { rotation, translation };

std::string to_string(ArticulationType type);
ArticulationType articulation_type_from_string(const std::string& name);

// Pinhole intrinsics. Camera frame is +x right, +y down, +z forward; pixel
// origin is the top-left image corner.
struct CameraIntrinsics {
  double fx = 577.87;
  double fy = 577.87;
  double cx = 319.5;
  double cy = 239.5;
  int width = 640;
  int height = 480;

  void validate() const;
  bool operator==(const CameraIntrinsics&) const = default;
};

/// ScanNet's default color intrinsics at 640x480, scaled to `width` x `height`.
CameraIntrinsics default_intrinsics(int width = 640, int height = 480);

/// Plane n.x = o. Canonical form has unit n and o >= 0.
struct Plane {
  Vec3 normal{0.0, 0.0, 1.0};
  double offset = 0.0;

  Plane canonical() const;
  double signed_distance(const Vec3& x) const { return normal.dot(x) - offset; }
  static Plane through(const Vec3& point, const Vec3& normal);
};

/// Image line x cos(theta) + y sin(theta) = p. theta is kept in [0, pi); p is
/// signed, so every image line has exactly one representative.
struct ProjectedAxis {
  double theta = 0.0;
  double p = 0.0;

  ProjectedAxis canonical() const;
  Vec2 normal() const { return {std::cos(theta), std::sin(theta)}; }
  Vec2 direction() const { return {-std::sin(theta), std::cos(theta)}; }
  double residual(const Vec2& px) const { return px.dot(normal()) - p; }
};

struct Axis3D {
  ArticulationType kind = ArticulationType::rotation;
  Vec3 point = Vec3::Zero();
  Vec3 direction{0.0, 1.0, 0.0};

  double distance_to(const Vec3& x) const;
};

struct RigidTransform {
  Mat3 rotation = Mat3::Identity();
  Vec3 translation = Vec3::Zero();

  Vec3 apply(const Vec3& x) const { return rotation * x + translation; }
  Vec3 apply_direction(const Vec3& d) const { return rotation * d; }
  RigidTransform then(const RigidTransform& next) const;
  static RigidTransform identity() { return {}; }
};

// Angle-doubling code for a 180-degree-ambiguous line angle.
Vec2 encode_axis_angle(double theta);
double decode_axis_angle(const Vec2& code);

ProjectedAxis axis_from_endpoints(const Vec2& p1, const Vec2& p2);

/// Intersects the viewing ray through `pixel` with `plane`.
Vec3 backproject_to_plane(const CameraIntrinsics& K, const Vec2& pixel, const Plane& plane);

/// Intersects the back-projection plane of the image line with `plane`.
Axis3D lift_rotation_axis(const CameraIntrinsics& K, const ProjectedAxis& axis, const Plane& plane);

/// Translation direction candidates: [0] lies in the plane along the image
/// line through `anchor`, [1] is the plane normal.
std::vector<Vec3> lift_translation_axis(const CameraIntrinsics& K, const ProjectedAxis& axis,
                                        const Plane& plane, const Vec2& anchor);

RigidTransform rotation_transform(const Axis3D& axis, double alpha);
RigidTransform translation_transform(const Vec3& direction, double alpha);
/// Dispatches on axis.kind; alpha is radians for rotation, meters for translation.
RigidTransform articulation_transform(const Axis3D& axis, double alpha);

struct ProjectedPoint {
  Vec2 pixel = Vec2::Zero();
  bool valid = false;  // false when depth <= 1e-9
};

Vec2 project_point(const CameraIntrinsics& K, const Vec3& x);
std::vector<ProjectedPoint> project_points(const CameraIntrinsics& K, std::span<const Vec3> points);

/// Projected line of a 3D axis. Translation axes get p = 0.
ProjectedAxis project_axis3d(const CameraIntrinsics& K, const Axis3D& axis);

/// Unit vector `v` rotated by `angle` about unit `about`.
Vec3 rotate_about(const Vec3& v, const Vec3& about, double angle);

}  // namespace artic
