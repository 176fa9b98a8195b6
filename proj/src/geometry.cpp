#include "artic/geometry.hpp"

#include <cmath>

namespace artic {

std::string to_string(ArticulationType type) {
  return type == ArticulationType::rotation ? "rotation" : "translation";
}

ArticulationType articulation_type_from_string(const std::string& name) {
  if (name == "rotation") return ArticulationType::rotation;
  if (name == "translation") return ArticulationType::translation;
  throw std::invalid_argument("unknown articulation type '" + name + "'");
}

void CameraIntrinsics::validate() const {
  if (!(fx > 0.0) || !(fy > 0.0)) throw std::invalid_argument("focal lengths must be positive");
  if (!std::isfinite(cx) || !std::isfinite(cy)) throw std::invalid_argument("principal point must be finite");
  if (width < 1 || height < 1) throw std::invalid_argument("image size must be at least 1x1");
}

CameraIntrinsics default_intrinsics(int width, int height) {
  const double sx = width / 640.0;
  const double sy = height / 480.0;
  return {577.87 * sx, 577.87 * sy, 319.5 * sx, 239.5 * sy, width, height};
}

Plane Plane::canonical() const {
  const double len = normal.norm();
  if (!(len > kDegenerateEps)) throw DegenerateError("plane normal has zero length");
  // Already-unit normals are kept bit-for-bit so canonical() is idempotent.
  Plane out = std::abs(len - 1.0) <= 1e-12 ? *this : Plane{normal / len, offset / len};
  if (out.offset < 0.0) {
    out.normal = -out.normal;
    out.offset = -out.offset;
  }
  return out;
}

Plane Plane::through(const Vec3& point, const Vec3& normal) {
  const Vec3 n = normal.normalized();
  return Plane{n, n.dot(point)}.canonical();
}

ProjectedAxis ProjectedAxis::canonical() const {
  double t = std::fmod(theta, 2.0 * kPi);
  if (t < 0.0) t += 2.0 * kPi;
  double q = p;
  if (t >= kPi) {
    t -= kPi;
    q = -q;
  }
  // fmod rounding can land exactly on pi
  if (t >= kPi) {
    t = 0.0;
    q = -q;
  }
  return {t, q};
}

double Axis3D::distance_to(const Vec3& x) const {
  return (x - point).cross(direction).norm();
}

RigidTransform RigidTransform::then(const RigidTransform& next) const {
  return {next.rotation * rotation, next.rotation * translation + next.translation};
}

Vec2 encode_axis_angle(double theta) {
  if (!std::isfinite(theta)) throw std::invalid_argument("axis angle must be finite");
  return {std::sin(2.0 * theta), std::cos(2.0 * theta)};
}

double decode_axis_angle(const Vec2& code) {
  if (!(code.norm() > kDegenerateEps)) throw DegenerateError("cannot decode a zero angle vector");
  double theta = 0.5 * std::atan2(code.x(), code.y());
  if (theta < 0.0) theta += kPi;
  if (theta >= kPi) theta -= kPi;
  return theta;
}

ProjectedAxis axis_from_endpoints(const Vec2& p1, const Vec2& p2) {
  const Vec2 d = p2 - p1;
  const double len = d.norm();
  if (!(len > 1e-6)) throw DegenerateError("axis endpoints coincide");
  const Vec2 n(-d.y() / len, d.x() / len);
  return ProjectedAxis{std::atan2(n.y(), n.x()), n.dot(p1)}.canonical();
}

Vec3 backproject_to_plane(const CameraIntrinsics& K, const Vec2& pixel, const Plane& plane) {
  const Vec3 ray = Vec3((pixel.x() - K.cx) / K.fx, (pixel.y() - K.cy) / K.fy, 1.0).normalized();
  const double denom = plane.normal.dot(ray);
  if (std::abs(denom) <= kDegenerateEps) throw DegenerateError("viewing ray is parallel to the plane");
  const double s = plane.offset / denom;
  if (!(s > 0.0)) throw DegenerateError("plane intersection lies behind the camera");
  return s * ray;
}

namespace {

// Normal of the plane through the camera center that contains every viewing
// ray of the image line.
Vec3 line_backprojection_normal(const CameraIntrinsics& K, const ProjectedAxis& axis) {
  const double c = std::cos(axis.theta);
  const double s = std::sin(axis.theta);
  return Vec3(K.fx * c, K.fy * s, K.cx * c + K.cy * s - axis.p);
}

}  // namespace

Axis3D lift_rotation_axis(const CameraIntrinsics& K, const ProjectedAxis& axis, const Plane& plane) {
  const Vec3 m = line_backprojection_normal(K, axis).normalized();
  const Vec3& n = plane.normal;
  const Vec3 dir = n.cross(m);
  const double det = dir.squaredNorm();  // |n|^2 |m|^2 - (n.m)^2 with unit n, m
  if (det <= 1e-12) throw DegenerateError("axis back-projection plane is parallel to the object plane");
  const double nm = n.dot(m);
  const Vec3 point = plane.offset * (n - nm * m) / det;
  return Axis3D{ArticulationType::rotation, point, dir.normalized()};
}

std::vector<Vec3> lift_translation_axis(const CameraIntrinsics& K, const ProjectedAxis& axis,
                                        const Plane& plane, const Vec2& anchor) {
  constexpr double kStep = 50.0;
  const Vec3 a = backproject_to_plane(K, anchor, plane);
  const Vec3 b = backproject_to_plane(K, anchor + kStep * axis.direction(), plane);
  const Vec3 d = b - a;
  if (!(d.norm() > kDegenerateEps)) throw DegenerateError("in-plane translation direction is degenerate");
  return {d.normalized(), plane.normal.normalized()};
}

Vec3 rotate_about(const Vec3& v, const Vec3& about, double angle) {
  return Eigen::AngleAxisd(angle, about.normalized()) * v;
}

RigidTransform rotation_transform(const Axis3D& axis, double alpha) {
  const Mat3 R = Eigen::AngleAxisd(alpha, axis.direction.normalized()).toRotationMatrix();
  return {R, axis.point - R * axis.point};
}

RigidTransform translation_transform(const Vec3& direction, double alpha) {
  return {Mat3::Identity(), alpha * direction};
}

RigidTransform articulation_transform(const Axis3D& axis, double alpha) {
  return axis.kind == ArticulationType::rotation ? rotation_transform(axis, alpha)
                                                 : translation_transform(axis.direction, alpha);
}

Vec2 project_point(const CameraIntrinsics& K, const Vec3& x) {
  return {K.fx * x.x() / x.z() + K.cx, K.fy * x.y() / x.z() + K.cy};
}

std::vector<ProjectedPoint> project_points(const CameraIntrinsics& K, std::span<const Vec3> points) {
  std::vector<ProjectedPoint> out;
  out.reserve(points.size());
  for (const Vec3& x : points) {
    if (x.z() > kDegenerateEps) {
      out.push_back({project_point(K, x), true});
    } else {
      out.push_back({Vec2::Zero(), false});
    }
  }
  return out;
}

ProjectedAxis project_axis3d(const CameraIntrinsics& K, const Axis3D& axis) {
  const Vec3 d = axis.direction.normalized();
  const Vec3& q = axis.point;
  // Pick two points on the line in front of the camera, one meter apart.
  Vec3 a;
  Vec3 b;
  if (std::abs(d.z()) <= kDegenerateEps) {
    if (q.z() <= kDegenerateEps) throw DegenerateError("axis lies entirely behind the camera");
    a = q;
    b = q + d;
  } else {
    const Vec3 forward = d.z() > 0.0 ? d : Vec3(-d);
    a = q.z() > kDegenerateEps ? q : Vec3(q + ((1.0 - q.z()) / forward.z()) * forward);
    b = a + forward;
  }
  const Vec2 pa = project_point(K, a);
  const Vec2 pb = project_point(K, b);
  if (!((pb - pa).norm() > 1e-9)) throw DegenerateError("axis projects to a single point");
  ProjectedAxis line = axis_from_endpoints(pa, pb);
  if (axis.kind == ArticulationType::translation) line.p = 0.0;
  return line;
}

}  // namespace artic
