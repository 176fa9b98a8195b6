#include "artic/synth.hpp"

#include <cmath>
#include <stdexcept>

#include "artic/fitting.hpp"
#include "artic/random.hpp"

namespace artic {

std::string to_string(HingeEdge edge) {
  switch (edge) {
    case HingeEdge::left:
      return "left";
    case HingeEdge::right:
      return "right";
    case HingeEdge::top:
      return "top";
    case HingeEdge::bottom:
      return "bottom";
  }
  return "left";
}

std::string to_string(SlideDirection dir) {
  switch (dir) {
    case SlideDirection::normal:
      return "normal";
    case SlideDirection::horizontal:
      return "horizontal";
    case SlideDirection::vertical:
      return "vertical";
  }
  return "normal";
}

HingeEdge hinge_edge_from_string(const std::string& name) {
  if (name == "left") return HingeEdge::left;
  if (name == "right") return HingeEdge::right;
  if (name == "top") return HingeEdge::top;
  if (name == "bottom") return HingeEdge::bottom;
  throw std::invalid_argument("unknown hinge edge '" + name + "'");
}

SlideDirection slide_direction_from_string(const std::string& name) {
  if (name == "normal") return SlideDirection::normal;
  if (name == "horizontal") return SlideDirection::horizontal;
  if (name == "vertical") return SlideDirection::vertical;
  throw std::invalid_argument("unknown slide direction '" + name + "'");
}

void SceneConfig::validate() const {
  camera.validate();
  if (!(panel.width > 0.0) || !(panel.height > 0.0)) throw std::invalid_argument("panel area must be positive");
  if (motion.frames < 1) throw std::invalid_argument("frame count must be at least 1");
  if (!(motion.fps > 0.0)) throw std::invalid_argument("fps must be positive");
  const NoiseSpec& n = noise;
  for (double s : {n.mask_vertex_jitter_sigma, n.axis_angle_sigma, n.axis_offset_sigma, n.normal_angle_sigma,
                   n.offset_sigma}) {
    if (!(s >= 0.0)) throw std::invalid_argument("noise sigmas must be non-negative");
  }
  if (!(n.detection_drop_prob >= 0.0 && n.detection_drop_prob <= 1.0)) {
    throw std::invalid_argument("detection drop probability must lie in [0, 1]");
  }
  if (!(n.score_min >= 0.0 && n.score_min <= n.score_max && n.score_max <= 1.0)) {
    throw std::invalid_argument("score range must satisfy 0 <= min <= max <= 1");
  }
  if (occluder.enabled && !(occluder.fraction > 0.0)) throw std::invalid_argument("occluder fraction must be positive");
}

namespace {

struct PanelFrame {
  Vec3 right;
  Vec3 down;
};

PanelFrame panel_basis(const PanelSpec& panel) {
  const Mat3 R = (Eigen::AngleAxisd(deg2rad(panel.yaw_deg), Vec3::UnitY()) *
                  Eigen::AngleAxisd(deg2rad(panel.pitch_deg), Vec3::UnitX()))
                     .toRotationMatrix();
  return {R * Vec3::UnitX(), R * Vec3::UnitY()};
}

constexpr double kNearPlane = 0.01;

}  // namespace

std::vector<Vec3> panel_corners(const PanelSpec& panel) {
  const auto [u, v] = panel_basis(panel);
  const Vec3 hu = 0.5 * panel.width * u;
  const Vec3 hv = 0.5 * panel.height * v;
  return {panel.center - hu - hv, panel.center + hu - hv, panel.center + hu + hv, panel.center - hu + hv};
}

Plane panel_plane(const PanelSpec& panel) {
  const auto [u, v] = panel_basis(panel);
  return Plane::through(panel.center, u.cross(v));
}

Axis3D scene_axis(const SceneConfig& config) {
  const PanelSpec& panel = config.panel;
  const auto [u, v] = panel_basis(panel);
  if (config.motion.type == ArticulationType::translation) {
    Vec3 dir = u;
    if (config.motion.slide == SlideDirection::normal) dir = panel_plane(panel).normal;
    if (config.motion.slide == SlideDirection::vertical) dir = v;
    return {ArticulationType::translation, panel.center, dir.normalized()};
  }
  switch (config.motion.hinge) {
    case HingeEdge::left:
      return {ArticulationType::rotation, panel.center - 0.5 * panel.width * u, v};
    case HingeEdge::right:
      return {ArticulationType::rotation, panel.center + 0.5 * panel.width * u, v};
    case HingeEdge::top:
      return {ArticulationType::rotation, panel.center - 0.5 * panel.height * v, u};
    case HingeEdge::bottom:
      return {ArticulationType::rotation, panel.center + 0.5 * panel.height * v, u};
  }
  throw std::logic_error("unhandled hinge edge");
}

bool line_crosses_image(const ProjectedAxis& axis, int width, int height) {
  const double w = width;
  const double h = height;
  bool pos = false;
  bool neg = false;
  for (const Vec2& c : {Vec2(0, 0), Vec2(w, 0), Vec2(w, h), Vec2(0, h)}) {
    const double r = axis.residual(c);
    pos = pos || r >= 0.0;
    neg = neg || r <= 0.0;
  }
  return pos && neg;
}

SyntheticClip generate_sequence(const SceneConfig& config, std::uint64_t seed) {
  config.validate();
  const CameraIntrinsics& K = config.camera;
  const NoiseSpec& noise = config.noise;
  PortableRng rng(seed);

  SyntheticClip clip;
  clip.clip_id = config.clip_id;
  clip.camera = K;
  clip.axis3d = scene_axis(config);

  const std::vector<Vec3> corners = panel_corners(config.panel);
  const Plane base_plane = panel_plane(config.panel);
  const bool articulating = config.motion.slope != 0.0;

  Vec2 occluder_center = Vec2::Zero();
  Vec2 occluder_radii = Vec2::Ones();

  for (int f = 0; f < config.motion.frames; ++f) {
    const double time = f / config.motion.fps;
    const double alpha = config.motion.intercept + config.motion.slope * time;
    const RigidTransform T = articulation_transform(clip.axis3d, alpha);

    std::vector<Vec3> moved;
    for (const Vec3& c : corners) moved.push_back(T.apply(c));
    bool any_front = false;
    for (const Vec3& c : moved) any_front = any_front || c.z() >= kNearPlane;
    if (!any_front) throw std::invalid_argument("panel is entirely behind the camera at frame " + std::to_string(f));

    const std::vector<Polygon3D> panel3d{moved};
    const std::vector<Polygon2D> outline =
        project_segment(K, RigidTransform::identity(), panel3d, kNearPlane);
    GroundTruthFrame gt;
    gt.frame = f;
    gt.time = time;
    gt.category = config.motion.type;
    gt.articulating = articulating;
    gt.alpha = alpha;
    gt.mask = rasterize_polygons(outline, K.width, K.height);
    if (gt.mask.empty()) throw std::invalid_argument("panel leaves the image at frame " + std::to_string(f));
    gt.box = mask_bbox(gt.mask);
    gt.plane = Plane::through(T.apply(config.panel.center), T.apply_direction(base_plane.normal));

    gt.axis3d = clip.axis3d;
    if (gt.axis3d.kind == ArticulationType::translation) gt.axis3d.point = T.apply(config.panel.center);
    try {
      const ProjectedAxis line = project_axis3d(K, gt.axis3d);
      const bool visible = gt.axis3d.kind == ArticulationType::translation || line_crosses_image(line, K.width, K.height);
      if (visible) gt.axis2d = line;
    } catch (const DegenerateError&) {
      gt.axis2d.reset();
    }

    if (f == 0) {
      occluder_center = gt.box.center() + Vec2(config.occluder.offset_x * gt.box.width(),
                                               config.occluder.offset_y * gt.box.height());
      occluder_radii = Vec2(0.5 * config.occluder.fraction * gt.box.width(),
                            0.5 * config.occluder.fraction * gt.box.height());
    }

    FrameDetections frame{f, {}};
    const bool dropped = noise.detection_drop_prob > 0.0 && rng.bernoulli(noise.detection_drop_prob);
    if (!dropped) {
      Detection det;
      det.frame = f;
      det.time = time;
      det.category = config.motion.type;

      if (noise.mask_vertex_jitter_sigma > 0.0) {
        std::vector<Polygon2D> jittered = outline;
        for (Polygon2D& poly : jittered) {
          for (Vec2& v : poly) {
            v.x() += rng.normal(0.0, noise.mask_vertex_jitter_sigma);
            v.y() += rng.normal(0.0, noise.mask_vertex_jitter_sigma);
          }
        }
        det.mask = rasterize_polygons(jittered, K.width, K.height);
      } else {
        det.mask = gt.mask;
      }

      if (config.occluder.enabled) {
        const Vec2 center = occluder_center + f * Vec2(config.occluder.drift_x, config.occluder.drift_y);
        for (int y = 0; y < K.height; ++y) {
          const double dy = (y + 0.5 - center.y()) / occluder_radii.y();
          if (std::abs(dy) > 1.0) continue;
          for (int x = 0; x < K.width; ++x) {
            const double dx = (x + 0.5 - center.x()) / occluder_radii.x();
            if (dx * dx + dy * dy <= 1.0) det.mask.set(x, y, false);
          }
        }
      }

      det.plane = gt.plane;
      if (noise.normal_angle_sigma > 0.0) {
        const Vec3 n = gt.plane.normal;
        const Vec3 helper = std::abs(n.x()) < 0.9 ? Vec3::UnitX() : Vec3::UnitY();
        const Vec3 e1 = n.cross(helper).normalized();
        const Vec3 e2 = n.cross(e1);
        const double phi = rng.uniform(0.0, 2.0 * kPi);
        const Vec3 tilt_axis = std::cos(phi) * e1 + std::sin(phi) * e2;
        det.plane.normal = rotate_about(n, tilt_axis, rng.normal(0.0, noise.normal_angle_sigma));
      }
      if (noise.offset_sigma > 0.0) det.plane.offset += rng.normal(0.0, noise.offset_sigma);
      det.plane = det.plane.canonical();

      if (gt.axis2d) {
        ProjectedAxis a = *gt.axis2d;
        if (noise.axis_angle_sigma > 0.0) a.theta += rng.normal(0.0, noise.axis_angle_sigma);
        if (noise.axis_offset_sigma > 0.0 && gt.category == ArticulationType::rotation) {
          a.p += rng.normal(0.0, noise.axis_offset_sigma);
        }
        a = a.canonical();
        if (gt.category == ArticulationType::translation) a.p = 0.0;
        det.axis2d = a;
      }

      det.score = noise.score_min == noise.score_max ? noise.score_min : rng.uniform(noise.score_min, noise.score_max);

      if (!det.mask.empty()) {
        det.box = mask_bbox(det.mask);
        frame.detections.push_back(std::move(det));
      }
    }
    clip.truth.push_back(std::move(gt));
    clip.detections.push_back(std::move(frame));
  }
  return clip;
}

SyntheticClip make_static_negative(const SceneConfig& config, std::uint64_t seed) {
  SceneConfig still = config;
  still.motion.slope = 0.0;
  return generate_sequence(still, seed);
}

}  // namespace artic
