#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "artic/geometry.hpp"
#include "artic/raster.hpp"
#include "artic/tracking.hpp"

namespace artic {

enum class HingeEdge { left, right, top, bottom };
enum class SlideDirection { normal, horizontal, vertical };

std::string to_string(HingeEdge edge);
std::string to_string(SlideDirection dir);
HingeEdge hinge_edge_from_string(const std::string& name);
SlideDirection slide_direction_from_string(const std::string& name);

/// Rectangular panel; yaw turns it about the camera y axis, then pitch about x.
struct PanelSpec {
  double width = 0.9;   // meters
  double height = 2.0;  // meters
  Vec3 center{0.0, 0.0, 3.0};
  double yaw_deg = 25.0;
  double pitch_deg = 0.0;
};

struct MotionSpec {
  ArticulationType type = ArticulationType::rotation;
  HingeEdge hinge = HingeEdge::left;
  SlideDirection slide = SlideDirection::normal;
  double slope = deg2rad(15.0);  // alpha units per second
  double intercept = 0.0;
  int frames = 30;
  double fps = 10.0;
};

/// Ellipse cleared from detection masks only. Size and offset are fractions
/// of the frame-0 ground-truth box; drift is in pixels per frame.
struct OccluderSpec {
  bool enabled = false;
  double fraction = 0.3;
  double offset_x = 0.0;
  double offset_y = 0.0;
  double drift_x = 0.0;
  double drift_y = 0.0;
};

struct NoiseSpec {
  double mask_vertex_jitter_sigma = 0.0;  // pixels
  double axis_angle_sigma = 0.0;          // radians
  double axis_offset_sigma = 0.0;         // pixels
  double normal_angle_sigma = 0.0;        // radians
  double offset_sigma = 0.0;              // meters
  double detection_drop_prob = 0.0;
  double score_min = 1.0;
  double score_max = 1.0;
};

struct SceneConfig {
  std::string clip_id = "clip_0000";
  CameraIntrinsics camera = default_intrinsics();
  PanelSpec panel;
  MotionSpec motion;
  OccluderSpec occluder;
  NoiseSpec noise;

  void validate() const;
};

struct GroundTruthFrame {
  int frame = 0;
  double time = 0.0;
  ArticulationType category = ArticulationType::rotation;
  bool articulating = false;
  double alpha = 0.0;
  Box2D box;
  Mask mask;
  std::optional<ProjectedAxis> axis2d;
  Plane plane;
  Axis3D axis3d;
};

struct SyntheticClip {
  std::string clip_id;
  CameraIntrinsics camera;
  Axis3D axis3d;  // articulation axis at alpha = 0
  std::vector<GroundTruthFrame> truth;
  std::vector<FrameDetections> detections;
};

/// Panel corners at alpha = 0, in order around the rectangle.
std::vector<Vec3> panel_corners(const PanelSpec& panel);
Plane panel_plane(const PanelSpec& panel);
Axis3D scene_axis(const SceneConfig& config);

/// True when the image line crosses the image rectangle.
bool line_crosses_image(const ProjectedAxis& axis, int width, int height);

SyntheticClip generate_sequence(const SceneConfig& config, std::uint64_t seed);
SyntheticClip make_static_negative(const SceneConfig& config, std::uint64_t seed);

}  // namespace artic
