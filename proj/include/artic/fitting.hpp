#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "artic/geometry.hpp"
#include "artic/raster.hpp"
#include "artic/tracking.hpp"

namespace artic {

/// Search grid made of the integer multiples of `step` inside [lo, hi], so
/// zero is on the grid whenever lo <= 0 <= hi.
struct GridSpec {
  double lo = 0.0;
  double hi = 0.0;
  double step = 1.0;

  void validate() const;
  std::vector<double> values() const;
};

struct ClassificationThresholds {
  double min_r_squared = 0.4;
  double min_abs_slope = 0.1;  // alpha units per second
  double score_floor = 0.5;
};

struct FittingOptions {
  GridSpec rotation_grid{-2.618, 2.618, kPi / 180.0};
  GridSpec translation_grid{-1.0, 1.0, 0.01};
  ClassificationThresholds thresholds;
  int min_track_length = 5;
  double near_plane = 0.01;
  double simplify_tol = 1.0;
};

using Polygon3D = std::vector<Vec3>;

struct ArticulationHypothesis {
  int reference_frame = 0;
  ArticulationType category = ArticulationType::rotation;
  /// 0 for the rotation hinge or the in-plane translation direction, 1 for the plane normal.
  int candidate = 0;
  Plane plane;
  std::vector<Polygon3D> plane_segment;
  Axis3D axis3d;
};

struct FrameFit {
  int frame = 0;
  double time = 0.0;
  double alpha = 0.0;
  double score = 0.0;
};

struct MotionModel {
  double slope = 0.0;
  double intercept = 0.0;
  double r_squared = 0.0;
};

enum class FitStatus { ok, too_short, no_fit };
std::string to_string(FitStatus status);

struct ArticulationFit {
  FitStatus status = FitStatus::no_fit;
  std::optional<ArticulationHypothesis> hypothesis;
  std::vector<FrameFit> frame_fits;
  MotionModel motion;
  bool articulating = false;
  double mean_score = 0.0;
};

/// Near-plane clipping followed by projection; polygons that vanish are dropped.
std::vector<Polygon2D> project_segment(const CameraIntrinsics& K, const RigidTransform& transform,
                                       std::span<const Polygon3D> segment, double near_plane = 0.01);

/// IoU between the observed mask and the articulated, reprojected segment.
double reprojection_score(const Mask& mask, const CameraIntrinsics& K, const RigidTransform& transform,
                          std::span<const Polygon3D> segment, double near_plane = 0.01);
double reprojection_score(const MaskIndex& mask, const CameraIntrinsics& K, const RigidTransform& transform,
                          std::span<const Polygon3D> segment, double near_plane = 0.01);

/// Grid argmax of the reprojection score; ties go to the smaller |alpha|.
FrameFit fit_frame_alpha(const MaskIndex& mask, const CameraIntrinsics& K, const ArticulationHypothesis& hyp,
                         const GridSpec& grid, double near_plane = 0.01);
FrameFit fit_frame_alpha(const Mask& mask, const CameraIntrinsics& K, const ArticulationHypothesis& hyp,
                         const GridSpec& grid, double near_plane = 0.01);

/// Ordinary least squares alpha = slope * t + intercept. R^2 is 0 when alpha
/// has no variance.
MotionModel fit_motion_model(std::span<const double> alphas, std::span<const double> times);

bool classify_articulation(std::span<const FrameFit> fits, const MotionModel& motion,
                           const ClassificationThresholds& thresholds = {});

/// Lifts the reference detection into 3D hypotheses: one for a rotation
/// detection, one per direction candidate for a translation detection.
std::vector<ArticulationHypothesis> hypotheses_from_detection(const Detection& reference, ArticulationType category,
                                                              const CameraIntrinsics& K, double simplify_tol = 1.0);

/// First, middle and last frame of the track.
std::vector<std::size_t> reference_candidates(std::size_t track_length);

ArticulationFit fit_track(const Track& track, const CameraIntrinsics& K, const FittingOptions& options = {});

/// What a fitted hypothesis predicts at articulation degree alpha.
struct FramePrediction {
  std::optional<Box2D> box;
  std::optional<ProjectedAxis> axis2d;
  Plane plane;
};

FramePrediction predict_frame(const CameraIntrinsics& K, const ArticulationHypothesis& hyp, double alpha,
                              double near_plane = 0.01);

}  // namespace artic
