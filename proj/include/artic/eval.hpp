#pragma once

#include <optional>
#include <span>
#include <string>
#include <vector>

#include "artic/geometry.hpp"
#include "artic/raster.hpp"

namespace artic {

struct EvalThresholds {
  double bbox_iou = 0.5;
  double ea_score = 0.5;
  double normal_deg = 30.0;

  void validate() const;
};

enum class ApVariant { bbox, bbox_axis, bbox_axis_normal };
std::string to_string(ApVariant variant);
ApVariant ap_variant_from_string(const std::string& name);
inline constexpr ApVariant kAllVariants[] = {ApVariant::bbox, ApVariant::bbox_axis, ApVariant::bbox_axis_normal};

struct LineSegment {
  Vec2 a = Vec2::Zero();
  Vec2 b = Vec2::Zero();
};

/// Portion of an infinite image line inside [0, width] x [0, height].
std::optional<LineSegment> clip_line_to_image(const ProjectedAxis& axis, int width, int height);

/// Segment used to score an axis. Translation axes only carry a direction,
/// so their line is placed through the box center.
std::optional<LineSegment> axis_segment(const ProjectedAxis& axis, ArticulationType category, const Box2D& box,
                                        int width, int height);

/// Line similarity in the unit-normalized image: the product of an angle term
/// and a midpoint-distance term, squared.
double ea_score(const LineSegment& a, const LineSegment& b, int width, int height);

/// Unsigned angle between plane normals in degrees, ignoring orientation.
double normal_angle_error(const Vec3& predicted, const Vec3& truth);

struct EvalPrediction {
  std::string clip_id;
  int frame = 0;
  ArticulationType category = ArticulationType::rotation;
  double score = 0.0;
  Box2D box;
  std::optional<ProjectedAxis> axis2d;
  Vec3 normal{0.0, 0.0, 1.0};
};

struct EvalTruth {
  std::string clip_id;
  int frame = 0;
  ArticulationType category = ArticulationType::rotation;
  bool articulating = true;
  Box2D box;
  std::optional<ProjectedAxis> axis2d;  // absent when the axis is outside the image
  Vec3 normal{0.0, 0.0, 1.0};
  int width = 640;
  int height = 480;
};

struct PRPoint {
  double score = 0.0;
  double precision = 0.0;
  double recall = 0.0;
};

struct APResult {
  ApVariant variant = ApVariant::bbox;
  ArticulationType category = ArticulationType::rotation;
  std::optional<double> ap;  // undefined without ground truth
  std::size_t num_truth = 0;
  std::size_t num_predictions = 0;
  std::size_t true_positives = 0;
  std::vector<PRPoint> curve;
};

/// True when `pred` satisfies every criterion of `variant` against `truth`.
bool prediction_matches(const EvalPrediction& pred, const EvalTruth& truth, const EvalThresholds& thresholds,
                        ApVariant variant);

/// Greedy matching in descending confidence, then all-point interpolated
/// area under the precision-recall curve. Only truths with articulating ==
/// true count as objects to find.
APResult evaluate_ap(std::span<const EvalPrediction> predictions, std::span<const EvalTruth> truths,
                     const EvalThresholds& thresholds, ApVariant variant, ArticulationType category);

/// All-point interpolated AP of a precision-recall sweep.
double average_precision(std::span<const PRPoint> curve);

/// Rank-statistic AUROC (ties count one half). Throws unless both classes
/// are present.
double evaluate_auroc(std::span<const double> scores, std::span<const bool> labels);

/// Per-frame recognition score: the highest prediction confidence in each
/// truth frame, 0 when the frame has none.
std::vector<double> frame_recognition_scores(std::span<const EvalPrediction> predictions,
                                             std::span<const EvalTruth> truths);

}  // namespace artic
