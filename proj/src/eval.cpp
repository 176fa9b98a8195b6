#include "artic/eval.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <stdexcept>
#include <utility>

namespace artic {

void EvalThresholds::validate() const {
  if (!(bbox_iou >= 0.0 && bbox_iou <= 1.0)) throw std::invalid_argument("bbox IoU threshold must lie in [0, 1]");
  if (!(ea_score >= 0.0 && ea_score <= 1.0)) throw std::invalid_argument("EA-score threshold must lie in [0, 1]");
  if (!(normal_deg >= 0.0 && normal_deg <= 90.0)) throw std::invalid_argument("normal threshold must lie in [0, 90]");
}

std::string to_string(ApVariant variant) {
  switch (variant) {
    case ApVariant::bbox:
      return "bbox";
    case ApVariant::bbox_axis:
      return "bbox+axis";
    case ApVariant::bbox_axis_normal:
      return "bbox+axis+normal";
  }
  return "bbox";
}

ApVariant ap_variant_from_string(const std::string& name) {
  if (name == "bbox") return ApVariant::bbox;
  if (name == "bbox+axis") return ApVariant::bbox_axis;
  if (name == "bbox+axis+normal") return ApVariant::bbox_axis_normal;
  throw std::invalid_argument("unknown AP variant '" + name + "'");
}

std::optional<LineSegment> clip_line_to_image(const ProjectedAxis& axis, int width, int height) {
  const Vec2 origin = axis.p * axis.normal();
  const Vec2 dir = axis.direction();
  const double reach = 2.0 * (std::abs(origin.x()) + std::abs(origin.y()) + width + height) + 1.0;
  // Liang-Barsky on the segment origin + t * dir, t in [-reach, reach].
  double t0 = -reach;
  double t1 = reach;
  const double p[4] = {-dir.x(), dir.x(), -dir.y(), dir.y()};
  const double q[4] = {origin.x(), width - origin.x(), origin.y(), height - origin.y()};
  for (int i = 0; i < 4; ++i) {
    if (p[i] == 0.0) {
      if (q[i] < 0.0) return std::nullopt;
      continue;
    }
    const double t = q[i] / p[i];
    if (p[i] < 0.0) {
      t0 = std::max(t0, t);
    } else {
      t1 = std::min(t1, t);
    }
  }
  if (!(t1 - t0 > 1e-9)) return std::nullopt;
  return LineSegment{origin + t0 * dir, origin + t1 * dir};
}

std::optional<LineSegment> axis_segment(const ProjectedAxis& axis, ArticulationType category, const Box2D& box,
                                        int width, int height) {
  if (category == ArticulationType::rotation) return clip_line_to_image(axis, width, height);
  ProjectedAxis through_box{axis.theta, box.center().dot(axis.normal())};
  return clip_line_to_image(through_box, width, height);
}

double ea_score(const LineSegment& a, const LineSegment& b, int width, int height) {
  const Vec2 scale(1.0 / width, 1.0 / height);
  const Vec2 a0 = a.a.cwiseProduct(scale);
  const Vec2 a1 = a.b.cwiseProduct(scale);
  const Vec2 b0 = b.a.cwiseProduct(scale);
  const Vec2 b1 = b.b.cwiseProduct(scale);
  const Vec2 da = a1 - a0;
  const Vec2 db = b1 - b0;
  if (!(da.norm() > kDegenerateEps) || !(db.norm() > kDegenerateEps)) {
    throw DegenerateError("EA-score needs segments of nonzero length");
  }
  // atan2 keeps full precision near 0 where acos does not.
  const double angle = std::atan2(std::abs(da.x() * db.y() - da.y() * db.x()), std::abs(da.dot(db)));
  const double s_angle = std::max(0.0, 1.0 - angle / (0.5 * kPi));
  const double dist = (0.5 * (a0 + a1) - 0.5 * (b0 + b1)).norm();
  const double s_dist = std::max(0.0, 1.0 - dist / std::sqrt(2.0));
  const double s = s_angle * s_dist;
  return s * s;
}

double normal_angle_error(const Vec3& predicted, const Vec3& truth) {
  if (std::abs(predicted.norm() - 1.0) > 1e-6 || std::abs(truth.norm() - 1.0) > 1e-6) {
    throw std::invalid_argument("normal_angle_error expects unit vectors");
  }
  return rad2deg(std::atan2(predicted.cross(truth).norm(), std::abs(predicted.dot(truth))));
}

bool prediction_matches(const EvalPrediction& pred, const EvalTruth& truth, const EvalThresholds& thresholds,
                        ApVariant variant) {
  if (bbox_iou(pred.box, truth.box) < thresholds.bbox_iou) return false;
  if (variant == ApVariant::bbox) return true;
  if (truth.axis2d) {
    if (!pred.axis2d) return false;
    const auto seg_truth = axis_segment(*truth.axis2d, truth.category, truth.box, truth.width, truth.height);
    const auto seg_pred = axis_segment(*pred.axis2d, truth.category, pred.box, truth.width, truth.height);
    // A truth axis that misses the image is treated like an unannotated one.
    if (seg_truth) {
      if (!seg_pred) return false;
      if (ea_score(*seg_pred, *seg_truth, truth.width, truth.height) < thresholds.ea_score) return false;
    }
  }
  if (variant == ApVariant::bbox_axis) return true;
  return normal_angle_error(pred.normal.normalized(), truth.normal.normalized()) <= thresholds.normal_deg;
}

double average_precision(std::span<const PRPoint> curve) {
  if (curve.empty()) return 0.0;
  std::vector<double> envelope(curve.size());
  double running = 0.0;
  for (std::size_t i = curve.size(); i-- > 0;) {
    running = std::max(running, curve[i].precision);
    envelope[i] = running;
  }
  double ap = 0.0;
  double prev_recall = 0.0;
  for (std::size_t i = 0; i < curve.size(); ++i) {
    ap += (curve[i].recall - prev_recall) * envelope[i];
    prev_recall = curve[i].recall;
  }
  return ap;
}

APResult evaluate_ap(std::span<const EvalPrediction> predictions, std::span<const EvalTruth> truths,
                     const EvalThresholds& thresholds, ApVariant variant, ArticulationType category) {
  APResult result;
  result.variant = variant;
  result.category = category;

  using Key = std::pair<std::string, int>;
  std::map<Key, std::vector<std::size_t>> truth_by_frame;
  for (std::size_t i = 0; i < truths.size(); ++i) {
    const EvalTruth& t = truths[i];
    if (t.category != category || !t.articulating) continue;
    truth_by_frame[{t.clip_id, t.frame}].push_back(i);
    ++result.num_truth;
  }

  std::vector<std::size_t> order;
  for (std::size_t i = 0; i < predictions.size(); ++i) {
    if (predictions[i].category == category) order.push_back(i);
  }
  std::stable_sort(order.begin(), order.end(),
                   [&](std::size_t a, std::size_t b) { return predictions[a].score > predictions[b].score; });
  result.num_predictions = order.size();

  std::vector<bool> taken(truths.size(), false);
  std::size_t tp = 0;
  std::size_t seen = 0;
  for (std::size_t idx : order) {
    const EvalPrediction& pred = predictions[idx];
    ++seen;
    std::optional<std::size_t> match;
    double best_iou = -1.0;
    if (auto it = truth_by_frame.find({pred.clip_id, pred.frame}); it != truth_by_frame.end()) {
      for (std::size_t ti : it->second) {
        if (taken[ti] || !prediction_matches(pred, truths[ti], thresholds, variant)) continue;
        const double iou = bbox_iou(pred.box, truths[ti].box);
        if (iou > best_iou) {
          best_iou = iou;
          match = ti;
        }
      }
    }
    if (match) {
      taken[*match] = true;
      ++tp;
    }
    const double recall = result.num_truth > 0 ? static_cast<double>(tp) / result.num_truth : 0.0;
    result.curve.push_back({pred.score, static_cast<double>(tp) / seen, recall});
  }
  result.true_positives = tp;
  if (result.num_truth > 0) result.ap = average_precision(result.curve);
  return result;
}

double evaluate_auroc(std::span<const double> scores, std::span<const bool> labels) {
  if (scores.size() != labels.size()) throw std::invalid_argument("scores and labels differ in length");
  const std::size_t positives = static_cast<std::size_t>(std::count(labels.begin(), labels.end(), true));
  const std::size_t negatives = labels.size() - positives;
  if (positives == 0 || negatives == 0) throw std::invalid_argument("AUROC needs both positive and negative labels");

  std::vector<std::size_t> order(scores.size());
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) { return scores[a] < scores[b]; });
  double positive_rank_sum = 0.0;
  for (std::size_t i = 0; i < order.size();) {
    std::size_t j = i;
    while (j < order.size() && scores[order[j]] == scores[order[i]]) ++j;
    const double mean_rank = 0.5 * static_cast<double>(i + 1 + j);  // ranks i+1 .. j
    for (std::size_t k = i; k < j; ++k) {
      if (labels[order[k]]) positive_rank_sum += mean_rank;
    }
    i = j;
  }
  const double p = static_cast<double>(positives);
  const double n = static_cast<double>(negatives);
  return (positive_rank_sum - p * (p + 1.0) / 2.0) / (p * n);
}

std::vector<double> frame_recognition_scores(std::span<const EvalPrediction> predictions,
                                             std::span<const EvalTruth> truths) {
  std::map<std::pair<std::string, int>, double> best;
  for (const EvalPrediction& p : predictions) {
    double& slot = best[{p.clip_id, p.frame}];
    slot = std::max(slot, p.score);
  }
  std::vector<double> out;
  out.reserve(truths.size());
  for (const EvalTruth& t : truths) {
    auto it = best.find({t.clip_id, t.frame});
    out.push_back(it == best.end() ? 0.0 : it->second);
  }
  return out;
}

}  // namespace artic
