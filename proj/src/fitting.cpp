#include "artic/fitting.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace artic {

std::string to_string(FitStatus status) {
  switch (status) {
    case FitStatus::ok:
      return "ok";
    case FitStatus::too_short:
      return "too_short";
    case FitStatus::no_fit:
      return "no_fit";
  }
  return "unknown";
}

void GridSpec::validate() const {
  if (!(step > 0.0) || !std::isfinite(step)) throw std::invalid_argument("grid step must be positive");
  if (!(lo <= hi)) throw std::invalid_argument("grid bounds are inverted");
  if (values().empty()) throw std::invalid_argument("grid contains no samples");
}

std::vector<double> GridSpec::values() const {
  constexpr double kSlack = 1e-9;
  const auto first = static_cast<long long>(std::ceil(lo / step - kSlack));
  const auto last = static_cast<long long>(std::floor(hi / step + kSlack));
  std::vector<double> out;
  for (long long k = first; k <= last; ++k) out.push_back(static_cast<double>(k) * step);
  return out;
}

namespace {

Polygon3D clip_near(const Polygon3D& poly, double near_plane) {
  Polygon3D out;
  const std::size_t n = poly.size();
  for (std::size_t i = 0; i < n; ++i) {
    const Vec3& a = poly[i];
    const Vec3& b = poly[(i + 1) % n];
    const bool a_in = a.z() >= near_plane;
    const bool b_in = b.z() >= near_plane;
    if (a_in) out.push_back(a);
    if (a_in != b_in) {
      const double t = (near_plane - a.z()) / (b.z() - a.z());
      Vec3 cut = a + t * (b - a);
      cut.z() = near_plane;
      out.push_back(cut);
    }
  }
  return out;
}

}  // namespace

std::vector<Polygon2D> project_segment(const CameraIntrinsics& K, const RigidTransform& transform,
                                       std::span<const Polygon3D> segment, double near_plane) {
  std::vector<Polygon2D> out;
  Polygon3D moved;
  for (const Polygon3D& poly : segment) {
    moved.clear();
    for (const Vec3& v : poly) moved.push_back(transform.apply(v));
    const Polygon3D clipped = clip_near(moved, near_plane);
    if (clipped.size() < 3) continue;
    Polygon2D flat;
    flat.reserve(clipped.size());
    for (const Vec3& v : clipped) flat.push_back(project_point(K, v));
    out.push_back(std::move(flat));
  }
  return out;
}

double reprojection_score(const MaskIndex& mask, const CameraIntrinsics& K, const RigidTransform& transform,
                          std::span<const Polygon3D> segment, double near_plane) {
  if (mask.width() != K.width || mask.height() != K.height) {
    throw std::invalid_argument("mask size does not match the camera image size");
  }
  const auto polys = project_segment(K, transform, segment, near_plane);
  if (polys.empty()) return 0.0;
  return mask.iou(rasterize_spans(polys, K.width, K.height));
}

double reprojection_score(const Mask& mask, const CameraIntrinsics& K, const RigidTransform& transform,
                          std::span<const Polygon3D> segment, double near_plane) {
  if (mask.width != K.width || mask.height != K.height) {
    throw std::invalid_argument("mask size does not match the camera image size");
  }
  const auto polys = project_segment(K, transform, segment, near_plane);
  if (polys.empty()) return 0.0;
  return mask_iou(mask, rasterize_polygons(polys, K.width, K.height));
}

namespace {

std::vector<double> by_magnitude(const GridSpec& grid) {
  std::vector<double> values = grid.values();
  if (values.empty()) throw std::invalid_argument("grid contains no samples");
  std::stable_sort(values.begin(), values.end(), [](double a, double b) {
    const double fa = std::abs(a);
    const double fb = std::abs(b);
    return fa != fb ? fa < fb : a > b;
  });
  return values;
}

FrameFit scan_grid(const MaskIndex& mask, const CameraIntrinsics& K, const ArticulationHypothesis& hyp,
                   std::span<const double> ordered, double near_plane) {
  FrameFit best;
  best.score = -1.0;
  for (double alpha : ordered) {
    const double s =
        reprojection_score(mask, K, articulation_transform(hyp.axis3d, alpha), hyp.plane_segment, near_plane);
    if (s > best.score) {
      best.score = s;
      best.alpha = alpha;
    }
  }
  return best;
}

}  // namespace

FrameFit fit_frame_alpha(const MaskIndex& mask, const CameraIntrinsics& K, const ArticulationHypothesis& hyp,
                         const GridSpec& grid, double near_plane) {
  const auto ordered = by_magnitude(grid);
  return scan_grid(mask, K, hyp, ordered, near_plane);
}

FrameFit fit_frame_alpha(const Mask& mask, const CameraIntrinsics& K, const ArticulationHypothesis& hyp,
                         const GridSpec& grid, double near_plane) {
  return fit_frame_alpha(MaskIndex(mask), K, hyp, grid, near_plane);
}

MotionModel fit_motion_model(std::span<const double> alphas, std::span<const double> times) {
  if (alphas.size() != times.size()) throw std::invalid_argument("alpha and time series differ in length");
  if (alphas.size() < 2) throw std::invalid_argument("motion fit needs at least two samples");
  for (std::size_t i = 1; i < times.size(); ++i) {
    if (!(times[i] > times[i - 1])) throw std::invalid_argument("times must be strictly increasing");
  }
  const double n = static_cast<double>(alphas.size());
  const double mean_t = std::accumulate(times.begin(), times.end(), 0.0) / n;
  const double mean_a = std::accumulate(alphas.begin(), alphas.end(), 0.0) / n;
  double stt = 0.0;
  double sta = 0.0;
  double saa = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double dt = times[i] - mean_t;
    const double da = alphas[i] - mean_a;
    stt += dt * dt;
    sta += dt * da;
    saa += da * da;
  }
  MotionModel m;
  m.slope = sta / stt;
  m.intercept = mean_a - m.slope * mean_t;
  if (saa < 1e-12) {
    m.r_squared = 0.0;
    return m;
  }
  double ss_res = 0.0;
  for (std::size_t i = 0; i < alphas.size(); ++i) {
    const double r = alphas[i] - (m.slope * times[i] + m.intercept);
    ss_res += r * r;
  }
  m.r_squared = std::clamp(1.0 - ss_res / saa, 0.0, 1.0);
  return m;
}

bool classify_articulation(std::span<const FrameFit> fits, const MotionModel& motion,
                           const ClassificationThresholds& thresholds) {
  const bool any_confident =
      std::any_of(fits.begin(), fits.end(), [&](const FrameFit& f) { return f.score >= thresholds.score_floor; });
  return motion.r_squared >= thresholds.min_r_squared && std::abs(motion.slope) > thresholds.min_abs_slope &&
         any_confident;
}

std::vector<ArticulationHypothesis> hypotheses_from_detection(const Detection& reference, ArticulationType category,
                                                              const CameraIntrinsics& K, double simplify_tol) {
  std::vector<ArticulationHypothesis> out;
  if (reference.mask.empty()) return out;
  const Plane plane = reference.plane.canonical();

  ArticulationHypothesis base;
  base.reference_frame = reference.frame;
  base.category = category;
  base.plane = plane;
  try {
    for (const Polygon2D& ring : mask_to_boundary_polygons(reference.mask, simplify_tol)) {
      Polygon3D lifted;
      lifted.reserve(ring.size());
      for (const Vec2& px : ring) lifted.push_back(backproject_to_plane(K, px, plane));
      base.plane_segment.push_back(std::move(lifted));
    }
  } catch (const DegenerateError&) {
    return out;
  }

  if (category == ArticulationType::rotation) {
    if (!reference.axis2d) return out;
    try {
      base.axis3d = lift_rotation_axis(K, *reference.axis2d, plane);
    } catch (const DegenerateError&) {
      return out;
    }
    base.candidate = 0;
    out.push_back(std::move(base));
    return out;
  }

  Vec3 centroid = Vec3::Zero();
  std::size_t count = 0;
  for (const Polygon3D& poly : base.plane_segment) {
    for (const Vec3& v : poly) {
      centroid += v;
      ++count;
    }
  }
  centroid /= static_cast<double>(count);

  std::vector<Vec3> directions;
  if (reference.axis2d) {
    try {
      directions = lift_translation_axis(K, *reference.axis2d, plane, mask_bbox(reference.mask).center());
    } catch (const DegenerateError&) {
      directions.clear();
    }
  }
  if (directions.empty()) {
    // Without a usable image direction only the normal candidate remains.
    ArticulationHypothesis h = base;
    h.candidate = 1;
    h.axis3d = Axis3D{ArticulationType::translation, centroid, plane.normal};
    out.push_back(std::move(h));
    return out;
  }
  for (std::size_t c = 0; c < directions.size(); ++c) {
    ArticulationHypothesis h = base;
    h.candidate = static_cast<int>(c);
    h.axis3d = Axis3D{ArticulationType::translation, centroid, directions[c]};
    out.push_back(std::move(h));
  }
  return out;
}

std::vector<std::size_t> reference_candidates(std::size_t track_length) {
  std::vector<std::size_t> refs;
  if (track_length == 0) return refs;
  for (std::size_t idx : {std::size_t{0}, track_length / 2, track_length - 1}) {
    if (std::find(refs.begin(), refs.end(), idx) == refs.end()) refs.push_back(idx);
  }
  return refs;
}

ArticulationFit fit_track(const Track& track, const CameraIntrinsics& K, const FittingOptions& options) {
  ArticulationFit result;
  if (track.size() < static_cast<std::size_t>(std::max(options.min_track_length, 2))) {
    result.status = FitStatus::too_short;
    return result;
  }
  const ArticulationType category = track.category;
  const GridSpec& grid = category == ArticulationType::rotation ? options.rotation_grid : options.translation_grid;
  const auto ordered = by_magnitude(grid);

  std::vector<MaskIndex> indices;
  indices.reserve(track.size());
  std::vector<double> times;
  for (const Detection& d : track.detections) {
    indices.emplace_back(d.mask);
    times.push_back(d.time);
  }

  bool have_best = false;
  for (std::size_t ref : reference_candidates(track.size())) {
    for (ArticulationHypothesis& hyp : hypotheses_from_detection(track.detections[ref], category, K,
                                                                 options.simplify_tol)) {
      ArticulationFit candidate;
      candidate.status = FitStatus::ok;
      std::vector<double> alphas;
      double total = 0.0;
      for (std::size_t i = 0; i < track.size(); ++i) {
        FrameFit f = scan_grid(indices[i], K, hyp, ordered, options.near_plane);
        f.frame = track.detections[i].frame;
        f.time = track.detections[i].time;
        total += f.score;
        alphas.push_back(f.alpha);
        candidate.frame_fits.push_back(f);
      }
      candidate.mean_score = total / static_cast<double>(track.size());
      if (have_best && !(candidate.mean_score > result.mean_score)) continue;
      candidate.motion = fit_motion_model(alphas, times);
      candidate.articulating = classify_articulation(candidate.frame_fits, candidate.motion, options.thresholds);
      candidate.hypothesis = std::move(hyp);
      result = std::move(candidate);
      have_best = true;
    }
  }
  if (!have_best) result.status = FitStatus::no_fit;
  return result;
}

FramePrediction predict_frame(const CameraIntrinsics& K, const ArticulationHypothesis& hyp, double alpha,
                              double near_plane) {
  const RigidTransform T = articulation_transform(hyp.axis3d, alpha);
  FramePrediction pred;
  const Vec3 moved_normal = T.apply_direction(hyp.plane.normal);
  Vec3 anchor = Vec3::Zero();
  std::size_t count = 0;
  for (const Polygon3D& poly : hyp.plane_segment) {
    for (const Vec3& v : poly) {
      anchor += T.apply(v);
      ++count;
    }
  }
  if (count > 0) anchor /= static_cast<double>(count);
  pred.plane = Plane::through(anchor, moved_normal);

  const auto polys = project_segment(K, T, hyp.plane_segment, near_plane);
  if (!polys.empty()) {
    const Mask m = rasterize_polygons(polys, K.width, K.height);
    if (!m.empty()) pred.box = mask_bbox(m);
  }
  try {
    Axis3D axis = hyp.axis3d;
    if (axis.kind == ArticulationType::translation) axis.point = anchor;
    pred.axis2d = project_axis3d(K, axis);
  } catch (const DegenerateError&) {
    pred.axis2d.reset();
  }
  return pred;
}

}  // namespace artic
