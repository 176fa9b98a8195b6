#include "artic/records.hpp"

#include <cmath>

namespace artic {

namespace {

const Json& field(const Json& j, const char* key) {
  if (!j.is_object()) throw RecordError("record is not a JSON object");
  auto it = j.find(key);
  if (it == j.end()) throw RecordError(std::string("missing field '") + key + "'");
  return *it;
}

double number(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number()) throw RecordError(std::string("field '") + key + "' must be a number");
  const double x = v.get<double>();
  if (!std::isfinite(x)) throw RecordError(std::string("field '") + key + "' must be finite");
  return x;
}

int integer(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_number_integer()) throw RecordError(std::string("field '") + key + "' must be an integer");
  return v.get<int>();
}

std::string text(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_string()) throw RecordError(std::string("field '") + key + "' must be a string");
  return v.get<std::string>();
}

bool boolean(const Json& j, const char* key) {
  const Json& v = field(j, key);
  if (!v.is_boolean()) throw RecordError(std::string("field '") + key + "' must be a boolean");
  return v.get<bool>();
}

std::vector<double> numbers(const Json& j, const char* key, std::size_t n) {
  const Json& v = field(j, key);
  if (!v.is_array() || v.size() != n) {
    throw RecordError(std::string("field '") + key + "' must be an array of " + std::to_string(n) + " numbers");
  }
  std::vector<double> out;
  for (const Json& x : v) {
    if (!x.is_number() || !std::isfinite(x.get<double>())) {
      throw RecordError(std::string("field '") + key + "' must hold finite numbers");
    }
    out.push_back(x.get<double>());
  }
  return out;
}

ArticulationType category(const Json& j) {
  try {
    return articulation_type_from_string(text(j, "category"));
  } catch (const std::invalid_argument& e) {
    throw RecordError(e.what());
  }
}

Json box_json(const Box2D& b) { return Json::array({b.x_min, b.y_min, b.x_max, b.y_max}); }

Box2D box_from(const Json& j, const char* key) {
  const auto v = numbers(j, key, 4);
  Box2D b{v[0], v[1], v[2], v[3]};
  if (!b.valid()) throw RecordError(std::string("field '") + key + "' has inverted edges");
  return b;
}

Json vec_json(const Vec3& v) { return Json::array({v.x(), v.y(), v.z()}); }

Vec3 vec_from(const Json& j, const char* key) {
  const auto v = numbers(j, key, 3);
  return {v[0], v[1], v[2]};
}

Vec3 unit_from(const Json& j, const char* key) {
  const Vec3 v = vec_from(j, key);
  const double err = std::abs(v.norm() - 1.0);
  if (err > 1e-6) throw RecordError(std::string("field '") + key + "' must be a unit vector");
  return err > 1e-12 ? Vec3(v.normalized()) : v;
}

Json mask_json(const Mask& m) {
  Json out;
  out["counts"] = rle_encode(m);
  out["width"] = m.width;
  out["height"] = m.height;
  return out;
}

Mask mask_from(const Json& j) {
  const Json& rle = field(j, "mask_rle");
  const int w = integer(rle, "width");
  const int h = integer(rle, "height");
  if (w < 1 || h < 1) throw RecordError("mask dimensions must be at least 1x1");
  const Json& counts = field(rle, "counts");
  if (!counts.is_array()) throw RecordError("mask counts must be an array");
  std::vector<std::uint32_t> runs;
  runs.reserve(counts.size());
  for (const Json& c : counts) {
    if (!c.is_number_unsigned() && !(c.is_number_integer() && c.get<long long>() >= 0)) {
      throw RecordError("mask counts must be non-negative integers");
    }
    runs.push_back(c.get<std::uint32_t>());
  }
  try {
    return rle_decode(runs, w, h);
  } catch (const std::invalid_argument& e) {
    throw RecordError(e.what());
  }
}

Json axis_json(const std::optional<ProjectedAxis>& axis) {
  if (!axis) return nullptr;
  Json out;
  out["theta"] = axis->theta;
  out["p"] = axis->p;
  return out;
}

std::optional<ProjectedAxis> axis_from(const Json& j) {
  const Json& a = field(j, "axis");
  if (a.is_null()) return std::nullopt;
  ProjectedAxis axis{number(a, "theta"), number(a, "p")};
  if (axis.theta < 0.0 || axis.theta >= kPi) throw RecordError("axis theta must lie in [0, pi)");
  return axis;
}

Json axis3d_json(const Axis3D& a) {
  Json out;
  out["kind"] = to_string(a.kind);
  out["point"] = vec_json(a.point);
  out["direction"] = vec_json(a.direction);
  return out;
}

}  // namespace

Json to_json(const DetectionRecord& rec) {
  const Detection& d = rec.detection;
  Json j;
  j["clip_id"] = rec.clip_id;
  j["frame"] = d.frame;
  j["time_s"] = d.time;
  j["category"] = to_string(d.category);
  j["score"] = d.score;
  j["box"] = box_json(d.box);
  j["mask_rle"] = mask_json(d.mask);
  j["normal"] = vec_json(d.plane.normal);
  j["offset_m"] = d.plane.offset;
  j["axis"] = axis_json(d.axis2d);
  return j;
}

DetectionRecord detection_from_json(const Json& j) {
  DetectionRecord rec;
  rec.clip_id = text(j, "clip_id");
  Detection& d = rec.detection;
  d.frame = integer(j, "frame");
  if (d.frame < 0) throw RecordError("frame index must be non-negative");
  d.time = number(j, "time_s");
  d.category = category(j);
  d.score = number(j, "score");
  if (d.score < 0.0 || d.score > 1.0) throw RecordError("score must lie in [0, 1]");
  d.box = box_from(j, "box");
  d.mask = mask_from(j);
  if (d.mask.empty()) throw RecordError("detection mask is empty");
  const Box2D tight = mask_bbox(d.mask);
  if (std::abs(tight.x_min - d.box.x_min) > 2.0 || std::abs(tight.y_min - d.box.y_min) > 2.0 ||
      std::abs(tight.x_max - d.box.x_max) > 2.0 || std::abs(tight.y_max - d.box.y_max) > 2.0) {
    throw RecordError("box disagrees with the mask extent by more than 2 px");
  }
  d.plane.normal = unit_from(j, "normal");
  d.plane.offset = number(j, "offset_m");
  d.plane = d.plane.canonical();
  d.axis2d = axis_from(j);
  return rec;
}

Json to_json(const TruthRecord& rec) {
  const GroundTruthFrame& g = rec.frame;
  Json j;
  j["clip_id"] = rec.clip_id;
  j["frame"] = g.frame;
  j["time_s"] = g.time;
  j["category"] = to_string(g.category);
  j["articulating"] = g.articulating;
  j["alpha"] = g.alpha;
  j["box"] = box_json(g.box);
  j["mask_rle"] = mask_json(g.mask);
  j["axis"] = axis_json(g.axis2d);
  j["normal"] = vec_json(g.plane.normal);
  j["offset_m"] = g.plane.offset;
  j["axis3d"] = axis3d_json(g.axis3d);
  return j;
}

TruthRecord truth_from_json(const Json& j) {
  TruthRecord rec;
  rec.clip_id = text(j, "clip_id");
  GroundTruthFrame& g = rec.frame;
  g.frame = integer(j, "frame");
  g.time = number(j, "time_s");
  g.category = category(j);
  g.articulating = boolean(j, "articulating");
  g.alpha = number(j, "alpha");
  g.box = box_from(j, "box");
  g.mask = mask_from(j);
  g.axis2d = axis_from(j);
  g.plane.normal = unit_from(j, "normal");
  g.plane.offset = number(j, "offset_m");
  if (j.contains("axis3d") && !j["axis3d"].is_null()) {
    const Json& a = j["axis3d"];
    try {
      g.axis3d.kind = articulation_type_from_string(text(a, "kind"));
    } catch (const std::invalid_argument& e) {
      throw RecordError(e.what());
    }
    g.axis3d.point = vec_from(a, "point");
    g.axis3d.direction = unit_from(a, "direction");
  }
  return rec;
}

Json track_to_json(const std::string& clip_id, const Track& track) {
  Json j;
  j["clip_id"] = clip_id;
  j["track_id"] = track.id;
  j["category"] = to_string(track.category);
  j["length"] = track.size();
  Json frames = Json::array();
  Json scores = Json::array();
  for (const Detection& d : track.detections) {
    frames.push_back(d.frame);
    scores.push_back(d.score);
  }
  j["frames"] = frames;
  j["scores"] = scores;
  return j;
}

Json fit_to_json(const std::string& clip_id, int track_id, const Track& track, const ArticulationFit& fit,
                 const CameraIntrinsics& K, double near_plane) {
  Json j;
  j["clip_id"] = clip_id;
  j["track_id"] = track_id;
  j["category"] = to_string(track.category);
  j["status"] = to_string(fit.status);
  if (fit.status == FitStatus::ok) {
    j["articulating"] = fit.articulating;
    j["reason"] = nullptr;
  } else {
    j["articulating"] = nullptr;
    j["reason"] = to_string(fit.status);
  }
  Json frames = Json::array();
  for (const Detection& d : track.detections) frames.push_back(d.frame);
  j["frames"] = frames;

  if (!fit.hypothesis) {
    j["hypothesis"] = nullptr;
    j["motion"] = nullptr;
    j["mean_score"] = nullptr;
    j["per_frame"] = Json::array();
    return j;
  }
  const ArticulationHypothesis& h = *fit.hypothesis;
  Json hyp;
  hyp["reference_frame"] = h.reference_frame;
  hyp["category"] = to_string(h.category);
  hyp["candidate"] = h.candidate == 0 ? (h.category == ArticulationType::rotation ? "hinge" : "in_plane") : "normal";
  hyp["plane"] = Json{{"normal", vec_json(h.plane.normal)}, {"offset_m", h.plane.offset}};
  hyp["axis3d"] = axis3d_json(h.axis3d);
  j["hypothesis"] = hyp;
  j["motion"] = Json{{"k", fit.motion.slope}, {"intercept", fit.motion.intercept}, {"r2", fit.motion.r_squared}};
  j["mean_score"] = fit.mean_score;

  Json per_frame = Json::array();
  for (std::size_t i = 0; i < fit.frame_fits.size(); ++i) {
    const FrameFit& f = fit.frame_fits[i];
    const FramePrediction pred = predict_frame(K, h, f.alpha, near_plane);
    Json e;
    e["frame"] = f.frame;
    e["time_s"] = f.time;
    e["alpha"] = f.alpha;
    e["score"] = f.score;
    e["det_score"] = track.detections[i].score;
    e["box"] = pred.box ? box_json(*pred.box) : Json(nullptr);
    e["axis"] = axis_json(pred.axis2d);
    e["normal"] = vec_json(pred.plane.normal);
    per_frame.push_back(e);
  }
  j["per_frame"] = per_frame;
  return j;
}

bool looks_like_fit(const Json& j) { return j.is_object() && j.contains("track_id"); }

FitRecord fit_from_json(const Json& j) {
  FitRecord rec;
  rec.clip_id = text(j, "clip_id");
  rec.track_id = integer(j, "track_id");
  rec.category = category(j);
  const std::string status = text(j, "status");
  if (status == "ok") {
    rec.status = FitStatus::ok;
  } else if (status == "too_short") {
    rec.status = FitStatus::too_short;
  } else if (status == "no_fit") {
    rec.status = FitStatus::no_fit;
  } else {
    throw RecordError("unknown fit status '" + status + "'");
  }
  const Json& art = field(j, "articulating");
  if (!art.is_null()) rec.articulating = boolean(j, "articulating");
  const Json& frames = field(j, "per_frame");
  if (!frames.is_array()) throw RecordError("per_frame must be an array");
  for (const Json& e : frames) {
    if (field(e, "box").is_null()) continue;
    EvalPrediction p;
    p.clip_id = rec.clip_id;
    p.frame = integer(e, "frame");
    p.category = rec.category;
    p.score = number(e, "det_score");
    p.box = box_from(e, "box");
    p.axis2d = axis_from(e);
    p.normal = unit_from(e, "normal");
    rec.per_frame.push_back(p);
  }
  return rec;
}

EvalPrediction prediction_from_detection(const DetectionRecord& rec) {
  const Detection& d = rec.detection;
  return {rec.clip_id, d.frame, d.category, d.score, d.box, d.axis2d, d.plane.normal};
}

EvalTruth truth_for_eval(const TruthRecord& rec) {
  const GroundTruthFrame& g = rec.frame;
  return {rec.clip_id, g.frame, g.category, g.articulating, g.box, g.axis2d, g.plane.normal, g.mask.width,
          g.mask.height};
}

}  // namespace artic
