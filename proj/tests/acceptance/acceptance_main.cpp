// Acceptance suite: one PASS/FAIL line per criterion, nonzero exit on any failure.

#include <sys/wait.h>
#include <unistd.h>
#include <yaml-cpp/yaml.h>

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <functional>
#include <future>
#include <iostream>
#include <memory>
#include <sstream>
#include <string>
#include <vector>

#include "artic/eval.hpp"
#include "artic/fitting.hpp"
#include "artic/geometry.hpp"
#include "artic/random.hpp"
#include "artic/raster.hpp"
#include "artic/records.hpp"
#include "artic/synth.hpp"
#include "artic/tracking.hpp"

using namespace artic;
namespace fs = std::filesystem;

namespace {

// Pinned tolerances.
constexpr double kRoundTripTol = 1e-6;
constexpr double kPlaneTol = 1e-9;
constexpr int kMinGeometryConfigs = 1000;
constexpr double kGeometrySeconds = 5.0;
constexpr double kDoorSlopeRel = 0.05;
constexpr double kDoorMinR2 = 0.99;
constexpr double kDoorAxisDeg = 1.0;
constexpr double kDoorAxisDist = 0.01;
constexpr double kDoorSeconds = 30.0;
constexpr double kDrawerSlopeRel = 0.10;
constexpr double kNoiseMinAccuracy = 0.90;
constexpr double kNoiseSeconds = 600.0;
constexpr double kHandCaseTol = 1e-9;

struct Outcome {
  bool pass = false;
  std::string detail;
};

struct Check {
  bool ok = true;
  std::ostringstream why;

  void expect(bool cond, const std::string& what) {
    if (!cond) {
      if (!ok) why << "; ";
      why << what;
      ok = false;
    }
  }
  Outcome done(const std::string& summary) const { return {ok, ok ? summary : summary + " | " + why.str()}; }
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream s;
  s.precision(digits);
  s << v;
  return s.str();
}

Track as_track(const SyntheticClip& clip) {
  Track t;
  for (const FrameDetections& f : clip.detections) {
    for (const Detection& d : f.detections) t.detections.push_back(d);
  }
  t.category = majority_category(t.detections);
  return t;
}

double line_gap_deg(const Vec3& a, const Vec3& b) {
  return rad2deg(std::atan2(a.cross(b).norm(), std::abs(a.dot(b))));
}

double point_line_distance(const Axis3D& line, const Vec3& x) {
  const Vec3 d = line.direction.normalized();
  const Vec3 r = x - line.point;
  return (r - r.dot(d) * d).norm();
}

// ---------------------------------------------------------------- CLI plumbing

struct RunResult {
  int code = -1;
  std::string out;
};

RunResult cli(const std::string& args) {
  const std::string cmd = std::string(ARTIC_CLI_PATH) + " " + args + " 2>/dev/null";
  RunResult r;
  FILE* p = ::popen(cmd.c_str(), "r");
  if (!p) return r;
  char buf[4096];
  std::size_t n;
  while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) r.out.append(buf, n);
  const int status = ::pclose(p);
  r.code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  return r;
}

std::string slurp(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  out << text;
}

// ---------------------------------------------------------------- criteria

Outcome geometry_round_trips() {
  Check c;
  PortableRng rng(1);
  int configs = 0;
  double worst_axis = 0.0, worst_plane = 0.0;
  for (int i = 0; i < 20000 && configs < 2000; ++i) {
    CameraIntrinsics K = default_intrinsics();
    K.fx = rng.uniform(300, 900);
    K.fy = K.fx * rng.uniform(0.9, 1.1);
    K.cx = rng.uniform(280, 360);
    K.cy = rng.uniform(200, 280);
    Vec3 n(rng.normal(), rng.normal(), rng.normal());
    n.normalize();
    if (n.z() > 0) n = -n;
    if (n.z() > -0.3) continue;
    const Vec3 centre(rng.uniform(-0.5, 0.5), rng.uniform(-0.5, 0.5), rng.uniform(1.0, 6.0));
    const Plane plane{n, n.dot(centre)};
    const Plane canon = plane.canonical();
    bool visible = true;
    for (const Vec2 corner : {Vec2(-100, -100), Vec2(K.width + 100, -100), Vec2(-100, K.height + 100),
                              Vec2(K.width + 100, K.height + 100)}) {
      const Vec3 ray((corner.x() - K.cx) / K.fx, (corner.y() - K.cy) / K.fy, 1.0);
      const double s = canon.offset / canon.normal.dot(ray);
      visible = visible && std::isfinite(s) && s > 0.0;
    }
    if (!visible) continue;

    const Vec2 a(rng.uniform(0, K.width), rng.uniform(0, K.height));
    const Vec2 b(rng.uniform(0, K.width), rng.uniform(0, K.height));
    if ((a - b).norm() < 20.0) continue;

    // Back-projected points satisfy the plane equation in its original form.
    for (const Vec2& px : {a, b}) {
      const Vec3 X = backproject_to_plane(K, px, canon);
      worst_plane = std::max(worst_plane, std::abs(plane.normal.dot(X) - plane.offset));
    }

    const ProjectedAxis axis = axis_from_endpoints(a, b);
    Axis3D lifted;
    try {
      lifted = lift_rotation_axis(K, axis, canon);
    } catch (const DegenerateError&) {
      continue;
    }
    // Compare the re-projection as an image line: sample it back onto the input line.
    const ProjectedAxis back = project_axis3d(K, lifted);
    for (const Vec2& px : {a, b}) {
      const double residual = px.x() * std::cos(back.theta) + px.y() * std::sin(back.theta) - back.p;
      worst_axis = std::max(worst_axis, std::abs(residual));
    }
    double dtheta = std::fmod(std::abs(back.theta - axis.theta), kPi);
    dtheta = std::min(dtheta, kPi - dtheta);
    worst_axis = std::max(worst_axis, dtheta);
    ++configs;
  }
  c.expect(configs >= kMinGeometryConfigs, "only " + std::to_string(configs) + " configurations");
  c.expect(worst_axis <= kRoundTripTol, "axis round trip error " + fmt(worst_axis));
  c.expect(worst_plane <= kPlaneTol, "plane residual " + fmt(worst_plane));
  return c.done(std::to_string(configs) + " configs, max axis err " + fmt(worst_axis, 3) + ", max plane residual " +
                fmt(worst_plane, 3));
}

Outcome door_recovery() {
  Check c;
  SceneConfig cfg;
  cfg.panel.width = 0.9;
  cfg.panel.height = 2.0;
  cfg.motion.type = ArticulationType::rotation;
  cfg.motion.hinge = HingeEdge::left;
  cfg.motion.fps = 10.0;
  cfg.motion.slope = deg2rad(1.5) * cfg.motion.fps;
  cfg.motion.frames = 30;
  const SyntheticClip clip = generate_sequence(cfg, 2);
  const ArticulationFit fit = fit_track(as_track(clip), clip.camera);
  c.expect(fit.status == FitStatus::ok && fit.hypothesis.has_value(), "no fit");
  if (!c.ok) return c.done("door");
  const double rel = std::abs(std::abs(fit.motion.slope) - cfg.motion.slope) / cfg.motion.slope;
  const double angle = line_gap_deg(fit.hypothesis->axis3d.direction, clip.axis3d.direction);
  const double dist = point_line_distance(clip.axis3d, fit.hypothesis->axis3d.point);
  c.expect(fit.articulating, "not articulating");
  c.expect(rel <= kDoorSlopeRel, "slope error " + fmt(rel));
  c.expect(fit.motion.r_squared >= kDoorMinR2, "R^2 " + fmt(fit.motion.r_squared));
  c.expect(angle <= kDoorAxisDeg, "axis angle " + fmt(angle));
  c.expect(dist <= kDoorAxisDist, "axis distance " + fmt(dist));
  return c.done("k=" + fmt(fit.motion.slope) + " rad/s (truth " + fmt(cfg.motion.slope) + "), R^2=" +
                fmt(fit.motion.r_squared, 5) + ", axis " + fmt(angle, 3) + " deg / " + fmt(dist * 100, 3) + " cm");
}

Outcome drawer_recovery() {
  Check c;
  SceneConfig cfg;
  cfg.motion.type = ArticulationType::translation;
  cfg.motion.slide = SlideDirection::normal;
  cfg.motion.fps = 30.0;
  cfg.motion.slope = 0.01 * cfg.motion.fps;
  cfg.panel.width = 0.6;
  cfg.panel.height = 0.3;
  cfg.panel.center = Vec3(0.0, 0.3, 2.0);
  const SyntheticClip clip = generate_sequence(cfg, 3);
  const ArticulationFit fit = fit_track(as_track(clip), clip.camera);
  c.expect(fit.status == FitStatus::ok && fit.hypothesis.has_value(), "no fit");
  if (!c.ok) return c.done("drawer");
  const double rel = std::abs(std::abs(fit.motion.slope) - cfg.motion.slope) / cfg.motion.slope;
  const double normal_gap = line_gap_deg(fit.hypothesis->axis3d.direction, clip.truth[0].plane.normal);
  c.expect(fit.hypothesis->candidate == 1, "in-plane candidate chosen");
  c.expect(normal_gap < 1.0, "direction " + fmt(normal_gap) + " deg from the normal");
  c.expect(rel <= kDrawerSlopeRel, "slope error " + fmt(rel));
  c.expect(fit.articulating, "not articulating");
  return c.done("normal candidate, k=" + fmt(fit.motion.slope) + " m/s (truth " + fmt(cfg.motion.slope) + "), R^2=" +
                fmt(fit.motion.r_squared, 5));
}

Outcome static_negative() {
  Check c;
  SceneConfig cfg;
  cfg.occluder.enabled = true;
  cfg.occluder.fraction = 0.4;
  cfg.occluder.offset_x = -0.3;
  cfg.occluder.drift_x = 4.0;
  cfg.occluder.drift_y = 1.0;
  const SyntheticClip clip = make_static_negative(cfg, 4);
  const ArticulationFit fit = fit_track(as_track(clip), clip.camera);
  const ClassificationThresholds th;
  c.expect(th.min_r_squared == 0.4 && th.min_abs_slope == 0.1, "thresholds changed");
  c.expect(fit.status == FitStatus::ok, "no fit");
  c.expect(!fit.articulating, "classified articulating");
  const bool rejected_by_motion = fit.motion.r_squared < th.min_r_squared || std::abs(fit.motion.slope) <= th.min_abs_slope;
  c.expect(rejected_by_motion, "motion test alone would accept");
  return c.done("moving occluder, k=" + fmt(fit.motion.slope) + ", R^2=" + fmt(fit.motion.r_squared) +
                ", articulating=false");
}

SceneConfig random_scene(std::uint64_t seed) {
  PortableRng rng(seed * 7919 + 11);
  SceneConfig cfg;
  cfg.panel.width = rng.uniform(0.7, 1.0);
  cfg.panel.height = rng.uniform(1.6, 2.1);
  cfg.panel.center = Vec3(rng.uniform(-0.3, 0.3), rng.uniform(-0.1, 0.1), rng.uniform(2.8, 3.6));
  cfg.panel.yaw_deg = rng.uniform(10.0, 40.0);
  cfg.motion.hinge = rng.bernoulli(0.5) ? HingeEdge::left : HingeEdge::right;
  cfg.motion.slope = (rng.bernoulli(0.5) ? 1.0 : -1.0) * deg2rad(rng.uniform(10.0, 20.0));
  cfg.noise.mask_vertex_jitter_sigma = 2.0;
  cfg.noise.axis_angle_sigma = deg2rad(2.0);
  cfg.noise.normal_angle_sigma = deg2rad(5.0);
  return cfg;
}

bool pipeline_says_articulating(const SyntheticClip& clip) {
  for (const Track& t : greedy_track(clip.detections)) {
    if (fit_track(t, clip.camera).articulating) return true;
  }
  return false;
}

Outcome noise_robustness() {
  Check c;
  std::vector<std::future<std::pair<bool, bool>>> jobs;
  for (std::uint64_t i = 0; i < 50; ++i) {
    jobs.push_back(std::async(std::launch::async, [i] {
      const SceneConfig cfg = random_scene(i);
      const bool positive = i < 25;
      const SyntheticClip clip = positive ? generate_sequence(cfg, 1000 + i) : make_static_negative(cfg, 1000 + i);
      return std::make_pair(positive, pipeline_says_articulating(clip));
    }));
  }
  int correct = 0, fp = 0, fn = 0;
  for (auto& j : jobs) {
    const auto [truth, pred] = j.get();
    correct += truth == pred ? 1 : 0;
    fp += (!truth && pred) ? 1 : 0;
    fn += (truth && !pred) ? 1 : 0;
  }
  const double acc = correct / 50.0;
  c.expect(acc >= kNoiseMinAccuracy, "accuracy " + fmt(acc));
  return c.done("accuracy " + fmt(acc) + " over 50 scenes (" + std::to_string(fn) + " missed, " + std::to_string(fp) +
                " false alarms)");
}

// The mask as seen through a fixed grille: bars `bar` pixels wide every `period` pixels.
Mask through_grille(const Mask& m, int period, int bar) {
  Mask out = m;
  for (int y = 0; y < m.height; ++y) {
    for (int x = 0; x < m.width; ++x) {
      if (x % period >= bar && y % period >= bar) out.set(x, y, false);
    }
  }
  return out;
}

Outcome score_floor() {
  Check c;
  SceneConfig cfg;
  const SyntheticClip clip = generate_sequence(cfg, 6);
  // Detections through a grille cover about a third of the panel, so the
  // filled plane segment never overlaps them by half, while the motion stays linear.
  Track grille = as_track(clip);
  for (Detection& d : grille.detections) d.mask = through_grille(d.mask, 10, 2);
  const ArticulationFit fit = fit_track(grille, clip.camera);
  c.expect(fit.status == FitStatus::ok, "no fit");
  double best = 0.0;
  for (const FrameFit& f : fit.frame_fits) best = std::max(best, f.score);
  const ClassificationThresholds th;
  c.expect(best < th.score_floor, "a frame reached IoU " + fmt(best));
  c.expect(!fit.articulating, "classified articulating");
  // The motion test alone would accept this track.
  c.expect(fit.motion.r_squared >= th.min_r_squared && std::abs(fit.motion.slope) > th.min_abs_slope,
           "motion test also rejects (R^2 " + fmt(fit.motion.r_squared) + ")");
  c.expect(classify_articulation(fit.frame_fits, fit.motion, ClassificationThresholds{th.min_r_squared, th.min_abs_slope, 0.0}),
           "accepted without the floor was expected");
  return c.done("max frame IoU " + fmt(best) + ", R^2=" + fmt(fit.motion.r_squared) + ", k=" + fmt(fit.motion.slope) +
                ", articulating=false");
}

Polygon2D random_convex(PortableRng& rng) {
  const Vec2 centre(rng.uniform(30, 70), rng.uniform(30, 70));
  const int n = 3 + static_cast<int>(rng.uniform() * 8);
  std::vector<double> angles;
  for (int i = 0; i < n; ++i) angles.push_back(rng.uniform(0, 2 * kPi));
  std::sort(angles.begin(), angles.end());
  const double r = rng.uniform(5, 28);
  Polygon2D poly;
  for (double a : angles) poly.emplace_back(centre.x() + r * std::cos(a), centre.y() + r * std::sin(a));
  return poly;
}

Outcome metric_correctness() {
  Check c;
  PortableRng rng(7);

  // Mask IoU versus a plain pixel count.
  for (int i = 0; i < 200; ++i) {
    Mask a(50, 40), b(50, 40);
    for (std::size_t k = 0; k < a.bits.size(); ++k) {
      a.bits[k] = rng.bernoulli(0.3);
      b.bits[k] = rng.bernoulli(0.5);
    }
    int inter = 0, uni = 0;
    for (int y = 0; y < 40; ++y) {
      for (int x = 0; x < 50; ++x) {
        inter += (a.at(x, y) && b.at(x, y)) ? 1 : 0;
        uni += (a.at(x, y) || b.at(x, y)) ? 1 : 0;
      }
    }
    const double oracle = uni == 0 ? 0.0 : static_cast<double>(inter) / uni;
    c.expect(mask_iou(a, b) == oracle, "mask IoU differs from pixel count");
  }

  // Rasterized area within the perimeter bound of the analytic area.
  double worst_slack = -1e9;
  for (int i = 0; i < 200; ++i) {
    const Polygon2D poly = random_convex(rng);
    double area = 0.0, perimeter = 0.0;
    for (std::size_t k = 0; k < poly.size(); ++k) {
      const Vec2& p = poly[k];
      const Vec2& q = poly[(k + 1) % poly.size()];
      area += p.x() * q.y() - q.x() * p.y();
      perimeter += (q - p).norm();
    }
    area = std::abs(area) / 2.0;
    const double err = std::abs(static_cast<double>(rasterize_polygon(poly, 100, 100).count()) - area);
    worst_slack = std::max(worst_slack, err - perimeter);
  }
  c.expect(worst_slack <= 0.0, "area outside the perimeter bound");

  // EA-score hand cases.
  const LineSegment diag{{0, 0}, {100, 100}};
  c.expect(std::abs(ea_score(diag, diag, 100, 100) - 1.0) <= kHandCaseTol, "EA identical != 1");
  c.expect(std::abs(ea_score(diag, LineSegment{{0, 100}, {100, 0}}, 100, 100)) <= kHandCaseTol, "EA perpendicular != 0");
  c.expect(std::abs(ea_score(LineSegment{{0, 0}, {50, 50}}, LineSegment{{50, 50}, {100, 100}}, 100, 100) - 0.25) <=
               kHandCaseTol,
           "EA half-offset != 0.25");

  // AP hand case: the confident prediction misses, the second one hits.
  EvalTruth truth;
  truth.clip_id = "c";
  truth.box = Box2D{100, 100, 200, 300};
  truth.axis2d = ProjectedAxis{0.0, 120.0};
  EvalPrediction hit;
  hit.clip_id = "c";
  hit.box = truth.box;
  hit.axis2d = truth.axis2d;
  hit.score = 0.5;
  EvalPrediction miss = hit;
  miss.score = 0.9;
  miss.box = Box2D{400, 300, 500, 400};
  const std::vector<EvalPrediction> preds{miss, hit};
  const std::vector<EvalTruth> truths{truth};
  const APResult ap = evaluate_ap(preds, truths, EvalThresholds{}, ApVariant::bbox, ArticulationType::rotation);
  c.expect(ap.ap && std::abs(*ap.ap - 0.5) <= kHandCaseTol, "AP hand case != 0.5");

  // AUROC hand case: three of four positive/negative pairs ordered correctly.
  const std::vector<double> s{0.9, 0.4, 0.6, 0.2};
  const bool y[] = {true, true, false, false};
  c.expect(std::abs(evaluate_auroc(s, y) - 0.75) <= kHandCaseTol, "AUROC hand case != 0.75");

  // Monotone transforms keep the AUROC.
  for (int round = 0; round < 100; ++round) {
    const std::size_t n = 4 + static_cast<std::size_t>(rng.uniform() * 40);
    std::vector<double> scores, warped;
    std::unique_ptr<bool[]> labels(new bool[n]);
    bool pos = false, neg = false;
    for (std::size_t i = 0; i < n; ++i) {
      const double v = std::round(rng.uniform() * 20.0) / 20.0;  // coarse, so ties occur
      scores.push_back(v);
      warped.push_back(std::exp(3.0 * v) + v * v * v);
      labels[i] = rng.bernoulli(0.5);
      pos = pos || labels[i];
      neg = neg || !labels[i];
    }
    if (!pos || !neg) continue;
    const std::span<const bool> lab(labels.get(), n);
    c.expect(evaluate_auroc(scores, lab) == evaluate_auroc(warped, lab), "AUROC changed under a monotone map");
  }
  return c.done("IoU exact, area within perimeter bound, EA/AP/AUROC hand cases, monotone invariance");
}

Outcome end_to_end(const fs::path& work) {
  Check c;
  const fs::path dir = work / "e2e";
  fs::create_directories(dir);
  write_text(dir / "door.yaml", "scene:\n  clip_id: door\n");
  write_text(dir / "drawer.yaml",
             "scene:\n  clip_id: drawer\n  panel:\n    width_m: 0.6\n    height_m: 0.3\n    center_m: [0.0, 0.3, 2.0]\n"
             "  motion:\n    type: translation\n    slide: normal\n    slope: 0.3\n    fps: 30.0\n");
  c.expect(cli("synth --config " + (dir / "door.yaml").string() + " --clips 2 --static-clips 2 --seed 5 --out " +
               (dir / "door").string())
                   .code == 0,
           "door synth failed");
  c.expect(cli("synth --config " + (dir / "drawer.yaml").string() + " --clips 2 --static-clips 1 --seed 9 --out " +
               (dir / "drawer").string())
                   .code == 0,
           "drawer synth failed");
  if (!c.ok) return c.done("end to end");
  write_text(dir / "gt.jsonl", slurp(dir / "door/gt.jsonl") + slurp(dir / "drawer/gt.jsonl"));
  write_text(dir / "detections.jsonl", slurp(dir / "door/detections.jsonl") + slurp(dir / "drawer/detections.jsonl"));
  c.expect(cli("fit " + (dir / "detections.jsonl").string() + " --out " + dir.string()).code == 0, "fit failed");
  c.expect(cli("eval " + (dir / "fits.jsonl").string() + " " + (dir / "gt.jsonl").string() + " --out " + dir.string())
                   .code == 0,
           "eval failed");
  if (!c.ok) return c.done("end to end");
  const Json m = Json::parse(slurp(dir / "metrics.json"));
  std::ostringstream summary;
  for (const char* cat : {"rotation", "translation"}) {
    for (const char* variant : {"bbox", "bbox+axis", "bbox+axis+normal"}) {
      const Json& ap = m["ap"][cat][variant]["ap"];
      c.expect(ap.is_number() && ap.get<double>() == 1.0,
               std::string(cat) + " " + variant + " AP " + (ap.is_number() ? fmt(ap.get<double>()) : "null"));
    }
  }
  const Json& auroc = m["recognition"]["auroc"];
  c.expect(auroc.is_number() && auroc.get<double>() == 1.0, "AUROC " + auroc.dump());
  return c.done("AP 1.0 for rotation and translation in all three variants, AUROC " + auroc.dump());
}

Outcome determinism(const fs::path& work) {
  Check c;
  const auto run_all = [&](const fs::path& dir) {
    fs::create_directories(dir);
    write_text(dir / "noisy.yaml",
               "scene:\n  occluder:\n    enabled: true\n    drift_x_px: 3.0\n  noise:\n    mask_vertex_jitter_sigma_px: 1.5\n"
               "    axis_angle_sigma_rad: 0.03\n    normal_angle_sigma_rad: 0.08\n    detection_drop_prob: 0.1\n"
               "    score_min: 0.4\n");
    const std::string d = dir.string();
    const std::string cfg = " --config " + (dir / "noisy.yaml").string();
    bool ok = true;
    ok = ok && cli("synth" + cfg + " --seed 42 --clips 2 --static-clips 1 --out " + d).code == 0;
    ok = ok && cli("track " + d + "/detections.jsonl --out " + d).code == 0;
    ok = ok && cli("fit " + d + "/detections.jsonl --out " + d).code == 0;
    ok = ok && cli("eval " + d + "/fits.jsonl " + d + "/gt.jsonl --out " + d).code == 0;
    ok = ok && cli("render --gt " + d + "/gt.jsonl --pred " + d + "/fits.jsonl --frames 0:4 --out " + d + "/render").code == 0;
    const RunResult dump = cli("--dump-config" + cfg);
    ok = ok && dump.code == 0;
    write_text(dir / "dump.yaml", dump.out);
    return ok;
  };
  const fs::path a = work / "det_a", b = work / "det_b";
  c.expect(run_all(a), "first run failed");
  c.expect(run_all(b), "second run failed");
  int compared = 0;
  for (const auto& entry : fs::recursive_directory_iterator(a)) {
    if (!entry.is_regular_file()) continue;
    const fs::path rel = fs::relative(entry.path(), a);
    c.expect(fs::exists(b / rel) && slurp(entry.path()) == slurp(b / rel), rel.string() + " differs");
    ++compared;
  }
  c.expect(compared >= 12, "too few outputs (" + std::to_string(compared) + ")");
  return c.done(std::to_string(compared) + " files byte-identical across synth, track, fit, eval, render, dump-config");
}

Outcome defaults_audit() {
  Check c;
  const RunResult r = cli("--dump-config");
  c.expect(r.code == 0, "dump-config failed");
  const YAML::Node y = YAML::Load(r.out);
  struct Expected {
    const char* section;
    const char* key;
    double value;
  };
  const Expected expected[] = {
      {"tracking", "iou_threshold", 0.5},     {"classification", "min_r_squared", 0.4},
      {"classification", "min_abs_slope", 0.1}, {"classification", "score_floor", 0.5},
      {"eval", "bbox_iou", 0.5},              {"eval", "ea_score", 0.5},
      {"eval", "normal_deg", 30.0},
  };
  std::ostringstream seen;
  for (const Expected& e : expected) {
    const YAML::Node v = y[e.section][e.key];
    const bool ok = v && v.IsScalar() && v.as<double>() == e.value;
    c.expect(ok, std::string(e.section) + "." + e.key + " is not " + fmt(e.value));
    if (ok) seen << (seen.tellp() > 0 ? ", " : "") << e.key << "=" << fmt(e.value);
  }
  return c.done(seen.str());
}

}  // namespace

int main() {
  const fs::path work = fs::temp_directory_path() / ("artic_acceptance_" + std::to_string(::getpid()));
  fs::remove_all(work);
  fs::create_directories(work);

  struct Criterion {
    int id;
    std::string name;
    std::function<Outcome()> run;
    double budget_s;  // 0: no runtime bound
  };
  const std::vector<Criterion> criteria{
      {1, "geometry round trips", geometry_round_trips, kGeometrySeconds},
      {2, "synthetic rotation recovery", door_recovery, kDoorSeconds},
      {3, "synthetic translation recovery", drawer_recovery, 0.0},
      {4, "static negative", static_negative, 0.0},
      {5, "noise robustness", noise_robustness, kNoiseSeconds},
      {6, "score-floor exclusion", score_floor, 0.0},
      {7, "metric correctness", metric_correctness, 0.0},
      {8, "end-to-end oracle", [&] { return end_to_end(work); }, 0.0},
      {9, "determinism", [&] { return determinism(work); }, 0.0},
      {10, "defaults audit", defaults_audit, 0.0},
  };

  int failures = 0;
  for (const Criterion& cr : criteria) {
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = cr.run();
    } catch (const std::exception& e) {
      o = {false, std::string("exception: ") + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (cr.budget_s > 0.0 && secs > cr.budget_s) {
      o.pass = false;
      o.detail += " | over the " + fmt(cr.budget_s) + " s budget";
    }
    failures += o.pass ? 0 : 1;
    std::cout << (o.pass ? "PASS" : "FAIL") << "  " << cr.id << ". " << cr.name << ": " << o.detail << " ("
              << fmt(secs, 3) << " s)" << std::endl;
  }
  fs::remove_all(work);
  std::cout << (failures == 0 ? "all criteria passed" : std::to_string(failures) + " criteria failed") << std::endl;
  return failures == 0 ? 0 : 1;
}
