#include "artic/config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

namespace artic {

std::string format_number(double value) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof(buf), value);
  std::string s(buf, res.ptr);
  if (s.find_first_of(".eEn") == std::string::npos) s += ".0";
  return s;
}

void RunConfig::validate() const {
  if (!(tracking.iou_threshold >= 0.0 && tracking.iou_threshold <= 1.0)) {
    throw ConfigError("tracking.iou_threshold must lie in [0, 1]");
  }
  if (fitting.min_track_length < 2) throw ConfigError("fitting.min_track_length must be at least 2");
  try {
    if (camera) camera->validate();
    fitting.rotation_grid.validate();
    fitting.translation_grid.validate();
    eval.validate();
    scene.validate();
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  if (!(fitting.near_plane > 0.0)) throw ConfigError("fitting.near_plane_m must be positive");
  if (!(fitting.simplify_tol >= 0.0)) throw ConfigError("fitting.simplify_tol_px must be non-negative");
  const ClassificationThresholds& c = fitting.thresholds;
  if (!(c.min_r_squared >= 0.0 && c.min_r_squared <= 1.0)) throw ConfigError("classification.min_r_squared must lie in [0, 1]");
  if (!(c.min_abs_slope >= 0.0)) throw ConfigError("classification.min_abs_slope must be non-negative");
  if (!(c.score_floor >= 0.0 && c.score_floor <= 1.0)) throw ConfigError("classification.score_floor must lie in [0, 1]");
}

CameraIntrinsics RunConfig::camera_for(int width, int height) const {
  return camera ? *camera : default_intrinsics(width, height);
}

namespace {

// Walks a YAML map, reading known keys and rejecting unknown ones.
class Section {
 public:
  Section(const YAML::Node& node, std::string path) : node_(node), path_(std::move(path)) {
    if (node_ && !node_.IsNull() && !node_.IsMap()) throw ConfigError(path_ + " must be a mapping");
  }
  ~Section() = default;

  template <typename T>
  void read(const char* key, T& out) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return;
    const YAML::Node v = node_[key];
    if (!v) return;
    try {
      out = v.as<T>();
    } catch (const YAML::Exception&) {
      throw ConfigError(path_ + "." + key + " has the wrong type");
    }
  }

  Section child(const char* key) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return Section(YAML::Node(), path_ + "." + key);
    return Section(node_[key], path_ + "." + key);
  }

  YAML::Node raw(const char* key) {
    seen_.insert(key);
    if (!node_ || node_.IsNull()) return YAML::Node();
    return node_[key];
  }

  void finish() const {
    if (!node_ || node_.IsNull()) return;
    for (const auto& kv : node_) {
      const std::string key = kv.first.as<std::string>();
      if (!seen_.count(key)) throw ConfigError("unknown key " + path_ + "." + key);
    }
  }

 private:
  YAML::Node node_;
  std::string path_;
  std::set<std::string> seen_;
};

void read_grid(Section& parent, const char* key, GridSpec& grid) {
  Section s = parent.child(key);
  s.read("lo", grid.lo);
  s.read("hi", grid.hi);
  s.read("step", grid.step);
  s.finish();
}

void read_camera(Section s, CameraIntrinsics& K) {
  s.read("fx", K.fx);
  s.read("fy", K.fy);
  s.read("cx", K.cx);
  s.read("cy", K.cy);
  s.read("width", K.width);
  s.read("height", K.height);
  s.finish();
}

Vec3 read_vec3(const YAML::Node& node, const std::string& path, const Vec3& fallback) {
  if (!node || node.IsNull()) return fallback;
  if (!node.IsSequence() || node.size() != 3) throw ConfigError(path + " must be a list of 3 numbers");
  try {
    return {node[0].as<double>(), node[1].as<double>(), node[2].as<double>()};
  } catch (const YAML::Exception&) {
    throw ConfigError(path + " must be a list of 3 numbers");
  }
}

template <typename Enum, typename Parse>
void read_enum(Section& s, const char* key, Enum& out, Parse parse, const std::string& path) {
  std::string name;
  s.read(key, name);
  if (name.empty()) return;
  try {
    out = parse(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError(path + "." + key + ": " + e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& yaml_text) {
  YAML::Node root;
  try {
    root = YAML::Load(yaml_text);
  } catch (const YAML::Exception& e) {
    throw ConfigError(std::string("config is not valid YAML: ") + e.what());
  }
  RunConfig cfg;
  Section top(root, "config");

  const YAML::Node cam = top.raw("camera");
  if (cam && !cam.IsNull()) {
    CameraIntrinsics K;
    read_camera(Section(cam, "config.camera"), K);
    cfg.camera = K;
  }

  {
    Section s = top.child("tracking");
    s.read("iou_threshold", cfg.tracking.iou_threshold);
    std::string overlap;
    s.read("overlap", overlap);
    if (overlap == "box") {
      cfg.tracking.overlap = TrackingOverlap::box;
    } else if (!overlap.empty() && overlap != "mask") {
      throw ConfigError("config.tracking.overlap must be 'mask' or 'box'");
    }
    s.finish();
  }
  {
    Section s = top.child("fitting");
    s.read("min_track_length", cfg.fitting.min_track_length);
    read_grid(s, "rotation_grid", cfg.fitting.rotation_grid);
    read_grid(s, "translation_grid", cfg.fitting.translation_grid);
    s.read("near_plane_m", cfg.fitting.near_plane);
    s.read("simplify_tol_px", cfg.fitting.simplify_tol);
    s.finish();
  }
  {
    Section s = top.child("classification");
    s.read("min_r_squared", cfg.fitting.thresholds.min_r_squared);
    s.read("min_abs_slope", cfg.fitting.thresholds.min_abs_slope);
    s.read("score_floor", cfg.fitting.thresholds.score_floor);
    s.finish();
  }
  {
    Section s = top.child("eval");
    s.read("bbox_iou", cfg.eval.bbox_iou);
    s.read("ea_score", cfg.eval.ea_score);
    s.read("normal_deg", cfg.eval.normal_deg);
    s.finish();
  }
  top.read("output_dir", cfg.output_dir);

  {
    Section s = top.child("scene");
    SceneConfig& sc = cfg.scene;
    s.read("clip_id", sc.clip_id);
    const YAML::Node scam = s.raw("camera");
    if (scam && !scam.IsNull()) read_camera(Section(scam, "config.scene.camera"), sc.camera);
    {
      Section p = s.child("panel");
      p.read("width_m", sc.panel.width);
      p.read("height_m", sc.panel.height);
      sc.panel.center = read_vec3(p.raw("center_m"), "config.scene.panel.center_m", sc.panel.center);
      p.read("yaw_deg", sc.panel.yaw_deg);
      p.read("pitch_deg", sc.panel.pitch_deg);
      p.finish();
    }
    {
      Section m = s.child("motion");
      read_enum(m, "type", sc.motion.type, articulation_type_from_string, "config.scene.motion");
      read_enum(m, "hinge", sc.motion.hinge, hinge_edge_from_string, "config.scene.motion");
      read_enum(m, "slide", sc.motion.slide, slide_direction_from_string, "config.scene.motion");
      m.read("slope", sc.motion.slope);
      m.read("intercept", sc.motion.intercept);
      m.read("frames", sc.motion.frames);
      m.read("fps", sc.motion.fps);
      m.finish();
    }
    {
      Section o = s.child("occluder");
      o.read("enabled", sc.occluder.enabled);
      o.read("fraction", sc.occluder.fraction);
      o.read("offset_x", sc.occluder.offset_x);
      o.read("offset_y", sc.occluder.offset_y);
      o.read("drift_x_px", sc.occluder.drift_x);
      o.read("drift_y_px", sc.occluder.drift_y);
      o.finish();
    }
    {
      Section n = s.child("noise");
      n.read("mask_vertex_jitter_sigma_px", sc.noise.mask_vertex_jitter_sigma);
      n.read("axis_angle_sigma_rad", sc.noise.axis_angle_sigma);
      n.read("axis_offset_sigma_px", sc.noise.axis_offset_sigma);
      n.read("normal_angle_sigma_rad", sc.noise.normal_angle_sigma);
      n.read("offset_sigma_m", sc.noise.offset_sigma);
      n.read("detection_drop_prob", sc.noise.detection_drop_prob);
      n.read("score_min", sc.noise.score_min);
      n.read("score_max", sc.noise.score_max);
      n.finish();
    }
    s.finish();
  }
  top.finish();
  cfg.validate();
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open config file '" + path + "'");
  std::stringstream buf;
  buf << in.rdbuf();
  return parse_config(buf.str());
}

namespace {

void put_camera(std::ostringstream& os, const CameraIntrinsics& K, const std::string& indent) {
  os << indent << "fx: " << format_number(K.fx) << "\n";
  os << indent << "fy: " << format_number(K.fy) << "\n";
  os << indent << "cx: " << format_number(K.cx) << "\n";
  os << indent << "cy: " << format_number(K.cy) << "\n";
  os << indent << "width: " << K.width << "\n";
  os << indent << "height: " << K.height << "\n";
}

void put_grid(std::ostringstream& os, const char* name, const GridSpec& g, const char* comment) {
  os << "  " << name << ":  # " << comment << "\n";
  os << "    lo: " << format_number(g.lo) << "\n";
  os << "    hi: " << format_number(g.hi) << "\n";
  os << "    step: " << format_number(g.step) << "\n";
}

std::string vec_text(const Vec3& v) {
  return "[" + format_number(v.x()) + ", " + format_number(v.y()) + ", " + format_number(v.z()) + "]";
}

}  // namespace

std::string dump_config(const RunConfig& c) {
  std::ostringstream os;
  os << "# artic run configuration\n";
  if (c.camera) {
    os << "camera:\n";
    put_camera(os, *c.camera, "  ");
  } else {
    os << "camera: null  # null: ScanNet intrinsics fx=fy=577.87, cx=319.5, cy=239.5 at 640x480, scaled to the mask size\n";
  }
  os << "tracking:\n";
  os << "  iou_threshold: " << format_number(c.tracking.iou_threshold)
     << "  # minimum overlap to link detections in consecutive frames\n";
  os << "  overlap: " << (c.tracking.overlap == TrackingOverlap::mask ? "mask" : "box") << "  # mask | box\n";
  os << "fitting:\n";
  os << "  min_track_length: " << c.fitting.min_track_length << "  # shorter tracks are reported as too_short\n";
  put_grid(os, "rotation_grid", c.fitting.rotation_grid, "radians");
  put_grid(os, "translation_grid", c.fitting.translation_grid, "meters");
  os << "  near_plane_m: " << format_number(c.fitting.near_plane) << "\n";
  os << "  simplify_tol_px: " << format_number(c.fitting.simplify_tol) << "  # Douglas-Peucker tolerance\n";
  os << "classification:\n";
  os << "  min_r_squared: " << format_number(c.fitting.thresholds.min_r_squared)
     << "  # linear motion fit must reach this R^2\n";
  os << "  min_abs_slope: " << format_number(c.fitting.thresholds.min_abs_slope)
     << "  # |k| must exceed this; rad/s for rotation, m/s for translation\n";
  os << "  score_floor: " << format_number(c.fitting.thresholds.score_floor)
     << "  # at least one frame must reach this reprojection IoU\n";
  os << "eval:\n";
  os << "  bbox_iou: " << format_number(c.eval.bbox_iou) << "  # box IoU threshold\n";
  os << "  ea_score: " << format_number(c.eval.ea_score) << "  # axis EA-score threshold\n";
  os << "  normal_deg: " << format_number(c.eval.normal_deg) << "  # surface normal angle error threshold\n";
  os << "output_dir: " << c.output_dir << "  # --out, then $ARTIC_OUTPUT_DIR, take precedence\n";

  const SceneConfig& s = c.scene;
  os << "scene:  # synthetic generator (synth subcommand)\n";
  os << "  clip_id: " << s.clip_id << "\n";
  os << "  camera:\n";
  put_camera(os, s.camera, "    ");
  os << "  panel:\n";
  os << "    width_m: " << format_number(s.panel.width) << "\n";
  os << "    height_m: " << format_number(s.panel.height) << "\n";
  os << "    center_m: " << vec_text(s.panel.center) << "\n";
  os << "    yaw_deg: " << format_number(s.panel.yaw_deg) << "\n";
  os << "    pitch_deg: " << format_number(s.panel.pitch_deg) << "\n";
  os << "  motion:\n";
  os << "    type: " << to_string(s.motion.type) << "  # rotation | translation\n";
  os << "    hinge: " << to_string(s.motion.hinge) << "  # left | right | top | bottom\n";
  os << "    slide: " << to_string(s.motion.slide) << "  # normal | horizontal | vertical\n";
  os << "    slope: " << format_number(s.motion.slope) << "  # rad/s or m/s\n";
  os << "    intercept: " << format_number(s.motion.intercept) << "\n";
  os << "    frames: " << s.motion.frames << "\n";
  os << "    fps: " << format_number(s.motion.fps) << "\n";
  os << "  occluder:\n";
  os << "    enabled: " << (s.occluder.enabled ? "true" : "false") << "\n";
  os << "    fraction: " << format_number(s.occluder.fraction) << "\n";
  os << "    offset_x: " << format_number(s.occluder.offset_x) << "\n";
  os << "    offset_y: " << format_number(s.occluder.offset_y) << "\n";
  os << "    drift_x_px: " << format_number(s.occluder.drift_x) << "\n";
  os << "    drift_y_px: " << format_number(s.occluder.drift_y) << "\n";
  os << "  noise:\n";
  os << "    mask_vertex_jitter_sigma_px: " << format_number(s.noise.mask_vertex_jitter_sigma) << "\n";
  os << "    axis_angle_sigma_rad: " << format_number(s.noise.axis_angle_sigma) << "\n";
  os << "    axis_offset_sigma_px: " << format_number(s.noise.axis_offset_sigma) << "\n";
  os << "    normal_angle_sigma_rad: " << format_number(s.noise.normal_angle_sigma) << "\n";
  os << "    offset_sigma_m: " << format_number(s.noise.offset_sigma) << "\n";
  os << "    detection_drop_prob: " << format_number(s.noise.detection_drop_prob) << "\n";
  os << "    score_min: " << format_number(s.noise.score_min) << "\n";
  os << "    score_max: " << format_number(s.noise.score_max) << "\n";
  return os.str();
}

}  // namespace artic
