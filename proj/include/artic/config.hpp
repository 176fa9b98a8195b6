#pragma once

#include <optional>
#include <string>

#include "artic/eval.hpp"
#include "artic/fitting.hpp"
#include "artic/synth.hpp"
#include "artic/tracking.hpp"

namespace artic {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Everything a run needs, loaded from one YAML file. Defaults are the
/// published thresholds.
struct RunConfig {
  std::optional<CameraIntrinsics> camera;  // unset: default intrinsics scaled to the mask size
  TrackingOptions tracking;
  FittingOptions fitting;
  EvalThresholds eval;
  std::string output_dir = "artic_out";
  SceneConfig scene;

  void validate() const;
  CameraIntrinsics camera_for(int width, int height) const;
};

RunConfig load_config(const std::string& path);
RunConfig parse_config(const std::string& yaml_text);
/// Every field with its default (or current) value, commented.
std::string dump_config(const RunConfig& config);

/// Shortest decimal text that reads back to the same double.
std::string format_number(double value);

}  // namespace artic
