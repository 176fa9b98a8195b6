#pragma once

#include <cstdint>
#include <optional>
#include <ostream>
#include <string>

namespace artic {

enum ExitCode : int { kExitOk = 0, kExitUsage = 1, kExitData = 2 };

/// Environment variable naming the default output directory.
inline constexpr const char* kOutputDirEnv = "ARTIC_OUTPUT_DIR";

struct CommonArgs {
  std::optional<std::string> config_path;
  std::optional<std::string> out_dir;
  bool strict = false;
};

struct SynthArgs {
  CommonArgs common;
  std::uint64_t seed = 0;
  int clips = 1;
  int static_clips = 0;
};

struct TrackArgs {
  CommonArgs common;
  std::string detections_path;
};

struct FitArgs {
  CommonArgs common;
  std::string detections_path;
};

struct EvalArgs {
  CommonArgs common;
  std::string predictions_path;  // fits.jsonl or detections.jsonl
  std::string truth_path;
};

struct RenderArgs {
  CommonArgs common;
  std::optional<std::string> predictions_path;
  std::optional<std::string> truth_path;
  std::optional<std::string> clip_id;
  std::optional<int> first_frame;
  std::optional<int> last_frame;
};

/// Writes gt.jsonl and detections.jsonl.
int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err);
/// Writes tracks.jsonl.
int cmd_track(const TrackArgs& args, std::ostream& out, std::ostream& err);
/// Writes fits.jsonl.
int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err);
/// Writes metrics.json and prints it.
int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err);
/// Writes one PPM overlay per frame.
int cmd_render(const RenderArgs& args, std::ostream& out, std::ostream& err);

int cmd_dump_config(const std::optional<std::string>& config_path, std::ostream& out, std::ostream& err);

/// --out, then $ARTIC_OUTPUT_DIR, then the config's output_dir.
std::string resolve_output_dir(const std::optional<std::string>& flag, const std::string& config_value);

/// Writes through a temporary file and renames it into place.
void write_file_atomic(const std::string& path, const std::string& contents);

}  // namespace artic
