#pragma once

#include <istream>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "artic/eval.hpp"
#include "artic/fitting.hpp"
#include "artic/synth.hpp"
#include "artic/tracking.hpp"

namespace artic {

using Json = nlohmann::ordered_json;

/// Raised for records that parse as JSON but violate a field invariant.
class RecordError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DetectionRecord {
  std::string clip_id;
  Detection detection;
};

struct TruthRecord {
  std::string clip_id;
  GroundTruthFrame frame;
};

/// Decoded form of one `fits.jsonl` line, enough to evaluate or render it.
struct FitRecord {
  std::string clip_id;
  int track_id = 0;
  ArticulationType category = ArticulationType::rotation;
  FitStatus status = FitStatus::no_fit;
  std::optional<bool> articulating;
  std::vector<EvalPrediction> per_frame;
};

Json to_json(const DetectionRecord& rec);
Json to_json(const TruthRecord& rec);
Json track_to_json(const std::string& clip_id, const Track& track);
Json fit_to_json(const std::string& clip_id, int track_id, const Track& track, const ArticulationFit& fit,
                 const CameraIntrinsics& K, double near_plane);

DetectionRecord detection_from_json(const Json& j);
TruthRecord truth_from_json(const Json& j);
FitRecord fit_from_json(const Json& j);

/// A record file of either kind: detections (have "mask_rle" and no
/// "track_id") or fits (have "track_id").
bool looks_like_fit(const Json& j);

struct LineIssue {
  std::size_t line = 0;
  std::string message;
};

/// Parses every non-blank line, collecting per-line failures instead of
/// stopping at the first one.
template <typename Record, typename Decode>
std::vector<Record> read_jsonl(std::istream& in, Decode decode, std::vector<LineIssue>& issues) {
  std::vector<Record> out;
  std::string line;
  std::size_t number = 0;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(decode(Json::parse(line)));
    } catch (const std::exception& e) {
      issues.push_back({number, e.what()});
    }
  }
  return out;
}

EvalPrediction prediction_from_detection(const DetectionRecord& rec);
EvalTruth truth_for_eval(const TruthRecord& rec);

}  // namespace artic
