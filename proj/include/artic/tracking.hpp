#pragma once

#include <optional>
#include <string>
#include <vector>

#include "artic/geometry.hpp"
#include "artic/raster.hpp"

namespace artic {

/// One frame's articulation observation.
struct Detection {
  int frame = 0;
  double time = 0.0;  // seconds
  Box2D box;
  Mask mask;
  ArticulationType category = ArticulationType::rotation;
  double score = 1.0;
  Plane plane;
  std::optional<ProjectedAxis> axis2d;
};

struct Track {
  int id = 0;
  std::vector<Detection> detections;
  ArticulationType category = ArticulationType::rotation;

  std::size_t size() const { return detections.size(); }
};

/// Detections observed in a single frame.
struct FrameDetections {
  int frame = 0;
  std::vector<Detection> detections;
};

enum class TrackingOverlap { mask, box };

struct TrackingOptions {
  double iou_threshold = 0.5;
  TrackingOverlap overlap = TrackingOverlap::mask;
};

/// Confidence-weighted majority category; ties go to rotation.
ArticulationType majority_category(const std::vector<Detection>& detections);

/// Greedy frame-to-frame association. Each detection at frame t links to
/// its argmax-IoU detection at frame t + 1 if the overlap reaches the
/// threshold and that target is still unclaimed. Frame-t detections claim
/// targets in descending confidence; exact ties go to the lower index.
/// Unlinked detections start new tracks, so the output partitions the input.
std::vector<Track> greedy_track(const std::vector<FrameDetections>& frames, const TrackingOptions& options = {});

}  // namespace artic
