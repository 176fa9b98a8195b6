#include "artic/tracking.hpp"

#include <algorithm>
#include <numeric>
#include <stdexcept>

namespace artic {

ArticulationType majority_category(const std::vector<Detection>& detections) {
  double rotation = 0.0;
  double translation = 0.0;
  for (const Detection& d : detections) {
    (d.category == ArticulationType::rotation ? rotation : translation) += d.score;
  }
  return translation > rotation ? ArticulationType::translation : ArticulationType::rotation;
}

namespace {

double overlap(const Detection& a, const Detection& b, TrackingOverlap mode) {
  return mode == TrackingOverlap::mask ? mask_iou(a.mask, b.mask) : bbox_iou(a.box, b.box);
}

}  // namespace

std::vector<Track> greedy_track(const std::vector<FrameDetections>& frames, const TrackingOptions& options) {
  for (std::size_t i = 1; i < frames.size(); ++i) {
    if (frames[i].frame <= frames[i - 1].frame) throw std::invalid_argument("frames must be strictly increasing");
  }

  std::vector<Track> tracks;
  // Track index owning each detection of the previous frame.
  std::vector<std::size_t> owner_prev;

  for (std::size_t fi = 0; fi < frames.size(); ++fi) {
    const auto& current = frames[fi].detections;
    std::vector<std::size_t> owner_cur(current.size(), static_cast<std::size_t>(-1));

    const bool adjacent = fi > 0 && frames[fi].frame == frames[fi - 1].frame + 1;
    if (adjacent && !current.empty()) {
      const auto& previous = frames[fi - 1].detections;
      std::vector<std::size_t> order(previous.size());
      std::iota(order.begin(), order.end(), std::size_t{0});
      std::stable_sort(order.begin(), order.end(),
                       [&](std::size_t a, std::size_t b) { return previous[a].score > previous[b].score; });
      for (std::size_t src : order) {
        std::size_t best = 0;
        double best_iou = -1.0;
        for (std::size_t j = 0; j < current.size(); ++j) {
          const double iou = overlap(previous[src], current[j], options.overlap);
          if (iou > best_iou) {
            best_iou = iou;
            best = j;
          }
        }
        if (best_iou >= options.iou_threshold && owner_cur[best] == static_cast<std::size_t>(-1)) {
          owner_cur[best] = owner_prev[src];
          tracks[owner_prev[src]].detections.push_back(current[best]);
        }
      }
    }

    for (std::size_t j = 0; j < current.size(); ++j) {
      if (owner_cur[j] != static_cast<std::size_t>(-1)) continue;
      owner_cur[j] = tracks.size();
      Track t;
      t.id = static_cast<int>(tracks.size());
      t.detections.push_back(current[j]);
      tracks.push_back(std::move(t));
    }
    owner_prev = std::move(owner_cur);
  }

  for (Track& t : tracks) t.category = majority_category(t.detections);
  return tracks;
}

}  // namespace artic
