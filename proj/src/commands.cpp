#include "artic/commands.hpp"

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <future>
#include <limits>
#include <memory>
#include <map>
#include <set>
#include <sstream>
#include <vector>

#include "artic/config.hpp"
#include "artic/eval.hpp"
#include "artic/fitting.hpp"
#include "artic/records.hpp"
#include "artic/render.hpp"
#include "artic/synth.hpp"
#include "artic/tracking.hpp"

namespace artic {

namespace fs = std::filesystem;

std::string resolve_output_dir(const std::optional<std::string>& flag, const std::string& config_value) {
  if (flag && !flag->empty()) return *flag;
  if (const char* env = std::getenv(kOutputDirEnv); env != nullptr && *env != '\0') return env;
  return config_value;
}

void write_file_atomic(const std::string& path, const std::string& contents) {
  const fs::path target(path);
  if (target.has_parent_path()) fs::create_directories(target.parent_path());
  const fs::path tmp = target.string() + ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot write '" + tmp.string() + "'");
    out << contents;
    if (!out) throw std::runtime_error("write to '" + tmp.string() + "' failed");
  }
  fs::rename(tmp, target);
}

namespace {

RunConfig load_run_config(const CommonArgs& common) {
  return common.config_path ? load_config(*common.config_path) : RunConfig{};
}

std::ifstream open_input(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open '" + path + "'");
  return in;
}

// Prints per-line problems; true when the caller should stop.
bool report_issues(const std::string& path, const std::vector<LineIssue>& issues, bool strict, std::ostream& err) {
  for (const LineIssue& issue : issues) {
    err << path << ":" << issue.line << ": " << (strict ? "error: " : "warning: ") << issue.message << "\n";
  }
  return strict && !issues.empty();
}

std::string jsonl(const std::vector<Json>& records) {
  std::string out;
  for (const Json& r : records) {
    out += r.dump();
    out += '\n';
  }
  return out;
}

std::string padded(int value, int width) {
  std::string s = std::to_string(value);
  return std::string(static_cast<std::size_t>(std::max(0, width - static_cast<int>(s.size()))), '0') + s;
}

struct Clip {
  std::vector<FrameDetections> frames;
  int width = 0;
  int height = 0;
};

std::map<std::string, Clip> group_by_clip(const std::vector<DetectionRecord>& records) {
  std::map<std::string, std::map<int, std::vector<Detection>>> grouped;
  std::map<std::string, Clip> clips;
  for (const DetectionRecord& rec : records) {
    grouped[rec.clip_id][rec.detection.frame].push_back(rec.detection);
    Clip& clip = clips[rec.clip_id];
    clip.width = rec.detection.mask.width;
    clip.height = rec.detection.mask.height;
  }
  for (auto& [id, frames] : grouped) {
    for (auto& [frame, dets] : frames) clips[id].frames.push_back({frame, std::move(dets)});
  }
  return clips;
}

std::vector<DetectionRecord> read_detections(const std::string& path, bool strict, std::ostream& err, bool& stop) {
  std::ifstream in = open_input(path);
  std::vector<LineIssue> issues;
  auto records = read_jsonl<DetectionRecord>(in, detection_from_json, issues);
  stop = report_issues(path, issues, strict, err);
  return records;
}

template <typename Body>
int guarded(std::ostream& err, Body body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << "\n";
    return kExitData;
  }
}

}  // namespace

int cmd_dump_config(const std::optional<std::string>& config_path, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = config_path ? load_config(*config_path) : RunConfig{};
    out << dump_config(cfg);
    return static_cast<int>(kExitOk);
  });
}

int cmd_synth(const SynthArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_run_config(args.common);
    if (args.clips < 0 || args.static_clips < 0 || args.clips + args.static_clips < 1) {
      throw ConfigError("need at least one clip to generate");
    }
    const std::string dir = resolve_output_dir(args.common.out_dir, cfg.output_dir);
    const bool single = args.clips + args.static_clips == 1;

    std::vector<Json> truth;
    std::vector<Json> detections;
    auto emit = [&](const SyntheticClip& clip) {
      for (const GroundTruthFrame& g : clip.truth) truth.push_back(to_json(TruthRecord{clip.clip_id, g}));
      for (const FrameDetections& f : clip.detections) {
        for (const Detection& d : f.detections) detections.push_back(to_json(DetectionRecord{clip.clip_id, d}));
      }
    };
    for (int i = 0; i < args.clips; ++i) {
      SceneConfig scene = cfg.scene;
      if (!single) scene.clip_id = cfg.scene.clip_id + "_" + padded(i, 3);
      emit(generate_sequence(scene, args.seed + static_cast<std::uint64_t>(i)));
    }
    for (int i = 0; i < args.static_clips; ++i) {
      SceneConfig scene = cfg.scene;
      if (!single) scene.clip_id = cfg.scene.clip_id + "_static_" + padded(i, 3);
      emit(make_static_negative(scene, args.seed + static_cast<std::uint64_t>(args.clips + i)));
    }
    write_file_atomic((fs::path(dir) / "gt.jsonl").string(), jsonl(truth));
    write_file_atomic((fs::path(dir) / "detections.jsonl").string(), jsonl(detections));
    out << "wrote " << truth.size() << " ground-truth frames and " << detections.size() << " detections to " << dir
        << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_track(const TrackArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_run_config(args.common);
    bool stop = false;
    const auto records = read_detections(args.detections_path, args.common.strict, err, stop);
    if (stop) return static_cast<int>(kExitData);
    std::vector<Json> lines;
    for (const auto& [clip_id, clip] : group_by_clip(records)) {
      for (const Track& t : greedy_track(clip.frames, cfg.tracking)) lines.push_back(track_to_json(clip_id, t));
    }
    const std::string dir = resolve_output_dir(args.common.out_dir, cfg.output_dir);
    write_file_atomic((fs::path(dir) / "tracks.jsonl").string(), jsonl(lines));
    out << "wrote " << lines.size() << " tracks to " << dir << "\n";
    return static_cast<int>(kExitOk);
  });
}

int cmd_fit(const FitArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_run_config(args.common);
    bool stop = false;
    const auto records = read_detections(args.detections_path, args.common.strict, err, stop);
    if (stop) return static_cast<int>(kExitData);

    // Clips are independent; results are collected in clip order.
    std::vector<std::future<std::vector<Json>>> jobs;
    for (auto& [clip_id, clip] : group_by_clip(records)) {
      jobs.push_back(std::async(std::launch::async, [&cfg, id = clip_id, c = std::move(clip)] {
        const CameraIntrinsics K = cfg.camera_for(c.width, c.height);
        std::vector<Json> lines;
        for (const Track& t : greedy_track(c.frames, cfg.tracking)) {
          const ArticulationFit fit = fit_track(t, K, cfg.fitting);
          lines.push_back(fit_to_json(id, t.id, t, fit, K, cfg.fitting.near_plane));
        }
        return lines;
      }));
    }
    std::vector<Json> lines;
    for (auto& job : jobs) {
      for (Json& j : job.get()) lines.push_back(std::move(j));
    }
    const std::string dir = resolve_output_dir(args.common.out_dir, cfg.output_dir);
    write_file_atomic((fs::path(dir) / "fits.jsonl").string(), jsonl(lines));
    out << "wrote " << lines.size() << " track fits to " << dir << "\n";
    return static_cast<int>(kExitOk);
  });
}

namespace {

enum class PredictionKind { detections, fits };

struct Predictions {
  PredictionKind kind = PredictionKind::detections;
  std::vector<EvalPrediction> all;            // every prediction in the file
  std::vector<EvalPrediction> articulating;   // the subset claiming articulation
};

Predictions read_predictions(const std::string& path, bool strict, std::ostream& err, bool& stop) {
  std::ifstream in = open_input(path);
  std::vector<LineIssue> issues;
  Predictions preds;
  std::string line;
  std::size_t number = 0;
  bool kind_known = false;
  while (std::getline(in, line)) {
    ++number;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const Json j = Json::parse(line);
      if (!kind_known) {
        preds.kind = looks_like_fit(j) ? PredictionKind::fits : PredictionKind::detections;
        kind_known = true;
      }
      if (preds.kind == PredictionKind::fits) {
        const FitRecord rec = fit_from_json(j);
        preds.all.insert(preds.all.end(), rec.per_frame.begin(), rec.per_frame.end());
        if (rec.articulating.value_or(false)) {
          preds.articulating.insert(preds.articulating.end(), rec.per_frame.begin(), rec.per_frame.end());
        }
      } else {
        const EvalPrediction p = prediction_from_detection(detection_from_json(j));
        preds.all.push_back(p);
        preds.articulating.push_back(p);
      }
    } catch (const std::exception& e) {
      issues.push_back({number, e.what()});
    }
  }
  stop = report_issues(path, issues, strict, err);
  return preds;
}

std::vector<TruthRecord> read_truth(const std::string& path, bool strict, std::ostream& err, bool& stop) {
  std::ifstream in = open_input(path);
  std::vector<LineIssue> issues;
  auto records = read_jsonl<TruthRecord>(in, truth_from_json, issues);
  stop = report_issues(path, issues, strict, err);
  return records;
}

Json optional_number(const std::optional<double>& v) { return v ? Json(*v) : Json(nullptr); }

}  // namespace

int cmd_eval(const EvalArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_run_config(args.common);
    bool stop_pred = false;
    bool stop_truth = false;
    const Predictions preds = read_predictions(args.predictions_path, args.common.strict, err, stop_pred);
    const auto truth_records = read_truth(args.truth_path, args.common.strict, err, stop_truth);
    if (stop_pred || stop_truth) return static_cast<int>(kExitData);

    std::vector<EvalTruth> truths;
    std::set<std::pair<std::string, int>> known;
    for (const TruthRecord& r : truth_records) {
      truths.push_back(truth_for_eval(r));
      known.insert({r.clip_id, r.frame.frame});
    }
    for (const EvalPrediction& p : preds.all) {
      if (!known.count({p.clip_id, p.frame})) {
        err << "error: prediction for clip '" << p.clip_id << "' frame " << p.frame
            << " has no ground-truth frame\n";
        return static_cast<int>(kExitData);
      }
    }

    Json report;
    report["predictions"] = preds.kind == PredictionKind::fits ? "fits" : "detections";
    report["thresholds"] = Json{{"bbox_iou", cfg.eval.bbox_iou},
                                {"ea_score", cfg.eval.ea_score},
                                {"normal_deg", cfg.eval.normal_deg}};
    report["num_truth_frames"] = truths.size();
    report["num_predictions"] = preds.articulating.size();

    std::vector<double> scores = frame_recognition_scores(preds.articulating, truths);
    std::vector<bool> labels_vec;
    for (const EvalTruth& t : truths) labels_vec.push_back(t.articulating);
    const std::size_t positives = static_cast<std::size_t>(std::count(labels_vec.begin(), labels_vec.end(), true));
    Json recog;
    if (positives == 0 || positives == labels_vec.size()) {
      recog["auroc"] = nullptr;
      recog["note"] = "undefined: ground truth has a single class";
    } else {
      std::unique_ptr<bool[]> labels(new bool[labels_vec.size()]);
      std::copy(labels_vec.begin(), labels_vec.end(), labels.get());
      recog["auroc"] = evaluate_auroc(scores, std::span<const bool>(labels.get(), labels_vec.size()));
    }
    recog["positive_frames"] = positives;
    recog["negative_frames"] = labels_vec.size() - positives;
    report["recognition"] = recog;

    Json ap;
    for (ArticulationType cat : {ArticulationType::rotation, ArticulationType::translation}) {
      Json per_cat;
      for (ApVariant v : kAllVariants) {
        const APResult r = evaluate_ap(preds.articulating, truths, cfg.eval, v, cat);
        per_cat[to_string(v)] = Json{{"ap", optional_number(r.ap)},
                                     {"num_truth", r.num_truth},
                                     {"num_predictions", r.num_predictions},
                                     {"true_positives", r.true_positives}};
      }
      ap[to_string(cat)] = per_cat;
    }
    report["ap"] = ap;

    const std::string text = report.dump(2) + "\n";
    const std::string dir = resolve_output_dir(args.common.out_dir, cfg.output_dir);
    write_file_atomic((fs::path(dir) / "metrics.json").string(), text);
    out << text;
    return static_cast<int>(kExitOk);
  });
}

int cmd_render(const RenderArgs& args, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const RunConfig cfg = load_run_config(args.common);
    if (!args.predictions_path && !args.truth_path) throw ConfigError("render needs --gt and/or predictions");

    std::map<int, std::vector<OverlayItem>> items;
    std::set<std::string> clips;
    std::optional<std::pair<int, int>> size;
    struct Pending {
      std::string clip;
      int frame;
      OverlayItem item;
    };
    std::vector<Pending> pending;

    if (args.truth_path) {
      bool stop = false;
      for (TruthRecord& r : read_truth(*args.truth_path, args.common.strict, err, stop)) {
        clips.insert(r.clip_id);
        if (!size) size = {r.frame.mask.width, r.frame.mask.height};
        pending.push_back({r.clip_id, r.frame.frame,
                           OverlayItem{r.frame.category, true, r.frame.box, std::move(r.frame.mask), r.frame.axis2d}});
      }
      if (stop) return static_cast<int>(kExitData);
    }
    if (args.predictions_path) {
      std::ifstream in = open_input(*args.predictions_path);
      std::vector<LineIssue> issues;
      std::string line;
      std::size_t number = 0;
      while (std::getline(in, line)) {
        ++number;
        if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
        try {
          const Json j = Json::parse(line);
          if (looks_like_fit(j)) {
            const FitRecord rec = fit_from_json(j);
            clips.insert(rec.clip_id);
            for (const EvalPrediction& p : rec.per_frame) {
              pending.push_back({p.clip_id, p.frame, OverlayItem{p.category, false, p.box, std::nullopt, p.axis2d}});
            }
          } else {
            DetectionRecord rec = detection_from_json(j);
            clips.insert(rec.clip_id);
            if (!size) size = {rec.detection.mask.width, rec.detection.mask.height};
            Detection& d = rec.detection;
            pending.push_back({rec.clip_id, d.frame, OverlayItem{d.category, false, d.box, std::move(d.mask), d.axis2d}});
          }
        } catch (const std::exception& e) {
          issues.push_back({number, e.what()});
        }
      }
      if (report_issues(*args.predictions_path, issues, args.common.strict, err)) return static_cast<int>(kExitData);
    }
    if (clips.empty()) throw std::runtime_error("inputs contain no records");
    const std::string clip = args.clip_id.value_or(*clips.begin());
    if (!clips.count(clip)) throw std::runtime_error("clip '" + clip + "' not found in the inputs");

    int lo = std::numeric_limits<int>::max();
    int hi = std::numeric_limits<int>::min();
    for (Pending& p : pending) {
      if (p.clip != clip) continue;
      lo = std::min(lo, p.frame);
      hi = std::max(hi, p.frame);
      items[p.frame].push_back(std::move(p.item));
    }
    const int first = args.first_frame.value_or(lo);
    const int last = args.last_frame.value_or(hi);
    if (first > last || first < lo || last > hi) {
      throw std::runtime_error("frame range " + std::to_string(first) + ":" + std::to_string(last) +
                               " is outside the available frames " + std::to_string(lo) + ":" + std::to_string(hi));
    }
    if (!size) {
      const CameraIntrinsics K = cfg.camera.value_or(default_intrinsics());
      size = {K.width, K.height};
    }

    const std::string dir = resolve_output_dir(args.common.out_dir, cfg.output_dir);
    int written = 0;
    for (int f = first; f <= last; ++f) {
      static const std::vector<OverlayItem> kNone;
      auto it = items.find(f);
      const Canvas canvas = render_frame(size->first, size->second, it == items.end() ? kNone : it->second);
      write_file_atomic((fs::path(dir) / (clip + "_" + padded(f, 4) + ".ppm")).string(), canvas.to_ppm());
      ++written;
    }
    out << "wrote " << written << " overlay images to " << dir << "\n";
    return static_cast<int>(kExitOk);
  });
}

}  // namespace artic
