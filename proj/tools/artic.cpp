// artic: synth | track | fit | eval | render
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "artic/commands.hpp"

namespace {

void add_common(CLI::App* cmd, artic::CommonArgs& common, std::string& config, std::string& out) {
  cmd->add_option("--config", config, "YAML run config");
  cmd->add_option("--out", out, "output directory (overrides $ARTIC_OUTPUT_DIR and the config)");
  cmd->add_flag("--strict", common.strict, "fail on the first invalid input line");
}

std::optional<std::string> nonempty(const std::string& s) {
  return s.empty() ? std::nullopt : std::optional<std::string>(s);
}

// "a:b", "a:" or ":b"; a single number means one frame.
bool parse_range(const std::string& text, std::optional<int>& first, std::optional<int>& last) {
  try {
    const auto colon = text.find(':');
    if (colon == std::string::npos) {
      first = last = std::stoi(text);
      return true;
    }
    const std::string a = text.substr(0, colon);
    const std::string b = text.substr(colon + 1);
    if (!a.empty()) first = std::stoi(a);
    if (!b.empty()) last = std::stoi(b);
    return true;
  } catch (const std::exception&) {
    return false;
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Temporal articulation fitting for planar parts"};
  app.set_version_flag("--version", "artic 1.0.0");

  std::string global_config;
  bool dump = false;
  app.add_option("--config", global_config, "YAML run config");
  app.add_flag("--dump-config", dump, "print the effective config with every default, then exit");

  artic::SynthArgs synth;
  std::string synth_config, synth_out;
  auto* s = app.add_subcommand("synth", "generate ground truth and detections for synthetic scenes");
  add_common(s, synth.common, synth_config, synth_out);
  s->add_option("--seed", synth.seed, "random seed")->default_val(0);
  s->add_option("--clips", synth.clips, "articulating clips to generate")->default_val(1);
  s->add_option("--static-clips", synth.static_clips, "static negative clips to generate")->default_val(0);

  artic::TrackArgs track;
  std::string track_config, track_out;
  auto* t = app.add_subcommand("track", "link detections into tracks");
  add_common(t, track.common, track_config, track_out);
  t->add_option("detections", track.detections_path, "detections.jsonl")->required();

  artic::FitArgs fit;
  std::string fit_config, fit_out;
  auto* f = app.add_subcommand("fit", "track, fit and classify every track");
  add_common(f, fit.common, fit_config, fit_out);
  f->add_option("detections", fit.detections_path, "detections.jsonl")->required();

  artic::EvalArgs eval;
  std::string eval_config, eval_out;
  auto* e = app.add_subcommand("eval", "AP and AUROC against ground truth");
  add_common(e, eval.common, eval_config, eval_out);
  e->add_option("predictions", eval.predictions_path, "fits.jsonl or detections.jsonl")->required();
  e->add_option("gt", eval.truth_path, "gt.jsonl")->required();

  artic::RenderArgs render;
  std::string render_config, render_out, render_pred, render_gt, render_clip, render_frames;
  auto* r = app.add_subcommand("render", "draw per-frame overlays as PPM images");
  add_common(r, render.common, render_config, render_out);
  r->add_option("--pred", render_pred, "fits.jsonl or detections.jsonl");
  r->add_option("--gt", render_gt, "gt.jsonl");
  r->add_option("--clip", render_clip, "clip id (default: first clip)");
  r->add_option("--frames", render_frames, "frame range a:b, inclusive");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForAllHelp& err) {
    return app.exit(err);
  } catch (const CLI::CallForVersion& err) {
    return app.exit(err);
  } catch (const CLI::ParseError& err) {
    app.exit(err);
    return artic::kExitUsage;
  }

  auto finish = [&](artic::CommonArgs& common, const std::string& config, const std::string& out) {
    common.config_path = nonempty(config.empty() ? global_config : config);
    common.out_dir = nonempty(out);
  };

  if (dump) {
    std::string config = global_config;
    for (const std::string* c : {&synth_config, &track_config, &fit_config, &eval_config, &render_config}) {
      if (!c->empty()) config = *c;
    }
    return artic::cmd_dump_config(nonempty(config), std::cout, std::cerr);
  }
  if (s->parsed()) {
    finish(synth.common, synth_config, synth_out);
    return artic::cmd_synth(synth, std::cout, std::cerr);
  }
  if (t->parsed()) {
    finish(track.common, track_config, track_out);
    return artic::cmd_track(track, std::cout, std::cerr);
  }
  if (f->parsed()) {
    finish(fit.common, fit_config, fit_out);
    return artic::cmd_fit(fit, std::cout, std::cerr);
  }
  if (e->parsed()) {
    finish(eval.common, eval_config, eval_out);
    return artic::cmd_eval(eval, std::cout, std::cerr);
  }
  if (r->parsed()) {
    finish(render.common, render_config, render_out);
    render.predictions_path = nonempty(render_pred);
    render.truth_path = nonempty(render_gt);
    render.clip_id = nonempty(render_clip);
    if (!render_frames.empty() && !parse_range(render_frames, render.first_frame, render.last_frame)) {
      std::cerr << "error: --frames expects a:b\n";
      return artic::kExitUsage;
    }
    return artic::cmd_render(render, std::cout, std::cerr);
  }
  std::cerr << app.help();
  return artic::kExitUsage;
}
