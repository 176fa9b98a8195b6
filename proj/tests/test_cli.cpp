#include <doctest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>

#include "artic/commands.hpp"
#include "artic/config.hpp"
#include "artic/records.hpp"
#include "artic/render.hpp"

using namespace artic;
namespace fs = std::filesystem;

namespace {

struct Scratch {
  fs::path dir;
  Scratch() {
    dir = fs::temp_directory_path() / ("artic_cli_" + std::to_string(::getpid()));
    fs::remove_all(dir);
    fs::create_directories(dir);
  }
  ~Scratch() { fs::remove_all(dir); }
  std::string operator/(const std::string& name) const { return (dir / name).string(); }
};

int run(const std::string& args, const std::string& env = "") {
  const std::string cmd = env + " " + ARTIC_CLI_PATH + " " + args + " >/dev/null 2>&1";
  const int status = std::system(cmd.c_str());
  return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
}

std::string capture(const std::string& args) {
  const std::string cmd = std::string(ARTIC_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  if (FILE* p = ::popen(cmd.c_str(), "r")) {
    char buf[4096];
    std::size_t n;
    while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
    ::pclose(p);
  }
  return out;
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t line_count(const std::string& path) {
  std::ifstream in(path);
  std::size_t n = 0;
  for (std::string line; std::getline(in, line);) n += line.empty() ? 0 : 1;
  return n;
}

void write(const std::string& path, const std::string& text) {
  std::ofstream out(path);
  out << text;
}

}  // namespace

TEST_CASE("synth is deterministic and writes one line per frame") {
  Scratch s;
  REQUIRE(run("synth --seed 3 --out " + (s / "a")) == 0);
  REQUIRE(run("synth --seed 3 --out " + (s / "b")) == 0);
  REQUIRE(run("synth --seed 4 --out " + (s / "c")) == 0);
  CHECK(line_count(s / "a/gt.jsonl") == 30);
  CHECK(line_count(s / "a/detections.jsonl") == 30);
  CHECK(slurp(s / "a/gt.jsonl") == slurp(s / "b/gt.jsonl"));
  CHECK(slurp(s / "a/detections.jsonl") == slurp(s / "b/detections.jsonl"));
  CHECK_FALSE(fs::exists(s / "a/gt.jsonl.tmp"));
}

TEST_CASE("usage and config errors") {
  Scratch s;
  CHECK(run("") == kExitUsage);
  CHECK(run("synth --bogus") == kExitUsage);
  CHECK(run("fit") == kExitUsage);
  CHECK(run("--help") == 0);
  write(s / "bad.yaml", "tracking:\n  iou_threshold: 2\n");
  CHECK(run("synth --config " + (s / "bad.yaml") + " --out " + (s / "x")) == kExitUsage);
  CHECK(run("fit " + (s / "missing.jsonl") + " --out " + (s / "x")) == kExitData);
}

TEST_CASE("dump-config prints every default") {
  CHECK(capture("--dump-config") == dump_config(RunConfig{}));
  Scratch s;
  write(s / "c.yaml", "eval:\n  normal_deg: 20\n");
  CHECK(parse_config(capture("--dump-config --config " + (s / "c.yaml"))).eval.normal_deg == 20.0);
}

TEST_CASE("output directory precedence") {
  Scratch s;
  write(s / "c.yaml", "output_dir: " + (s / "from_config") + "\n");
  REQUIRE(run("synth --config " + (s / "c.yaml")) == 0);
  CHECK(fs::exists(s / "from_config/gt.jsonl"));
  REQUIRE(run("synth --config " + (s / "c.yaml"), "ARTIC_OUTPUT_DIR=" + (s / "from_env")) == 0);
  CHECK(fs::exists(s / "from_env/gt.jsonl"));
  REQUIRE(run("synth --config " + (s / "c.yaml") + " --out " + (s / "from_flag"), "ARTIC_OUTPUT_DIR=" + (s / "from_env2")) == 0);
  CHECK(fs::exists(s / "from_flag/gt.jsonl"));
  CHECK_FALSE(fs::exists(s / "from_env2"));
}

TEST_CASE("fit handles empty and invalid inputs") {
  Scratch s;
  write(s / "empty.jsonl", "");
  REQUIRE(run("fit " + (s / "empty.jsonl") + " --out " + (s / "e")) == 0);
  CHECK(fs::exists(s / "e/fits.jsonl"));
  CHECK(slurp(s / "e/fits.jsonl").empty());

  REQUIRE(run("synth --seed 1 --out " + (s / "d")) == 0);
  std::string text = slurp(s / "d/detections.jsonl");
  text.insert(text.find('\n') + 1, "{\"clip_id\": \"broken\"}\n");
  write(s / "bad.jsonl", text);
  CHECK(run("fit --strict " + (s / "bad.jsonl") + " --out " + (s / "f1")) == kExitData);
  CHECK_FALSE(fs::exists(s / "f1/fits.jsonl"));
  CHECK(run("fit " + (s / "bad.jsonl") + " --out " + (s / "f2")) == 0);
  CHECK(line_count(s / "f2/fits.jsonl") == 1);

  const std::string diag =
      [&] {
        const std::string cmd = std::string(ARTIC_CLI_PATH) + " fit --strict " + (s / "bad.jsonl") + " --out " +
                                (s / "f3") + " 2>&1 >/dev/null";
        std::string out;
        if (FILE* p = ::popen(cmd.c_str(), "r")) {
          char buf[512];
          std::size_t n;
          while ((n = std::fread(buf, 1, sizeof buf, p)) > 0) out.append(buf, n);
          ::pclose(p);
        }
        return out;
      }();
  CHECK(diag.find("bad.jsonl:2:") != std::string::npos);
}

TEST_CASE("short tracks are reported, not dropped") {
  Scratch s;
  write(s / "c.yaml", "scene:\n  motion:\n    frames: 3\n");
  REQUIRE(run("synth --config " + (s / "c.yaml") + " --out " + (s / "d")) == 0);
  REQUIRE(run("fit " + (s / "d/detections.jsonl") + " --out " + (s / "d")) == 0);
  std::ifstream in(s / "d/fits.jsonl");
  std::string line;
  REQUIRE(std::getline(in, line));
  const Json j = Json::parse(line);
  CHECK(j["articulating"].is_null());
  CHECK(j["reason"] == "too_short");
}

TEST_CASE("eval reports, echoes thresholds and checks ids") {
  Scratch s;
  REQUIRE(run("synth --static-clips 1 --clips 0 --out " + (s / "neg")) == 0);
  REQUIRE(run("fit " + (s / "neg/detections.jsonl") + " --out " + (s / "neg")) == 0);
  write(s / "c.yaml", "eval:\n  bbox_iou: 0.6\n  normal_deg: 25\n");
  REQUIRE(run("eval --config " + (s / "c.yaml") + " " + (s / "neg/fits.jsonl") + " " + (s / "neg/gt.jsonl") +
              " --out " + (s / "neg")) == 0);
  const Json m = Json::parse(slurp(s / "neg/metrics.json"));
  CHECK(m["recognition"]["auroc"].is_null());
  CHECK(m["thresholds"]["bbox_iou"] == 0.6);
  CHECK(m["thresholds"]["normal_deg"] == 25.0);
  CHECK(m["thresholds"]["ea_score"] == 0.5);
  CHECK(m["ap"]["rotation"]["bbox"]["ap"].is_null());
  CHECK(m["ap"]["rotation"].contains("bbox+axis+normal"));
  CHECK(m["ap"]["translation"].contains("bbox+axis"));

  // Predictions for a clip the ground truth does not know.
  REQUIRE(run("synth --seed 2 --out " + (s / "pos")) == 0);
  std::string det = slurp(s / "pos/detections.jsonl");
  for (std::size_t at = det.find("clip_0000"); at != std::string::npos; at = det.find("clip_0000", at + 1)) {
    det.replace(at, 9, "clip_9999");
  }
  write(s / "alien.jsonl", det);
  CHECK(run("eval " + (s / "alien.jsonl") + " " + (s / "pos/gt.jsonl") + " --out " + (s / "pos")) == kExitData);
  // Raw detections are accepted as predictions too.
  CHECK(run("eval " + (s / "pos/detections.jsonl") + " " + (s / "pos/gt.jsonl") + " --out " + (s / "pos")) == 0);
}

TEST_CASE("render writes deterministic overlays") {
  Scratch s;
  REQUIRE(run("synth --seed 1 --out " + (s / "d")) == 0);
  REQUIRE(run("render --gt " + (s / "d/gt.jsonl") + " --frames 0:2 --out " + (s / "r1")) == 0);
  REQUIRE(run("render --gt " + (s / "d/gt.jsonl") + " --frames 0:2 --out " + (s / "r2")) == 0);
  CHECK(fs::exists(s / "r1/clip_0000_0002.ppm"));
  CHECK_FALSE(fs::exists(s / "r1/clip_0000_0003.ppm"));
  CHECK(slurp(s / "r1/clip_0000_0001.ppm") == slurp(s / "r2/clip_0000_0001.ppm"));
  CHECK(run("render --gt " + (s / "d/gt.jsonl") + " --frames 25:40 --out " + (s / "r3")) == kExitData);
  CHECK(run("render --gt " + (s / "d/gt.jsonl") + " --clip nope --out " + (s / "r3")) == kExitData);
  CHECK(run("render --out " + (s / "r3")) == kExitUsage);

  // The hinge is drawn edge to edge along the ground-truth axis.
  std::ifstream in(s / "d/gt.jsonl");
  std::string first;
  std::getline(in, first);
  const TruthRecord gt = truth_from_json(Json::parse(first));
  REQUIRE(gt.frame.axis2d);
  const std::string ppm = slurp(s / "r1/clip_0000_0000.ppm");
  const std::size_t header = std::string("P6\n640 480\n255\n").size();
  REQUIRE(ppm.size() == header + 640 * 480 * 3);
  const ProjectedAxis& ax = *gt.frame.axis2d;
  int on_line = 0;
  for (int y = 0; y < 480; ++y) {
    const double x = (ax.p - y * std::sin(ax.theta)) / std::cos(ax.theta);
    bool hit = false;
    for (int dx = -1; dx <= 1; ++dx) {
      const int xi = static_cast<int>(std::lround(x)) + dx;
      if (xi < 0 || xi >= 640) continue;
      const std::size_t at = header + (static_cast<std::size_t>(y) * 640 + xi) * 3;
      hit = hit || (static_cast<unsigned char>(ppm[at]) == kTruthColor.r &&
                    static_cast<unsigned char>(ppm[at + 1]) == kTruthColor.g &&
                    static_cast<unsigned char>(ppm[at + 2]) == kTruthColor.b);
    }
    on_line += hit ? 1 : 0;
  }
  CHECK(on_line >= 470);
}

TEST_CASE("an empty frame renders background only") {
  const Canvas c = render_frame(8, 6, {});
  for (int y = 0; y < 6; ++y) {
    for (int x = 0; x < 8; ++x) CHECK(c.at(x, y) == kBackground);
  }
  CHECK(c.to_ppm().substr(0, 9) == "P6\n8 6\n25");
}
