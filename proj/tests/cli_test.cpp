#include <gtest/gtest.h>

#include <sys/wait.h>
#include <unistd.h>

#include <algorithm>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <map>
#include <sstream>

#include "accel/commands.hpp"
#include "accel/config.hpp"
#include "accel/error.hpp"
#include "accel/image_io.hpp"
#include "accel/synth.hpp"
#include "test_util.hpp"

namespace accel {
namespace {

namespace fs = std::filesystem;
using testing::read_file;
using testing::TempDir;

struct RunResult {
  int exit_code = -1;
  std::string out;
  std::string err;
};

std::string quote(const std::string& s) {
  std::string q = "'";
  for (char c : s) q += c == '\'' ? std::string("'\\''") : std::string(1, c);
  return q + "'";
}

RunResult run(const std::vector<std::string>& args) {
  static int counter = 0;
  const fs::path base = fs::temp_directory_path() / ("accel_cli_" + std::to_string(::getpid()) + "_" +
                                                     std::to_string(counter++));
  std::string cmd = quote(ACCELIMG_BINARY);
  for (const auto& a : args) cmd += " " + quote(a);
  cmd += " >" + quote(base.string() + ".out") + " 2>" + quote(base.string() + ".err");
  const int status = std::system(cmd.c_str());
  RunResult r;
  r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
  r.out = read_file(base.string() + ".out");
  r.err = read_file(base.string() + ".err");
  fs::remove(base.string() + ".out");
  fs::remove(base.string() + ".err");
  return r;
}

std::size_t count_files(const fs::path& dir, std::string_view suffix) {
  std::size_t n = 0;
  for (const auto& e : fs::directory_iterator(dir)) n += e.path().string().ends_with(suffix);
  return n;
}

// All regular files under `root`, keyed by relative path.
std::map<std::string, std::string> snapshot(const fs::path& root) {
  std::map<std::string, std::string> files;
  for (const auto& e : fs::recursive_directory_iterator(root)) {
    if (e.is_regular_file()) files[fs::relative(e.path(), root).string()] = read_file(e.path());
  }
  return files;
}

SynthClip clip12(Vec2 v0, Vec2 a, std::uint64_t seed) {
  MotionSpec spec;
  spec.v0 = v0;
  spec.a = a;
  spec.seed = seed;
  return generate(spec);
}

void write_frames(const fs::path& dir, const FrameSequence& frames) {
  fs::create_directories(dir);
  for (std::size_t t = 0; t < frames.size(); ++t) {
    char name[32];
    std::snprintf(name, sizeof name, "frame_%03zu.pgm", t);
    write_pgm(dir / name, frames[t]);
  }
}

TEST(Cli, FlowWritesOneFieldPerPair) {
  TempDir dir("cli_flow");
  const SynthClip clip = clip12({1, 0}, {}, 3);
  write_frames(dir / "frames", clip.frames);
  const RunResult r = run({"flow", "--in", (dir / "frames").string(), "--out", (dir / "flow").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_TRUE(r.out.empty());
  EXPECT_EQ(count_files(dir / "flow", ".flo"), 11u);
  EXPECT_EQ(count_files(dir / "flow", ".pgm"), 22u);
  // Bit-exact agreement with the in-memory estimate.
  EXPECT_EQ(read_flo(dir / "flow/flow_0000.flo"), estimate_horn_schunck(clip.frames[0], clip.frames[1]));
  EXPECT_EQ(read_flo(dir / "flow/flow_0010.flo"), estimate_horn_schunck(clip.frames[10], clip.frames[11]));
}

TEST(Cli, FlowOnEmptyDirectoryFails) {
  TempDir dir("cli_empty");
  const RunResult r = run({"flow", "--in", dir.path().string(), "--out", (dir / "flow").string()});
  EXPECT_NE(r.exit_code, 0);
  EXPECT_NE(r.err.find("MissingInput"), std::string::npos) << r.err;
  EXPECT_TRUE(r.out.empty());
}

void write_constant_flows(const fs::path& dir, int count) {
  fs::create_directories(dir);
  for (int i = 0; i < count; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "flow_%04d.flo", i);
    write_flo(dir / name, FlowField::uniform(24, 16, 1.25f, -0.5f));
  }
}

TEST(Cli, AccelCountsPerMode) {
  TempDir dir("cli_accel");
  write_constant_flows(dir / "flow", 11);
  ASSERT_EQ(run({"accel", "--in", (dir / "flow").string(), "--out", (dir / "t").string()}).exit_code, 0);
  EXPECT_EQ(count_files(dir / "t", ".flo"), 10u);
  ASSERT_EQ(run({"accel", "--in", (dir / "flow").string(), "--out", (dir / "s").string(), "--mode", "spatial"})
                .exit_code,
            0);
  EXPECT_EQ(count_files(dir / "s", ".flo"), 11u);
  // The flag wins over --set.
  ASSERT_EQ(run({"accel", "--in", (dir / "flow").string(), "--out", (dir / "s2").string(), "--set",
                 "accel.mode=temporal", "--mode", "spatial"})
                .exit_code,
            0);
  EXPECT_EQ(count_files(dir / "s2", ".flo"), 11u);
}

TEST(Cli, ConstantFlowGivesFlatAccelerationImages) {
  TempDir dir("cli_flat");
  write_constant_flows(dir / "flow", 4);
  for (const char* mode : {"temporal", "spatial"}) {
    const fs::path out = dir / mode;
    ASSERT_EQ(run({"accel", "--in", (dir / "flow").string(), "--out", out.string(), "--mode", mode}).exit_code, 0);
    std::size_t images = 0;
    for (const auto& e : fs::directory_iterator(out)) {
      if (e.path().extension() != ".pgm") continue;
      ++images;
      const Frame f = read_pgm(e.path());
      EXPECT_TRUE(std::ranges::all_of(f.pixels(), [](std::uint8_t p) { return p == 128; })) << e.path();
    }
    EXPECT_GT(images, 0u);
  }
}

TEST(Cli, AccelNeedsEnoughFlows) {
  TempDir dir("cli_fewflows");
  write_constant_flows(dir / "flow", 1);
  const RunResult r = run({"accel", "--in", (dir / "flow").string(), "--out", (dir / "a").string()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("TooFewFlows"), std::string::npos) << r.err;
  EXPECT_EQ(run({"accel", "--in", (dir / "flow").string(), "--out", (dir / "s").string(), "--mode", "spatial"})
                .exit_code,
            0);
}

TEST(Cli, StackFromFlowImages) {
  TempDir dir("cli_stack");
  write_constant_flows(dir / "flow", 11);
  ASSERT_EQ(run({"accel", "--in", (dir / "flow").string(), "--out", (dir / "accel").string()}).exit_code, 0);
  // Motion images come from accel output; flow images need the flow command,
  // so build them here from the .flo files.
  for (int i = 0; i < 11; ++i) {
    char stem[32];
    std::snprintf(stem, sizeof stem, "flow_%04d", i);
    const MotionImagePair p = flow_to_images(read_flo(dir / "flow" / (std::string(stem) + ".flo")), 20.0);
    write_motion_image(dir / "flow" / (std::string(stem) + "_x"), p.x);
    write_motion_image(dir / "flow" / (std::string(stem) + "_y"), p.y);
  }
  RunResult r = run({"stack", "--in", (dir / "flow").string(), "--out", (dir / "fs").string(), "--start", "1"});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const StackedVolume flows = read_stack(dir / "fs");
  EXPECT_EQ(flows.channel_count(), 20);
  EXPECT_EQ(flows.channel(0)[0], quantize_value(1.25, 20.0));
  EXPECT_EQ(flows.channel(1)[0], quantize_value(-0.5, 20.0));

  r = run({"stack", "--in", (dir / "accel").string(), "--prefix", "accel", "--out", (dir / "as").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(read_stack(dir / "as").channel_count(), 20);

  r = run({"stack", "--in", (dir / "accel").string(), "--prefix", "accel", "--start", "1", "--out",
           (dir / "bad").string()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("OutOfRange"), std::string::npos) << r.err;

  r = run({"stack", "--in", (dir / "accel").string(), "--prefix", "accel", "--start", "8", "--length", "2",
           "--out", (dir / "short").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  EXPECT_EQ(read_stack(dir / "short").channel_count(), 4);
}

TEST(Cli, SynthManifestBalancedAndDeterministic) {
  TempDir dir("cli_synth");
  ASSERT_EQ(run({"synth", "--seed", "7", "--out", (dir / "a").string()}).exit_code, 0);
  const auto entries = read_manifest(dir / "a/manifest.txt");
  ASSERT_EQ(entries.size(), 100u);
  std::map<int, int> per_class;
  std::map<Split, int> per_split;
  for (const auto& e : entries) {
    ++per_class[e.label];
    ++per_split[e.split];
  }
  for (int k = 0; k < 4; ++k) EXPECT_EQ(per_class[k], 25);
  EXPECT_EQ(per_split[Split::Train], 60);
  EXPECT_EQ(per_split[Split::Test], 40);
  const std::string text = read_file(dir / "a/manifest.txt");
  EXPECT_EQ(std::count(text.begin(), text.end(), '\n'), 100);

  ASSERT_EQ(run({"synth", "--seed", "7", "--out", (dir / "b").string()}).exit_code, 0);
  EXPECT_TRUE(snapshot(dir / "a") == snapshot(dir / "b"));
}

// One 12-frame accelerating video labeled `label`, under videos/v<i>.
void write_tiny_dataset(const fs::path& root, const std::vector<std::pair<int, Split>>& videos) {
  std::vector<ManifestEntry> manifest;
  for (std::size_t i = 0; i < videos.size(); ++i) {
    const std::string rel = "videos/v" + std::to_string(i);
    write_frames(root / rel, clip12({0.5, 0}, {0.1, 0}, 50 + i).frames);
    manifest.push_back({rel, videos[i].first, videos[i].second});
  }
  write_manifest(root / "manifest.txt", manifest);
}

TEST(Cli, TrainLogLengthDeterminismAndOverfit) {
  TempDir dir("cli_train");
  write_tiny_dataset(dir / "data", {{1, Split::Train}});
  const std::vector<std::string> base = {"train", "--data", (dir / "data").string(), "--stream", "accel",
                                         "--seed", "5", "--set", "train.stop_at=200"};
  auto with_out = [&](const std::string& out) {
    auto args = base;
    args.insert(args.end(), {"--out", (dir / out).string()});
    return args;
  };
  RunResult r = run(with_out("m1"));
  ASSERT_EQ(r.exit_code, 0) << r.err;
  ASSERT_EQ(run(with_out("m2")).exit_code, 0);

  const std::string log = read_file(dir / "m1/accel_loss.txt");
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 200);
  EXPECT_EQ(read_file(dir / "m1/accel.model"), read_file(dir / "m2/accel.model"));
  EXPECT_EQ(log, read_file(dir / "m2/accel_loss.txt"));

  std::istringstream lines(log);
  double last = 0;
  for (double v; lines >> v;) last = v;
  EXPECT_LT(last, 0.1);

  const Model m = read_model_file(dir / "m1/accel.model");
  EXPECT_EQ(m.classes, 2);
  EXPECT_EQ(m.input_channels, 20);
}

TEST(Cli, TrainRejectsUnknownStream) {
  TempDir dir("cli_badstream");
  const RunResult r =
      run({"train", "--data", dir.path().string(), "--stream", "optical", "--out", (dir / "m").string()});
  EXPECT_NE(r.exit_code, 0);
}

Model bias_model(ModelShape shape, std::vector<double> logits) {
  Model m = init_model(shape, static_cast<int>(logits.size()), 0.0, 1);
  std::fill(m.fc_weights.begin(), m.fc_weights.end(), 0.0);
  m.fc_bias = std::move(logits);
  return m;
}

std::map<std::string, double> read_csv(const fs::path& file) {
  std::map<std::string, double> rows;
  std::istringstream in(read_file(file));
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "approach,accuracy");
  while (std::getline(in, line)) {
    const auto comma = line.find(',');
    rows[line.substr(0, comma)] = std::stod(line.substr(comma + 1));
  }
  return rows;
}

TEST(Cli, EvalWithOracleModels) {
  TempDir dir("cli_eval");
  write_tiny_dataset(dir / "data", {{0, Split::Test}, {0, Split::Test}, {1, Split::Train}});
  const PipelineConfig cfg = Config().pipeline();
  fs::create_directories(dir / "models");
  write_model_file(dir / "models/spatial.model", bias_model(cfg.stream_shape(StreamKind::Spatial, 1), {5, 0}));
  write_model_file(dir / "models/temporal.model", bias_model(cfg.stream_shape(StreamKind::Temporal, 1), {5, 0}));
  write_model_file(dir / "models/accel.model", bias_model(cfg.stream_shape(StreamKind::Acceleration, 1), {5, 0}));
  const RunResult r =
      run({"eval", "--data", (dir / "data").string(), "--models", (dir / "models").string(), "--out",
           (dir / "report").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  const auto rows = read_csv(dir / "report/report.csv");
  ASSERT_EQ(rows.size(), 5u);
  for (const auto& [name, acc] : rows) EXPECT_EQ(acc, 100.0) << name;
  EXPECT_NE(read_file(dir / "report/report.txt").find("Three streams (S+T+A)"), std::string::npos);
}

TEST(Cli, TwoStreamRowDropsAcceleration) {
  TempDir dir("cli_eval_beta");
  write_tiny_dataset(dir / "data", {{1, Split::Test}});
  const PipelineConfig cfg = Config().pipeline();
  fs::create_directories(dir / "models");
  // Spatial and temporal lean to class 0; acceleration is sure of class 1.
  write_model_file(dir / "models/spatial.model", bias_model(cfg.stream_shape(StreamKind::Spatial, 1), {1, 0}));
  write_model_file(dir / "models/temporal.model", bias_model(cfg.stream_shape(StreamKind::Temporal, 1), {1, 0}));
  write_model_file(dir / "models/accel.model", bias_model(cfg.stream_shape(StreamKind::Acceleration, 1), {0, 10}));
  ASSERT_EQ(run({"eval", "--data", (dir / "data").string(), "--models", (dir / "models").string(), "--out",
                 (dir / "r").string()})
                .exit_code,
            0);
  auto rows = read_csv(dir / "r/report.csv");
  EXPECT_EQ(rows["spatial"], 0.0);
  EXPECT_EQ(rows["temporal"], 0.0);
  EXPECT_EQ(rows["acceleration"], 100.0);
  EXPECT_EQ(rows["two_stream"], 0.0);
  EXPECT_EQ(rows["three_stream"], 100.0);

  // With beta = 0 the three-stream row collapses onto the two-stream row.
  ASSERT_EQ(run({"eval", "--data", (dir / "data").string(), "--models", (dir / "models").string(), "--out",
                 (dir / "r0").string(), "--beta", "0"})
                .exit_code,
            0);
  rows = read_csv(dir / "r0/report.csv");
  EXPECT_EQ(rows["three_stream"], 0.0);
}

TEST(Cli, EvalWithoutTestVideosFails) {
  TempDir dir("cli_eval_empty");
  write_tiny_dataset(dir / "data", {{0, Split::Train}});
  const PipelineConfig cfg = Config().pipeline();
  fs::create_directories(dir / "models");
  write_model_file(dir / "models/spatial.model", bias_model(cfg.stream_shape(StreamKind::Spatial, 1), {1, 0}));
  write_model_file(dir / "models/temporal.model", bias_model(cfg.stream_shape(StreamKind::Temporal, 1), {1, 0}));
  write_model_file(dir / "models/accel.model", bias_model(cfg.stream_shape(StreamKind::Acceleration, 1), {1, 0}));
  const RunResult r = run({"eval", "--data", (dir / "data").string(), "--models", (dir / "models").string(),
                           "--out", (dir / "r").string()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("EmptySplit"), std::string::npos) << r.err;
}

TEST(Cli, FuseScoreFiles) {
  TempDir dir("cli_fuse");
  std::ofstream(dir / "s.txt") << "0.7 0.3\n";
  std::ofstream(dir / "t.txt") << "0.2 0.8\n";
  std::ofstream(dir / "a.txt") << "0.6 0.4\n";
  const std::vector<std::string> files = {"--spatial", (dir / "s.txt").string(), "--temporal",
                                          (dir / "t.txt").string(), "--accel", (dir / "a.txt").string()};
  auto args = files;
  args.insert(args.begin(), "fuse");
  args.insert(args.end(), {"--out", (dir / "f").string()});
  ASSERT_EQ(run(args).exit_code, 0);
  const std::string fused = read_file(dir / "f/fused.txt");
  EXPECT_NE(fused.find("label=1"), std::string::npos) << fused;
  std::istringstream in(fused);
  double f0 = 0;
  double f1 = 0;
  in >> f0 >> f1;
  EXPECT_DOUBLE_EQ(f0, 2.3);
  EXPECT_DOUBLE_EQ(f1, 2.7);

  args = files;
  args.insert(args.begin(), "fuse");
  args.insert(args.end(), {"--out", (dir / "g").string(), "--alpha", "0", "--beta", "0"});
  ASSERT_EQ(run(args).exit_code, 0);
  EXPECT_NE(read_file(dir / "g/fused.txt").find("label=0"), std::string::npos);

  std::ofstream(dir / "bad.txt") << "0.5 0.3 0.2\n";
  args = {"fuse", "--spatial", (dir / "bad.txt").string(), "--temporal", (dir / "t.txt").string(),
          "--accel", (dir / "a.txt").string(), "--out", (dir / "h").string()};
  const RunResult r = run(args);
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("LengthMismatch"), std::string::npos) << r.err;
}

TEST(Cli, ConfigFileAndOverrides) {
  TempDir dir("cli_config");
  write_tiny_dataset(dir / "data", {{0, Split::Train}});
  std::ofstream(dir / "exp.cfg") << "# tiny run\ntrain.stop_at = 7\ntrain.decay_every = 3\n";
  RunResult r = run({"train", "--data", (dir / "data").string(), "--stream", "spatial", "--config",
                     (dir / "exp.cfg").string(), "--out", (dir / "a").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  std::string log = read_file(dir / "a/spatial_loss.txt");
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 7);

  r = run({"train", "--data", (dir / "data").string(), "--stream", "spatial", "--config",
           (dir / "exp.cfg").string(), "--set", "train.stop_at=4", "--out", (dir / "b").string()});
  ASSERT_EQ(r.exit_code, 0) << r.err;
  log = read_file(dir / "b/spatial_loss.txt");
  EXPECT_EQ(std::count(log.begin(), log.end(), '\n'), 4);

  std::ofstream(dir / "bad.cfg") << "train.stop_at = 7\ntrain.learning_rate = 0.1\n";
  r = run({"train", "--data", (dir / "data").string(), "--config", (dir / "bad.cfg").string(), "--out",
           (dir / "c").string()});
  EXPECT_EQ(r.exit_code, 1);
  EXPECT_NE(r.err.find("BadConfig"), std::string::npos) << r.err;
  EXPECT_NE(r.err.find("train.learning_rate"), std::string::npos) << r.err;

  r = run({"train", "--data", (dir / "data").string(), "--set", "nope.key=1", "--out", (dir / "d").string()});
  EXPECT_EQ(r.exit_code, 1);
}

TEST(Cli, NoSubcommandFails) {
  EXPECT_NE(run({}).exit_code, 0);
}

TEST(Config, DefaultsMatchModuleDefaults) {
  const Config c;
  const PipelineConfig p = c.pipeline();
  const HsParams hs;
  EXPECT_EQ(p.flow.smoothness, hs.smoothness);
  EXPECT_EQ(p.flow.iterations, hs.iterations);
  EXPECT_EQ(p.flow.pyramid_levels, hs.pyramid_levels);
  EXPECT_EQ(p.flow.warp_per_level, hs.warp_per_level);
  const PipelineConfig defaults;
  EXPECT_EQ(p.flow_bound, defaults.flow_bound);
  EXPECT_EQ(p.accel_bound, defaults.accel_bound);
  EXPECT_EQ(p.accel_mode, defaults.accel_mode);
  EXPECT_EQ(p.stack_length, defaults.stack_length);
  EXPECT_EQ(p.sampling.kind, defaults.sampling.kind);
  EXPECT_EQ(p.input_width, defaults.input_width);
  EXPECT_EQ(c.fusion().alpha, FusionWeights{}.alpha);
  EXPECT_EQ(c.fusion().beta, FusionWeights{}.beta);
  EXPECT_EQ(c.train_options().batch, TrainOptions{}.batch);
  EXPECT_EQ(c.train_options().momentum, TrainOptions{}.momentum);
  EXPECT_EQ(c.train_options().schedule.decay_factor, LrSchedule{}.decay_factor);
  EXPECT_EQ(c.train_options().schedule.decay_every, 1000);
  EXPECT_EQ(c.train_options().schedule.stop_at, 5000);
  EXPECT_EQ(c.dropout(), 0.0);
  EXPECT_EQ(c.benchmark().width, BenchmarkOptions{}.width);
}

TEST(Config, ParseAndReject) {
  Config c = Config::parse("flow.iterations = 40  # fewer\n\nfusion.beta=0.5\n", "inline");
  EXPECT_EQ(c.pipeline().flow.iterations, 40);
  EXPECT_EQ(c.fusion().beta, 0.5);
  EXPECT_EQ(c.get("accel.mode"), "temporal");
  auto code = [](auto&& fn) {
    try {
      fn();
    } catch (const Error& e) {
      return e.code();
    }
    return Errc::IoError;
  };
  EXPECT_EQ(code([] { Config::parse("bogus = 1\n", "x"); }), Errc::BadConfig);
  EXPECT_EQ(code([] { Config::parse("flow.iterations\n", "x"); }), Errc::BadConfig);
  EXPECT_EQ(code([] { Config::parse("flow.iterations =\n", "x"); }), Errc::BadConfig);
  EXPECT_EQ(code([] { Config::parse("flow.iterations = ten\n", "x").pipeline(); }), Errc::BadConfig);
  EXPECT_EQ(code([] { Config::parse("accel.mode = sideways\n", "x").pipeline(); }), Errc::BadConfig);
  EXPECT_EQ(code([] { Config::load("/nonexistent/accel.cfg"); }), Errc::MissingInput);
}

}  // namespace
}  // namespace accel
