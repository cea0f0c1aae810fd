#include "accel/commands.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>

#include "accel/error.hpp"
#include "accel/rng.hpp"

namespace accel {
namespace {

std::string numbered(std::string_view prefix, std::size_t index) {
  char buf[16];
  std::snprintf(buf, sizeof buf, "_%04zu", index);
  return std::string(prefix) + buf;
}

std::vector<fs::path> matching_files(const fs::path& dir, const std::string& glob) {
  if (!fs::is_directory(dir)) throw Error(Errc::MissingInput, "not a directory: " + dir.string());
  std::vector<fs::path> out;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && fnmatch(glob.c_str(), e.path().filename().c_str(), 0) == 0) {
      out.push_back(e.path());
    }
  }
  std::sort(out.begin(), out.end(),
            [](const fs::path& a, const fs::path& b) { return a.filename() < b.filename(); });
  return out;
}

void write_pair(const fs::path& out_dir, const std::string& stem, const MotionImagePair& pair) {
  write_motion_image(out_dir / (stem + "_x"), pair.x);
  write_motion_image(out_dir / (stem + "_y"), pair.y);
}

std::vector<VideoFeatures> features_of(const std::vector<const Video*>& videos,
                                       const PipelineConfig& pipeline) {
  std::vector<VideoFeatures> out;
  out.reserve(videos.size());
  for (const Video* v : videos) out.push_back(extract_features(v->frames, pipeline));
  return out;
}

void write_text(const fs::path& file, const std::string& text) {
  std::ofstream out(file);
  if (!out) throw Error(Errc::IoError, "cannot write " + file.string());
  out << text;
  if (!out) throw Error(Errc::IoError, "short write to " + file.string());
}

}  // namespace

std::uint64_t init_seed(std::uint64_t seed, StreamKind stream) {
  return derive_seed(seed, std::string("cli.init.") + std::string(stream_name(stream)));
}

std::uint64_t train_seed(std::uint64_t seed, StreamKind stream) {
  return derive_seed(seed, std::string("cli.train.") + std::string(stream_name(stream)));
}

std::size_t cmd_flow(const fs::path& frames_dir, std::string_view pattern, const fs::path& out_dir,
                     const Config& config) {
  const PipelineConfig pipeline = config.pipeline();
  const FrameSequence frames = load_sequence(frames_dir, pattern);
  fs::create_directories(out_dir);
  Frame prev = to_grayscale(frames[0]);
  for (std::size_t t = 1; t < frames.size(); ++t) {
    Frame next = to_grayscale(frames[t]);
    const FlowField flow = estimate_horn_schunck(prev, next, pipeline.flow);
    const std::string stem = numbered("flow", t - 1);
    write_flo(out_dir / (stem + ".flo"), flow);
    write_pair(out_dir, stem, flow_to_images(flow, pipeline.flow_bound));
    prev = std::move(next);
  }
  return frames.size() - 1;
}

std::size_t cmd_accel(const fs::path& flow_dir, const fs::path& out_dir, const Config& config) {
  const PipelineConfig pipeline = config.pipeline();
  std::vector<FlowField> flows;
  for (const auto& path : matching_files(flow_dir, "flow_*.flo")) flows.push_back(read_flo(path));

  const bool temporal = pipeline.accel_mode == AccelMode::Temporal;
  const std::size_t needed = temporal ? 2 : 1;
  if (flows.size() < needed) {
    throw Error(Errc::TooFewFlows, std::to_string(flows.size()) + " flow field(s) in " +
                                       flow_dir.string() + ", need " + std::to_string(needed));
  }
  fs::create_directories(out_dir);
  const std::size_t count = temporal ? flows.size() - 1 : flows.size();
  for (std::size_t k = 0; k < count; ++k) {
    const AccelField a = temporal ? acceleration_temporal(flows[k], flows[k + 1])
                                  : acceleration_spatial(flows[k]);
    const std::string stem = numbered("accel", k);
    write_flo(out_dir / (stem + ".flo"), a.as_flow());
    write_pair(out_dir, stem, accel_to_images(a, pipeline.accel_bound));
  }
  return count;
}

StackedVolume cmd_stack(const fs::path& image_dir, std::string_view prefix, std::size_t start,
                        const fs::path& out_dir, const Config& config) {
  const PipelineConfig pipeline = config.pipeline();
  std::vector<MotionImagePair> pairs;
  for (const auto& path : matching_files(image_dir, std::string(prefix) + "_*_x.pgm")) {
    std::string stem = path.filename().string();
    stem.resize(stem.size() - std::string_view("_x.pgm").size());
    pairs.push_back({read_motion_image(image_dir / (stem + "_x")),
                     read_motion_image(image_dir / (stem + "_y"))});
  }
  if (pairs.empty()) {
    throw Error(Errc::MissingInput, "no " + std::string(prefix) + " motion images in " + image_dir.string());
  }
  StackedVolume stack = build_stack(pairs, start, pipeline.stack_length);
  write_stack(out_dir, stack);
  return stack;
}

std::vector<BenchmarkVideo> cmd_synth(const fs::path& out_dir, std::uint64_t seed, const Config& config) {
  auto videos = make_benchmark(seed, config.benchmark());
  fs::create_directories(out_dir);
  write_benchmark(out_dir, videos);
  return videos;
}

TrainResult cmd_train(const fs::path& dataset_dir, StreamKind stream, const fs::path& out_dir,
                      const Config& config, std::uint64_t seed) {
  const PipelineConfig pipeline = config.pipeline();
  const TrainOptions options = config.train_options();
  const Dataset train_set = read_dataset(dataset_dir, Split::Train);
  const auto videos = train_set.split(Split::Train);
  if (videos.empty()) throw Error(Errc::EmptyDataset, "no training videos in " + dataset_dir.string());

  std::vector<int> labels;
  for (const Video* v : videos) labels.push_back(v->label);
  const auto features = features_of(videos, pipeline);
  const auto samples = stream_samples(features, labels, stream, pipeline);

  // Class count comes from the whole manifest so train and test agree.
  int classes = 2;
  for (const auto& e : read_manifest(dataset_dir / "manifest.txt")) classes = std::max(classes, e.label + 1);

  const int frame_channels = videos.front()->frames.channels();
  Model model = init_model(pipeline.stream_shape(stream, frame_channels), classes, config.dropout(),
                           init_seed(seed, stream));
  TrainResult result = train(std::move(model), samples, options, train_seed(seed, stream));

  fs::create_directories(out_dir);
  const std::string name(stream_name(stream));
  write_model_file(out_dir / (name + ".model"), result.model);
  std::ostringstream log;
  char buf[40];
  for (double l : result.loss) {
    std::snprintf(buf, sizeof buf, "%.17g\n", l);
    log << buf;
  }
  write_text(out_dir / (name + "_loss.txt"), log.str());
  return result;
}

EvalReport cmd_eval(const fs::path& dataset_dir, const fs::path& models_dir, const fs::path& out_dir,
                    const Config& config) {
  const PipelineConfig pipeline = config.pipeline();
  const StreamModels models{read_model_file(models_dir / "spatial.model"),
                            read_model_file(models_dir / "temporal.model"),
                            read_model_file(models_dir / "accel.model")};
  const Dataset test_set = read_dataset(dataset_dir, Split::Test);
  const EvalReport report = evaluate(models, test_set, pipeline, config.fusion());
  fs::create_directories(out_dir);
  write_text(out_dir / "report.txt", format_report_table(report));
  write_text(out_dir / "report.csv", format_report_csv(report));
  return report;
}

ScoreVector read_scores(const fs::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::MissingInput, "cannot open " + file.string());
  std::vector<double> scores;
  for (double v; in >> v;) scores.push_back(v);
  if (!in.eof()) throw Error(Errc::DecodeError, file.string() + ": not a list of numbers");
  return ScoreVector(std::move(scores));
}

std::vector<double> cmd_fuse(const fs::path& spatial, const fs::path& temporal,
                             const fs::path& acceleration, const fs::path& out_dir,
                             const Config& config) {
  std::vector<double> fused =
      fuse(read_scores(spatial), read_scores(temporal), read_scores(acceleration), config.fusion());
  std::ostringstream text;
  char buf[40];
  for (std::size_t k = 0; k < fused.size(); ++k) {
    std::snprintf(buf, sizeof buf, "%.17g", fused[k]);
    text << (k ? " " : "") << buf;
  }
  text << "\nlabel=" << argmax(fused) << '\n';
  fs::create_directories(out_dir);
  write_text(out_dir / "fused.txt", text.str());
  return fused;
}

}  // namespace accel
