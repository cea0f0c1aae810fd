#pragma once

#include <cstdint>
#include <filesystem>
#include <string_view>
#include <vector>

#include "accel/config.hpp"
#include "accel/fusion_eval.hpp"

namespace accel {

namespace fs = std::filesystem;

// Writes flow_NNNN.flo plus flow_NNNN_{x,y}.pgm/.meta for every consecutive
// frame pair. Returns the number of flow fields.
std::size_t cmd_flow(const fs::path& frames_dir, std::string_view pattern, const fs::path& out_dir,
                     const Config& config);

// Reads the flow_*.flo files of `flow_dir` and writes accel_NNNN.flo plus
// accel_NNNN_{x,y}.pgm/.meta in the configured accel.mode.
std::size_t cmd_accel(const fs::path& flow_dir, const fs::path& out_dir, const Config& config);

// Builds one stack from <prefix>_NNNN_{x,y} motion images and writes it.
StackedVolume cmd_stack(const fs::path& image_dir, std::string_view prefix, std::size_t start,
                        const fs::path& out_dir, const Config& config);

std::vector<BenchmarkVideo> cmd_synth(const fs::path& out_dir, std::uint64_t seed, const Config& config);

// Trains one stream on the train split; writes <stream>.model and <stream>_loss.txt.
TrainResult cmd_train(const fs::path& dataset_dir, StreamKind stream, const fs::path& out_dir,
                      const Config& config, std::uint64_t seed);

// Loads spatial.model, temporal.model and accel.model from `models_dir`,
// scores the test split, writes report.txt and report.csv.
EvalReport cmd_eval(const fs::path& dataset_dir, const fs::path& models_dir, const fs::path& out_dir,
                    const Config& config);

// Each score file holds K whitespace-separated probabilities. Writes fused.txt.
std::vector<double> cmd_fuse(const fs::path& spatial, const fs::path& temporal,
                             const fs::path& acceleration, const fs::path& out_dir,
                             const Config& config);

ScoreVector read_scores(const fs::path& file);

// Seeds for model initialization and training of one stream.
std::uint64_t init_seed(std::uint64_t seed, StreamKind stream);
std::uint64_t train_seed(std::uint64_t seed, StreamKind stream);

}  // namespace accel
