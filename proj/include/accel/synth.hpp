#pragma once

#include <cstdint>
#include <filesystem>
#include <vector>

#include "accel/dataset.hpp"
#include "accel/motion_images.hpp"
#include "accel/optical_flow.hpp"

namespace accel {

enum class Pattern { RandomTexture, Checkerboard, GaussianBlobs };

struct Vec2 {
  double x = 0.0;
  double y = 0.0;

  bool operator==(const Vec2&) const = default;
};

// A pattern translated with constant acceleration: frame t is the master
// texture shifted by t*v0 + a*t*(t-1)/2, so the flow of pair t is v0 + a*t.
struct MotionSpec {
  Pattern pattern = Pattern::RandomTexture;
  Vec2 v0;
  Vec2 a;
  int n_frames = 12;
  int width = 64;
  int height = 64;
  double noise_sigma = 0.0;
  std::uint64_t seed = 0;

  Vec2 displacement(int frame) const;
  Vec2 velocity(int pair) const;
  // BadSpec unless the content stays within a quarter frame of its start.
  void validate() const;

  bool operator==(const MotionSpec&) const = default;
};

struct GroundTruth {
  std::vector<FlowField> flows;    // n_frames - 1
  std::vector<AccelField> accels;  // n_frames - 2, temporal mode
};

struct SynthClip {
  FrameSequence frames;
  GroundTruth truth;
};

SynthClip generate(const MotionSpec& spec);

inline constexpr int kBenchmarkClasses = 4;
inline constexpr int kVideosPerClass = 25;
inline constexpr int kTrainPerClass = 15;

struct BenchmarkOptions {
  int width = 176;
  int height = 176;
  int n_frames = 12;
};

struct BenchmarkVideo {
  Video video;
  MotionSpec spec;
};

// Four classes: 0 rightward constant velocity, 1 downward constant velocity,
// 2 rightward accelerating, 3 downward accelerating. Within each class the
// first 15 videos are training data, the last 10 test data.
std::vector<BenchmarkVideo> make_benchmark(std::uint64_t seed, const BenchmarkOptions& options = {});

Dataset to_dataset(std::vector<BenchmarkVideo> videos);

// videos/<id>/frame_NNN.pgm, videos/<id>/gt/flow_NNN.flo, videos/<id>/gt/motion.txt
// and a manifest.txt at the root.
void write_benchmark(const std::filesystem::path& root, const std::vector<BenchmarkVideo>& videos);

}  // namespace accel
