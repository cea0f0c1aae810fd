#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "accel/frames.hpp"
#include "accel/motion_images.hpp"

namespace accel {

inline constexpr int kConvFilters = 8;
inline constexpr int kKernelSize = 3;

// Dense channels x height x width input, already normalized.
struct Tensor {
  int channels = 0;
  int height = 0;
  int width = 0;
  std::vector<double> data;

  Tensor() = default;
  Tensor(int c, int h, int w, double fill = 0.0)
      : channels(c), height(h), width(w), data(static_cast<std::size_t>(c) * h * w, fill) {}

  double& at(int c, int y, int x) { return data[(static_cast<std::size_t>(c) * height + y) * width + x]; }
  double at(int c, int y, int x) const {
    return data[(static_cast<std::size_t>(c) * height + y) * width + x];
  }

  const double* row(int c, int y, int x = 0) const {
    return data.data() + (static_cast<std::size_t>(c) * height + y) * width + x;
  }

  bool operator==(const Tensor&) const = default;
};

struct ModelShape {
  int width = 16;
  int height = 16;
  int channels = 1;
};

// conv 3x3 (8 filters, stride 1, clamp padding) -> ReLU -> global average
// pool -> dropout -> affine -> softmax.
struct Model {
  int input_width = 0;
  int input_height = 0;
  int input_channels = 0;
  int classes = 0;
  double dropout_p = 0.0;
  std::vector<double> conv_weights;  // [filter][channel][ky][kx]
  std::vector<double> conv_bias;     // [filter]
  std::vector<double> fc_weights;    // [class][filter]
  std::vector<double> fc_bias;       // [class]

  ModelShape shape() const { return {input_width, input_height, input_channels}; }
  std::size_t conv_index(int f, int c, int ky, int kx) const {
    return ((static_cast<std::size_t>(f) * input_channels + c) * kKernelSize + ky) * kKernelSize + kx;
  }
  void validate() const;

  bool operator==(const Model&) const = default;
};

// Glorot-uniform weights from Rng(derive_seed(seed, "model.init")), zero biases.
Model init_model(const ModelShape& shape, int classes, double dropout_p, std::uint64_t seed);

// Softmax output: non-negative entries summing to 1.
class ScoreVector {
 public:
  explicit ScoreVector(std::vector<double> scores);
  static ScoreVector uniform(int classes);

  std::size_t size() const noexcept { return scores_.size(); }
  double operator[](std::size_t k) const { return scores_[k]; }
  std::span<const double> scores() const noexcept { return scores_; }

  bool operator==(const ScoreVector&) const = default;

 private:
  std::vector<double> scores_;
};

// Frames: bilinear resize to (width, height), then value / 255.
Tensor frame_to_tensor(const Frame& frame, int width, int height);
// Stacks: each channel resized, then value / 255 - 0.5 so zero motion maps to 0.
Tensor stack_to_tensor(const StackedVolume& stack, int width, int height);

// train_mode enables dropout with a mask drawn from Rng(seed).
ScoreVector forward(const Model& model, const Tensor& input, bool train_mode = false,
                    std::uint64_t seed = 0);
ScoreVector forward(const Model& model, const StackedVolume& stack, bool train_mode = false,
                    std::uint64_t seed = 0);
ScoreVector forward(const Model& model, const Frame& frame, bool train_mode = false,
                    std::uint64_t seed = 0);

struct Sample {
  Tensor input;
  int label = 0;
};

// Parameter-shaped container for gradients and momentum buffers.
struct Gradient {
  std::vector<double> conv_weights;
  std::vector<double> conv_bias;
  std::vector<double> fc_weights;
  std::vector<double> fc_bias;

  static Gradient zeros_like(const Model& model);
};

// Cross-entropy of one sample with dropout disabled.
double sample_loss(const Model& model, const Sample& sample);

// Analytic gradient of the cross-entropy, dropout disabled. Returns the loss.
double loss_gradient(const Model& model, const Sample& sample, Gradient& grad);

// Max over every parameter of |analytic - numeric| / max(|analytic| + |numeric|, 1e-8),
// numeric being the central difference with step `epsilon`.
double gradient_check(const Model& model, const Sample& sample, double epsilon = 1e-4);

struct LrSchedule {
  double initial = 0.001;
  double decay_factor = 0.1;
  int decay_every = 10'000;
  int stop_at = 50'000;

  void validate() const;
};

// initial * decay_factor^floor(iteration / decay_every); OutOfRange at or past stop_at.
double lr_at(const LrSchedule& schedule, int iteration);

struct TrainOptions {
  LrSchedule schedule;
  int batch = 16;
  double momentum = 0.9;
};

struct TrainResult {
  Model model;
  std::vector<double> loss;  // mean batch loss per iteration
};

// Minibatch SGD with momentum, schedule.stop_at iterations. Shuffling and
// dropout draw from streams derived from `seed`.
TrainResult train(Model model, std::span<const Sample> dataset, const TrainOptions& options,
                  std::uint64_t seed);

// Binary model file, see README for the layout.
std::vector<std::uint8_t> save_model(const Model& model);
Model load_model(std::span<const std::uint8_t> bytes);
void write_model_file(const std::filesystem::path& path, const Model& model);
Model read_model_file(const std::filesystem::path& path);

}  // namespace accel
