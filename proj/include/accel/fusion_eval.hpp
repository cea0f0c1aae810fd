#pragma once

#include <cstddef>
#include <string>
#include <vector>

#include "accel/dataset.hpp"
#include "accel/motion_images.hpp"
#include "accel/optical_flow.hpp"
#include "accel/stream_classifier.hpp"

namespace accel {

// Weights of the temporal and acceleration streams; the spatial weight is 1.
struct FusionWeights {
  double alpha = 2.0;
  double beta = 2.0;

  void validate() const;
};

// f = f_spa + alpha * f_tem + beta * f_acc, element-wise, not renormalized.
std::vector<double> fuse(const ScoreVector& spatial, const ScoreVector& temporal,
                         const ScoreVector& acceleration, const FusionWeights& weights);

// Index of the largest entry; ties go to the lowest index.
std::size_t argmax(std::span<const double> scores);

enum class StreamKind { Spatial, Temporal, Acceleration };

std::string_view stream_name(StreamKind s);
StreamKind parse_stream(std::string_view name);

struct SamplingPolicy {
  enum class Kind { AllValid, EvenlySpaced };
  Kind kind = Kind::AllValid;
  int count = 5;
};

// Start indices of the stacks drawn from `pairs` motion-image pairs.
std::vector<std::size_t> stack_starts(std::size_t pairs, int length, const SamplingPolicy& policy);
// Frame indices scored by the spatial stream.
std::vector<std::size_t> frame_samples(std::size_t frames, const SamplingPolicy& policy);

struct PipelineConfig {
  HsParams flow;
  double flow_bound = 20.0;
  double accel_bound = 8.0;
  AccelMode accel_mode = AccelMode::Temporal;
  int stack_length = kDefaultStackLength;
  SamplingPolicy sampling;
  int input_width = 16;
  int input_height = 16;

  // Fewest frames that still yield one flow stack and one acceleration stack.
  std::size_t min_frames() const;
  ModelShape stream_shape(StreamKind stream, int frame_channels) const;
};

// Everything the three streams read from one video.
struct VideoFeatures {
  std::vector<Frame> frames;
  std::vector<MotionImagePair> flow_images;
  std::vector<MotionImagePair> accel_images;
};

VideoFeatures extract_features(const FrameSequence& video, const PipelineConfig& config);

// Classifier inputs of one stream, in sampling order.
std::vector<Tensor> stream_inputs(const VideoFeatures& features, StreamKind stream,
                                  const PipelineConfig& config);

// Labeled training samples of one stream; labels[i] belongs to features[i].
std::vector<Sample> stream_samples(std::span<const VideoFeatures> features, std::span<const int> labels,
                                   StreamKind stream, const PipelineConfig& config);

struct StreamModels {
  Model spatial;
  Model temporal;
  Model acceleration;
};

struct StreamScores {
  ScoreVector spatial;
  ScoreVector temporal;
  ScoreVector acceleration;
};

// Per-stream forward scores averaged over the sampled inputs.
StreamScores score_video(const StreamModels& models, const VideoFeatures& features,
                         const PipelineConfig& config);

struct VideoPrediction {
  std::string id;
  StreamScores streams;
  std::vector<double> fused;
  std::size_t label = 0;
};

VideoPrediction predict_video(const StreamModels& models, const FrameSequence& video,
                              const PipelineConfig& config, const FusionWeights& weights,
                              std::string id = {});

struct LabeledScores {
  std::string id;
  int truth = 0;
  StreamScores streams;
};

struct ReportRow {
  std::string name;
  double accuracy = 0.0;
};

struct EvalReport {
  // spatial, temporal, acceleration, two_stream(S+T), three_stream(S+T+A)
  std::vector<ReportRow> rows;
  // Three-stream predictions; rows are true labels.
  std::vector<std::vector<int>> confusion;
  std::vector<VideoPrediction> predictions;
  std::vector<int> truths;

  double accuracy(std::string_view row) const;
};

EvalReport evaluate(std::span<const LabeledScores> videos, const FusionWeights& weights);
// Scores the test split of `dataset`.
EvalReport evaluate(const StreamModels& models, const Dataset& dataset, const PipelineConfig& config,
                    const FusionWeights& weights);

std::string format_report_table(const EvalReport& report);
std::string format_report_csv(const EvalReport& report);

}  // namespace accel
