#include "accel/fusion_eval.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "accel/error.hpp"

namespace accel {

void FusionWeights::validate() const {
  if (!(alpha >= 0.0) || !std::isfinite(alpha) || !(beta >= 0.0) || !std::isfinite(beta)) {
    throw Error(Errc::BadConfig, "fusion weights must be finite and >= 0");
  }
}

std::vector<double> fuse(const ScoreVector& spatial, const ScoreVector& temporal,
                         const ScoreVector& acceleration, const FusionWeights& weights) {
  weights.validate();
  if (spatial.size() != temporal.size() || spatial.size() != acceleration.size()) {
    throw Error(Errc::LengthMismatch, "stream score vectors differ in class count");
  }
  std::vector<double> f(spatial.size());
  for (std::size_t k = 0; k < f.size(); ++k) {
    f[k] = spatial[k] + weights.alpha * temporal[k] + weights.beta * acceleration[k];
  }
  return f;
}

std::size_t argmax(std::span<const double> scores) {
  std::size_t best = 0;
  for (std::size_t k = 1; k < scores.size(); ++k)
    if (scores[k] > scores[best]) best = k;
  return best;
}

std::string_view stream_name(StreamKind s) {
  switch (s) {
    case StreamKind::Spatial: return "spatial";
    case StreamKind::Temporal: return "temporal";
    case StreamKind::Acceleration: return "accel";
  }
  return "?";
}

StreamKind parse_stream(std::string_view name) {
  if (name == "spatial") return StreamKind::Spatial;
  if (name == "temporal") return StreamKind::Temporal;
  if (name == "accel" || name == "acceleration") return StreamKind::Acceleration;
  throw Error(Errc::BadConfig, "unknown stream '" + std::string(name) + "'");
}

namespace {
std::vector<std::size_t> spread(std::size_t available, const SamplingPolicy& policy) {
  std::vector<std::size_t> out;
  const bool all = policy.kind == SamplingPolicy::Kind::AllValid ||
                   static_cast<std::size_t>(policy.count) >= available;
  if (all) {
    for (std::size_t i = 0; i < available; ++i) out.push_back(i);
    return out;
  }
  if (policy.count < 1) throw Error(Errc::BadConfig, "sampling count must be >= 1");
  if (policy.count == 1) return {(available - 1) / 2};
  for (int i = 0; i < policy.count; ++i) {
    const double pos = static_cast<double>(i) * (available - 1) / (policy.count - 1);
    out.push_back(static_cast<std::size_t>(std::lround(pos)));
  }
  return out;
}
}  // namespace

std::vector<std::size_t> stack_starts(std::size_t pairs, int length, const SamplingPolicy& policy) {
  if (length < 1 || pairs < static_cast<std::size_t>(length)) return {};
  return spread(pairs - length + 1, policy);
}

std::vector<std::size_t> frame_samples(std::size_t frames, const SamplingPolicy& policy) {
  return spread(frames, policy);
}

std::size_t PipelineConfig::min_frames() const {
  return static_cast<std::size_t>(stack_length) + (accel_mode == AccelMode::Temporal ? 2 : 1);
}

ModelShape PipelineConfig::stream_shape(StreamKind stream, int frame_channels) const {
  const int channels = stream == StreamKind::Spatial ? frame_channels : 2 * stack_length;
  return {input_width, input_height, channels};
}

VideoFeatures extract_features(const FrameSequence& video, const PipelineConfig& config) {
  if (video.size() < config.min_frames()) {
    throw Error(Errc::TooShort, std::to_string(video.size()) + " frames, need " +
                                    std::to_string(config.min_frames()));
  }
  VideoFeatures out;
  out.frames.assign(video.begin(), video.end());

  std::vector<FlowField> flows;
  Frame prev = to_grayscale(video[0]);
  for (std::size_t t = 1; t < video.size(); ++t) {
    Frame next = to_grayscale(video[t]);
    flows.push_back(estimate_horn_schunck(prev, next, config.flow));
    prev = std::move(next);
  }
  for (const FlowField& f : flows) out.flow_images.push_back(flow_to_images(f, config.flow_bound));

  if (config.accel_mode == AccelMode::Temporal) {
    for (std::size_t t = 0; t + 1 < flows.size(); ++t) {
      out.accel_images.push_back(
          accel_to_images(acceleration_temporal(flows[t], flows[t + 1]), config.accel_bound));
    }
  } else {
    for (const FlowField& f : flows) {
      out.accel_images.push_back(accel_to_images(acceleration_spatial(f), config.accel_bound));
    }
  }
  return out;
}

std::vector<Tensor> stream_inputs(const VideoFeatures& features, StreamKind stream,
                                  const PipelineConfig& config) {
  std::vector<Tensor> out;
  if (stream == StreamKind::Spatial) {
    for (std::size_t i : frame_samples(features.frames.size(), config.sampling)) {
      out.push_back(frame_to_tensor(features.frames[i], config.input_width, config.input_height));
    }
    return out;
  }
  // Both motion streams draw from the start positions valid for each of them,
  // so temporal and acceleration stacks cover the same frames.
  const auto& pairs = stream == StreamKind::Temporal ? features.flow_images : features.accel_images;
  const std::size_t usable = std::min(features.flow_images.size(), features.accel_images.size());
  for (std::size_t start : stack_starts(usable, config.stack_length, config.sampling)) {
    out.push_back(stack_to_tensor(build_stack(pairs, start, config.stack_length),
                                  config.input_width, config.input_height));
  }
  if (out.empty()) throw Error(Errc::TooShort, "no complete stack for stream");
  return out;
}

std::vector<Sample> stream_samples(std::span<const VideoFeatures> features, std::span<const int> labels,
                                   StreamKind stream, const PipelineConfig& config) {
  if (features.size() != labels.size()) {
    throw Error(Errc::LengthMismatch, "one label per video is required");
  }
  std::vector<Sample> out;
  for (std::size_t i = 0; i < features.size(); ++i) {
    for (Tensor& t : stream_inputs(features[i], stream, config)) out.push_back({std::move(t), labels[i]});
  }
  return out;
}

namespace {
ScoreVector average_scores(const Model& model, const std::vector<Tensor>& inputs) {
  std::vector<double> sum(static_cast<std::size_t>(model.classes), 0.0);
  for (const Tensor& t : inputs) {
    const ScoreVector s = forward(model, t);
    for (std::size_t k = 0; k < sum.size(); ++k) sum[k] += s[k];
  }
  for (double& v : sum) v /= static_cast<double>(inputs.size());
  return ScoreVector(std::move(sum));
}
}  // namespace

StreamScores score_video(const StreamModels& models, const VideoFeatures& features,
                         const PipelineConfig& config) {
  return {average_scores(models.spatial, stream_inputs(features, StreamKind::Spatial, config)),
          average_scores(models.temporal, stream_inputs(features, StreamKind::Temporal, config)),
          average_scores(models.acceleration,
                         stream_inputs(features, StreamKind::Acceleration, config))};
}

VideoPrediction predict_video(const StreamModels& models, const FrameSequence& video,
                              const PipelineConfig& config, const FusionWeights& weights,
                              std::string id) {
  StreamScores scores = score_video(models, extract_features(video, config), config);
  std::vector<double> fused = fuse(scores.spatial, scores.temporal, scores.acceleration, weights);
  const std::size_t label = argmax(fused);
  return {std::move(id), std::move(scores), std::move(fused), label};
}

double EvalReport::accuracy(std::string_view row) const {
  for (const ReportRow& r : rows)
    if (r.name == row) return r.accuracy;
  throw Error(Errc::OutOfRange, "no report row '" + std::string(row) + "'");
}

EvalReport evaluate(std::span<const LabeledScores> videos, const FusionWeights& weights) {
  weights.validate();
  if (videos.empty()) throw Error(Errc::EmptySplit, "no test videos to evaluate");
  const std::size_t classes = videos.front().streams.spatial.size();

  const FusionWeights two_stream{weights.alpha, 0.0};
  std::array<int, 5> correct{};
  EvalReport report;
  report.confusion.assign(classes, std::vector<int>(classes, 0));
  for (const LabeledScores& v : videos) {
    if (v.truth < 0 || static_cast<std::size_t>(v.truth) >= classes) {
      throw Error(Errc::LabelOutOfRange, v.id + ": label " + std::to_string(v.truth));
    }
    const auto truth = static_cast<std::size_t>(v.truth);
    const auto& s = v.streams;
    correct[0] += argmax(s.spatial.scores()) == truth;
    correct[1] += argmax(s.temporal.scores()) == truth;
    correct[2] += argmax(s.acceleration.scores()) == truth;
    correct[3] += argmax(fuse(s.spatial, s.temporal, s.acceleration, two_stream)) == truth;

    std::vector<double> fused = fuse(s.spatial, s.temporal, s.acceleration, weights);
    const std::size_t label = argmax(fused);
    correct[4] += label == truth;
    ++report.confusion[truth][label];
    report.predictions.push_back({v.id, v.streams, std::move(fused), label});
    report.truths.push_back(v.truth);
  }
  const char* names[] = {"spatial", "temporal", "acceleration", "two_stream", "three_stream"};
  for (std::size_t i = 0; i < correct.size(); ++i) {
    report.rows.push_back({names[i], static_cast<double>(correct[i]) / videos.size()});
  }
  return report;
}

EvalReport evaluate(const StreamModels& models, const Dataset& dataset, const PipelineConfig& config,
                    const FusionWeights& weights) {
  std::vector<LabeledScores> scored;
  for (const Video* v : dataset.split(Split::Test)) {
    scored.push_back({v->id, v->label, score_video(models, extract_features(v->frames, config), config)});
  }
  return evaluate(scored, weights);
}

std::string format_report_table(const EvalReport& report) {
  const char* labels[] = {"Spatial stream", "Temporal stream", "Acceleration stream",
                          "Two streams (S+T)", "Three streams (S+T+A)"};
  std::ostringstream out;
  out << "Approach                  Accuracy (%)\n";
  out << "--------------------------------------\n";
  for (std::size_t i = 0; i < report.rows.size(); ++i) {
    char line[96];
    std::snprintf(line, sizeof line, "%-26s%12.1f\n", labels[i], 100.0 * report.rows[i].accuracy);
    out << line;
  }
  out << "\nConfusion (three streams; rows = true class)\n";
  for (const auto& row : report.confusion) {
    for (std::size_t k = 0; k < row.size(); ++k) out << (k ? " " : "") << row[k];
    out << '\n';
  }
  return out.str();
}

std::string format_report_csv(const EvalReport& report) {
  std::ostringstream out;
  out << "approach,accuracy\n";
  for (const ReportRow& r : report.rows) {
    char value[32];
    std::snprintf(value, sizeof value, "%.1f", 100.0 * r.accuracy);
    out << r.name << ',' << value << '\n';
  }
  return out.str();
}

}  // namespace accel
