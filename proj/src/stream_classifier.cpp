#include "accel/stream_classifier.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "accel/error.hpp"
#include "accel/rng.hpp"

namespace accel {

void Model::validate() const {
  if (classes < 2) throw Error(Errc::BadConfig, "a classifier needs at least 2 classes");
  if (input_width < 1 || input_height < 1 || input_channels < 1) {
    throw Error(Errc::BadConfig, "model input dimensions must be positive");
  }
  if (!(dropout_p >= 0.0 && dropout_p < 1.0)) {
    throw Error(Errc::BadConfig, "dropout_p must lie in [0, 1)");
  }
  const auto conv_n =
      static_cast<std::size_t>(kConvFilters) * input_channels * kKernelSize * kKernelSize;
  if (conv_weights.size() != conv_n || conv_bias.size() != kConvFilters ||
      fc_weights.size() != static_cast<std::size_t>(classes) * kConvFilters ||
      fc_bias.size() != static_cast<std::size_t>(classes)) {
    throw Error(Errc::BadConfig, "model parameter arrays have the wrong length");
  }
  auto finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double d) { return std::isfinite(d); });
  };
  if (!finite(conv_weights) || !finite(conv_bias) || !finite(fc_weights) || !finite(fc_bias)) {
    throw Error(Errc::BadConfig, "model has non-finite parameters");
  }
}

Model init_model(const ModelShape& shape, int classes, double dropout_p, std::uint64_t seed) {
  Model m;
  m.input_width = shape.width;
  m.input_height = shape.height;
  m.input_channels = shape.channels;
  m.classes = classes;
  m.dropout_p = dropout_p;
  if (classes < 2) throw Error(Errc::BadConfig, "a classifier needs at least 2 classes");
  if (shape.width < 1 || shape.height < 1 || shape.channels < 1) {
    throw Error(Errc::BadConfig, "model input dimensions must be positive");
  }

  Rng rng(derive_seed(seed, "model.init"));
  const int taps = kKernelSize * kKernelSize;
  const double conv_scale = std::sqrt(6.0 / (taps * shape.channels + taps * kConvFilters));
  m.conv_weights.resize(static_cast<std::size_t>(kConvFilters) * shape.channels * taps);
  for (double& w : m.conv_weights) w = rng.uniform(-conv_scale, conv_scale);
  m.conv_bias.assign(kConvFilters, 0.0);

  const double fc_scale = std::sqrt(6.0 / (kConvFilters + classes));
  m.fc_weights.resize(static_cast<std::size_t>(classes) * kConvFilters);
  for (double& w : m.fc_weights) w = rng.uniform(-fc_scale, fc_scale);
  m.fc_bias.assign(classes, 0.0);
  m.validate();
  return m;
}

ScoreVector::ScoreVector(std::vector<double> scores) : scores_(std::move(scores)) {
  if (scores_.size() < 2) throw Error(Errc::ShapeMismatch, "score vector needs >= 2 classes");
  double sum = 0.0;
  for (double s : scores_) {
    if (!(s >= 0.0) || !std::isfinite(s)) {
      throw Error(Errc::ShapeMismatch, "scores must be finite and non-negative");
    }
    sum += s;
  }
  if (std::abs(sum - 1.0) > 1e-6) throw Error(Errc::ShapeMismatch, "scores must sum to 1");
}

ScoreVector ScoreVector::uniform(int classes) {
  return ScoreVector(std::vector<double>(static_cast<std::size_t>(classes), 1.0 / classes));
}

Tensor frame_to_tensor(const Frame& frame, int width, int height) {
  const Frame sized = (frame.width() == width && frame.height() == height)
                          ? frame
                          : resize_bilinear(frame, width, height);
  Tensor t(sized.channels(), height, width);
  for (int y = 0; y < height; ++y)
    for (int x = 0; x < width; ++x)
      for (int c = 0; c < sized.channels(); ++c) t.at(c, y, x) = sized.at(x, y, c) / 255.0;
  return t;
}

Tensor stack_to_tensor(const StackedVolume& stack, int width, int height) {
  Tensor t(stack.channel_count(), height, width);
  for (int c = 0; c < stack.channel_count(); ++c) {
    const auto px = stack.channel(c);
    Frame plane(stack.width(), stack.height(), 1, {px.begin(), px.end()});
    if (plane.width() != width || plane.height() != height) {
      plane = resize_bilinear(plane, width, height);
    }
    for (int y = 0; y < height; ++y)
      for (int x = 0; x < width; ++x) t.at(c, y, x) = plane.at(x, y) / 255.0 - 0.5;
  }
  return t;
}

namespace {

// Intermediate values of one forward pass, kept for backprop.
struct Activations {
  Tensor padded;                 // input with a one-pixel clamp border
  std::vector<double> pre;       // [filter][y][x] conv output before ReLU
  std::vector<double> pooled;    // [filter]
  std::vector<double> mask;      // [filter] dropout multipliers
  std::vector<double> probs;     // [class]
};

void check_shape(const Model& m, const Tensor& x) {
  if (x.channels != m.input_channels || x.height != m.input_height || x.width != m.input_width) {
    throw Error(Errc::ShapeMismatch,
                "input " + std::to_string(x.channels) + "x" + std::to_string(x.height) + "x" +
                    std::to_string(x.width) + " does not match model " +
                    std::to_string(m.input_channels) + "x" + std::to_string(m.input_height) + "x" +
                    std::to_string(m.input_width));
  }
}

Tensor pad_clamped(const Tensor& x) {
  Tensor p(x.channels, x.height + 2, x.width + 2);
  for (int c = 0; c < x.channels; ++c)
    for (int y = 0; y < p.height; ++y)
      for (int xx = 0; xx < p.width; ++xx)
        p.at(c, y, xx) = x.at(c, std::clamp(y - 1, 0, x.height - 1), std::clamp(xx - 1, 0, x.width - 1));
  return p;
}

void run_forward(const Model& m, const Tensor& x, std::span<const double> mask, Activations& a) {
  const int h = m.input_height;
  const int w = m.input_width;
  const std::size_t hw = static_cast<std::size_t>(h) * w;
  a.padded = pad_clamped(x);
  a.pre.assign(kConvFilters * hw, 0.0);
  a.pooled.assign(kConvFilters, 0.0);
  a.mask.assign(mask.begin(), mask.end());

  for (int f = 0; f < kConvFilters; ++f) {
    double* out = a.pre.data() + f * hw;
    std::fill(out, out + hw, m.conv_bias[f]);
    for (int c = 0; c < m.input_channels; ++c) {
      for (int ky = 0; ky < kKernelSize; ++ky) {
        for (int kx = 0; kx < kKernelSize; ++kx) {
          const double wt = m.conv_weights[m.conv_index(f, c, ky, kx)];
          for (int y = 0; y < h; ++y) {
            const double* row = a.padded.row(c, y + ky, kx);
            double* dst = out + static_cast<std::size_t>(y) * w;
            for (int xx = 0; xx < w; ++xx) dst[xx] += wt * row[xx];
          }
        }
      }
    }
    double sum = 0.0;
    for (std::size_t i = 0; i < hw; ++i) sum += std::max(out[i], 0.0);
    a.pooled[f] = sum / static_cast<double>(hw);
  }

  std::vector<double> logits(m.classes);
  for (int k = 0; k < m.classes; ++k) {
    double z = m.fc_bias[k];
    for (int f = 0; f < kConvFilters; ++f) {
      z += m.fc_weights[static_cast<std::size_t>(k) * kConvFilters + f] * a.pooled[f] * a.mask[f];
    }
    logits[k] = z;
  }
  const double top = *std::max_element(logits.begin(), logits.end());
  a.probs.resize(m.classes);
  double total = 0.0;
  for (int k = 0; k < m.classes; ++k) total += (a.probs[k] = std::exp(logits[k] - top));
  for (double& p : a.probs) p /= total;
}

// Accumulates d(loss)/d(params) into `grad`, scaled by `weight`.
void run_backward(const Model& m, const Activations& a, int label, double weight, Gradient& grad) {
  const int h = m.input_height;
  const int w = m.input_width;
  const std::size_t hw = static_cast<std::size_t>(h) * w;

  std::vector<double> dpooled(kConvFilters, 0.0);
  for (int k = 0; k < m.classes; ++k) {
    const double dz = weight * (a.probs[k] - (k == label ? 1.0 : 0.0));
    grad.fc_bias[k] += dz;
    for (int f = 0; f < kConvFilters; ++f) {
      const std::size_t i = static_cast<std::size_t>(k) * kConvFilters + f;
      grad.fc_weights[i] += dz * a.pooled[f] * a.mask[f];
      dpooled[f] += dz * m.fc_weights[i] * a.mask[f];
    }
  }

  std::vector<double> dpre(hw);
  for (int f = 0; f < kConvFilters; ++f) {
    if (dpooled[f] == 0.0) continue;
    const double scale = dpooled[f] / static_cast<double>(hw);
    const double* pre = a.pre.data() + f * hw;
    double bias_sum = 0.0;
    for (std::size_t i = 0; i < hw; ++i) {
      dpre[i] = pre[i] > 0.0 ? scale : 0.0;
      bias_sum += dpre[i];
    }
    grad.conv_bias[f] += bias_sum;
    for (int c = 0; c < m.input_channels; ++c) {
      for (int ky = 0; ky < kKernelSize; ++ky) {
        for (int kx = 0; kx < kKernelSize; ++kx) {
          double acc = 0.0;
          for (int y = 0; y < h; ++y) {
            const double* row = a.padded.row(c, y + ky, kx);
            const double* d = dpre.data() + static_cast<std::size_t>(y) * w;
            for (int xx = 0; xx < w; ++xx) acc += d[xx] * row[xx];
          }
          grad.conv_weights[m.conv_index(f, c, ky, kx)] += acc;
        }
      }
    }
  }
}

std::vector<double> dropout_mask(const Model& m, bool train_mode, Rng* rng) {
  std::vector<double> mask(kConvFilters, 1.0);
  if (!train_mode || m.dropout_p == 0.0) return mask;
  const double keep = 1.0 - m.dropout_p;
  for (double& v : mask) v = rng->uniform01() < keep ? 1.0 / keep : 0.0;
  return mask;
}

double cross_entropy(const Activations& a, int label) {
  return -std::log(std::max(a.probs[label], 1e-300));
}

}  // namespace

ScoreVector forward(const Model& model, const Tensor& input, bool train_mode, std::uint64_t seed) {
  check_shape(model, input);
  Rng rng(seed);
  Activations a;
  run_forward(model, input, dropout_mask(model, train_mode, &rng), a);
  return ScoreVector(std::move(a.probs));
}

ScoreVector forward(const Model& model, const StackedVolume& stack, bool train_mode,
                    std::uint64_t seed) {
  if (stack.channel_count() != model.input_channels) {
    throw Error(Errc::ShapeMismatch, "stack channel count does not match model");
  }
  return forward(model, stack_to_tensor(stack, model.input_width, model.input_height), train_mode,
                 seed);
}

ScoreVector forward(const Model& model, const Frame& frame, bool train_mode, std::uint64_t seed) {
  if (frame.channels() != model.input_channels) {
    throw Error(Errc::ShapeMismatch, "frame channel count does not match model");
  }
  return forward(model, frame_to_tensor(frame, model.input_width, model.input_height), train_mode,
                 seed);
}

Gradient Gradient::zeros_like(const Model& model) {
  return {std::vector<double>(model.conv_weights.size(), 0.0),
          std::vector<double>(model.conv_bias.size(), 0.0),
          std::vector<double>(model.fc_weights.size(), 0.0),
          std::vector<double>(model.fc_bias.size(), 0.0)};
}

double sample_loss(const Model& model, const Sample& sample) {
  check_shape(model, sample.input);
  Activations a;
  run_forward(model, sample.input, std::vector<double>(kConvFilters, 1.0), a);
  return cross_entropy(a, sample.label);
}

double loss_gradient(const Model& model, const Sample& sample, Gradient& grad) {
  check_shape(model, sample.input);
  if (sample.label < 0 || sample.label >= model.classes) {
    throw Error(Errc::LabelOutOfRange, "label " + std::to_string(sample.label));
  }
  grad = Gradient::zeros_like(model);
  Activations a;
  run_forward(model, sample.input, std::vector<double>(kConvFilters, 1.0), a);
  run_backward(model, a, sample.label, 1.0, grad);
  return cross_entropy(a, sample.label);
}

double gradient_check(const Model& model, const Sample& sample, double epsilon) {
  Gradient analytic;
  loss_gradient(model, sample, analytic);

  Model probe = model;
  double worst = 0.0;
  auto sweep = [&](std::vector<double>& params, const std::vector<double>& grads) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      const double saved = params[i];
      params[i] = saved + epsilon;
      const double up = sample_loss(probe, sample);
      params[i] = saved - epsilon;
      const double down = sample_loss(probe, sample);
      params[i] = saved;
      const double numeric = (up - down) / (2.0 * epsilon);
      const double err =
          std::abs(grads[i] - numeric) / std::max(std::abs(grads[i]) + std::abs(numeric), 1e-8);
      worst = std::max(worst, err);
    }
  };
  sweep(probe.conv_weights, analytic.conv_weights);
  sweep(probe.conv_bias, analytic.conv_bias);
  sweep(probe.fc_weights, analytic.fc_weights);
  sweep(probe.fc_bias, analytic.fc_bias);
  return worst;
}

void LrSchedule::validate() const {
  if (!(initial >= 0.0) || !std::isfinite(initial)) {
    throw Error(Errc::BadConfig, "initial learning rate must be finite and >= 0");
  }
  if (!(decay_factor > 0.0 && decay_factor < 1.0)) {
    throw Error(Errc::BadConfig, "decay_factor must lie in (0, 1)");
  }
  if (decay_every < 1) throw Error(Errc::BadConfig, "decay_every must be >= 1");
  if (stop_at < 1) throw Error(Errc::BadConfig, "stop_at must be >= 1");
}

double lr_at(const LrSchedule& schedule, int iteration) {
  schedule.validate();
  if (iteration < 0 || iteration >= schedule.stop_at) {
    throw Error(Errc::OutOfRange, "iteration " + std::to_string(iteration) +
                                      " outside [0, " + std::to_string(schedule.stop_at) + ")");
  }
  return schedule.initial * std::pow(schedule.decay_factor, iteration / schedule.decay_every);
}

TrainResult train(Model model, std::span<const Sample> dataset, const TrainOptions& options,
                  std::uint64_t seed) {
  model.validate();
  options.schedule.validate();
  if (options.batch < 1) throw Error(Errc::BadConfig, "batch must be >= 1");
  if (!(options.momentum >= 0.0 && options.momentum < 1.0)) {
    throw Error(Errc::BadConfig, "momentum must lie in [0, 1)");
  }
  if (dataset.empty()) throw Error(Errc::EmptyDataset, "no training samples");
  for (const Sample& s : dataset) {
    if (s.label < 0 || s.label >= model.classes) {
      throw Error(Errc::LabelOutOfRange, "label " + std::to_string(s.label));
    }
    check_shape(model, s.input);
  }

  Rng shuffle_rng(derive_seed(seed, "train.shuffle"));
  Rng dropout_rng(derive_seed(seed, "train.dropout"));
  std::vector<std::size_t> order(dataset.size());
  std::iota(order.begin(), order.end(), 0);
  std::size_t cursor = order.size();
  auto next_index = [&] {
    if (cursor == order.size()) {
      for (std::size_t i = order.size() - 1; i > 0; --i) {
        std::swap(order[i], order[shuffle_rng.below(i + 1)]);
      }
      cursor = 0;
    }
    return order[cursor++];
  };

  TrainResult result{std::move(model), {}};
  Model& m = result.model;
  result.loss.reserve(options.schedule.stop_at);
  Gradient velocity = Gradient::zeros_like(m);
  Gradient grad = Gradient::zeros_like(m);
  Activations a;

  auto step = [&](std::vector<double>& params, std::vector<double>& vel,
                  const std::vector<double>& g, double lr) {
    for (std::size_t i = 0; i < params.size(); ++i) {
      vel[i] = options.momentum * vel[i] - lr * g[i];
      params[i] += vel[i];
    }
  };

  for (int iter = 0; iter < options.schedule.stop_at; ++iter) {
    grad = Gradient::zeros_like(m);
    const double weight = 1.0 / options.batch;
    double batch_loss = 0.0;
    for (int b = 0; b < options.batch; ++b) {
      const Sample& s = dataset[next_index()];
      run_forward(m, s.input, dropout_mask(m, true, &dropout_rng), a);
      batch_loss += cross_entropy(a, s.label);
      run_backward(m, a, s.label, weight, grad);
    }
    result.loss.push_back(batch_loss * weight);

    const double lr = lr_at(options.schedule, iter);
    step(m.conv_weights, velocity.conv_weights, grad.conv_weights, lr);
    step(m.conv_bias, velocity.conv_bias, grad.conv_bias, lr);
    step(m.fc_weights, velocity.fc_weights, grad.fc_weights, lr);
    step(m.fc_bias, velocity.fc_bias, grad.fc_bias, lr);
  }
  return result;
}

}  // namespace accel
