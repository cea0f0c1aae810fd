#include "accel/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "accel/error.hpp"

namespace accel {

const std::map<std::string, std::string>& Config::defaults() {
  static const std::map<std::string, std::string> table = {
      {"flow.smoothness", "15"},
      {"flow.iterations", "100"},
      {"flow.pyramid_levels", "3"},
      {"flow.warp_per_level", "1"},
      {"quant.bound_flow", "20"},
      {"quant.bound_accel", "8"},
      {"accel.mode", "temporal"},
      {"stack.length", "10"},
      {"stack.sampling", "all"},
      {"stack.count", "5"},
      {"model.input_width", "16"},
      {"model.input_height", "16"},
      {"model.dropout", "0"},
      {"train.lr", "0.01"},
      {"train.decay_factor", "0.1"},
      {"train.decay_every", "1000"},
      {"train.stop_at", "5000"},
      {"train.batch", "16"},
      {"train.momentum", "0.9"},
      {"fusion.alpha", "2.0"},
      {"fusion.beta", "2.0"},
      {"synth.width", "176"},
      {"synth.height", "176"},
      {"synth.frames", "12"},
  };
  return table;
}

Config::Config() : values_(defaults()) {}

namespace {
std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}
}  // namespace

Config Config::parse(std::string_view text, std::string_view origin) {
  Config c;
  c.merge(text, origin);
  return c;
}

Config Config::load(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::MissingInput, "cannot open config " + file.string());
  std::stringstream buf;
  buf << in.rdbuf();
  return parse(buf.str(), file.string());
}

void Config::merge(std::string_view text, std::string_view origin) {
  std::istringstream in{std::string(text)};
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    if (trim(line).empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos) {
      throw Error(Errc::BadConfig, std::string(origin) + ":" + std::to_string(line_no) +
                                       ": expected 'key = value'");
    }
    set(trim(std::string_view(line).substr(0, eq)), trim(std::string_view(line).substr(eq + 1)));
  }
}

void Config::set(const std::string& key, const std::string& value) {
  if (!defaults().contains(key)) throw Error(Errc::BadConfig, "unknown config key '" + key + "'");
  if (value.empty()) throw Error(Errc::BadConfig, "empty value for '" + key + "'");
  values_[key] = value;
}

void Config::set_assignment(std::string_view assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string_view::npos) {
    throw Error(Errc::BadConfig, "override '" + std::string(assignment) + "' is not key=value");
  }
  set(trim(assignment.substr(0, eq)), trim(assignment.substr(eq + 1)));
}

const std::string& Config::get(const std::string& key) const {
  const auto it = values_.find(key);
  if (it == values_.end()) throw Error(Errc::BadConfig, "unknown config key '" + key + "'");
  return it->second;
}

double Config::get_double(const std::string& key) const {
  const std::string& s = get(key);
  double v = 0.0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(Errc::BadConfig, key + ": '" + s + "' is not a number");
  }
  return v;
}

int Config::get_int(const std::string& key) const {
  const std::string& s = get(key);
  int v = 0;
  const auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
    throw Error(Errc::BadConfig, key + ": '" + s + "' is not an integer");
  }
  return v;
}

PipelineConfig Config::pipeline() const {
  PipelineConfig p;
  p.flow.smoothness = get_double("flow.smoothness");
  p.flow.iterations = get_int("flow.iterations");
  p.flow.pyramid_levels = get_int("flow.pyramid_levels");
  p.flow.warp_per_level = get_int("flow.warp_per_level");
  p.flow.validate();
  p.flow_bound = get_double("quant.bound_flow");
  p.accel_bound = get_double("quant.bound_accel");
  if (!(p.flow_bound > 0) || !(p.accel_bound > 0)) throw Error(Errc::BadBound, "bounds must be positive");

  const std::string& mode = get("accel.mode");
  if (mode == "temporal") {
    p.accel_mode = AccelMode::Temporal;
  } else if (mode == "spatial") {
    p.accel_mode = AccelMode::Spatial;
  } else {
    throw Error(Errc::BadConfig, "accel.mode must be temporal or spatial");
  }

  p.stack_length = get_int("stack.length");
  if (p.stack_length < 1) throw Error(Errc::BadConfig, "stack.length must be >= 1");
  const std::string& sampling = get("stack.sampling");
  if (sampling == "all") {
    p.sampling.kind = SamplingPolicy::Kind::AllValid;
  } else if (sampling == "even") {
    p.sampling.kind = SamplingPolicy::Kind::EvenlySpaced;
  } else {
    throw Error(Errc::BadConfig, "stack.sampling must be all or even");
  }
  p.sampling.count = get_int("stack.count");
  if (p.sampling.count < 1) throw Error(Errc::BadConfig, "stack.count must be >= 1");

  p.input_width = get_int("model.input_width");
  p.input_height = get_int("model.input_height");
  if (p.input_width < 2 || p.input_height < 2) {
    throw Error(Errc::BadConfig, "model input must be at least 2x2");
  }
  return p;
}

TrainOptions Config::train_options() const {
  TrainOptions t;
  t.schedule.initial = get_double("train.lr");
  t.schedule.decay_factor = get_double("train.decay_factor");
  t.schedule.decay_every = get_int("train.decay_every");
  t.schedule.stop_at = get_int("train.stop_at");
  t.schedule.validate();
  t.batch = get_int("train.batch");
  t.momentum = get_double("train.momentum");
  if (t.batch < 1) throw Error(Errc::BadConfig, "train.batch must be >= 1");
  if (!(t.momentum >= 0.0 && t.momentum < 1.0)) throw Error(Errc::BadConfig, "train.momentum must lie in [0, 1)");
  return t;
}

FusionWeights Config::fusion() const {
  FusionWeights w{get_double("fusion.alpha"), get_double("fusion.beta")};
  w.validate();
  return w;
}

double Config::dropout() const {
  const double p = get_double("model.dropout");
  if (!(p >= 0.0 && p < 1.0)) throw Error(Errc::BadConfig, "model.dropout must lie in [0, 1)");
  return p;
}

BenchmarkOptions Config::benchmark() const {
  return {get_int("synth.width"), get_int("synth.height"), get_int("synth.frames")};
}

}  // namespace accel
