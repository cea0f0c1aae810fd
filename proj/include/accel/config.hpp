#pragma once

#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "accel/fusion_eval.hpp"
#include "accel/stream_classifier.hpp"
#include "accel/synth.hpp"

namespace accel {

// Flat "key = value" settings. Every key has a default; unknown keys are
// rejected. Later assignments override earlier ones, which gives the
// precedence defaults < config file < command-line overrides.
class Config {
 public:
  // All keys at their defaults.
  Config();

  static Config parse(std::string_view text, std::string_view origin = "<config>");
  static Config load(const std::filesystem::path& file);

  // Applies the assignments in `text` on top of this config.
  void merge(std::string_view text, std::string_view origin = "<config>");
  void set(const std::string& key, const std::string& value);
  // "key=value"
  void set_assignment(std::string_view assignment);

  const std::string& get(const std::string& key) const;
  double get_double(const std::string& key) const;
  int get_int(const std::string& key) const;

  const std::map<std::string, std::string>& values() const noexcept { return values_; }
  static const std::map<std::string, std::string>& defaults();

  PipelineConfig pipeline() const;
  TrainOptions train_options() const;
  FusionWeights fusion() const;
  double dropout() const;
  BenchmarkOptions benchmark() const;

 private:
  std::map<std::string, std::string> values_;
};

}  // namespace accel
