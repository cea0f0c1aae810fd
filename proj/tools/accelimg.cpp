// accelimg: flow, acceleration images, stacks, synthetic data, training and
// three-stream evaluation from the command line.
//
// Settings precedence: built-in defaults < --config file < --set key=value <
// dedicated flags (--mode, --alpha, --beta, ...).

#include <CLI11.hpp>

#include <cstdint>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

#include "accel/commands.hpp"
#include "accel/error.hpp"

namespace {

struct Common {
  std::string config_path;
  std::vector<std::string> overrides;
  std::uint64_t seed = 0;
  std::string out;
};

void add_common(CLI::App* cmd, Common& common, bool needs_out = true) {
  cmd->add_option("--config", common.config_path, "Config file (key = value lines)");
  cmd->add_option("--set", common.overrides, "Override one config key, key=value")->allow_extra_args(false);
  cmd->add_option("--seed", common.seed, "Seed for all randomness");
  auto* out = cmd->add_option("--out", common.out, "Output directory");
  if (needs_out) out->required();
}

accel::Config make_config(const Common& common) {
  accel::Config config =
      common.config_path.empty() ? accel::Config() : accel::Config::load(common.config_path);
  for (const auto& kv : common.overrides) config.set_assignment(kv);
  return config;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Acceleration-image motion streams: flow, acceleration, stacks, training, fusion"};
  app.require_subcommand(1);

  Common common;

  std::string in_dir;
  std::string pattern = "*";
  auto* flow = app.add_subcommand("flow", "Dense optical flow for consecutive frames");
  add_common(flow, common);
  flow->add_option("--in", in_dir, "Directory of PGM/PNG frames")->required();
  flow->add_option("--pattern", pattern, "Filename glob for frames");

  std::string mode;
  auto* accel_cmd = app.add_subcommand("accel", "Acceleration images from a flow directory");
  add_common(accel_cmd, common);
  accel_cmd->add_option("--in", in_dir, "Directory written by 'flow'")->required();
  accel_cmd->add_option("--mode", mode, "temporal or spatial")->check(CLI::IsMember({"temporal", "spatial"}));

  std::string prefix = "flow";
  std::size_t start = 0;
  int length = 0;
  auto* stack = app.add_subcommand("stack", "Build one stacked volume from motion images");
  add_common(stack, common);
  stack->add_option("--in", in_dir, "Directory of motion images")->required();
  stack->add_option("--prefix", prefix, "Image prefix: flow or accel");
  stack->add_option("--start", start, "Index of the first image pair");
  stack->add_option("--length", length, "Stack length L (pairs)");

  auto* synth = app.add_subcommand("synth", "Write the synthetic 4-class benchmark");
  add_common(synth, common);

  std::string data_dir;
  std::string stream = "accel";
  auto* train = app.add_subcommand("train", "Train one stream classifier");
  add_common(train, common);
  train->add_option("--data", data_dir, "Dataset directory (manifest.txt)")->required();
  train->add_option("--stream", stream, "spatial, temporal or accel")
      ->check(CLI::IsMember({"spatial", "temporal", "accel"}));

  std::string models_dir;
  std::optional<double> alpha;
  std::optional<double> beta;
  auto* eval = app.add_subcommand("eval", "Evaluate three stream models on the test split");
  add_common(eval, common);
  eval->add_option("--data", data_dir, "Dataset directory")->required();
  eval->add_option("--models", models_dir, "Directory with spatial/temporal/accel .model files")->required();
  eval->add_option("--alpha", alpha, "Temporal stream weight");
  eval->add_option("--beta", beta, "Acceleration stream weight");

  std::string spa_file, tem_file, acc_file;
  auto* fuse = app.add_subcommand("fuse", "Fuse three score files");
  add_common(fuse, common);
  fuse->add_option("--spatial", spa_file, "Spatial scores")->required();
  fuse->add_option("--temporal", tem_file, "Temporal scores")->required();
  fuse->add_option("--accel", acc_file, "Acceleration scores")->required();
  fuse->add_option("--alpha", alpha, "Temporal stream weight");
  fuse->add_option("--beta", beta, "Acceleration stream weight");

  CLI11_PARSE(app, argc, argv);

  try {
    accel::Config config = make_config(common);
    if (!mode.empty()) config.set("accel.mode", mode);
    if (length > 0) config.set("stack.length", std::to_string(length));
    if (alpha) config.set("fusion.alpha", std::to_string(*alpha));
    if (beta) config.set("fusion.beta", std::to_string(*beta));

    if (flow->parsed()) {
      const auto n = accel::cmd_flow(in_dir, pattern, common.out, config);
      std::cerr << "wrote " << n << " flow fields to " << common.out << '\n';
    } else if (accel_cmd->parsed()) {
      const auto n = accel::cmd_accel(in_dir, common.out, config);
      std::cerr << "wrote " << n << " acceleration fields to " << common.out << '\n';
    } else if (stack->parsed()) {
      const auto s = accel::cmd_stack(in_dir, prefix, start, common.out, config);
      std::cerr << "wrote " << s.channel_count() << "-channel stack to " << common.out << '\n';
    } else if (synth->parsed()) {
      const auto videos = accel::cmd_synth(common.out, common.seed, config);
      std::cerr << "wrote " << videos.size() << " videos to " << common.out << '\n';
    } else if (train->parsed()) {
      const auto result =
          accel::cmd_train(data_dir, accel::parse_stream(stream), common.out, config, common.seed);
      std::cerr << "trained " << stream << " for " << result.loss.size()
                << " iterations, final loss " << result.loss.back() << '\n';
    } else if (eval->parsed()) {
      const auto report = accel::cmd_eval(data_dir, models_dir, common.out, config);
      std::cerr << accel::format_report_table(report);
    } else if (fuse->parsed()) {
      accel::cmd_fuse(spa_file, tem_file, acc_file, common.out, config);
    }
  } catch (const accel::Error& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
