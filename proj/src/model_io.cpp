#include <array>
#include <fstream>
#include <iterator>

#include "accel/bytes.hpp"
#include "accel/error.hpp"
#include "accel/stream_classifier.hpp"

namespace accel {
namespace {
constexpr std::array<std::uint8_t, 4> kMagic{'A', 'C', 'S', '1'};
constexpr std::uint32_t kVersion = 1;
}  // namespace

std::vector<std::uint8_t> save_model(const Model& model) {
  model.validate();
  std::vector<std::uint8_t> out(kMagic.begin(), kMagic.end());
  bytes::put_u32(out, kVersion);
  bytes::put_u32(out, static_cast<std::uint32_t>(model.input_width));
  bytes::put_u32(out, static_cast<std::uint32_t>(model.input_height));
  bytes::put_u32(out, static_cast<std::uint32_t>(model.input_channels));
  bytes::put_u32(out, static_cast<std::uint32_t>(model.classes));
  bytes::put_f64(out, model.dropout_p);
  for (const auto* block : {&model.conv_weights, &model.conv_bias, &model.fc_weights, &model.fc_bias}) {
    for (double v : *block) bytes::put_f64(out, v);
  }
  return out;
}

Model load_model(std::span<const std::uint8_t> data) {
  if (data.size() < kMagic.size()) throw Error(Errc::TruncatedFile, "model file shorter than magic");
  if (!std::equal(kMagic.begin(), kMagic.end(), data.begin())) {
    throw Error(Errc::BadMagic, "model file does not start with ACS1");
  }
  bytes::Reader in(data.subspan(kMagic.size()), "model file");
  const std::uint32_t version = in.u32();
  if (version != kVersion) {
    throw Error(Errc::VersionMismatch, "model version " + std::to_string(version) + ", expected " +
                                           std::to_string(kVersion));
  }
  Model m;
  m.input_width = static_cast<int>(in.u32());
  m.input_height = static_cast<int>(in.u32());
  m.input_channels = static_cast<int>(in.u32());
  m.classes = static_cast<int>(in.u32());
  m.dropout_p = in.f64();
  constexpr std::uint32_t kLimit = 1u << 16;
  if (m.input_width < 1 || m.input_height < 1 || m.input_channels < 1 || m.classes < 2 ||
      static_cast<std::uint32_t>(m.input_width) > kLimit ||
      static_cast<std::uint32_t>(m.input_height) > kLimit ||
      static_cast<std::uint32_t>(m.input_channels) > kLimit ||
      static_cast<std::uint32_t>(m.classes) > kLimit) {
    throw Error(Errc::DecodeError, "model header dimensions out of range");
  }
  const std::size_t conv_n =
      static_cast<std::size_t>(kConvFilters) * m.input_channels * kKernelSize * kKernelSize;
  const std::size_t fc_n = static_cast<std::size_t>(m.classes) * kConvFilters;
  const std::size_t total = conv_n + kConvFilters + fc_n + m.classes;
  if (in.remaining() < total * 8) throw Error(Errc::TruncatedFile, "model payload is truncated");
  if (in.remaining() > total * 8) throw Error(Errc::DecodeError, "trailing bytes after model payload");

  auto read_block = [&](std::vector<double>& block, std::size_t n) {
    block.resize(n);
    for (double& v : block) v = in.f64();
  };
  read_block(m.conv_weights, conv_n);
  read_block(m.conv_bias, kConvFilters);
  read_block(m.fc_weights, fc_n);
  read_block(m.fc_bias, m.classes);
  m.validate();
  return m;
}

void write_model_file(const std::filesystem::path& path, const Model& model) {
  const auto data = save_model(model);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

Model read_model_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingInput, "cannot open " + path.string());
  const std::vector<std::uint8_t> data{std::istreambuf_iterator<char>(in),
                                       std::istreambuf_iterator<char>()};
  return load_model(data);
}

}  // namespace accel
