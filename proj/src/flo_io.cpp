#include <fstream>
#include <iterator>

#include "accel/bytes.hpp"
#include "accel/error.hpp"
#include "accel/optical_flow.hpp"

namespace accel {
namespace {
constexpr float kFloMagic = 202021.25f;
}

std::vector<std::uint8_t> encode_flo(const FlowField& flow) {
  std::vector<std::uint8_t> out;
  out.reserve(12 + flow.size() * 8);
  bytes::put_f32(out, kFloMagic);
  bytes::put_u32(out, static_cast<std::uint32_t>(flow.width()));
  bytes::put_u32(out, static_cast<std::uint32_t>(flow.height()));
  const auto dx = flow.dx();
  const auto dy = flow.dy();
  for (std::size_t i = 0; i < flow.size(); ++i) {
    bytes::put_f32(out, dx[i]);
    bytes::put_f32(out, dy[i]);
  }
  return out;
}

FlowField decode_flo(std::span<const std::uint8_t> data) {
  bytes::Reader in(data, ".flo");
  if (in.f32() != kFloMagic) throw Error(Errc::BadMagic, ".flo magic mismatch");
  const auto width = static_cast<std::int32_t>(in.u32());
  const auto height = static_cast<std::int32_t>(in.u32());
  if (width < 1 || height < 1 || width > 100000 || height > 100000) {
    throw Error(Errc::DecodeError, ".flo dimensions out of range");
  }
  const auto n = static_cast<std::size_t>(width) * height;
  if (in.remaining() < n * 8) throw Error(Errc::TruncatedFile, ".flo payload is truncated");
  std::vector<float> dx(n), dy(n);
  for (std::size_t i = 0; i < n; ++i) {
    dx[i] = in.f32();
    dy[i] = in.f32();
  }
  return FlowField(width, height, std::move(dx), std::move(dy));
}

void write_flo(const std::filesystem::path& path, const FlowField& flow) {
  const auto data = encode_flo(flow);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
  if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

FlowField read_flo(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingInput, "cannot open " + path.string());
  const std::vector<std::uint8_t> data{std::istreambuf_iterator<char>(in),
                                       std::istreambuf_iterator<char>()};
  return decode_flo(data);
}

}  // namespace accel
