#include "test_util.hpp"

#include <atomic>
#include <fstream>
#include <sstream>

#include <unistd.h>

#include "accel/synth.hpp"

namespace accel::testing {

TempDir::TempDir(const std::string& tag) {
  static std::atomic<int> counter{0};
  path_ = std::filesystem::temp_directory_path() /
          ("accel_" + tag + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++));
  std::filesystem::remove_all(path_);
  std::filesystem::create_directories(path_);
}

TempDir::~TempDir() {
  std::error_code ec;
  std::filesystem::remove_all(path_, ec);
}

Frame textured_frame(int width, int height, double dx, double dy, std::uint64_t seed) {
  MotionSpec spec;
  spec.width = width;
  spec.height = height;
  spec.n_frames = 2;
  spec.v0 = {dx, dy};
  spec.seed = seed;
  return generate(spec).frames[1];
}

double exact_fraction(const FlowField& flow, float dx, float dy, int border) {
  int hit = 0;
  int total = 0;
  for (int y = border; y < flow.height() - border; ++y) {
    for (int x = border; x < flow.width() - border; ++x) {
      hit += flow.dx(x, y) == dx && flow.dy(x, y) == dy;
      ++total;
    }
  }
  return static_cast<double>(hit) / total;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream buf;
  buf << in.rdbuf();
  return buf.str();
}

}  // namespace accel::testing
