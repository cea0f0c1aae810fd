#pragma once

#include <cstddef>
#include <filesystem>
#include <span>
#include <vector>

#include "accel/frames.hpp"

namespace accel {

// Dense displacement field in pixels/frame. dx, dy are row-major.
class FlowField {
 public:
  FlowField(int width, int height);
  FlowField(int width, int height, std::vector<float> dx, std::vector<float> dy);

  static FlowField uniform(int width, int height, float dx, float dy);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t size() const noexcept { return dx_.size(); }

  std::span<const float> dx() const noexcept { return dx_; }
  std::span<const float> dy() const noexcept { return dy_; }
  float dx(int x, int y) const noexcept { return dx_[index(x, y)]; }
  float dy(int x, int y) const noexcept { return dy_[index(x, y)]; }

  bool operator==(const FlowField&) const = default;

 private:
  std::size_t index(int x, int y) const noexcept {
    return static_cast<std::size_t>(y) * width_ + x;
  }

  int width_;
  int height_;
  std::vector<float> dx_;
  std::vector<float> dy_;
};

struct HsParams {
  double smoothness = 15.0;
  int iterations = 100;
  int pyramid_levels = 3;
  int warp_per_level = 1;

  void validate() const;
};

// Horn-Schunck flow from `prev` to `next`, coarse to fine. Both frames must
// be single-channel and of equal size. Intensities are used on the 0..255
// scale, so `smoothness` is relative to squared gray-level gradients.
FlowField estimate_horn_schunck(const Frame& prev, const Frame& next, const HsParams& params = {});

// Exhaustive integer search over [-radius, radius]^2 minimizing the SAD of a
// block x block window (clamp-to-edge). Ties go to the smallest |d|, then the
// smallest dy, then the smallest dx.
FlowField estimate_block_matching(const Frame& prev, const Frame& next, int radius, int block);

// Mean Euclidean distance between the two fields. With `border` > 0 only
// pixels at least `border` away from every edge are averaged.
double endpoint_error(const FlowField& estimate, const FlowField& truth, int border = 0);

// Border excluded from accuracy metrics for a given block-matching setup.
constexpr int interior_border(int block, int radius) {
  return block > 2 * radius ? block : 2 * radius;
}

// Middlebury .flo: float magic 202021.25, int32 width, int32 height, then
// interleaved (dx, dy) float32 pairs, little-endian.
std::vector<std::uint8_t> encode_flo(const FlowField& flow);
FlowField decode_flo(std::span<const std::uint8_t> bytes);
void write_flo(const std::filesystem::path& path, const FlowField& flow);
FlowField read_flo(const std::filesystem::path& path);

}  // namespace accel
