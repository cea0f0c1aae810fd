#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <span>
#include <string_view>
#include <vector>

namespace accel {

// 8-bit raster, row-major, channels interleaved. Gray (1) or RGB (3).
class Frame {
 public:
  Frame(int width, int height, int channels, std::vector<std::uint8_t> pixels);

  static Frame filled(int width, int height, int channels, std::uint8_t value);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int channels() const noexcept { return channels_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }

  std::uint8_t at(int x, int y, int c = 0) const noexcept {
    return pixels_[(static_cast<std::size_t>(y) * width_ + x) * channels_ + c];
  }
  // Clamp-to-edge read.
  std::uint8_t clamped(int x, int y, int c = 0) const noexcept;

  bool operator==(const Frame&) const = default;

 private:
  int width_;
  int height_;
  int channels_;
  std::vector<std::uint8_t> pixels_;
};

// Ordered frames of identical geometry, one time unit apart.
class FrameSequence {
 public:
  explicit FrameSequence(std::vector<Frame> frames);

  std::size_t size() const noexcept { return frames_.size(); }
  const Frame& operator[](std::size_t i) const { return frames_[i]; }
  auto begin() const noexcept { return frames_.begin(); }
  auto end() const noexcept { return frames_.end(); }

  int width() const noexcept { return frames_.front().width(); }
  int height() const noexcept { return frames_.front().height(); }
  int channels() const noexcept { return frames_.front().channels(); }

  bool operator==(const FrameSequence&) const = default;

 private:
  std::vector<Frame> frames_;
};

// Loads every file in `directory` whose name matches the glob `pattern`,
// in lexicographic filename order. PGM (P5) and PNG are accepted.
FrameSequence load_sequence(const std::filesystem::path& directory, std::string_view pattern);

// BT.601 luma, rounded and clamped. Gray input is returned unchanged.
Frame to_grayscale(const Frame& frame);

// Pixel-center aligned bilinear resampling with clamp-to-edge reads.
Frame resize_bilinear(const Frame& frame, int width, int height);

}  // namespace accel
