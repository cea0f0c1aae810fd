#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "accel/optical_flow.hpp"

namespace accel {

enum class AccelMode { Spatial, Temporal };

// Per-pixel acceleration. Spatial mode: change of flow between neighboring
// pixels of one field. Temporal mode: change between consecutive fields.
class AccelField {
 public:
  AccelField(int width, int height, std::vector<float> ax, std::vector<float> ay, AccelMode mode);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  AccelMode mode() const noexcept { return mode_; }
  std::span<const float> ax() const noexcept { return ax_; }
  std::span<const float> ay() const noexcept { return ay_; }
  float ax(int x, int y) const noexcept { return ax_[static_cast<std::size_t>(y) * width_ + x]; }
  float ay(int x, int y) const noexcept { return ay_[static_cast<std::size_t>(y) * width_ + x]; }

  // The same components as a FlowField, for .flo persistence.
  FlowField as_flow() const;

  bool operator==(const AccelField&) const = default;

 private:
  int width_;
  int height_;
  std::vector<float> ax_;
  std::vector<float> ay_;
  AccelMode mode_;
};

AccelField acceleration_spatial(const FlowField& flow);
AccelField acceleration_temporal(const FlowField& current, const FlowField& following);

// 8-bit rendering of one motion component; `bound` maps back to real units.
class MotionImage {
 public:
  MotionImage(int width, int height, std::vector<std::uint8_t> pixels, double bound);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  double bound() const noexcept { return bound_; }
  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::uint8_t at(int x, int y) const noexcept {
    return pixels_[static_cast<std::size_t>(y) * width_ + x];
  }

  Frame as_frame() const;

  bool operator==(const MotionImage&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
  double bound_;
};

struct MotionImagePair {
  MotionImage x;
  MotionImage y;

  bool operator==(const MotionImagePair&) const = default;
};

// clamp(round(128 + 127 v / bound), 0, 255)
std::uint8_t quantize_value(double value, double bound);
std::vector<std::uint8_t> quantize(std::span<const float> values, double bound);
std::vector<std::uint8_t> quantize(std::span<const double> values, double bound);

double dequantize_value(std::uint8_t code, double bound);
std::vector<double> dequantize(const MotionImage& image);

MotionImagePair flow_to_images(const FlowField& flow, double bound);
MotionImagePair accel_to_images(const AccelField& accel, double bound);

// 2L channels ordered x1, y1, x2, y2, ..., xL, yL.
class StackedVolume {
 public:
  StackedVolume(int width, int height, std::vector<std::vector<std::uint8_t>> channels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  int length() const noexcept { return static_cast<int>(channels_.size() / 2); }
  int channel_count() const noexcept { return static_cast<int>(channels_.size()); }
  std::span<const std::uint8_t> channel(int c) const { return channels_.at(c); }

  bool operator==(const StackedVolume&) const = default;

 private:
  int width_;
  int height_;
  std::vector<std::vector<std::uint8_t>> channels_;
};

inline constexpr int kDefaultStackLength = 10;

StackedVolume build_stack(std::span<const MotionImagePair> images, std::size_t start,
                          int length = kDefaultStackLength);

// <stem>.pgm plus <stem>.meta holding "bound=<decimal>".
void write_motion_image(const std::filesystem::path& stem, const MotionImage& image);
MotionImage read_motion_image(const std::filesystem::path& stem);

// One PGM per channel plus manifest.txt listing them in channel order.
void write_stack(const std::filesystem::path& directory, const StackedVolume& stack);
StackedVolume read_stack(const std::filesystem::path& directory);

}  // namespace accel
