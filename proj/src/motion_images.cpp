#include "accel/motion_images.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>
#include <string>

#include "accel/error.hpp"
#include "accel/image_io.hpp"

namespace accel {

AccelField::AccelField(int width, int height, std::vector<float> ax, std::vector<float> ay,
                       AccelMode mode)
    : width_(width), height_(height), ax_(std::move(ax)), ay_(std::move(ay)), mode_(mode) {
  const auto n = static_cast<std::size_t>(width) * height;
  if (width < 1 || height < 1 || ax_.size() != n || ay_.size() != n) {
    throw Error(Errc::BadDimensions, "acceleration component length does not match width*height");
  }
  auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(ax_.begin(), ax_.end(), finite) || !std::all_of(ay_.begin(), ay_.end(), finite)) {
    throw Error(Errc::BadDimensions, "acceleration field contains non-finite values");
  }
}

FlowField AccelField::as_flow() const { return FlowField(width_, height_, ax_, ay_); }

AccelField acceleration_spatial(const FlowField& flow) {
  const int w = flow.width();
  const int h = flow.height();
  std::vector<float> ax(flow.size(), 0.0f), ay(flow.size(), 0.0f);
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      const auto i = static_cast<std::size_t>(y) * w + x;
      // Trailing column/row stay zero: the clamped neighbor is the pixel itself.
      if (x + 1 < w) ax[i] = flow.dx(x + 1, y) - flow.dx(x, y);
      if (y + 1 < h) ay[i] = flow.dy(x, y + 1) - flow.dy(x, y);
    }
  }
  return AccelField(w, h, std::move(ax), std::move(ay), AccelMode::Spatial);
}

AccelField acceleration_temporal(const FlowField& current, const FlowField& following) {
  if (current.width() != following.width() || current.height() != following.height()) {
    throw Error(Errc::DimensionMismatch, "temporal acceleration needs equally sized flows");
  }
  std::vector<float> ax(current.size()), ay(current.size());
  for (std::size_t i = 0; i < current.size(); ++i) {
    ax[i] = following.dx()[i] - current.dx()[i];
    ay[i] = following.dy()[i] - current.dy()[i];
  }
  return AccelField(current.width(), current.height(), std::move(ax), std::move(ay),
                    AccelMode::Temporal);
}

MotionImage::MotionImage(int width, int height, std::vector<std::uint8_t> pixels, double bound)
    : width_(width), height_(height), pixels_(std::move(pixels)), bound_(bound) {
  if (!(bound > 0) || !std::isfinite(bound)) throw Error(Errc::BadBound, "bound must be positive");
  if (width < 1 || height < 1 || pixels_.size() != static_cast<std::size_t>(width) * height) {
    throw Error(Errc::BadDimensions, "motion image length does not match width*height");
  }
}

Frame MotionImage::as_frame() const { return Frame(width_, height_, 1, pixels_); }

namespace {
void check_bound(double bound) {
  if (!(bound > 0) || !std::isfinite(bound)) throw Error(Errc::BadBound, "bound must be positive");
}

template <typename T>
std::vector<std::uint8_t> quantize_all(std::span<const T> values, double bound) {
  check_bound(bound);
  std::vector<std::uint8_t> out(values.size());
  std::transform(values.begin(), values.end(), out.begin(),
                 [bound](T v) { return quantize_value(v, bound); });
  return out;
}
}  // namespace

std::uint8_t quantize_value(double value, double bound) {
  check_bound(bound);
  const double code = std::round(128.0 + 127.0 * value / bound);
  return static_cast<std::uint8_t>(std::clamp(code, 0.0, 255.0));
}

std::vector<std::uint8_t> quantize(std::span<const float> values, double bound) {
  return quantize_all(values, bound);
}

std::vector<std::uint8_t> quantize(std::span<const double> values, double bound) {
  return quantize_all(values, bound);
}

double dequantize_value(std::uint8_t code, double bound) {
  return (static_cast<double>(code) - 128.0) * bound / 127.0;
}

std::vector<double> dequantize(const MotionImage& image) {
  std::vector<double> out(image.pixels().size());
  std::transform(image.pixels().begin(), image.pixels().end(), out.begin(),
                 [&](std::uint8_t c) { return dequantize_value(c, image.bound()); });
  return out;
}

MotionImagePair flow_to_images(const FlowField& flow, double bound) {
  return {MotionImage(flow.width(), flow.height(), quantize(flow.dx(), bound), bound),
          MotionImage(flow.width(), flow.height(), quantize(flow.dy(), bound), bound)};
}

MotionImagePair accel_to_images(const AccelField& accel, double bound) {
  return {MotionImage(accel.width(), accel.height(), quantize(accel.ax(), bound), bound),
          MotionImage(accel.width(), accel.height(), quantize(accel.ay(), bound), bound)};
}

StackedVolume::StackedVolume(int width, int height, std::vector<std::vector<std::uint8_t>> channels)
    : width_(width), height_(height), channels_(std::move(channels)) {
  if (channels_.empty() || channels_.size() % 2 != 0) {
    throw Error(Errc::ShapeMismatch, "a stack needs an even, non-zero channel count");
  }
  for (const auto& c : channels_) {
    if (c.size() != static_cast<std::size_t>(width) * height) {
      throw Error(Errc::DimensionMismatch, "stack channels differ in size");
    }
  }
}

StackedVolume build_stack(std::span<const MotionImagePair> images, std::size_t start, int length) {
  if (length < 1) throw Error(Errc::OutOfRange, "stack length must be >= 1");
  if (start + static_cast<std::size_t>(length) > images.size()) {
    throw Error(Errc::OutOfRange, "stack [" + std::to_string(start) + ", " +
                                      std::to_string(start + length) + ") exceeds " +
                                      std::to_string(images.size()) + " image pairs");
  }
  const int w = images[start].x.width();
  const int h = images[start].x.height();
  std::vector<std::vector<std::uint8_t>> channels;
  channels.reserve(2 * static_cast<std::size_t>(length));
  for (std::size_t k = start; k < start + length; ++k) {
    for (const MotionImage* img : {&images[k].x, &images[k].y}) {
      if (img->width() != w || img->height() != h) {
        throw Error(Errc::DimensionMismatch, "motion images differ in size");
      }
      channels.emplace_back(img->pixels().begin(), img->pixels().end());
    }
  }
  return StackedVolume(w, h, std::move(channels));
}

namespace {
std::filesystem::path with_suffix(const std::filesystem::path& stem, const char* suffix) {
  return stem.parent_path() / (stem.filename().string() + suffix);
}
}  // namespace

void write_motion_image(const std::filesystem::path& stem, const MotionImage& image) {
  write_pgm(with_suffix(stem, ".pgm"), image.as_frame());
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, image.bound());
  std::ofstream meta(with_suffix(stem, ".meta"));
  if (!meta) throw Error(Errc::IoError, "cannot write " + with_suffix(stem, ".meta").string());
  meta << "bound=" << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf)) << '\n';
}

MotionImage read_motion_image(const std::filesystem::path& stem) {
  const Frame frame = read_pgm(with_suffix(stem, ".pgm"));
  const auto meta_path = with_suffix(stem, ".meta");
  std::ifstream meta(meta_path);
  if (!meta) throw Error(Errc::MissingInput, "cannot open " + meta_path.string());
  std::string line;
  std::getline(meta, line);
  constexpr std::string_view key = "bound=";
  if (line.rfind(key, 0) != 0) throw Error(Errc::DecodeError, meta_path.string() + ": no bound=");
  double bound = 0.0;
  const char* first = line.data() + key.size();
  const char* last = line.data() + line.size();
  const auto res = std::from_chars(first, last, bound);
  if (res.ec != std::errc() || res.ptr != last) {
    throw Error(Errc::DecodeError, meta_path.string() + ": bad bound value");
  }
  const auto px = frame.pixels();
  return MotionImage(frame.width(), frame.height(), {px.begin(), px.end()}, bound);
}

void write_stack(const std::filesystem::path& directory, const StackedVolume& stack) {
  std::filesystem::create_directories(directory);
  std::ofstream manifest(directory / "manifest.txt");
  if (!manifest) throw Error(Errc::IoError, "cannot write stack manifest in " + directory.string());
  for (int c = 0; c < stack.channel_count(); ++c) {
    char name[32];
    std::snprintf(name, sizeof name, "channel_%02d_%c.pgm", c / 2 + 1, c % 2 == 0 ? 'x' : 'y');
    const auto px = stack.channel(c);
    write_pgm(directory / name, Frame(stack.width(), stack.height(), 1, {px.begin(), px.end()}));
    manifest << name << '\n';
  }
}

StackedVolume read_stack(const std::filesystem::path& directory) {
  std::ifstream manifest(directory / "manifest.txt");
  if (!manifest) throw Error(Errc::MissingInput, "no manifest.txt in " + directory.string());
  std::vector<std::vector<std::uint8_t>> channels;
  int w = 0;
  int h = 0;
  for (std::string name; std::getline(manifest, name);) {
    if (name.empty()) continue;
    const Frame f = read_pgm(directory / name);
    w = f.width();
    h = f.height();
    channels.emplace_back(f.pixels().begin(), f.pixels().end());
  }
  return StackedVolume(w, h, std::move(channels));
}

}  // namespace accel
