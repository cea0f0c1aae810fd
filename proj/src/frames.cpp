#include "accel/frames.hpp"

#include <fnmatch.h>

#include <algorithm>
#include <cmath>
#include <string>

#include "accel/error.hpp"
#include "accel/image_io.hpp"

namespace accel {

Frame::Frame(int width, int height, int channels, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), channels_(channels), pixels_(std::move(pixels)) {
  if (width < 2 || height < 2) {
    throw Error(Errc::BadDimensions, "frame must be at least 2x2, got " + std::to_string(width) +
                                         "x" + std::to_string(height));
  }
  if (channels != 1 && channels != 3) {
    throw Error(Errc::BadDimensions, "frame channels must be 1 or 3");
  }
  if (pixels_.size() != static_cast<std::size_t>(width) * height * channels) {
    throw Error(Errc::BadDimensions, "pixel buffer length does not match width*height*channels");
  }
}

Frame Frame::filled(int width, int height, int channels, std::uint8_t value) {
  return Frame(width, height, channels,
               std::vector<std::uint8_t>(static_cast<std::size_t>(std::max(width, 0)) *
                                             std::max(height, 0) * std::max(channels, 0),
                                         value));
}

std::uint8_t Frame::clamped(int x, int y, int c) const noexcept {
  return at(std::clamp(x, 0, width_ - 1), std::clamp(y, 0, height_ - 1), c);
}

FrameSequence::FrameSequence(std::vector<Frame> frames) : frames_(std::move(frames)) {
  if (frames_.size() < 2) {
    throw Error(Errc::MissingInput, "a sequence needs at least 2 frames");
  }
  const Frame& first = frames_.front();
  for (const Frame& f : frames_) {
    if (f.width() != first.width() || f.height() != first.height() ||
        f.channels() != first.channels()) {
      throw Error(Errc::DimensionMismatch, "frames differ in size or channel count");
    }
  }
}

FrameSequence load_sequence(const std::filesystem::path& directory, std::string_view pattern) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(directory)) {
    throw Error(Errc::MissingInput, "not a directory: " + directory.string());
  }
  const std::string glob(pattern);
  std::vector<fs::path> matches;
  for (const auto& entry : fs::directory_iterator(directory)) {
    if (!entry.is_regular_file()) continue;
    const std::string name = entry.path().filename().string();
    if (fnmatch(glob.c_str(), name.c_str(), 0) == 0) matches.push_back(entry.path());
  }
  if (matches.size() < 2) {
    throw Error(Errc::MissingInput, std::to_string(matches.size()) + " file(s) match '" + glob +
                                        "' in " + directory.string());
  }
  std::sort(matches.begin(), matches.end(), [](const fs::path& a, const fs::path& b) {
    return a.filename().string() < b.filename().string();
  });

  std::vector<Frame> frames;
  frames.reserve(matches.size());
  for (const auto& path : matches) frames.push_back(read_image(path));
  return FrameSequence(std::move(frames));
}

Frame to_grayscale(const Frame& frame) {
  if (frame.channels() == 1) return frame;
  const std::size_t n = static_cast<std::size_t>(frame.width()) * frame.height();
  std::vector<std::uint8_t> gray(n);
  const auto src = frame.pixels();
  for (std::size_t i = 0; i < n; ++i) {
    const double luma = 0.299 * src[3 * i] + 0.587 * src[3 * i + 1] + 0.114 * src[3 * i + 2];
    gray[i] = static_cast<std::uint8_t>(std::clamp(std::round(luma), 0.0, 255.0));
  }
  return Frame(frame.width(), frame.height(), 1, std::move(gray));
}

Frame resize_bilinear(const Frame& frame, int width, int height) {
  if (width < 2 || height < 2) {
    throw Error(Errc::BadDimensions, "resize target must be at least 2x2");
  }
  const int channels = frame.channels();
  const double sx = static_cast<double>(frame.width()) / width;
  const double sy = static_cast<double>(frame.height()) / height;
  std::vector<std::uint8_t> out(static_cast<std::size_t>(width) * height * channels);

  for (int y = 0; y < height; ++y) {
    const double fy = std::clamp((y + 0.5) * sy - 0.5, 0.0, frame.height() - 1.0);
    const int y0 = static_cast<int>(fy);
    const double wy = fy - y0;
    for (int x = 0; x < width; ++x) {
      const double fx = std::clamp((x + 0.5) * sx - 0.5, 0.0, frame.width() - 1.0);
      const int x0 = static_cast<int>(fx);
      const double wx = fx - x0;
      for (int c = 0; c < channels; ++c) {
        const double top = (1 - wx) * frame.clamped(x0, y0, c) + wx * frame.clamped(x0 + 1, y0, c);
        const double bottom =
            (1 - wx) * frame.clamped(x0, y0 + 1, c) + wx * frame.clamped(x0 + 1, y0 + 1, c);
        const double v = (1 - wy) * top + wy * bottom;
        out[(static_cast<std::size_t>(y) * width + x) * channels + c] =
            static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
      }
    }
  }
  return Frame(width, height, channels, std::move(out));
}

}  // namespace accel
