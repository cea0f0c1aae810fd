#include "accel/image_io.hpp"

#include <png.h>

#include <array>
#include <cctype>
#include <cstring>
#include <fstream>
#include <iterator>
#include <string>

#include "accel/error.hpp"

namespace accel {
namespace {

std::vector<std::uint8_t> slurp(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingInput, "cannot open " + path.string());
  return {std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>()};
}

// Reads one whitespace-delimited PNM header token, skipping '#' comments.
class PnmHeader {
 public:
  PnmHeader(const std::vector<std::uint8_t>& bytes, const std::string& name)
      : bytes_(bytes), name_(name) {}

  int integer() {
    skip_space();
    if (pos_ >= bytes_.size() || !std::isdigit(bytes_[pos_])) fail("expected integer");
    long value = 0;
    while (pos_ < bytes_.size() && std::isdigit(bytes_[pos_])) {
      value = value * 10 + (bytes_[pos_++] - '0');
      if (value > 1'000'000) fail("header value out of range");
    }
    return static_cast<int>(value);
  }

  // Exactly one whitespace byte separates maxval from the raster.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !std::isspace(bytes_[pos_])) fail("missing raster separator");
    return pos_ + 1;
  }

  [[noreturn]] void fail(const std::string& what) const {
    throw Error(Errc::DecodeError, name_ + ": " + what);
  }

 private:
  void skip_space() {
    while (pos_ < bytes_.size()) {
      if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else if (std::isspace(bytes_[pos_])) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  const std::vector<std::uint8_t>& bytes_;
  std::string name_;
  std::size_t pos_ = 2;
};

}  // namespace

Frame read_pgm(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  PnmHeader header(bytes, path.string());
  if (bytes.size() < 2 || bytes[0] != 'P' || bytes[1] != '5') header.fail("not a binary PGM");
  const int width = header.integer();
  const int height = header.integer();
  const int maxval = header.integer();
  if (maxval != 255) header.fail("only maxval 255 is supported");
  if (width < 2 || height < 2) header.fail("image smaller than 2x2");
  const std::size_t start = header.raster_start();
  const std::size_t count = static_cast<std::size_t>(width) * height;
  if (bytes.size() < start + count) header.fail("truncated raster");
  return Frame(width, height, 1,
               std::vector<std::uint8_t>(bytes.begin() + start, bytes.begin() + start + count));
}

void write_pgm(const std::filesystem::path& path, const Frame& frame) {
  if (frame.channels() != 1) throw Error(Errc::NonGrayInput, "PGM output requires a gray frame");
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(Errc::IoError, "cannot write " + path.string());
  out << "P5\n" << frame.width() << ' ' << frame.height() << "\n255\n";
  const auto px = frame.pixels();
  out.write(reinterpret_cast<const char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!out) throw Error(Errc::IoError, "short write to " + path.string());
}

Frame read_png(const std::filesystem::path& path) {
  const auto bytes = slurp(path);
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  if (!png_image_begin_read_from_memory(&image, bytes.data(), bytes.size())) {
    throw Error(Errc::DecodeError, path.string() + ": " + image.message);
  }
  if (image.format & PNG_FORMAT_FLAG_ALPHA) {
    png_image_free(&image);
    throw Error(Errc::DecodeError, path.string() + ": PNG with alpha is not supported");
  }
  const bool color = image.format & PNG_FORMAT_FLAG_COLOR;
  image.format = color ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  const int channels = color ? 3 : 1;
  std::vector<std::uint8_t> pixels(PNG_IMAGE_SIZE(image));
  if (!png_image_finish_read(&image, nullptr, pixels.data(), 0, nullptr)) {
    std::string msg = image.message;
    png_image_free(&image);
    throw Error(Errc::DecodeError, path.string() + ": " + msg);
  }
  return Frame(static_cast<int>(image.width), static_cast<int>(image.height), channels,
               std::move(pixels));
}

void write_png(const std::filesystem::path& path, const Frame& frame) {
  png_image image;
  std::memset(&image, 0, sizeof image);
  image.version = PNG_IMAGE_VERSION;
  image.width = static_cast<png_uint_32>(frame.width());
  image.height = static_cast<png_uint_32>(frame.height());
  image.format = frame.channels() == 3 ? PNG_FORMAT_RGB : PNG_FORMAT_GRAY;
  if (!png_image_write_to_file(&image, path.c_str(), 0, frame.pixels().data(), 0, nullptr)) {
    throw Error(Errc::IoError, path.string() + ": " + image.message);
  }
}

Frame read_image(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(Errc::MissingInput, "cannot open " + path.string());
  std::array<char, 8> sig{};
  in.read(sig.data(), sig.size());
  const auto got = static_cast<std::size_t>(in.gcount());
  if (got >= 2 && sig[0] == 'P' && sig[1] == '5') return read_pgm(path);
  if (got == 8 && png_sig_cmp(reinterpret_cast<png_const_bytep>(sig.data()), 0, 8) == 0) {
    return read_png(path);
  }
  throw Error(Errc::DecodeError, path.string() + ": unrecognized image format");
}

}  // namespace accel
