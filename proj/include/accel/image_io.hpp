#pragma once

#include <filesystem>

#include "accel/frames.hpp"

namespace accel {

Frame read_pgm(const std::filesystem::path& path);
void write_pgm(const std::filesystem::path& path, const Frame& frame);

// 8-bit gray or RGB PNG without alpha.
Frame read_png(const std::filesystem::path& path);
void write_png(const std::filesystem::path& path, const Frame& frame);

// Dispatches on the file signature.
Frame read_image(const std::filesystem::path& path);

}  // namespace accel
