#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "accel/frames.hpp"

namespace accel {

enum class Split { Train, Test };

struct Video {
  std::string id;
  int label = 0;
  Split split = Split::Train;
  FrameSequence frames;
};

struct Dataset {
  std::vector<Video> videos;

  int class_count() const;
  std::vector<const Video*> split(Split which) const;
};

// A manifest line, "path,class,split" with `path` relative to the dataset root.
struct ManifestEntry {
  std::string path;
  int label = 0;
  Split split = Split::Train;
};

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file);
void write_manifest(const std::filesystem::path& file, const std::vector<ManifestEntry>& entries);

// Loads every manifest entry; frames are read with the glob "*.pgm".
Dataset read_dataset(const std::filesystem::path& root);
// Same, restricted to one split.
Dataset read_dataset(const std::filesystem::path& root, Split which);

std::string_view split_name(Split s);

}  // namespace accel
