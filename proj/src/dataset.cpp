#include "accel/dataset.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>

#include "accel/error.hpp"

namespace accel {

int Dataset::class_count() const {
  int k = 0;
  for (const Video& v : videos) k = std::max(k, v.label + 1);
  return k;
}

std::vector<const Video*> Dataset::split(Split which) const {
  std::vector<const Video*> out;
  for (const Video& v : videos)
    if (v.split == which) out.push_back(&v);
  return out;
}

std::string_view split_name(Split s) { return s == Split::Train ? "train" : "test"; }

std::vector<ManifestEntry> read_manifest(const std::filesystem::path& file) {
  std::ifstream in(file);
  if (!in) throw Error(Errc::MissingInput, "cannot open manifest " + file.string());
  std::vector<ManifestEntry> entries;
  int line_no = 0;
  for (std::string line; std::getline(in, line);) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto c1 = line.find(',');
    const auto c2 = c1 == std::string::npos ? c1 : line.find(',', c1 + 1);
    if (c2 == std::string::npos) {
      throw Error(Errc::DecodeError, file.string() + ":" + std::to_string(line_no) +
                                         ": expected path,class,split");
    }
    ManifestEntry e;
    e.path = line.substr(0, c1);
    const std::string label = line.substr(c1 + 1, c2 - c1 - 1);
    const auto res = std::from_chars(label.data(), label.data() + label.size(), e.label);
    if (res.ec != std::errc() || res.ptr != label.data() + label.size() || e.label < 0) {
      throw Error(Errc::DecodeError, file.string() + ":" + std::to_string(line_no) + ": bad class");
    }
    const std::string split = line.substr(c2 + 1);
    if (split == "train") {
      e.split = Split::Train;
    } else if (split == "test") {
      e.split = Split::Test;
    } else {
      throw Error(Errc::DecodeError, file.string() + ":" + std::to_string(line_no) + ": bad split");
    }
    entries.push_back(std::move(e));
  }
  return entries;
}

void write_manifest(const std::filesystem::path& file, const std::vector<ManifestEntry>& entries) {
  std::ofstream out(file);
  if (!out) throw Error(Errc::IoError, "cannot write " + file.string());
  for (const auto& e : entries) out << e.path << ',' << e.label << ',' << split_name(e.split) << '\n';
}

namespace {
Dataset load(const std::filesystem::path& root, const Split* only) {
  Dataset ds;
  for (const auto& e : read_manifest(root / "manifest.txt")) {
    if (only && e.split != *only) continue;
    ds.videos.push_back(Video{e.path, e.label, e.split, load_sequence(root / e.path, "*.pgm")});
  }
  return ds;
}
}  // namespace

Dataset read_dataset(const std::filesystem::path& root) { return load(root, nullptr); }

Dataset read_dataset(const std::filesystem::path& root, Split which) { return load(root, &which); }

}  // namespace accel
