#include "accel/synth.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <string>

#include "accel/error.hpp"
#include "accel/image_io.hpp"
#include "accel/rng.hpp"

namespace accel {

Vec2 MotionSpec::displacement(int frame) const {
  const double t = frame;
  const double ramp = t * (t - 1.0) / 2.0;
  return {t * v0.x + ramp * a.x, t * v0.y + ramp * a.y};
}

Vec2 MotionSpec::velocity(int pair) const { return {v0.x + a.x * pair, v0.y + a.y * pair}; }

void MotionSpec::validate() const {
  if (n_frames < 2) throw Error(Errc::BadSpec, "n_frames must be >= 2");
  if (width < 2 || height < 2) throw Error(Errc::BadSpec, "frame size must be at least 2x2");
  if (!(noise_sigma >= 0.0) || !std::isfinite(noise_sigma)) {
    throw Error(Errc::BadSpec, "noise_sigma must be finite and >= 0");
  }
  for (int t = 0; t < n_frames; ++t) {
    const Vec2 d = displacement(t);
    if (std::abs(d.x) > width / 4.0 || std::abs(d.y) > height / 4.0) {
      throw Error(Errc::BadSpec, "content moves (" + std::to_string(d.x) + ", " +
                                     std::to_string(d.y) + ") px by frame " + std::to_string(t) +
                                     ", more than a quarter of the frame");
    }
  }
}

namespace {

constexpr int kMasterScale = 4;

// Continuous texture stored as a raster at kMasterScale x frame resolution,
// covering the frame plus a margin on every side. Reads are bilinear.
class MasterTexture {
 public:
  MasterTexture(int width, int height)
      : margin_x_(width / 4 + 2),
        margin_y_(height / 4 + 2),
        w_((width + 2 * margin_x_) * kMasterScale + 1),
        h_((height + 2 * margin_y_) * kMasterScale + 1),
        v_(static_cast<std::size_t>(w_) * h_, 0.0) {}

  int raster_width() const { return w_; }
  int raster_height() const { return h_; }
  // Frame-space coordinate of raster index i / j.
  double x_of(int i) const { return static_cast<double>(i) / kMasterScale - margin_x_; }
  double y_of(int j) const { return static_cast<double>(j) / kMasterScale - margin_y_; }
  double& at(int i, int j) { return v_[static_cast<std::size_t>(j) * w_ + i]; }

  double sample(double x, double y) const {
    const double fx = std::clamp((x + margin_x_) * kMasterScale, 0.0, w_ - 1.0);
    const double fy = std::clamp((y + margin_y_) * kMasterScale, 0.0, h_ - 1.0);
    const int x0 = std::min(static_cast<int>(fx), w_ - 2);
    const int y0 = std::min(static_cast<int>(fy), h_ - 2);
    const double ax = fx - x0;
    const double ay = fy - y0;
    auto px = [&](int i, int j) { return v_[static_cast<std::size_t>(j) * w_ + i]; };
    return (1 - ay) * ((1 - ax) * px(x0, y0) + ax * px(x0 + 1, y0)) +
           ay * ((1 - ax) * px(x0, y0 + 1) + ax * px(x0 + 1, y0 + 1));
  }

 private:
  int margin_x_;
  int margin_y_;
  int w_;
  int h_;
  std::vector<double> v_;
};

double fade(double t) { return t * t * (3.0 - 2.0 * t); }

// Multi-octave value noise: lattice spacings of 6, 12 and 24 frame pixels.
void render_random_texture(MasterTexture& m, Rng& rng) {
  struct Octave {
    double spacing;
    double amplitude;
  };
  constexpr Octave kOctaves[] = {{6.0, 1.0}, {12.0, 1.0}, {24.0, 0.5}};
  const double x_min = m.x_of(0);
  const double y_min = m.y_of(0);
  for (const Octave& o : kOctaves) {
    const int nx = static_cast<int>((m.x_of(m.raster_width() - 1) - x_min) / o.spacing) + 3;
    const int ny = static_cast<int>((m.y_of(m.raster_height() - 1) - y_min) / o.spacing) + 3;
    std::vector<double> lattice(static_cast<std::size_t>(nx) * ny);
    for (double& v : lattice) v = rng.uniform(-1.0, 1.0);
    for (int j = 0; j < m.raster_height(); ++j) {
      const double gy = (m.y_of(j) - y_min) / o.spacing;
      const int ly = static_cast<int>(gy);
      const double ty = fade(gy - ly);
      for (int i = 0; i < m.raster_width(); ++i) {
        const double gx = (m.x_of(i) - x_min) / o.spacing;
        const int lx = static_cast<int>(gx);
        const double tx = fade(gx - lx);
        auto node = [&](int a, int b) { return lattice[static_cast<std::size_t>(b) * nx + a]; };
        const double top = (1 - tx) * node(lx, ly) + tx * node(lx + 1, ly);
        const double bottom = (1 - tx) * node(lx, ly + 1) + tx * node(lx + 1, ly + 1);
        m.at(i, j) += o.amplitude * ((1 - ty) * top + ty * bottom);
      }
    }
  }
  for (int j = 0; j < m.raster_height(); ++j)
    for (int i = 0; i < m.raster_width(); ++i) m.at(i, j) = std::clamp(128.0 + 45.0 * m.at(i, j), 0.0, 255.0);
}

void render_checkerboard(MasterTexture& m) {
  constexpr double kCell = 8.0;
  for (int j = 0; j < m.raster_height(); ++j) {
    for (int i = 0; i < m.raster_width(); ++i) {
      const long cx = static_cast<long>(std::floor(m.x_of(i) / kCell));
      const long cy = static_cast<long>(std::floor(m.y_of(j) / kCell));
      m.at(i, j) = ((cx + cy) & 1) ? 190.0 : 65.0;
    }
  }
}

void render_gaussian_blobs(MasterTexture& m, Rng& rng, int width, int height) {
  for (int j = 0; j < m.raster_height(); ++j)
    for (int i = 0; i < m.raster_width(); ++i) m.at(i, j) = 128.0;
  const int count = std::max(4, width * height / 40);
  const double x_lo = m.x_of(0), x_hi = m.x_of(m.raster_width() - 1);
  const double y_lo = m.y_of(0), y_hi = m.y_of(m.raster_height() - 1);
  for (int b = 0; b < count; ++b) {
    const double cx = rng.uniform(x_lo, x_hi);
    const double cy = rng.uniform(y_lo, y_hi);
    const double sigma = rng.uniform(1.5, 4.0);
    const double amp = rng.uniform(40.0, 100.0) * (rng.below(2) ? 1.0 : -1.0);
    const double reach = 3.0 * sigma;
    const int i0 = std::max(0, static_cast<int>((cx - reach - x_lo) * kMasterScale));
    const int i1 = std::min(m.raster_width() - 1, static_cast<int>((cx + reach - x_lo) * kMasterScale) + 1);
    const int j0 = std::max(0, static_cast<int>((cy - reach - y_lo) * kMasterScale));
    const int j1 = std::min(m.raster_height() - 1, static_cast<int>((cy + reach - y_lo) * kMasterScale) + 1);
    for (int j = j0; j <= j1; ++j) {
      for (int i = i0; i <= i1; ++i) {
        const double dx = m.x_of(i) - cx;
        const double dy = m.y_of(j) - cy;
        m.at(i, j) += amp * std::exp(-(dx * dx + dy * dy) / (2.0 * sigma * sigma));
      }
    }
  }
  for (int j = 0; j < m.raster_height(); ++j)
    for (int i = 0; i < m.raster_width(); ++i) m.at(i, j) = std::clamp(m.at(i, j), 0.0, 255.0);
}

}  // namespace

SynthClip generate(const MotionSpec& spec) {
  spec.validate();
  Rng texture_rng(derive_seed(spec.seed, "synth.texture"));
  Rng noise_rng(derive_seed(spec.seed, "synth.noise"));

  MasterTexture master(spec.width, spec.height);
  switch (spec.pattern) {
    case Pattern::RandomTexture: render_random_texture(master, texture_rng); break;
    case Pattern::Checkerboard: render_checkerboard(master); break;
    case Pattern::GaussianBlobs: render_gaussian_blobs(master, texture_rng, spec.width, spec.height); break;
  }

  std::vector<Frame> frames;
  frames.reserve(spec.n_frames);
  for (int t = 0; t < spec.n_frames; ++t) {
    const Vec2 d = spec.displacement(t);
    std::vector<std::uint8_t> px(static_cast<std::size_t>(spec.width) * spec.height);
    for (int y = 0; y < spec.height; ++y) {
      for (int x = 0; x < spec.width; ++x) {
        double v = master.sample(x - d.x, y - d.y);
        if (spec.noise_sigma > 0.0) v += spec.noise_sigma * noise_rng.normal();
        px[static_cast<std::size_t>(y) * spec.width + x] =
            static_cast<std::uint8_t>(std::clamp(std::round(v), 0.0, 255.0));
      }
    }
    frames.emplace_back(spec.width, spec.height, 1, std::move(px));
  }

  GroundTruth truth;
  for (int t = 0; t + 1 < spec.n_frames; ++t) {
    const Vec2 v = spec.velocity(t);
    truth.flows.push_back(FlowField::uniform(spec.width, spec.height, static_cast<float>(v.x),
                                             static_cast<float>(v.y)));
  }
  const auto n = static_cast<std::size_t>(spec.width) * spec.height;
  for (int t = 0; t + 2 < spec.n_frames; ++t) {
    truth.accels.emplace_back(spec.width, spec.height,
                              std::vector<float>(n, static_cast<float>(spec.a.x)),
                              std::vector<float>(n, static_cast<float>(spec.a.y)), AccelMode::Temporal);
  }
  return {FrameSequence(std::move(frames)), std::move(truth)};
}

std::vector<BenchmarkVideo> make_benchmark(std::uint64_t seed, const BenchmarkOptions& options) {
  std::vector<BenchmarkVideo> out;
  out.reserve(kBenchmarkClasses * kVideosPerClass);
  for (int label = 0; label < kBenchmarkClasses; ++label) {
    const bool accelerating = label >= 2;
    const bool rightward = label % 2 == 0;
    for (int j = 0; j < kVideosPerClass; ++j) {
      const int index = label * kVideosPerClass + j;
      Rng rng(derive_seed(seed, "synth.video", static_cast<std::uint64_t>(index)));
      const double speed = rng.uniform(0.8, 1.5);
      const double accel = accelerating ? rng.uniform(0.2, 0.5) : 0.0;
      MotionSpec spec;
      spec.pattern = Pattern::RandomTexture;
      spec.v0 = rightward ? Vec2{speed, 0.0} : Vec2{0.0, speed};
      spec.a = rightward ? Vec2{accel, 0.0} : Vec2{0.0, accel};
      spec.n_frames = options.n_frames;
      spec.width = options.width;
      spec.height = options.height;
      spec.noise_sigma = rng.below(2) ? 2.0 : 0.0;
      spec.seed = rng.next();

      char id[32];
      std::snprintf(id, sizeof id, "video_%03d", index);
      SynthClip clip = generate(spec);
      out.push_back({Video{id, label, j < kTrainPerClass ? Split::Train : Split::Test,
                           std::move(clip.frames)},
                     spec});
    }
  }
  return out;
}

Dataset to_dataset(std::vector<BenchmarkVideo> videos) {
  Dataset ds;
  ds.videos.reserve(videos.size());
  for (auto& v : videos) ds.videos.push_back(std::move(v.video));
  return ds;
}

void write_benchmark(const std::filesystem::path& root, const std::vector<BenchmarkVideo>& videos) {
  namespace fs = std::filesystem;
  std::vector<ManifestEntry> manifest;
  for (const BenchmarkVideo& bv : videos) {
    const std::string rel = "videos/" + bv.video.id;
    const fs::path dir = root / rel;
    fs::create_directories(dir / "gt");
    for (std::size_t t = 0; t < bv.video.frames.size(); ++t) {
      char name[32];
      std::snprintf(name, sizeof name, "frame_%03zu.pgm", t);
      write_pgm(dir / name, bv.video.frames[t]);
    }
    for (int t = 0; t + 1 < bv.spec.n_frames; ++t) {
      char name[32];
      std::snprintf(name, sizeof name, "flow_%03d.flo", t);
      const Vec2 v = bv.spec.velocity(t);
      write_flo(dir / "gt" / name, FlowField::uniform(bv.spec.width, bv.spec.height,
                                                      static_cast<float>(v.x), static_cast<float>(v.y)));
    }
    std::ofstream motion(dir / "gt" / "motion.txt");
    char line[160];
    std::snprintf(line, sizeof line, "v0 %.17g %.17g\na %.17g %.17g\n", bv.spec.v0.x, bv.spec.v0.y,
                  bv.spec.a.x, bv.spec.a.y);
    motion << line;
    if (!motion) throw Error(Errc::IoError, "cannot write " + (dir / "gt" / "motion.txt").string());
    manifest.push_back({rel, bv.video.label, bv.video.split});
  }
  write_manifest(root / "manifest.txt", manifest);
}

}  // namespace accel
