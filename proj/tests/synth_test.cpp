#include <gtest/gtest.h>

#include <cmath>
#include <map>

#include "accel/error.hpp"
#include "accel/fusion_eval.hpp"
#include "accel/synth.hpp"
#include "test_util.hpp"

namespace accel {
namespace {

using testing::TempDir;

template <typename Fn>
Errc error_of(Fn&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  ADD_FAILURE() << "no accel::Error thrown";
  return Errc::IoError;
}

TEST(Generate, ConstantVelocityGroundTruth) {
  MotionSpec spec;
  spec.v0 = {1, 0};
  const SynthClip clip = generate(spec);
  ASSERT_EQ(clip.frames.size(), 12u);
  ASSERT_EQ(clip.truth.flows.size(), 11u);
  ASSERT_EQ(clip.truth.accels.size(), 10u);
  for (const FlowField& f : clip.truth.flows) EXPECT_EQ(f, FlowField::uniform(64, 64, 1, 0));
  for (const AccelField& a : clip.truth.accels) {
    for (float v : a.ax()) EXPECT_EQ(v, 0.0f);
    for (float v : a.ay()) EXPECT_EQ(v, 0.0f);
  }
}

TEST(Generate, ArithmeticProgressionOfFlows) {
  MotionSpec spec;
  spec.a = {0.5, 0};
  spec.n_frames = 8;
  const SynthClip clip = generate(spec);
  for (std::size_t t = 0; t < clip.truth.flows.size(); ++t) {
    EXPECT_EQ(clip.truth.flows[t], FlowField::uniform(64, 64, 0.5f * t, 0));
  }
  for (const AccelField& a : clip.truth.accels) {
    for (float v : a.ax()) EXPECT_EQ(v, 0.5f);
  }
}

TEST(Generate, TemporalAccelerationOfTruthIsExact) {
  MotionSpec spec;
  spec.v0 = {0.3, -0.7};
  spec.a = {0.25, 0.125};
  spec.width = 96;
  spec.height = 96;
  const SynthClip clip = generate(spec);
  for (std::size_t t = 0; t + 1 < clip.truth.flows.size(); ++t) {
    const AccelField a = acceleration_temporal(clip.truth.flows[t], clip.truth.flows[t + 1]);
    for (std::size_t i = 0; i < a.ax().size(); ++i) {
      EXPECT_NEAR(a.ax()[i], 0.25, 1e-6);
      EXPECT_NEAR(a.ay()[i], 0.125, 1e-6);
    }
  }
}

TEST(Generate, DisplacementAndVelocity) {
  MotionSpec spec;
  spec.v0 = {2, 0};
  spec.a = {1, 0};
  EXPECT_EQ(spec.displacement(11), (Vec2{77, 0}));  // 2 + 3 + ... + 12
  EXPECT_EQ(spec.velocity(3), (Vec2{5, 0}));
  EXPECT_EQ(error_of([&] { generate(spec); }), Errc::BadSpec);
  spec.a = {};
  spec.v0 = {0, 1.5};
  EXPECT_EQ(error_of([&] { generate(spec); }), Errc::BadSpec);  // 16.5 > 64 / 4
  spec.v0 = {0, 1.45};
  EXPECT_NO_THROW(generate(spec));
}

TEST(Generate, InvalidSpecs) {
  MotionSpec spec;
  spec.n_frames = 1;
  EXPECT_EQ(error_of([&] { generate(spec); }), Errc::BadSpec);
  spec = {};
  spec.noise_sigma = -1;
  EXPECT_EQ(error_of([&] { generate(spec); }), Errc::BadSpec);
}

TEST(Generate, DeterministicPerSeed) {
  for (Pattern p : {Pattern::RandomTexture, Pattern::Checkerboard, Pattern::GaussianBlobs}) {
    MotionSpec spec;
    spec.pattern = p;
    spec.v0 = {0.7, 0.4};
    spec.noise_sigma = 2;
    spec.seed = 5;
    EXPECT_EQ(generate(spec).frames, generate(spec).frames);
    MotionSpec other = spec;
    other.seed = 6;
    if (p != Pattern::Checkerboard) EXPECT_NE(generate(spec).frames, generate(other).frames);
  }
}

TEST(Generate, IntegerShiftMovesContentExactly) {
  MotionSpec spec;
  spec.v0 = {2, 1};
  spec.n_frames = 3;
  spec.seed = 8;
  const SynthClip clip = generate(spec);
  const Frame& f0 = clip.frames[0];
  const Frame& f1 = clip.frames[1];
  for (int y = 1; y < 64; ++y)
    for (int x = 2; x < 64; ++x) ASSERT_EQ(f1.at(x, y), f0.at(x - 2, y - 1));
}

TEST(Generate, HornSchunckClosesOnGeneratedPairs) {
  const int border = interior_border(7, 3);
  for (double vx : {-2.0, -1.25, 0.0, 0.5, 1.0, 1.75}) {
    for (double vy : {-1.0, 0.0, 0.6}) {
      if (std::hypot(vx, vy) > 2.0) continue;
      MotionSpec spec;
      spec.v0 = {vx, vy};
      spec.n_frames = 2;
      spec.seed = 40;
      const SynthClip clip = generate(spec);
      const FlowField est = estimate_horn_schunck(clip.frames[0], clip.frames[1]);
      EXPECT_LE(endpoint_error(est, clip.truth.flows[0], border), 0.3) << vx << "," << vy;
    }
  }
}

void expect_same(const std::vector<BenchmarkVideo>& a, const std::vector<BenchmarkVideo>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].video.id, b[i].video.id);
    EXPECT_EQ(a[i].video.label, b[i].video.label);
    EXPECT_EQ(a[i].video.split, b[i].video.split);
    EXPECT_EQ(a[i].spec, b[i].spec);
    EXPECT_EQ(a[i].video.frames, b[i].video.frames);
  }
}

class Benchmark : public ::testing::Test {
 protected:
  static void SetUpTestSuite() { videos_ = new std::vector<BenchmarkVideo>(make_benchmark(2024)); }
  static void TearDownTestSuite() {
    delete videos_;
    videos_ = nullptr;
  }
  static std::vector<BenchmarkVideo>* videos_;
};

std::vector<BenchmarkVideo>* Benchmark::videos_ = nullptr;

TEST_F(Benchmark, CountsAndSplit) {
  ASSERT_EQ(videos_->size(), 100u);
  std::map<std::pair<int, Split>, int> counts;
  for (const BenchmarkVideo& v : *videos_) ++counts[{v.video.label, v.video.split}];
  for (int label = 0; label < 4; ++label) {
    EXPECT_EQ((counts[{label, Split::Train}]), 15);
    EXPECT_EQ((counts[{label, Split::Test}]), 10);
  }
  EXPECT_EQ(to_dataset(*videos_).class_count(), 4);
}

TEST_F(Benchmark, ClassesFollowTheirMotionRecipe) {
  for (const BenchmarkVideo& v : *videos_) {
    const MotionSpec& s = v.spec;
    const bool rightward = v.video.label % 2 == 0;
    const double speed = rightward ? s.v0.x : s.v0.y;
    const double accel = rightward ? s.a.x : s.a.y;
    EXPECT_EQ(rightward ? s.v0.y : s.v0.x, 0.0);
    EXPECT_EQ(rightward ? s.a.y : s.a.x, 0.0);
    EXPECT_GE(speed, 0.8);
    EXPECT_LE(speed, 1.5);
    if (v.video.label >= 2) {
      EXPECT_GE(accel, 0.2);
      EXPECT_LE(accel, 0.5);
    } else {
      EXPECT_EQ(accel, 0.0);
    }
    EXPECT_TRUE(s.noise_sigma == 0.0 || s.noise_sigma == 2.0);
    EXPECT_EQ(v.video.frames.size(), 12u);
    EXPECT_EQ(v.video.frames.width(), 176);
  }
}

TEST_F(Benchmark, SameSeedSameBenchmark) {
  expect_same(*videos_, make_benchmark(2024));
}

TEST_F(Benchmark, AccelerationStacksSeparateTheGroups) {
  // Mean |a| over the dequantized acceleration stack of estimated flow.
  const PipelineConfig cfg;
  const int border = 16;
  for (int label = 0; label < 4; ++label) {
    for (int j = 0; j < 3; ++j) {
      const Video& v = (*videos_)[label * kVideosPerClass + j].video;
      const VideoFeatures feat = extract_features(v.frames, cfg);
      const StackedVolume stack = build_stack(feat.accel_images, 0, cfg.stack_length);
      double sum = 0;
      int n = 0;
      for (int c = 0; c < stack.channel_count(); ++c) {
        for (int y = border; y < stack.height() - border; ++y) {
          for (int x = border; x < stack.width() - border; ++x) {
            const auto code = stack.channel(c)[static_cast<std::size_t>(y) * stack.width() + x];
            sum += dequantize_value(code, cfg.accel_bound);
            ++n;
          }
        }
      }
      // Each pixel holds ax and ay; the motion lives in one of them, so the
      // channel mean is half the acceleration magnitude.
      const double mean = 2 * sum / n;
      if (label < 2) {
        EXPECT_LT(std::abs(mean), 0.05) << v.id;
      } else {
        EXPECT_GT(mean, 0.1) << v.id;
      }
    }
  }
}

TEST(WriteBenchmark, LayoutAndGroundTruth) {
  TempDir dir("bench_small");
  std::vector<BenchmarkVideo> videos;
  MotionSpec spec;
  spec.v0 = {1, 0};
  spec.seed = 3;
  videos.push_back({Video{"video_000", 2, Split::Test, generate(spec).frames}, spec});
  write_benchmark(dir.path(), videos);
  EXPECT_TRUE(std::filesystem::exists(dir / "videos/video_000/frame_011.pgm"));
  EXPECT_EQ(read_flo(dir / "videos/video_000/gt/flow_010.flo"), FlowField::uniform(64, 64, 1, 0));
  EXPECT_EQ(testing::read_file(dir / "manifest.txt"), "videos/video_000,2,test\n");
  const Dataset back = read_dataset(dir.path());
  ASSERT_EQ(back.videos.size(), 1u);
  EXPECT_EQ(back.videos[0].frames, videos[0].video.frames);
  EXPECT_EQ(back.videos[0].label, 2);
}

}  // namespace
}  // namespace accel
