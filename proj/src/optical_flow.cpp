#include "accel/optical_flow.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <string>

#include "accel/error.hpp"

namespace accel {

FlowField::FlowField(int width, int height)
    : FlowField(width, height,
                std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0)),
                std::vector<float>(static_cast<std::size_t>(std::max(width, 0)) * std::max(height, 0))) {}

FlowField::FlowField(int width, int height, std::vector<float> dx, std::vector<float> dy)
    : width_(width), height_(height), dx_(std::move(dx)), dy_(std::move(dy)) {
  if (width < 1 || height < 1) throw Error(Errc::BadDimensions, "flow field must be non-empty");
  const auto n = static_cast<std::size_t>(width) * height;
  if (dx_.size() != n || dy_.size() != n) {
    throw Error(Errc::BadDimensions, "flow component length does not match width*height");
  }
  auto finite = [](float v) { return std::isfinite(v); };
  if (!std::all_of(dx_.begin(), dx_.end(), finite) || !std::all_of(dy_.begin(), dy_.end(), finite)) {
    throw Error(Errc::BadDimensions, "flow field contains non-finite values");
  }
}

FlowField FlowField::uniform(int width, int height, float dx, float dy) {
  const auto n = static_cast<std::size_t>(width) * height;
  return FlowField(width, height, std::vector<float>(n, dx), std::vector<float>(n, dy));
}

void HsParams::validate() const {
  if (!(smoothness > 0) || !std::isfinite(smoothness)) {
    throw Error(Errc::BadConfig, "flow smoothness must be positive");
  }
  if (iterations < 1) throw Error(Errc::BadConfig, "flow iterations must be >= 1");
  if (pyramid_levels < 1) throw Error(Errc::BadConfig, "pyramid_levels must be >= 1");
  if (warp_per_level < 1) throw Error(Errc::BadConfig, "warp_per_level must be >= 1");
}

namespace {

constexpr double kMaxWarpStep = 1.0;

struct Plane {
  int w = 0;
  int h = 0;
  std::vector<double> v;

  Plane() = default;
  Plane(int width, int height, double fill = 0.0)
      : w(width), h(height), v(static_cast<std::size_t>(width) * height, fill) {}

  double& operator()(int x, int y) { return v[static_cast<std::size_t>(y) * w + x]; }
  double operator()(int x, int y) const { return v[static_cast<std::size_t>(y) * w + x]; }
  double clamped(int x, int y) const {
    return (*this)(std::clamp(x, 0, w - 1), std::clamp(y, 0, h - 1));
  }

  // Bilinear read at a real-valued position, clamp-to-edge.
  double sample(double x, double y) const {
    x = std::clamp(x, 0.0, w - 1.0);
    y = std::clamp(y, 0.0, h - 1.0);
    const int x0 = static_cast<int>(x);
    const int y0 = static_cast<int>(y);
    const double ax = x - x0;
    const double ay = y - y0;
    const double top = (1 - ax) * clamped(x0, y0) + ax * clamped(x0 + 1, y0);
    const double bottom = (1 - ax) * clamped(x0, y0 + 1) + ax * clamped(x0 + 1, y0 + 1);
    return (1 - ay) * top + ay * bottom;
  }
};

Plane to_plane(const Frame& f) {
  Plane p(f.width(), f.height());
  const auto px = f.pixels();
  std::transform(px.begin(), px.end(), p.v.begin(), [](std::uint8_t b) { return double(b); });
  return p;
}

// Half resolution through the separable (1, 3, 3, 1) / 8 filter, which
// suppresses the aliasing a plain 2x2 box leaves on fine texture.
Plane downsample(const Plane& src) {
  static constexpr double kTaps[4] = {0.125, 0.375, 0.375, 0.125};
  Plane dst((src.w + 1) / 2, (src.h + 1) / 2);
  for (int y = 0; y < dst.h; ++y) {
    for (int x = 0; x < dst.w; ++x) {
      double sum = 0.0;
      for (int j = 0; j < 4; ++j)
        for (int i = 0; i < 4; ++i) sum += kTaps[j] * kTaps[i] * src.clamped(2 * x + i - 1, 2 * y + j - 1);
      dst(x, y) = sum;
    }
  }
  return dst;
}

// Pixel-center aligned bilinear resize, values multiplied by `gain`.
Plane upsample(const Plane& src, int w, int h, double gain) {
  Plane dst(w, h);
  const double sx = static_cast<double>(src.w) / w;
  const double sy = static_cast<double>(src.h) / h;
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      dst(x, y) = gain * src.sample((x + 0.5) * sx - 0.5, (y + 0.5) * sy - 0.5);
    }
  }
  return dst;
}

void gradient_x(const Plane& p, Plane& out) {
  for (int y = 0; y < p.h; ++y)
    for (int x = 0; x < p.w; ++x) out(x, y) = 0.5 * (p.clamped(x + 1, y) - p.clamped(x - 1, y));
}

void gradient_y(const Plane& p, Plane& out) {
  for (int y = 0; y < p.h; ++y)
    for (int x = 0; x < p.w; ++x) out(x, y) = 0.5 * (p.clamped(x, y + 1) - p.clamped(x, y - 1));
}

double neighbor_mean(const Plane& p, int x, int y) {
  return 0.25 * (p.clamped(x - 1, y) + p.clamped(x + 1, y) + p.clamped(x, y - 1) +
                 p.clamped(x, y + 1));
}

// One warp of one pyramid level: linearize around (u, v), then relax.
void refine(const Plane& prev, const Plane& next, Plane& u, Plane& v, const HsParams& params) {
  const int w = prev.w;
  const int h = prev.h;
  Plane warped(w, h);
  for (int y = 0; y < h; ++y)
    for (int x = 0; x < w; ++x) warped(x, y) = next.sample(x + u(x, y), y + v(x, y));

  Plane gx_prev(w, h), gx_warp(w, h), gy_prev(w, h), gy_warp(w, h);
  gradient_x(prev, gx_prev);
  gradient_x(warped, gx_warp);
  gradient_y(prev, gy_prev);
  gradient_y(warped, gy_warp);

  Plane ix(w, h), iy(w, h), rest(w, h), denom(w, h);
  for (std::size_t i = 0; i < ix.v.size(); ++i) {
    ix.v[i] = 0.5 * (gx_prev.v[i] + gx_warp.v[i]);
    iy.v[i] = 0.5 * (gy_prev.v[i] + gy_warp.v[i]);
    const double it = warped.v[i] - prev.v[i];
    // Residual of the brightness constraint with the current flow factored out.
    rest.v[i] = it - ix.v[i] * u.v[i] - iy.v[i] * v.v[i];
    denom.v[i] = params.smoothness + ix.v[i] * ix.v[i] + iy.v[i] * iy.v[i];
  }

  const Plane u_start = u;
  const Plane v_start = v;
  Plane u_next(w, h), v_next(w, h);
  for (int iter = 0; iter < params.iterations; ++iter) {
    for (int y = 0; y < h; ++y) {
      for (int x = 0; x < w; ++x) {
        const double ubar = neighbor_mean(u, x, y);
        const double vbar = neighbor_mean(v, x, y);
        const double gx = ix(x, y);
        const double gy = iy(x, y);
        const double t = (gx * ubar + gy * vbar + rest(x, y)) / denom(x, y);
        u_next(x, y) = ubar - gx * t;
        v_next(x, y) = vbar - gy * t;
      }
    }
    std::swap(u.v, u_next.v);
    std::swap(v.v, v_next.v);
  }
  // The linearization holds for about a pixel; larger steps on aliased
  // coarse levels feed back through the next warp and diverge.
  for (std::size_t i = 0; i < u.v.size(); ++i) {
    u.v[i] = u_start.v[i] + std::clamp(u.v[i] - u_start.v[i], -kMaxWarpStep, kMaxWarpStep);
    v.v[i] = v_start.v[i] + std::clamp(v.v[i] - v_start.v[i], -kMaxWarpStep, kMaxWarpStep);
  }
}

// 3x3 median with clamp-to-edge reads; removes isolated outliers between warps.
void median3(Plane& p) {
  Plane out(p.w, p.h);
  std::array<double, 9> win;
  for (int y = 0; y < p.h; ++y) {
    for (int x = 0; x < p.w; ++x) {
      int k = 0;
      for (int dy = -1; dy <= 1; ++dy)
        for (int dx = -1; dx <= 1; ++dx) win[k++] = p.clamped(x + dx, y + dy);
      std::nth_element(win.begin(), win.begin() + 4, win.end());
      out(x, y) = win[4];
    }
  }
  p = std::move(out);
}

void require_gray_pair(const Frame& prev, const Frame& next) {
  if (prev.width() != next.width() || prev.height() != next.height()) {
    throw Error(Errc::DimensionMismatch, "flow inputs differ in size");
  }
  if (prev.channels() != 1 || next.channels() != 1) {
    throw Error(Errc::NonGrayInput, "flow estimation needs single-channel frames");
  }
}

}  // namespace

FlowField estimate_horn_schunck(const Frame& prev, const Frame& next, const HsParams& params) {
  require_gray_pair(prev, next);
  params.validate();

  std::vector<Plane> prev_pyr{to_plane(prev)};
  std::vector<Plane> next_pyr{to_plane(next)};
  // Coarsest level keeps at least 4 pixels per axis.
  while (static_cast<int>(prev_pyr.size()) < params.pyramid_levels && prev_pyr.back().w >= 8 &&
         prev_pyr.back().h >= 8) {
    prev_pyr.push_back(downsample(prev_pyr.back()));
    next_pyr.push_back(downsample(next_pyr.back()));
  }

  Plane u(prev_pyr.back().w, prev_pyr.back().h);
  Plane v(u.w, u.h);
  for (int level = static_cast<int>(prev_pyr.size()) - 1; level >= 0; --level) {
    const Plane& p = prev_pyr[level];
    if (u.w != p.w || u.h != p.h) {
      const double gain_x = static_cast<double>(p.w) / u.w;
      const double gain_y = static_cast<double>(p.h) / u.h;
      u = upsample(u, p.w, p.h, gain_x);
      v = upsample(v, p.w, p.h, gain_y);
    }
    for (int warp = 0; warp < params.warp_per_level; ++warp) {
      refine(p, next_pyr[level], u, v, params);
      median3(u);
      median3(v);
    }
  }

  std::vector<float> dx(u.v.size()), dy(v.v.size());
  std::transform(u.v.begin(), u.v.end(), dx.begin(), [](double d) { return static_cast<float>(d); });
  std::transform(v.v.begin(), v.v.end(), dy.begin(), [](double d) { return static_cast<float>(d); });
  return FlowField(prev.width(), prev.height(), std::move(dx), std::move(dy));
}

FlowField estimate_block_matching(const Frame& prev, const Frame& next, int radius, int block) {
  require_gray_pair(prev, next);
  if (radius < 1) throw Error(Errc::BadConfig, "block matching radius must be >= 1");
  if (block < 3 || block % 2 == 0) throw Error(Errc::BadConfig, "block size must be odd and >= 3");

  struct Candidate {
    int dx;
    int dy;
  };
  std::vector<Candidate> order;
  for (int dy = -radius; dy <= radius; ++dy)
    for (int dx = -radius; dx <= radius; ++dx) order.push_back({dx, dy});
  std::stable_sort(order.begin(), order.end(), [](const Candidate& a, const Candidate& b) {
    const int na = a.dx * a.dx + a.dy * a.dy;
    const int nb = b.dx * b.dx + b.dy * b.dy;
    if (na != nb) return na < nb;
    if (a.dy != b.dy) return a.dy < b.dy;
    return a.dx < b.dx;
  });

  const int w = prev.width();
  const int h = prev.height();
  const int half = block / 2;
  std::vector<float> out_x(static_cast<std::size_t>(w) * h), out_y(out_x.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      long best = std::numeric_limits<long>::max();
      Candidate pick{0, 0};
      for (const Candidate& c : order) {
        long sad = 0;
        for (int j = -half; j <= half && sad < best; ++j) {
          for (int i = -half; i <= half; ++i) {
            sad += std::abs(int(prev.clamped(x + i, y + j)) -
                            int(next.clamped(x + i + c.dx, y + j + c.dy)));
          }
        }
        // Strictly smaller only: earlier candidates win ties.
        if (sad < best) {
          best = sad;
          pick = c;
        }
      }
      out_x[static_cast<std::size_t>(y) * w + x] = static_cast<float>(pick.dx);
      out_y[static_cast<std::size_t>(y) * w + x] = static_cast<float>(pick.dy);
    }
  }
  return FlowField(w, h, std::move(out_x), std::move(out_y));
}

double endpoint_error(const FlowField& estimate, const FlowField& truth, int border) {
  if (estimate.width() != truth.width() || estimate.height() != truth.height()) {
    throw Error(Errc::DimensionMismatch, "endpoint_error inputs differ in size");
  }
  const int w = estimate.width();
  const int h = estimate.height();
  if (border < 0 || 2 * border >= w || 2 * border >= h) {
    throw Error(Errc::BadDimensions, "border leaves no interior pixels");
  }
  double sum = 0.0;
  std::size_t count = 0;
  for (int y = border; y < h - border; ++y) {
    for (int x = border; x < w - border; ++x) {
      const double ex = double(estimate.dx(x, y)) - truth.dx(x, y);
      const double ey = double(estimate.dy(x, y)) - truth.dy(x, y);
      sum += std::sqrt(ex * ex + ey * ey);
      ++count;
    }
  }
  return sum / static_cast<double>(count);
}

}  // namespace accel
