#include <algorithm>
#include <cmath>
#include <numbers>
#include <vector>

#include "kernels.hpp"
#include "robustbench/rng.hpp"

namespace robustbench::detail {

namespace {

struct Point {
  double x;
  double y;
};

bool inside(const std::vector<Point>& poly, double x, double y) {
  bool in = false;
  for (std::size_t i = 0, j = poly.size() - 1; i < poly.size(); j = i++) {
    const Point& a = poly[i];
    const Point& b = poly[j];
    if ((a.y > y) != (b.y > y) && x < (b.x - a.x) * (y - a.y) / (b.y - a.y) + a.x) in = !in;
  }
  return in;
}

double smoothstep(double t) { return t * t * (3.0 - 2.0 * t); }

// Lattice value in [0, 1) from a stateless hash of (seed, octave, ix, iy).
double lattice(std::uint64_t seed, int octave, long ix, long iy) {
  std::uint64_t h = seed ^ (static_cast<std::uint64_t>(octave) * 0xd6e8feb86659fd93ULL);
  h = mix64(h ^ (static_cast<std::uint64_t>(ix) * 0x9e3779b97f4a7c15ULL));
  h = mix64(h ^ (static_cast<std::uint64_t>(iy) * 0xc2b2ae3d27d4eb4fULL));
  return static_cast<double>(h >> 11) * 0x1.0p-53;
}

double value_noise(std::uint64_t seed, int octave, double x, double y) {
  const double fx = std::floor(x);
  const double fy = std::floor(y);
  const long ix = static_cast<long>(fx);
  const long iy = static_cast<long>(fy);
  const double tx = smoothstep(x - fx);
  const double ty = smoothstep(y - fy);
  const double a = lattice(seed, octave, ix, iy);
  const double b = lattice(seed, octave, ix + 1, iy);
  const double c = lattice(seed, octave, ix, iy + 1);
  const double d = lattice(seed, octave, ix + 1, iy + 1);
  return (1 - ty) * ((1 - tx) * a + tx * b) + ty * ((1 - tx) * c + tx * d);
}

}  // namespace

// A random star-shaped polygon darkened by `opacity`.
RasterImage shadow(const RasterImage& in, double opacity, std::uint64_t seed) {
  if (opacity == 0.0) return in;
  Xoshiro256 rng(seed);
  const double w = in.width();
  const double h = in.height();
  const Point centre{rng.uniform(0.2, 0.8) * w, rng.uniform(0.2, 0.8) * h};
  const int n_vertices = 3 + static_cast<int>(rng.bounded(4));
  const double base_angle = rng.uniform(0.0, 2.0 * std::numbers::pi);
  std::vector<Point> poly;
  for (int i = 0; i < n_vertices; ++i) {
    const double angle = base_angle + 2.0 * std::numbers::pi * (i + rng.uniform(0.0, 0.8)) / n_vertices;
    const double radius = rng.uniform(0.25, 0.75) * std::max(w, h);
    poly.push_back({centre.x + radius * std::cos(angle), centre.y + radius * std::sin(angle)});
  }
  const double keep = 1.0 - opacity;
  RasterImage out = in;
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      if (!inside(poly, x + 0.5, y + 0.5)) continue;
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = clamp_channel(in.at(x, y, c) * keep);
    }
  }
  return out;
}

// Slanted light streaks; streak count scales with density and image area, and
// the whole frame dims slightly with density.
RasterImage rain(const RasterImage& in, double density, std::uint64_t seed) {
  if (density == 0.0) return in;
  Xoshiro256 rng(seed);
  const int w = in.width();
  const int h = in.height();
  const double area = static_cast<double>(w) * h;
  const int n_streaks = std::max(1, static_cast<int>(std::lround(density * area / 100.0)));
  const double dim = 1.0 - 0.2 * density;
  const double slant = rng.uniform(-0.35, 0.35);
  constexpr double kAlpha = 0.6;
  constexpr double kStreakValue = 210.0;

  std::vector<double> buf(in.pixels().begin(), in.pixels().end());
  for (auto& v : buf) v *= dim;
  for (int s = 0; s < n_streaks; ++s) {
    const double x0 = rng.uniform(0.0, w);
    const double y0 = rng.uniform(0.0, h);
    const double length = std::max(2.0, h * rng.uniform(0.05, 0.15));
    const int steps = static_cast<int>(std::ceil(length));
    for (int t = 0; t <= steps; ++t) {
      const double y = y0 + t;
      const double x = x0 + slant * t;
      const int px = static_cast<int>(std::floor(x));
      const int py = static_cast<int>(std::floor(y));
      if (px < 0 || px >= w || py < 0 || py >= h) continue;
      for (int c = 0; c < 3; ++c) {
        double& v = buf[(static_cast<std::size_t>(py) * w + px) * 3 + c];
        v = (1.0 - kAlpha) * v + kAlpha * kStreakValue;
      }
    }
  }
  std::vector<std::uint8_t> px(buf.size());
  std::transform(buf.begin(), buf.end(), px.begin(), clamp_channel);
  return RasterImage(w, h, std::move(px));
}

// Four-octave value noise thresholded into a soft cloud mask, blended toward
// near-white by `opacity`.
RasterImage clouds(const RasterImage& in, double opacity, std::uint64_t seed) {
  if (opacity == 0.0) return in;
  constexpr int kOctaves = 4;
  constexpr double kCloudValue = 245.0;
  const double base_period = std::max(in.width(), in.height()) / 3.0;
  RasterImage out = in;
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      double n = 0.0;
      double amplitude = 0.5;
      double norm = 0.0;
      double freq = 1.0 / base_period;
      for (int o = 0; o < kOctaves; ++o) {
        n += amplitude * value_noise(seed, o, x * freq, y * freq);
        norm += amplitude;
        amplitude *= 0.5;
        freq *= 2.0;
      }
      n /= norm;
      const double mask = smoothstep(std::clamp((n - 0.3) / 0.4, 0.0, 1.0));
      const double a = opacity * mask;
      for (int c = 0; c < 3; ++c) {
        out.at(x, y, c) = clamp_channel((1.0 - a) * in.at(x, y, c) + a * kCloudValue);
      }
    }
  }
  return out;
}

}  // namespace robustbench::detail
