#include <algorithm>
#include <array>
#include <cmath>
#include <numbers>
#include <vector>

#include "kernels.hpp"
#include "robustbench/rng.hpp"

namespace robustbench::detail {

namespace {

constexpr int kControlCells = 8;

double sample_channel(const RasterImage& in, double sx, double sy, int c) {
  const double cx = std::clamp(sx, 0.0, static_cast<double>(in.width() - 1));
  const double cy = std::clamp(sy, 0.0, static_cast<double>(in.height() - 1));
  const int x0 = static_cast<int>(std::floor(cx));
  const int y0 = static_cast<int>(std::floor(cy));
  const int x1 = std::min(x0 + 1, in.width() - 1);
  const int y1 = std::min(y0 + 1, in.height() - 1);
  const double fx = cx - x0;
  const double fy = cy - y0;
  const double top = (1.0 - fx) * in.at(x0, y0, c) + fx * in.at(x1, y0, c);
  const double bottom = (1.0 - fx) * in.at(x0, y1, c) + fx * in.at(x1, y1, c);
  return (1.0 - fy) * top + fy * bottom;
}

// Piecewise-linear interpolation of node offsets spread evenly over [0, extent-1].
double interp_nodes(const std::array<double, kControlCells + 1>& nodes, double pos, int extent) {
  if (extent <= 1) return 0.0;
  const double t = pos / (extent - 1) * kControlCells;
  const int i = std::clamp(static_cast<int>(std::floor(t)), 0, kControlCells - 1);
  const double f = t - i;
  return (1.0 - f) * nodes[i] + f * nodes[i + 1];
}

double catmull_rom(double p0, double p1, double p2, double p3, double t) {
  return 0.5 * ((2.0 * p1) + (-p0 + p2) * t + (2.0 * p0 - 5.0 * p1 + 4.0 * p2 - p3) * t * t +
                (-p0 + 3.0 * p1 - 3.0 * p2 + p3) * t * t * t);
}

using NodeField = std::array<std::array<double, kControlCells + 1>, kControlCells + 1>;

double bicubic_field(const NodeField& f, double gx, double gy) {
  const int ix = std::clamp(static_cast<int>(std::floor(gx)), 0, kControlCells - 1);
  const int iy = std::clamp(static_cast<int>(std::floor(gy)), 0, kControlCells - 1);
  const double tx = gx - ix;
  const double ty = gy - iy;
  auto node = [&](int x, int y) {
    return f[static_cast<std::size_t>(std::clamp(y, 0, kControlCells))]
            [static_cast<std::size_t>(std::clamp(x, 0, kControlCells))];
  };
  double rows[4];
  for (int j = 0; j < 4; ++j) {
    const int y = iy - 1 + j;
    rows[j] = catmull_rom(node(ix - 1, y), node(ix, y), node(ix + 1, y), node(ix + 2, y), tx);
  }
  return catmull_rom(rows[0], rows[1], rows[2], rows[3], ty);
}

// Solves the 8x8 system for the homography taking `from[i]` to `to[i]`.
std::array<double, 9> homography(const std::array<std::array<double, 2>, 4>& from,
                                 const std::array<std::array<double, 2>, 4>& to) {
  double a[8][9] = {};
  for (int i = 0; i < 4; ++i) {
    const double x = from[i][0], y = from[i][1], u = to[i][0], v = to[i][1];
    double* r0 = a[2 * i];
    double* r1 = a[2 * i + 1];
    r0[0] = x; r0[1] = y; r0[2] = 1; r0[6] = -u * x; r0[7] = -u * y; r0[8] = u;
    r1[3] = x; r1[4] = y; r1[5] = 1; r1[6] = -v * x; r1[7] = -v * y; r1[8] = v;
  }
  for (int col = 0; col < 8; ++col) {
    int pivot = col;
    for (int r = col + 1; r < 8; ++r) {
      if (std::abs(a[r][col]) > std::abs(a[pivot][col])) pivot = r;
    }
    for (int k = 0; k < 9; ++k) std::swap(a[col][k], a[pivot][k]);
    for (int r = 0; r < 8; ++r) {
      if (r == col || a[r][col] == 0.0) continue;
      const double f = a[r][col] / a[col][col];
      for (int k = col; k < 9; ++k) a[r][k] -= f * a[col][k];
    }
  }
  std::array<double, 9> h{};
  for (int i = 0; i < 8; ++i) h[static_cast<std::size_t>(i)] = a[i][8] / a[i][i];
  h[8] = 1.0;
  return h;
}

}  // namespace

RasterImage remap(const RasterImage& in, const SourceMap& source_of) {
  RasterImage out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y) {
    for (int x = 0; x < in.width(); ++x) {
      double sx = x;
      double sy = y;
      source_of(x, y, sx, sy);
      if (!std::isfinite(sx) || !std::isfinite(sy)) sx = sy = 0.0;  // degenerate map: corner pixel
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = clamp_channel(sample_channel(in, sx, sy, c));
    }
  }
  return out;
}

RasterImage flip_horizontal(const RasterImage& in) {
  RasterImage out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = in.at(in.width() - 1 - x, y, c);
  return out;
}

RasterImage flip_vertical(const RasterImage& in) {
  RasterImage out(in.width(), in.height());
  for (int y = 0; y < in.height(); ++y)
    for (int x = 0; x < in.width(); ++x)
      for (int c = 0; c < 3; ++c) out.at(x, y, c) = in.at(x, in.height() - 1 - y, c);
  return out;
}

// Positive angles rotate counter-clockwise as displayed (y axis pointing down).
RasterImage rotate(const RasterImage& in, double angle_deg) {
  if (angle_deg == 0.0) return in;
  const double theta = angle_deg * std::numbers::pi / 180.0;
  const double cs = std::cos(theta);
  const double sn = std::sin(theta);
  const double cx = (in.width() - 1) / 2.0;
  const double cy = (in.height() - 1) / 2.0;
  return remap(in, [&](int x, int y, double& sx, double& sy) {
    const double dx = x - cx;
    const double dy = y - cy;
    sx = cx + cs * dx - sn * dy;
    sy = cy + sn * dx + cs * dy;
  });
}

// Each corner of the source quad moves by up to displacement * min(w, h) on
// both axes; the output frame is filled through the induced homography.
RasterImage perspective(const RasterImage& in, double displacement, std::uint64_t seed) {
  // A one-pixel-wide frame has no homography.
  if (displacement == 0.0 || in.width() < 2 || in.height() < 2) return in;
  Xoshiro256 rng(seed);
  const double w = in.width() - 1;
  const double h = in.height() - 1;
  const double reach = displacement * std::min(in.width(), in.height());
  const std::array<std::array<double, 2>, 4> frame{{{0, 0}, {w, 0}, {w, h}, {0, h}}};
  auto quad = frame;
  for (auto& corner : quad) {
    corner[0] += rng.uniform(-reach, reach);
    corner[1] += rng.uniform(-reach, reach);
  }
  const auto hm = homography(frame, quad);
  return remap(in, [&](int x, int y, double& sx, double& sy) {
    const double denom = hm[6] * x + hm[7] * y + hm[8];
    sx = (hm[0] * x + hm[1] * y + hm[2]) / denom;
    sy = (hm[3] * x + hm[4] * y + hm[5]) / denom;
  });
}

// Interior control lines of an 8x8 grid shift independently along their own
// axis; displacement between lines is linear, producing a banded warp.
RasterImage grid_distortion(const RasterImage& in, double magnitude, std::uint64_t seed) {
  if (magnitude == 0.0) return in;
  Xoshiro256 rng(seed);
  const double cell_w = static_cast<double>(in.width() - 1) / kControlCells;
  const double cell_h = static_cast<double>(in.height() - 1) / kControlCells;
  const double max_x = std::min(magnitude, 0.45 * cell_w);
  const double max_y = std::min(magnitude, 0.45 * cell_h);
  std::array<double, kControlCells + 1> off_x{};
  std::array<double, kControlCells + 1> off_y{};
  for (int k = 1; k < kControlCells; ++k) off_x[static_cast<std::size_t>(k)] = rng.uniform(-max_x, max_x);
  for (int k = 1; k < kControlCells; ++k) off_y[static_cast<std::size_t>(k)] = rng.uniform(-max_y, max_y);
  const int w = in.width();
  const int h = in.height();
  return remap(in, [&](int x, int y, double& sx, double& sy) {
    sx = x + interp_nodes(off_x, x, w);
    sy = y + interp_nodes(off_y, y, h);
  });
}

// Random 2-D displacement at every node of a 9x9 lattice, interpolated with
// Catmull-Rom splines into a smooth dense field.
RasterImage elastic_deformation(const RasterImage& in, double magnitude, std::uint64_t seed) {
  if (magnitude == 0.0) return in;
  Xoshiro256 rng(seed);
  NodeField fx{};
  NodeField fy{};
  for (auto& row : fx)
    for (auto& v : row) v = rng.uniform(-magnitude, magnitude);
  for (auto& row : fy)
    for (auto& v : row) v = rng.uniform(-magnitude, magnitude);
  const double sx_scale = in.width() > 1 ? static_cast<double>(kControlCells) / (in.width() - 1) : 0.0;
  const double sy_scale = in.height() > 1 ? static_cast<double>(kControlCells) / (in.height() - 1) : 0.0;
  return remap(in, [&](int x, int y, double& sx, double& sy) {
    const double gx = x * sx_scale;
    const double gy = y * sy_scale;
    sx = x + bicubic_field(fx, gx, gy);
    sy = y + bicubic_field(fy, gx, gy);
  });
}

}  // namespace robustbench::detail
