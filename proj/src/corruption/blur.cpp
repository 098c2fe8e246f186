#include <algorithm>
#include <cmath>
#include <vector>

#include "kernels.hpp"

namespace robustbench::detail {

namespace {

// Convolves rows (horizontal) or columns with a 1-D kernel; `origin` is the
// tap index aligned with the output pixel. Borders replicate the edge.
std::vector<double> convolve(const std::vector<double>& src, int w, int h,
                             const std::vector<double>& kernel, int origin, bool horizontal) {
  std::vector<double> dst(src.size());
  const int taps = static_cast<int>(kernel.size());
  for (int y = 0; y < h; ++y) {
    for (int x = 0; x < w; ++x) {
      for (int c = 0; c < 3; ++c) {
        double acc = 0.0;
        for (int t = 0; t < taps; ++t) {
          const int off = t - origin;
          const int sx = horizontal ? std::clamp(x + off, 0, w - 1) : x;
          const int sy = horizontal ? y : std::clamp(y + off, 0, h - 1);
          acc += kernel[t] * src[(static_cast<std::size_t>(sy) * w + sx) * 3 + c];
        }
        dst[(static_cast<std::size_t>(y) * w + x) * 3 + c] = acc;
      }
    }
  }
  return dst;
}

std::vector<double> to_double(const RasterImage& in) {
  const auto px = in.pixels();
  return std::vector<double>(px.begin(), px.end());
}

RasterImage from_double(const std::vector<double>& buf, int w, int h) {
  std::vector<std::uint8_t> px(buf.size());
  std::transform(buf.begin(), buf.end(), px.begin(), clamp_channel);
  return RasterImage(w, h, std::move(px));
}

}  // namespace

RasterImage gaussian_blur(const RasterImage& in, double sigma) {
  if (sigma == 0.0) return in;
  const int radius = std::max(1, static_cast<int>(std::ceil(3.0 * sigma)));
  std::vector<double> kernel(static_cast<std::size_t>(2 * radius + 1));
  double total = 0.0;
  for (int i = -radius; i <= radius; ++i) {
    const double w = std::exp(-(i * i) / (2.0 * sigma * sigma));
    kernel[static_cast<std::size_t>(i + radius)] = w;
    total += w;
  }
  for (auto& k : kernel) k /= total;
  auto buf = convolve(to_double(in), in.width(), in.height(), kernel, radius, true);
  buf = convolve(buf, in.width(), in.height(), kernel, radius, false);
  return from_double(buf, in.width(), in.height());
}

// Horizontal box kernel of `length` taps centred on the pixel (even lengths
// lean one tap to the left).
RasterImage motion_blur(const RasterImage& in, int length) {
  if (length <= 1) return in;
  const std::vector<double> kernel(static_cast<std::size_t>(length), 1.0 / length);
  const auto buf = convolve(to_double(in), in.width(), in.height(), kernel, length / 2, true);
  return from_double(buf, in.width(), in.height());
}

}  // namespace robustbench::detail
