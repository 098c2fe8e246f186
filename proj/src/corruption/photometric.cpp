#include "kernels.hpp"
#include "robustbench/rng.hpp"

namespace robustbench::detail {

RasterImage brightness(const RasterImage& in, double factor) {
  RasterImage out = in;
  for (auto& v : out.pixels()) v = clamp_channel(v * factor);
  return out;
}

// Blends each channel toward the mean luminance of the image.
RasterImage contrast(const RasterImage& in, double factor) {
  const auto px = in.pixels();
  double sum = 0.0;
  for (std::size_t i = 0; i < px.size(); i += 3) {
    sum += 0.299 * px[i] + 0.587 * px[i + 1] + 0.114 * px[i + 2];
  }
  const double mean = sum / static_cast<double>(in.pixel_count());
  RasterImage out = in;
  for (auto& v : out.pixels()) v = clamp_channel(mean + factor * (v - mean));
  return out;
}

RasterImage colour_shift(const RasterImage& in, double dr, double dg, double db) {
  RasterImage out = in;
  const double shift[3] = {dr, dg, db};
  auto px = out.pixels();
  for (std::size_t i = 0; i < px.size(); ++i) px[i] = clamp_channel(px[i] + shift[i % 3]);
  return out;
}

RasterImage gaussian_noise(const RasterImage& in, double sigma, std::uint64_t seed) {
  if (sigma == 0.0) return in;
  Xoshiro256 rng(seed);
  RasterImage out = in;
  for (auto& v : out.pixels()) v = clamp_channel(v + sigma * rng.normal());
  return out;
}

RasterImage salt_pepper(const RasterImage& in, double density, std::uint64_t seed) {
  if (density == 0.0) return in;
  Xoshiro256 rng(seed);
  RasterImage out = in;
  for (int y = 0; y < out.height(); ++y) {
    for (int x = 0; x < out.width(); ++x) {
      const double u = rng.uniform01();
      const bool salt = (rng.next() >> 63) != 0;
      if (u < density) {
        const std::uint8_t v = salt ? 255 : 0;
        out.set_rgb(x, y, v, v, v);
      }
    }
  }
  return out;
}

}  // namespace robustbench::detail
