#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

namespace robustbench {

// Decoded 8-bit RGB image, row-major, three interleaved channels.
class RasterImage {
 public:
  RasterImage(int width, int height, std::uint8_t fill = 0);
  RasterImage(int width, int height, std::vector<std::uint8_t> pixels);

  int width() const noexcept { return width_; }
  int height() const noexcept { return height_; }
  std::size_t pixel_count() const noexcept {
    return static_cast<std::size_t>(width_) * static_cast<std::size_t>(height_);
  }

  std::span<const std::uint8_t> pixels() const noexcept { return pixels_; }
  std::span<std::uint8_t> pixels() noexcept { return pixels_; }

  std::uint8_t at(int x, int y, int c) const noexcept {
    return pixels_[index(x, y, c)];
  }
  std::uint8_t& at(int x, int y, int c) noexcept {
    return pixels_[index(x, y, c)];
  }

  void set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept;

  bool operator==(const RasterImage&) const = default;

 private:
  std::size_t index(int x, int y, int c) const noexcept {
    return (static_cast<std::size_t>(y) * static_cast<std::size_t>(width_) +
            static_cast<std::size_t>(x)) * 3 + static_cast<std::size_t>(c);
  }

  int width_;
  int height_;
  std::vector<std::uint8_t> pixels_;
};

inline std::uint8_t clamp_channel(double v) noexcept {
  if (!(v > 0.0)) return 0;  // also catches NaN
  if (v >= 255.0) return 255;
  return static_cast<std::uint8_t>(v + 0.5);
}

// Key used by the embedding-file backend: SHA-256 over "<w>x<h>\n" followed by
// the raw RGB bytes. Reproducible from any language holding the pixel array.
std::string content_hash(const RasterImage& image);

}  // namespace robustbench
