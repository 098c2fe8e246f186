#include "robustbench/image.hpp"

#include "robustbench/error.hpp"
#include "robustbench/hash.hpp"

namespace robustbench {

namespace {

void check_dims(int width, int height) {
  if (width < 1 || height < 1) {
    throw Error(ErrorCode::InvalidImage,
                "image dimensions must be >= 1, got " + std::to_string(width) + "x" +
                    std::to_string(height));
  }
}

}  // namespace

RasterImage::RasterImage(int width, int height, std::uint8_t fill)
    : width_(width), height_(height) {
  check_dims(width, height);
  pixels_.assign(pixel_count() * 3, fill);
}

RasterImage::RasterImage(int width, int height, std::vector<std::uint8_t> pixels)
    : width_(width), height_(height), pixels_(std::move(pixels)) {
  check_dims(width, height);
  if (pixels_.size() != pixel_count() * 3) {
    throw Error(ErrorCode::InvalidImage, "pixel buffer length " + std::to_string(pixels_.size()) +
                                             " != width*height*3");
  }
}

void RasterImage::set_rgb(int x, int y, std::uint8_t r, std::uint8_t g, std::uint8_t b) noexcept {
  const std::size_t i = index(x, y, 0);
  pixels_[i] = r;
  pixels_[i + 1] = g;
  pixels_[i + 2] = b;
}

std::string content_hash(const RasterImage& image) {
  std::string buf = std::to_string(image.width()) + "x" + std::to_string(image.height()) + "\n";
  const auto px = image.pixels();
  buf.append(reinterpret_cast<const char*>(px.data()), px.size());
  return sha256_hex(buf);
}

}  // namespace robustbench
