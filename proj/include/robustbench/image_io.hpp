#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "robustbench/image.hpp"

namespace robustbench {

// PNG or JPEG, detected from magic bytes. Gray and alpha inputs become RGB.
RasterImage decode_image(std::span<const std::uint8_t> bytes);
RasterImage read_image(const std::filesystem::path& path);

std::vector<std::uint8_t> encode_png(const RasterImage& image);
std::vector<std::uint8_t> encode_jpeg(const RasterImage& image, int quality = 95);

// Format chosen by extension (.png, .jpg, .jpeg).
void write_image(const std::filesystem::path& path, const RasterImage& image);

}  // namespace robustbench
