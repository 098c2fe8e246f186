#pragma once

#include <cstdint>
#include <functional>

#include "robustbench/corruption/params.hpp"
#include "robustbench/image.hpp"

namespace robustbench::detail {

double param(const ParamMap& params, std::string_view key);

// Photometric
RasterImage brightness(const RasterImage& in, double factor);
RasterImage contrast(const RasterImage& in, double factor);
RasterImage colour_shift(const RasterImage& in, double dr, double dg, double db);
RasterImage gaussian_noise(const RasterImage& in, double sigma, std::uint64_t seed);
RasterImage salt_pepper(const RasterImage& in, double density, std::uint64_t seed);

// Blur
RasterImage gaussian_blur(const RasterImage& in, double sigma);
RasterImage motion_blur(const RasterImage& in, int length);

// Geometric
RasterImage flip_horizontal(const RasterImage& in);
RasterImage flip_vertical(const RasterImage& in);
RasterImage rotate(const RasterImage& in, double angle_deg);
RasterImage perspective(const RasterImage& in, double displacement, std::uint64_t seed);
RasterImage grid_distortion(const RasterImage& in, double magnitude, std::uint64_t seed);
RasterImage elastic_deformation(const RasterImage& in, double magnitude, std::uint64_t seed);

// Weather
RasterImage shadow(const RasterImage& in, double opacity, std::uint64_t seed);
RasterImage rain(const RasterImage& in, double density, std::uint64_t seed);
RasterImage clouds(const RasterImage& in, double opacity, std::uint64_t seed);

// Bilinear resampling with edge replication. `source_of` maps an output pixel
// centre (x, y) to the source coordinate to sample.
using SourceMap = std::function<void(int x, int y, double& sx, double& sy)>;
RasterImage remap(const RasterImage& in, const SourceMap& source_of);

}  // namespace robustbench::detail
