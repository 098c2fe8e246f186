#include <string>

#include "kernels.hpp"
#include "robustbench/corruption/corruption.hpp"
#include "robustbench/error.hpp"

namespace robustbench {

namespace detail {

double param(const ParamMap& params, std::string_view key) {
  const auto it = params.find(key);
  if (it == params.end()) {
    throw Error(ErrorCode::InvalidParams, "missing parameter '" + std::string(key) + "'");
  }
  return it->second;
}

}  // namespace detail

RasterImage apply(const RasterImage& image, CorruptionKind kind, const ParamMap& params,
                  std::uint64_t seed) {
  using K = CorruptionKind;
  using detail::param;
  validate_params(kind, params);
  switch (kind) {
    case K::Shadow: return detail::shadow(image, param(params, "opacity"), seed);
    case K::PerspectiveTransformation:
      return detail::perspective(image, param(params, "displacement"), seed);
    case K::GridDistortion: return detail::grid_distortion(image, param(params, "magnitude"), seed);
    case K::ImageFlipHorizontal: return detail::flip_horizontal(image);
    case K::ImageFlipVertical: return detail::flip_vertical(image);
    case K::SaltPepperNoise: return detail::salt_pepper(image, param(params, "density"), seed);
    case K::Contrast: return detail::contrast(image, param(params, "factor"));
    case K::Brightness: return detail::brightness(image, param(params, "factor"));
    case K::ImageRotation: return detail::rotate(image, param(params, "angle_deg"));
    case K::GaussianNoise: return detail::gaussian_noise(image, param(params, "sigma"), seed);
    case K::GridElasticDeformation:
      return detail::elastic_deformation(image, param(params, "magnitude"), seed);
    case K::MotionBlur: return detail::motion_blur(image, static_cast<int>(param(params, "length")));
    case K::GaussianBlur: return detail::gaussian_blur(image, param(params, "sigma"));
    case K::GlobalColourShift:
      return detail::colour_shift(image, param(params, "shift_r"), param(params, "shift_g"),
                                  param(params, "shift_b"));
    case K::Rain: return detail::rain(image, param(params, "density"), seed);
    case K::CloudGenerator: return detail::clouds(image, param(params, "opacity"), seed);
  }
  throw Error(ErrorCode::UnknownKind, "kind index out of range");
}

RasterImage apply(const RasterImage& image, const CorruptionInstance& inst) {
  return apply(image, inst.kind, inst.params, inst.seed);
}

}  // namespace robustbench
