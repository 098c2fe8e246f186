#include <array>
#include <cmath>
#include <string>

#include "robustbench/corruption/corruption.hpp"
#include "robustbench/error.hpp"
#include "robustbench/rng.hpp"

namespace robustbench {

namespace {

constexpr ParamSpec kFactor[] = {{"factor", 0.0, 10.0, false}};
constexpr ParamSpec kSigma[] = {{"sigma", 0.0, 255.0, false}};
constexpr ParamSpec kBlurSigma[] = {{"sigma", 0.0, 50.0, false}};
constexpr ParamSpec kDensity[] = {{"density", 0.0, 1.0, false}};
constexpr ParamSpec kOpacity[] = {{"opacity", 0.0, 1.0, false}};
constexpr ParamSpec kAngle[] = {{"angle_deg", -360.0, 360.0, false}};
constexpr ParamSpec kLength[] = {{"length", 0.0, 101.0, true}};
constexpr ParamSpec kDisplacement[] = {{"displacement", 0.0, 0.45, false}};
constexpr ParamSpec kMagnitude[] = {{"magnitude", 0.0, 64.0, false}};
constexpr ParamSpec kShift[] = {{"shift_b", -255.0, 255.0, false},
                                {"shift_g", -255.0, 255.0, false},
                                {"shift_r", -255.0, 255.0, false}};

std::vector<ParamMap> single_param_levels(std::string_view key, std::initializer_list<double> vs) {
  std::vector<ParamMap> levels;
  for (double v : vs) levels.push_back(ParamMap{{std::string(key), v}});
  return levels;
}

SeverityGrid build_grid(CorruptionKind kind) {
  using K = CorruptionKind;
  switch (kind) {
    case K::Shadow:
      return {kind, "opacity", single_param_levels("opacity", {0.2, 0.35, 0.5, 0.65, 0.8})};
    case K::PerspectiveTransformation:
      return {kind, "displacement",
              single_param_levels("displacement", {0.02, 0.05, 0.10, 0.15, 0.20})};
    case K::GridDistortion:
    case K::GridElasticDeformation:
      return {kind, "magnitude", single_param_levels("magnitude", {2, 4, 8, 12, 16})};
    case K::ImageFlipHorizontal:
    case K::ImageFlipVertical:
      return {kind, "", {ParamMap{}}};
    case K::SaltPepperNoise:
      return {kind, "density", single_param_levels("density", {0.01, 0.03, 0.07, 0.12, 0.2})};
    case K::Contrast:
      return {kind, "factor", single_param_levels("factor", {0.2, 0.5, 0.8, 1.5, 2.5})};
    case K::Brightness:
      return {kind, "factor", single_param_levels("factor", {0.2, 0.5, 0.8, 1.25, 2.0, 5.0})};
    case K::ImageRotation:
      return {kind, "angle_deg",
              single_param_levels("angle_deg", {-90, -60, -30, -15, -5, 5, 15, 30, 60, 90})};
    case K::GaussianNoise:
      return {kind, "sigma", single_param_levels("sigma", {5, 10, 20, 35, 50})};
    case K::MotionBlur:
      return {kind, "length", single_param_levels("length", {3, 7, 11, 17, 25})};
    case K::GaussianBlur:
      return {kind, "sigma", single_param_levels("sigma", {0.5, 1, 2, 4, 8})};
    case K::GlobalColourShift: {
      // Warm shift: red up, blue down, green half-way down.
      SeverityGrid g{kind, "shift_r", {}};
      for (double m : {8.0, 16.0, 32.0, 48.0, 64.0}) {
        g.levels.push_back(ParamMap{{"shift_r", m}, {"shift_g", -m / 2}, {"shift_b", -m}});
      }
      return g;
    }
    case K::Rain:
      return {kind, "density", single_param_levels("density", {0.05, 0.1, 0.2, 0.35, 0.5})};
    case K::CloudGenerator:
      return {kind, "opacity", single_param_levels("opacity", {0.2, 0.35, 0.5, 0.65, 0.8})};
  }
  throw Error(ErrorCode::UnknownKind, "kind index out of range");
}

std::array<SeverityGrid, kCatalogSize> build_all() {
  std::array<SeverityGrid, kCatalogSize> grids{};
  for (const auto& e : catalog()) grids[static_cast<std::size_t>(e.kind)] = build_grid(e.kind);
  return grids;
}

}  // namespace

std::span<const ParamSpec> param_specs(CorruptionKind kind) noexcept {
  using K = CorruptionKind;
  switch (kind) {
    case K::Shadow:
    case K::CloudGenerator: return kOpacity;
    case K::PerspectiveTransformation: return kDisplacement;
    case K::GridDistortion:
    case K::GridElasticDeformation: return kMagnitude;
    case K::ImageFlipHorizontal:
    case K::ImageFlipVertical: return {};
    case K::SaltPepperNoise:
    case K::Rain: return kDensity;
    case K::Contrast:
    case K::Brightness: return kFactor;
    case K::ImageRotation: return kAngle;
    case K::GaussianNoise: return kSigma;
    case K::MotionBlur: return kLength;
    case K::GaussianBlur: return kBlurSigma;
    case K::GlobalColourShift: return kShift;
  }
  return {};
}

void validate_params(CorruptionKind kind, const ParamMap& params) {
  const auto specs = param_specs(kind);
  const std::string kind_name(name_of(kind));
  for (const auto& [key, value] : params) {
    bool known = false;
    for (const auto& s : specs) known = known || s.name == key;
    if (!known) {
      throw Error(ErrorCode::InvalidParams, kind_name + ": unexpected parameter '" + key + "'");
    }
  }
  for (const auto& s : specs) {
    const auto it = params.find(s.name);
    if (it == params.end()) {
      throw Error(ErrorCode::InvalidParams,
                  kind_name + ": missing parameter '" + std::string(s.name) + "'");
    }
    const double v = it->second;
    if (!std::isfinite(v) || v < s.min || v > s.max || (s.integer && v != std::floor(v))) {
      throw Error(ErrorCode::InvalidParams, kind_name + ": parameter '" + std::string(s.name) +
                                                "'=" + std::to_string(v) + " outside [" +
                                                std::to_string(s.min) + ", " +
                                                std::to_string(s.max) + "]" +
                                                (s.integer ? " or not an integer" : ""));
    }
  }
}

const SeverityGrid& severity_grid(CorruptionKind kind) {
  static const auto grids = build_all();
  const auto i = static_cast<std::size_t>(kind);
  if (i >= grids.size()) throw Error(ErrorCode::UnknownKind, "kind index out of range");
  return grids[i];
}

SeverityGrid severity_grid(std::string_view kind_name) {
  return severity_grid(kind_from_name(kind_name));
}

CorruptionInstance sample_instance(CorruptionKind kind, std::uint64_t rng_seed) {
  const SeverityGrid& grid = severity_grid(kind);
  Xoshiro256 rng(rng_seed);
  const auto index = static_cast<int>(rng.bounded(grid.size()));
  const std::uint64_t seed = rng.next();
  return CorruptionInstance{kind, index, grid.levels[static_cast<std::size_t>(index)], seed};
}

}  // namespace robustbench
