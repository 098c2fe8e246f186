#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "robustbench/corruption/catalog.hpp"
#include "robustbench/corruption/params.hpp"
#include "robustbench/image.hpp"

namespace robustbench {

struct CorruptionInstance {
  CorruptionKind kind;
  int severity_index = 0;
  ParamMap params;
  std::uint64_t seed = 0;

  bool operator==(const CorruptionInstance&) const = default;
};

// Ordered parameter levels for one kind. Levels are strictly increasing in
// `primary_param`; signed kinds (rotation, brightness, contrast) run from the
// negative/darkening end to the positive end.
struct SeverityGrid {
  CorruptionKind kind;
  std::string primary_param;
  std::vector<ParamMap> levels;

  std::size_t size() const noexcept { return levels.size(); }
};

const SeverityGrid& severity_grid(CorruptionKind kind);
SeverityGrid severity_grid(std::string_view kind_name);

// Uniform draw of a severity level, deterministic in rng_seed.
CorruptionInstance sample_instance(CorruptionKind kind, std::uint64_t rng_seed);

// Pure in (image, kind, params, seed); output has the input's dimensions.
// Throws Error(InvalidParams) for out-of-range or missing parameters.
RasterImage apply(const RasterImage& image, const CorruptionInstance& inst);
RasterImage apply(const RasterImage& image, CorruptionKind kind, const ParamMap& params,
                  std::uint64_t seed);

}  // namespace robustbench
