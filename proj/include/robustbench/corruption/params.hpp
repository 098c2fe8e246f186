#pragma once

#include <map>
#include <span>
#include <string>
#include <string_view>

#include "robustbench/corruption/catalog.hpp"

namespace robustbench {

using ParamMap = std::map<std::string, double, std::less<>>;

struct ParamSpec {
  std::string_view name;
  double min;
  double max;
  bool integer;
};

// Declared parameters of a kind. An instance must bind exactly these keys.
std::span<const ParamSpec> param_specs(CorruptionKind kind) noexcept;

// Throws Error(InvalidParams) naming the offending key.
void validate_params(CorruptionKind kind, const ParamMap& params);

}  // namespace robustbench
