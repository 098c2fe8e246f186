#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string_view>

namespace robustbench {

// The closed set of corruption kinds, in prompt-listing order.
enum class CorruptionKind : std::uint8_t {
  Shadow,
  PerspectiveTransformation,
  GridDistortion,
  ImageFlipHorizontal,
  ImageFlipVertical,
  SaltPepperNoise,
  Contrast,
  Brightness,
  ImageRotation,
  GaussianNoise,
  GridElasticDeformation,
  MotionBlur,
  GaussianBlur,
  GlobalColourShift,
  Rain,
  CloudGenerator,
};

inline constexpr std::size_t kCatalogSize = 16;

struct CatalogEntry {
  CorruptionKind kind;
  std::string_view name;
  std::string_view description;
};

// All kinds with the one-line descriptions used verbatim in the planner prompt.
std::span<const CatalogEntry> catalog() noexcept;

std::string_view name_of(CorruptionKind kind) noexcept;
std::string_view description_of(CorruptionKind kind) noexcept;
std::optional<CorruptionKind> find_kind(std::string_view name) noexcept;
// Throws Error(UnknownKind).
CorruptionKind kind_from_name(std::string_view name);

}  // namespace robustbench
