#include "robustbench/corruption/catalog.hpp"

#include <array>
#include <string>

#include "robustbench/error.hpp"

namespace robustbench {

namespace {

constexpr std::array<CatalogEntry, kCatalogSize> kCatalog{{
    {CorruptionKind::Shadow, "Shadow",
     "Adds synthetic shadows to an image to simulate lighting conditions."},
    {CorruptionKind::PerspectiveTransformation, "PerspectiveTransformation",
     "Warps the image by changing its perspective, as if viewed from a different angle."},
    {CorruptionKind::GridDistortion, "GridDistortion",
     "Distorts the image by applying a grid-like warping effect, bending specific areas."},
    {CorruptionKind::ImageFlipHorizontal, "ImageFlipHorizontal",
     "Flips the image along the vertical axis, mirroring it horizontally."},
    {CorruptionKind::ImageFlipVertical, "ImageFlipVertical",
     "Flips the image along the horizontal axis, mirroring it vertically."},
    {CorruptionKind::SaltPepperNoise, "SaltPepperNoise",
     "Adds random white and black dots to the image, mimicking noisy pixels."},
    {CorruptionKind::Contrast, "Contrast",
     "Alters the difference between light and dark areas to make the image appear more or "
     "less vivid."},
    {CorruptionKind::Brightness, "Brightness",
     "Changes the overall lightness or darkness of the image."},
    {CorruptionKind::ImageRotation, "ImageRotation",
     "Rotates the image by a specified angle, keeping its contents intact."},
    {CorruptionKind::GaussianNoise, "GaussianNoise",
     "Adds random, fine-grained noise following a Gaussian distribution to simulate sensor "
     "noise."},
    {CorruptionKind::GridElasticDeformation, "GridElasticDeformation",
     "Applies a rubber-sheet-like deformation to the image, bending it smoothly."},
    {CorruptionKind::MotionBlur, "MotionBlur",
     "Blurs the image to simulate movement, as if the camera or object was in motion."},
    {CorruptionKind::GaussianBlur, "GaussianBlur",
     "Smoothens the image by blurring it, reducing fine details or noise."},
    {CorruptionKind::GlobalColourShift, "GlobalColourShift",
     "Adjusts the overall color balance of the image, shifting its tones globally."},
    {CorruptionKind::Rain, "Rain",
     "Adds synthetic raindrop effects or streaks to mimic rainy conditions."},
    {CorruptionKind::CloudGenerator, "CloudGenerator",
     "Overlays or generates cloud-like textures in the image, simulating an overcast sky."},
}};

}  // namespace

std::span<const CatalogEntry> catalog() noexcept { return kCatalog; }

std::string_view name_of(CorruptionKind kind) noexcept {
  return kCatalog[static_cast<std::size_t>(kind)].name;
}

std::string_view description_of(CorruptionKind kind) noexcept {
  return kCatalog[static_cast<std::size_t>(kind)].description;
}

std::optional<CorruptionKind> find_kind(std::string_view name) noexcept {
  for (const auto& e : kCatalog) {
    if (e.name == name) return e.kind;
  }
  return std::nullopt;
}

CorruptionKind kind_from_name(std::string_view name) {
  if (auto k = find_kind(name)) return *k;
  throw Error(ErrorCode::UnknownKind, "'" + std::string(name) + "' is not in the catalog");
}

}  // namespace robustbench
