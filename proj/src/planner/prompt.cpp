#include <fstream>

#include "robustbench/error.hpp"
#include "robustbench/planner/planner.hpp"

namespace robustbench {

namespace {

constexpr std::string_view kRole = "You are an expert in data augmentation for deep learning.";
constexpr std::string_view kDomainIntro =
    "I need augmentation recommendations for the following domain:";
constexpr std::string_view kAsk =
    "Provide a list of augmentation names with a brief explanation of why each is useful in this "
    "domain.";
constexpr std::string_view kAvailable = "The following augmentations are available:";
constexpr std::string_view kFormat =
    "Using these augmentations, provide recommendations in the following format:";
constexpr std::string_view kExample =
    "Example:\n"
    "1. HistEqualization: Enhancing contrast through histogram equalization is crucial for "
    "highlighting subtle differences in knee joint structures. This helps the model identify "
    "small variations indicative of arthritis progression.\n"
    "2. GaussianBlur: Simulates blurring effects that may occur in real-world imaging, helping "
    "the model learn to handle reduced detail while still identifying key features.\n"
    "3. ImageRotation: Slightly rotating images introduces variability to account for different "
    "imaging angles. This improves the model's robustness to positional variations in medical "
    "scans.";
constexpr std::string_view kClosing = "Now, generate recommendations specific to the domain provided.";

}  // namespace

DomainProfile profile_from_json(const nlohmann::json& j) {
  DomainProfile p;
  try {
    p.domain_id = j.at("domain_id").get<std::string>();
    p.description = j.at("description").get<std::string>();
    p.display_name = j.value("display_name", p.domain_id);
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, std::string("domain profile: ") + e.what());
  }
  if (p.domain_id.empty()) throw Error(ErrorCode::InvalidConfig, "domain profile: empty domain_id");
  if (p.description.empty()) throw Error(ErrorCode::InvalidConfig, "domain profile: empty description");
  return p;
}

DomainProfile load_profile(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Unreadable, "cannot open profile " + path.string());
  try {
    return profile_from_json(nlohmann::json::parse(in));
  } catch (const nlohmann::json::parse_error& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
}

std::string build_prompt(const DomainProfile& profile, std::span<const CatalogEntry> entries) {
  std::string out;
  out.append(kRole).append("\n\n");
  out.append(kDomainIntro).append("\n");
  out.append("\"").append(profile.description).append("\"\n\n");
  out.append(kAsk).append("\n\n");
  out.append(kAvailable).append("\n");
  for (const auto& e : entries) {
    out.append("- ").append(e.name).append(": ").append(e.description).append("\n");
  }
  out.append("\n");
  out.append(kFormat).append("\n\n");
  out.append(kExample).append("\n\n");
  out.append(kClosing).append("\n");
  return out;
}

}  // namespace robustbench
