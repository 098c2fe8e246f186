#include <fstream>

#include "robustbench/error.hpp"
#include "robustbench/planner/planner.hpp"

namespace robustbench {

namespace {

PlanRules build_default_rules() {
  using K = CorruptionKind;
  PlanRules r;
  for (const char* d : {"driving", "handheld", "manufacturing", "medical", "people", "satellite"}) {
    r.whitelist[d] = {K::Brightness, K::Contrast, K::GaussianNoise};
    r.blacklist[d] = {};
  }
  r.whitelist["satellite"].insert(K::CloudGenerator);
  for (const char* d : {"people", "satellite", "handheld"}) r.whitelist[d].insert(K::ImageFlipHorizontal);
  for (const char* d : {"driving", "satellite", "people"}) r.whitelist[d].insert(K::MotionBlur);
  for (const char* d : {"medical", "people", "handheld"}) r.whitelist[d].insert(K::PerspectiveTransformation);
  r.whitelist["driving"].insert(K::Rain);
  r.whitelist["driving"].insert(K::Shadow);

  for (const char* d : {"medical", "manufacturing", "people"}) r.blacklist[d].insert(K::CloudGenerator);
  for (const char* d : {"driving", "people"}) r.blacklist[d].insert(K::ImageFlipVertical);
  for (const char* d : {"medical", "manufacturing"}) r.blacklist[d].insert(K::Rain);
  r.blacklist["medical"].insert(K::Shadow);
  return r;
}

void check_disjoint(const PlanRules& r) {
  for (const auto& [domain, white] : r.whitelist) {
    const auto it = r.blacklist.find(domain);
    if (it == r.blacklist.end()) continue;
    for (auto k : white) {
      if (it->second.count(k)) {
        throw Error(ErrorCode::InvalidConfig, "rule for " + domain + " lists " +
                                                  std::string(name_of(k)) +
                                                  " on both whitelist and blacklist");
      }
    }
  }
}

}  // namespace

std::string_view to_string(ViolationType type) {
  switch (type) {
    case ViolationType::MissingWhitelisted: return "MissingWhitelisted";
    case ViolationType::ForbiddenBlacklisted: return "ForbiddenBlacklisted";
  }
  return "Unknown";
}

const PlanRules& default_rules() {
  static const PlanRules rules = build_default_rules();
  return rules;
}

PlanRules load_rules(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw Error(ErrorCode::Unreadable, "cannot open rules " + path.string());
  PlanRules r;
  try {
    const auto j = nlohmann::json::parse(in);
    for (const char* section : {"whitelist", "blacklist"}) {
      auto& target = std::string_view(section) == "whitelist" ? r.whitelist : r.blacklist;
      if (!j.contains(section)) continue;
      for (const auto& [domain, kinds] : j.at(section).items()) {
        auto& set = target[domain];
        for (const auto& k : kinds) set.insert(kind_from_name(k.get<std::string>()));
      }
    }
  } catch (const nlohmann::json::exception& e) {
    throw Error(ErrorCode::InvalidConfig, path.string() + ": " + e.what());
  }
  check_disjoint(r);
  return r;
}

nlohmann::json rules_to_json(const PlanRules& rules) {
  nlohmann::json j{{"whitelist", nlohmann::json::object()}, {"blacklist", nlohmann::json::object()}};
  for (const auto& [domain, kinds] : rules.whitelist) {
    auto& arr = j["whitelist"][domain] = nlohmann::json::array();
    for (auto k : kinds) arr.push_back(name_of(k));
  }
  for (const auto& [domain, kinds] : rules.blacklist) {
    auto& arr = j["blacklist"][domain] = nlohmann::json::array();
    for (auto k : kinds) arr.push_back(name_of(k));
  }
  return j;
}

std::vector<Violation> validate_plan(const CorruptionPlan& plan, const PlanRules& rules) {
  check_disjoint(rules);
  std::vector<Violation> out;
  if (const auto it = rules.whitelist.find(plan.domain_id); it != rules.whitelist.end()) {
    for (const auto& entry : catalog()) {
      if (it->second.count(entry.kind) && !plan.contains(entry.kind)) {
        out.push_back({ViolationType::MissingWhitelisted, entry.kind});
      }
    }
  }
  if (const auto it = rules.blacklist.find(plan.domain_id); it != rules.blacklist.end()) {
    for (const auto& entry : catalog()) {
      if (it->second.count(entry.kind) && plan.contains(entry.kind)) {
        out.push_back({ViolationType::ForbiddenBlacklisted, entry.kind});
      }
    }
  }
  return out;
}

}  // namespace robustbench
