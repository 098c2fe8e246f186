#include <algorithm>
#include <regex>

#include "robustbench/error.hpp"
#include "robustbench/planner/planner.hpp"

namespace robustbench {

namespace {

std::string trim(std::string_view s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string_view::npos) return {};
  const auto e = s.find_last_not_of(" \t\r");
  return std::string(s.substr(b, e - b + 1));
}

}  // namespace

bool SelectionRun::selected(CorruptionKind kind) const noexcept {
  return std::any_of(selections.begin(), selections.end(),
                     [kind](const Selection& s) { return s.kind == kind; });
}

// Accepts "<n>. Name: text" with optional markdown emphasis around the name
// ("1. **Name**: text" or "1. **Name:** text").
SelectionRun parse_response(std::string_view text, int run_index) {
  static const std::regex kLine(R"(^\s*\d+\.\s*\**\s*([A-Za-z][A-Za-z0-9_]*)\s*\**\s*:\s*\**\s*(.*)$)");
  SelectionRun run;
  run.run_index = run_index;
  run.raw_response = std::string(text);
  std::size_t matched = 0;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    const auto nl = text.find('\n', pos);
    const std::string line(text.substr(pos, nl == std::string_view::npos ? text.size() - pos : nl - pos));
    pos = nl == std::string_view::npos ? text.size() + 1 : nl + 1;
    std::smatch m;
    if (!std::regex_match(line, m, kLine)) continue;
    ++matched;
    const std::string name = m[1].str();
    const std::string rationale = trim(m[2].str());
    if (const auto kind = find_kind(name)) {
      if (!run.selected(*kind)) run.selections.push_back({*kind, rationale});
    } else if (std::find(run.unknown_names.begin(), run.unknown_names.end(), name) ==
               run.unknown_names.end()) {
      run.unknown_names.push_back(name);
    }
  }
  if (matched == 0) {
    throw Error(ErrorCode::EmptyResponse,
                "run " + std::to_string(run_index) + ": no '<index>. <Name>: <rationale>' lines");
  }
  return run;
}

}  // namespace robustbench
