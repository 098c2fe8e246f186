#include <array>
#include <charconv>
#include <cmath>
#include <fstream>

#include "robustbench/error.hpp"
#include "robustbench/report/report.hpp"
#include "report_internal.hpp"

namespace robustbench {

std::string format_fixed2(double value) {
  if (!std::isfinite(value)) return "n/a";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value, std::chars_format::fixed, 2);
  std::string s(buf.data(), res.ptr);
  if (s == "-0.00") s = "0.00";
  return s;
}

std::string format_exact(double value) {
  if (!std::isfinite(value)) return "n/a";
  if (value == 0.0) return "0";
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), value);
  return std::string(buf.data(), res.ptr);
}

namespace detail {

std::string xml_escape(std::string_view s) {
  std::string out;
  for (char c : s) {
    switch (c) {
      case '&': out += "&amp;"; break;
      case '<': out += "&lt;"; break;
      case '>': out += "&gt;"; break;
      case '"': out += "&quot;"; break;
      default: out += c;
    }
  }
  return out;
}

std::string csv_field(std::string_view s) {
  if (s.find_first_of(",\"\n") == std::string_view::npos) return std::string(s);
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

std::string coord(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v, std::chars_format::fixed, 2);
  return std::string(buf.data(), res.ptr);
}

void write_text(const std::filesystem::path& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
  if (!out) throw Error(ErrorCode::Unreadable, "cannot write " + path.string());
}

}  // namespace detail

}  // namespace robustbench
