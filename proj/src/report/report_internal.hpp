#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace robustbench::detail {

std::string xml_escape(std::string_view s);
std::string csv_field(std::string_view s);
std::string coord(double v);  // fixed two decimals for SVG geometry
void write_text(const std::filesystem::path& path, const std::string& content);

}  // namespace robustbench::detail
