#include <algorithm>
#include <array>
#include <cmath>
#include <functional>

#include "robustbench/error.hpp"
#include "robustbench/report/report.hpp"
#include "report_internal.hpp"

namespace robustbench {

namespace {

struct Column {
  const char* name;
  std::optional<double> TableRow::*field;
  bool higher_is_better;
  bool relative;
};

constexpr std::array<Column, 5> kColumns{{
    {"Acc", &TableRow::acc, true, false},
    {"mCE", &TableRow::mce, false, true},
    {"rCE", &TableRow::rce, false, true},
    {"mFR", &TableRow::mfr, false, true},
    {"r", &TableRow::r, false, false},
}};

// Ties compare on the printed value, so equal-looking cells are flagged alike.
std::vector<bool> best_mask(std::span<const TableRow> rows, const Column& col) {
  std::optional<double> best;
  for (const auto& row : rows) {
    const auto& v = row.*col.field;
    if (!v || !std::isfinite(*v)) continue;
    const double shown = std::stod(format_fixed2(*v));
    if (!best || (col.higher_is_better ? shown > *best : shown < *best)) best = shown;
  }
  std::vector<bool> mask;
  for (const auto& row : rows) {
    const auto& v = row.*col.field;
    mask.push_back(best && v && std::isfinite(*v) && std::stod(format_fixed2(*v)) == *best);
  }
  return mask;
}

}  // namespace

std::vector<TableRow> table_rows(const RunSummary& summary) {
  std::vector<TableRow> rows;
  for (const auto& m : summary.models) {
    rows.push_back({m.model_id, m.balanced_accuracy_clean, m.mce, m.rce, m.mfr, m.pearson_r});
  }
  return rows;
}

RenderedFiles render_summary(std::span<const TableRow> rows, const TableSpec& layout) {
  if (rows.empty()) throw Error(ErrorCode::NoRows, "summary table has no rows");
  if (layout.show_relative) {
    if (!layout.baseline_id) throw Error(ErrorCode::MissingBaseline, "relative columns need a baseline model");
    const bool present = std::any_of(rows.begin(), rows.end(),
                                     [&](const TableRow& r) { return r.model_id == *layout.baseline_id; });
    if (!present) throw Error(ErrorCode::MissingBaseline, "baseline row '" + *layout.baseline_id + "' is missing");
  }

  std::vector<const Column*> cols;
  for (const auto& c : kColumns)
    if (layout.show_relative || !c.relative) cols.push_back(&c);
  std::vector<std::vector<bool>> best;
  for (const auto* c : cols) best.push_back(best_mask(rows, *c));

  auto cell = [](const std::optional<double>& v) { return v ? format_fixed2(*v) : std::string(); };

  std::string csv = "model";
  for (const auto* c : cols) csv += std::string(",") + c->name;
  csv += ",best\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    csv += detail::csv_field(rows[i].model_id);
    std::string flags;
    for (std::size_t k = 0; k < cols.size(); ++k) {
      csv += ',' + cell(rows[i].*(cols[k]->field));
      if (best[k][i]) flags += (flags.empty() ? "" : ";") + std::string(cols[k]->name);
    }
    csv += ',' + flags + '\n';
  }

  std::string html =
      "<!DOCTYPE html>\n<html>\n<head>\n<meta charset=\"utf-8\">\n<title>Robustness summary</title>\n"
      "<style>\ntable{border-collapse:collapse;font-family:sans-serif}\n"
      "td,th{border:1px solid #999;padding:4px 10px;text-align:right}\n"
      "td.model{text-align:left}\ntd.best{font-weight:bold;background:#e6f2e6}\n"
      "tr.baseline td{font-style:italic}\n</style>\n</head>\n<body>\n";
  html += "<table data-domain=\"" + detail::xml_escape(layout.domain_id) + "\"";
  if (layout.baseline_id) html += " data-baseline=\"" + detail::xml_escape(*layout.baseline_id) + "\"";
  html += ">\n<thead><tr><th>Model</th>";
  for (const auto* c : cols) html += std::string("<th>") + c->name + "</th>";
  html += "</tr></thead>\n<tbody>\n";
  for (std::size_t i = 0; i < rows.size(); ++i) {
    const bool is_base = layout.baseline_id && rows[i].model_id == *layout.baseline_id;
    html += is_base ? "<tr class=\"baseline\">" : "<tr>";
    html += "<td class=\"model\">" + detail::xml_escape(rows[i].model_id) + "</td>";
    for (std::size_t k = 0; k < cols.size(); ++k) {
      const auto& v = rows[i].*(cols[k]->field);
      html += best[k][i] ? "<td class=\"best\">" : "<td>";
      html += v ? format_fixed2(*v) : "n/a";
      html += "</td>";
    }
    html += "</tr>\n";
  }
  html += "</tbody>\n</table>\n</body>\n</html>\n";
  return {csv, html};
}

}  // namespace robustbench
