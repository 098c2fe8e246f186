#pragma once

#include <filesystem>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "robustbench/harness/summarize.hpp"
#include "robustbench/planner/planner.hpp"

namespace robustbench {

// Two decimals, round-half-even on the exact binary value; "-0.00" prints
// as "0.00" and non-finite values as "n/a".
std::string format_fixed2(double value);

// Shortest decimal that reads back to the same double.
std::string format_exact(double value);

struct TableRow {
  std::string model_id;
  std::optional<double> acc;
  std::optional<double> mce;
  std::optional<double> rce;
  std::optional<double> mfr;
  std::optional<double> r;
};

struct TableSpec {
  std::string domain_id;
  std::optional<std::string> baseline_id;
  bool show_relative = true;  // mCE, rCE and mFR columns
};

struct RenderedFiles {
  std::string csv;
  std::string markup;  // HTML or SVG
};

std::vector<TableRow> table_rows(const RunSummary& summary);

// Best per column: highest Acc; lowest mCE, rCE, mFR and r. Throws
// Error(NoRows) for no rows, Error(MissingBaseline) when relative columns
// are shown without a baseline row.
RenderedFiles render_summary(std::span<const TableRow> rows, const TableSpec& layout);

enum class CurveMetric { BalancedAccuracy, FlipProbability };

struct CurvePoint {
  int severity_index = 0;
  double value = 0.0;
  std::size_t n_cells = 0;
};

struct CurveSeries {
  std::string model_id;
  std::string kind;
  CurveMetric metric = CurveMetric::BalancedAccuracy;
  std::vector<CurvePoint> points;  // strictly increasing severity
};

// Series per model for one kind. Throws Error(UnlabeledRun) when balanced
// accuracy is asked of an unlabeled run.
std::vector<CurveSeries> curve_series(const RunSummary& summary, std::string_view kind, CurveMetric metric);

// `random_baseline` is drawn as a dashed line when set.
RenderedFiles render_curves(std::span<const CurveSeries> series, std::optional<double> random_baseline);

RenderedFiles render_heatmap(const SelectionHeatmap& heatmap, const PlanRules& rules);

struct ReportOutputs {
  std::vector<std::filesystem::path> files;
  std::vector<std::string> advisories;
};

// summary.csv/html and curves/<kind>.csv/svg under `out_dir`; balanced
// accuracy curves fall back to flip probability for unlabeled runs. Nothing
// is written when the table cannot be rendered.
ReportOutputs write_run_report(const RunSummary& summary, const std::vector<TableRow>& rows,
                               const TableSpec& layout, const std::filesystem::path& out_dir);

std::vector<std::filesystem::path> write_heatmap(const SelectionHeatmap& heatmap, const PlanRules& rules,
                                                 const std::filesystem::path& out_dir);

}  // namespace robustbench
