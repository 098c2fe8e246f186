#include <algorithm>
#include <map>
#include <set>

#include "robustbench/error.hpp"
#include "robustbench/report/report.hpp"
#include "report_internal.hpp"

namespace robustbench {

namespace {

constexpr double kWidth = 640, kHeight = 400;
constexpr double kLeft = 60, kRight = 600, kTop = 40, kBottom = 340;
constexpr const char* kPalette[] = {"#1f77b4", "#ff7f0e", "#2ca02c", "#9467bd", "#8c564b", "#e377c2", "#7f7f7f",
                                    "#bcbd22", "#17becf"};

const char* metric_name(CurveMetric m) {
  return m == CurveMetric::BalancedAccuracy ? "balanced_accuracy" : "flip_probability";
}

double y_of(double v) { return kBottom - std::clamp(v, 0.0, 1.0) * (kBottom - kTop); }

}  // namespace

std::vector<CurveSeries> curve_series(const RunSummary& summary, std::string_view kind, CurveMetric metric) {
  if (metric == CurveMetric::BalancedAccuracy && !summary.supervised) {
    throw Error(ErrorCode::UnlabeledRun, "run " + summary.run_id + " has no labels");
  }
  std::vector<CurveSeries> out;
  for (const auto& m : summary.models) {
    CurveSeries s{m.model_id, std::string(kind), metric, {}};
    for (const auto& c : m.cells) {
      if (c.kind != kind) continue;
      if (metric == CurveMetric::BalancedAccuracy) {
        if (!c.balanced_accuracy) throw Error(ErrorCode::UnlabeledRun, "cell without balanced accuracy");
        s.points.push_back({c.severity_index, *c.balanced_accuracy, c.n_cells});
      } else {
        s.points.push_back({c.severity_index, c.flip_probability, c.n_cells});
      }
    }
    std::sort(s.points.begin(), s.points.end(),
              [](const CurvePoint& a, const CurvePoint& b) { return a.severity_index < b.severity_index; });
    out.push_back(std::move(s));
  }
  return out;
}

RenderedFiles render_curves(std::span<const CurveSeries> series, std::optional<double> random_baseline) {
  using detail::coord;
  using detail::xml_escape;
  const std::string base_text = random_baseline ? format_exact(*random_baseline) : std::string();

  std::string csv = "model,kind,metric,severity_index,value,n_cells,random_baseline\n";
  std::set<int> severities;
  for (const auto& s : series) {
    for (const auto& p : s.points) {
      severities.insert(p.severity_index);
      csv += detail::csv_field(s.model_id) + ',' + detail::csv_field(s.kind) + ',' + metric_name(s.metric) + ',' +
             std::to_string(p.severity_index) + ',' + format_exact(p.value) + ',' + std::to_string(p.n_cells) +
             ',' + base_text + '\n';
    }
  }

  std::map<int, double> x_of;
  {
    const std::size_t n = severities.size();
    std::size_t i = 0;
    for (int s : severities) {
      x_of[s] = n <= 1 ? (kLeft + kRight) / 2 : kLeft + (kRight - kLeft) * static_cast<double>(i) / static_cast<double>(n - 1);
      ++i;
    }
  }

  const std::string kind = series.empty() ? std::string() : series.front().kind;
  const std::string metric = series.empty() ? std::string() : metric_name(series.front().metric);
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(kWidth) + "\" height=\"" +
                    coord(kHeight) + "\" viewBox=\"0 0 " + coord(kWidth) + ' ' + coord(kHeight) +
                    "\" font-family=\"sans-serif\" font-size=\"11\">\n";
  svg += "<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  svg += "<text x=\"" + coord(kWidth / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"14\">" +
         xml_escape(kind) + ": " + metric + " vs severity</text>\n";
  svg += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(kBottom) + "\" x2=\"" + coord(kRight) + "\" y2=\"" +
         coord(kBottom) + "\" stroke=\"#000\"/>\n";
  svg += "<line x1=\"" + coord(kLeft) + "\" y1=\"" + coord(kTop) + "\" x2=\"" + coord(kLeft) + "\" y2=\"" +
         coord(kBottom) + "\" stroke=\"#000\"/>\n";
  for (int t = 0; t <= 4; ++t) {
    const double v = t / 4.0;
    svg += "<text x=\"" + coord(kLeft - 6) + "\" y=\"" + coord(y_of(v) + 4) + "\" text-anchor=\"end\">" +
           format_fixed2(v) + "</text>\n";
  }
  for (const auto& [s, x] : x_of) {
    svg += "<text x=\"" + coord(x) + "\" y=\"" + coord(kBottom + 16) + "\" text-anchor=\"middle\">" +
           std::to_string(s) + "</text>\n";
  }
  svg += "<text x=\"" + coord((kLeft + kRight) / 2) + "\" y=\"" + coord(kBottom + 34) +
         "\" text-anchor=\"middle\">severity index</text>\n";

  if (random_baseline) {
    const double y = y_of(*random_baseline);
    svg += "<line class=\"random-baseline\" data-value=\"" + base_text + "\" x1=\"" + coord(kLeft) + "\" y1=\"" +
           coord(y) + "\" x2=\"" + coord(kRight) + "\" y2=\"" + coord(y) +
           "\" stroke=\"#d62728\" stroke-dasharray=\"6,4\"><title>random baseline " + base_text +
           "</title></line>\n";
  }

  std::size_t idx = 0;
  for (const auto& s : series) {
    const char* color = kPalette[idx % std::size(kPalette)];
    svg += "<g class=\"series\" data-model=\"" + xml_escape(s.model_id) + "\">\n<polyline fill=\"none\" stroke=\"" +
           color + "\" stroke-width=\"2\" points=\"";
    for (std::size_t i = 0; i < s.points.size(); ++i) {
      if (i) svg += ' ';
      svg += coord(x_of[s.points[i].severity_index]) + ',' + coord(y_of(s.points[i].value));
    }
    svg += "\"/>\n";
    for (const auto& p : s.points) {
      const std::string v = format_exact(p.value);
      svg += "<circle cx=\"" + coord(x_of[p.severity_index]) + "\" cy=\"" + coord(y_of(p.value)) +
             "\" r=\"3\" fill=\"" + color + "\" data-severity=\"" + std::to_string(p.severity_index) +
             "\" data-value=\"" + v + "\"><title>" + xml_escape(s.model_id) + " severity " +
             std::to_string(p.severity_index) + ": " + v + "</title></circle>\n";
    }
    const double ly = kTop + 14.0 * static_cast<double>(idx);
    svg += "<rect x=\"" + coord(kRight - 120) + "\" y=\"" + coord(ly - 8) + "\" width=\"10\" height=\"10\" fill=\"" +
           color + "\"/><text x=\"" + coord(kRight - 105) + "\" y=\"" + coord(ly + 1) + "\">" +
           xml_escape(s.model_id) + "</text>\n</g>\n";
    ++idx;
  }
  svg += "</svg>\n";
  return {csv, svg};
}

ReportOutputs write_run_report(const RunSummary& summary, const std::vector<TableRow>& rows, const TableSpec& layout,
                               const std::filesystem::path& out_dir) {
  const RenderedFiles table = render_summary(rows, layout);

  ReportOutputs out;
  std::vector<std::pair<std::string, RenderedFiles>> curves;
  bool fell_back = false;
  for (const auto& [kind, n] : summary.levels_per_kind) {
    std::vector<CurveSeries> s;
    std::optional<double> baseline;
    try {
      s = curve_series(summary, kind, CurveMetric::BalancedAccuracy);
      if (!summary.labels.empty()) baseline = 1.0 / static_cast<double>(summary.labels.size());
    } catch (const Error& e) {
      if (e.code() != ErrorCode::UnlabeledRun) throw;
      fell_back = true;
      s = curve_series(summary, kind, CurveMetric::FlipProbability);
    }
    curves.emplace_back(kind, render_curves(s, baseline));
  }
  if (fell_back) out.advisories.push_back("unlabeled run: curves show flip probability instead of balanced accuracy");

  std::filesystem::create_directories(out_dir / "curves");
  detail::write_text(out_dir / "summary.csv", table.csv);
  detail::write_text(out_dir / "summary.html", table.markup);
  out.files = {out_dir / "summary.csv", out_dir / "summary.html"};
  for (const auto& [kind, files] : curves) {
    detail::write_text(out_dir / "curves" / (kind + ".csv"), files.csv);
    detail::write_text(out_dir / "curves" / (kind + ".svg"), files.markup);
    out.files.push_back(out_dir / "curves" / (kind + ".csv"));
    out.files.push_back(out_dir / "curves" / (kind + ".svg"));
  }
  return out;
}

}  // namespace robustbench
