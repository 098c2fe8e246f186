#include <algorithm>
#include <cmath>
#include <cstdio>

#include "robustbench/report/report.hpp"
#include "report_internal.hpp"

namespace robustbench {

namespace {

constexpr double kCellW = 58, kCellH = 28, kLabelW = 120, kHeaderH = 140;

bool listed(const std::map<std::string, std::set<CorruptionKind>>& m, const std::string& domain,
            CorruptionKind k) {
  const auto it = m.find(domain);
  return it != m.end() && it->second.count(k) > 0;
}

std::string fill_for(int count, int n_runs) {
  const double f = n_runs > 0 ? std::clamp(static_cast<double>(count) / n_runs, 0.0, 1.0) : 0.0;
  char buf[8];
  std::snprintf(buf, sizeof buf, "#%02x%02x%02x", static_cast<int>(std::lround(255 - 200 * f)),
                static_cast<int>(std::lround(255 - 140 * f)), 255);
  return buf;
}

}  // namespace

RenderedFiles render_heatmap(const SelectionHeatmap& h, const PlanRules& rules) {
  using detail::coord;
  using detail::xml_escape;

  std::string csv = "domain";
  for (const auto& e : catalog()) csv += ',' + std::string(e.name);
  csv += '\n';
  for (std::size_t d = 0; d < h.domains.size(); ++d) {
    csv += detail::csv_field(h.domains[d]);
    for (int c : h.counts[d]) csv += ',' + std::to_string(c);
    csv += '\n';
  }

  const double width = kLabelW + kCellW * kCatalogSize + 20;
  const double height = kHeaderH + kCellH * static_cast<double>(h.domains.size()) + 60;
  std::string svg = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + coord(width) + "\" height=\"" +
                    coord(height) + "\" viewBox=\"0 0 " + coord(width) + ' ' + coord(height) +
                    "\" font-family=\"sans-serif\" font-size=\"11\" data-n-runs=\"" + std::to_string(h.n_runs) +
                    "\">\n<rect width=\"100%\" height=\"100%\" fill=\"#ffffff\"/>\n";
  for (std::size_t k = 0; k < kCatalogSize; ++k) {
    const double x = kLabelW + kCellW * static_cast<double>(k) + kCellW / 2;
    svg += "<text transform=\"translate(" + coord(x) + ',' + coord(kHeaderH - 6) +
           ") rotate(-50)\" text-anchor=\"start\">" + std::string(catalog()[k].name) + "</text>\n";
  }
  for (std::size_t d = 0; d < h.domains.size(); ++d) {
    const std::string& domain = h.domains[d];
    const double y = kHeaderH + kCellH * static_cast<double>(d);
    svg += "<text x=\"" + coord(kLabelW - 8) + "\" y=\"" + coord(y + kCellH / 2 + 4) + "\" text-anchor=\"end\">" +
           xml_escape(domain) + "</text>\n";
    for (std::size_t k = 0; k < kCatalogSize; ++k) {
      const auto kind = catalog()[k].kind;
      const int count = h.counts[d][k];
      const bool white = listed(rules.whitelist, domain, kind);
      const bool black = listed(rules.blacklist, domain, kind);
      const bool violation = (black && count > 0) || (white && 2 * count <= h.n_runs);
      std::string cls = "cell";
      if (white) cls += " whitelist";
      if (black) cls += " blacklist";
      if (violation) cls += " violation";
      const double x = kLabelW + kCellW * static_cast<double>(k);
      svg += "<g class=\"" + cls + "\" data-domain=\"" + xml_escape(domain) + "\" data-kind=\"" +
             std::string(catalog()[k].name) + "\" data-count=\"" + std::to_string(count) + "\">";
      svg += "<rect x=\"" + coord(x) + "\" y=\"" + coord(y) + "\" width=\"" + coord(kCellW) + "\" height=\"" +
             coord(kCellH) + "\" fill=\"" + (violation && black ? std::string("#f6b3b3") : fill_for(count, h.n_runs)) +
             "\" stroke=\"#cccccc\"/>";
      if (white) {
        svg += "<rect x=\"" + coord(x + 2) + "\" y=\"" + coord(y + 2) + "\" width=\"" + coord(kCellW - 4) +
               "\" height=\"" + coord(kCellH - 4) + "\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2.5\"/>";
      }
      if (black) {
        svg += "<rect x=\"" + coord(x + 2) + "\" y=\"" + coord(y + 2) + "\" width=\"" + coord(kCellW - 4) +
               "\" height=\"" + coord(kCellH - 4) +
               "\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2.5\" stroke-dasharray=\"4,2\"/>";
      }
      svg += "<text x=\"" + coord(x + kCellW / 2) + "\" y=\"" + coord(y + kCellH / 2 + 4) +
             "\" text-anchor=\"middle\"" +
             (violation ? std::string(" font-weight=\"bold\" fill=\"#b00000\"") : std::string()) + ">" +
             std::to_string(count) + "</text></g>\n";
    }
  }
  const double ly = kHeaderH + kCellH * static_cast<double>(h.domains.size()) + 24;
  svg += "<rect x=\"" + coord(kLabelW) + "\" y=\"" + coord(ly - 10) +
         "\" width=\"14\" height=\"14\" fill=\"none\" stroke=\"#2ca02c\" stroke-width=\"2.5\"/><text x=\"" +
         coord(kLabelW + 20) + "\" y=\"" + coord(ly + 1) + "\">always select</text>\n";
  svg += "<rect x=\"" + coord(kLabelW + 130) + "\" y=\"" + coord(ly - 10) +
         "\" width=\"14\" height=\"14\" fill=\"none\" stroke=\"#d62728\" stroke-width=\"2.5\" "
         "stroke-dasharray=\"4,2\"/><text x=\"" +
         coord(kLabelW + 150) + "\" y=\"" + coord(ly + 1) + "\">never select</text>\n";
  svg += "<text x=\"" + coord(kLabelW + 260) + "\" y=\"" + coord(ly + 1) +
         "\" font-weight=\"bold\" fill=\"#b00000\">rule violated</text>\n</svg>\n";
  return {csv, svg};
}

std::vector<std::filesystem::path> write_heatmap(const SelectionHeatmap& heatmap, const PlanRules& rules,
                                                 const std::filesystem::path& out_dir) {
  const RenderedFiles f = render_heatmap(heatmap, rules);
  std::filesystem::create_directories(out_dir);
  detail::write_text(out_dir / "selection_heatmap.csv", f.csv);
  detail::write_text(out_dir / "selection_heatmap.svg", f.markup);
  return {out_dir / "selection_heatmap.csv", out_dir / "selection_heatmap.svg"};
}

}  // namespace robustbench
