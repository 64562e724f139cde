#pragma once

#include <set>
#include <string>
#include <vector>

#include "screpair/metrics.hpp"

namespace screpair {

enum class ReportFormat { kMarkdown, kCsv, kPlots };
ReportFormat parse_report_format(std::string_view name);  // "md" | "csv" | "plots"

// Overall table (agents sorted by RRR, descending) with 95% Wilson intervals,
// then a per-error-type RRR table.
std::string markdown_report(const std::vector<MetricsReport>& reports);

// One row per (agent, metric); columns ME1..ME10 then overall. Missing types
// and undefined ratios are left empty.
std::string csv_report(const std::vector<MetricsReport>& reports);

// Static SVG figures.
std::string svg_rrr_bars(const std::vector<MetricsReport>& reports);
// RR on x, P2Pass on y, point area grows with RRR.
std::string svg_rr_vs_p2pass(const std::vector<MetricsReport>& reports);
std::string svg_steps_vs_tokens(const std::vector<MetricsReport>& reports);

// Writes report.md / report.csv / rrr_bars.svg, rr_vs_p2pass.svg,
// steps_vs_tokens.svg into `dir`; returns the paths written.
std::vector<std::string> write_report(const std::vector<MetricsReport>& reports, const std::set<ReportFormat>& formats,
                                      const std::string& dir);

}  // namespace screpair
