#include "screpair/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>

#include "screpair/error.hpp"

namespace screpair {

namespace {

std::string fmt(const char* f, double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, f, v);
  return buf;
}

std::string pct(const Proportion& p) { return p.value ? fmt("%.1f", *p.value * 100.0) : "N/A"; }

std::string pct_ci(const Proportion& p) {
  if (!p.value) return "N/A";
  return pct(p) + " [" + fmt("%.1f", p.lower * 100.0) + ", " + fmt("%.1f", p.upper * 100.0) + "]";
}

std::vector<const MetricsReport*> by_rrr(const std::vector<MetricsReport>& reports) {
  std::vector<const MetricsReport*> v;
  for (const MetricsReport& r : reports) v.push_back(&r);
  std::stable_sort(v.begin(), v.end(), [](const MetricsReport* a, const MetricsReport* b) {
    return a->overall.rrr.value.value_or(-1.0) > b->overall.rrr.value.value_or(-1.0);
  });
  return v;
}

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
  return out + "\"";
}

std::string label(const MetricsReport& r) { return r.agent.empty() ? "agent" : r.agent; }

constexpr double kW = 640, kH = 420, kLeft = 70, kRight = 30, kTop = 40, kBottom = 60;

std::string svg_open(std::string_view title) {
  std::string s = "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" + fmt("%.0f", kW) + "\" height=\"" +
                  fmt("%.0f", kH) + "\" font-family=\"sans-serif\" font-size=\"12\">\n";
  s += "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
  s += "<text x=\"" + fmt("%.0f", kW / 2) + "\" y=\"22\" text-anchor=\"middle\" font-size=\"15\">" +
       xml_escape(title) + "</text>\n";
  return s;
}

std::string axes(std::string_view xlabel, std::string_view ylabel, double xmax, double ymax, bool percent) {
  const double x0 = kLeft, y0 = kH - kBottom, x1 = kW - kRight, y1 = kTop;
  std::string s;
  s += "<line x1=\"" + fmt("%.1f", x0) + "\" y1=\"" + fmt("%.1f", y0) + "\" x2=\"" + fmt("%.1f", x1) + "\" y2=\"" +
       fmt("%.1f", y0) + "\" stroke=\"black\"/>\n";
  s += "<line x1=\"" + fmt("%.1f", x0) + "\" y1=\"" + fmt("%.1f", y0) + "\" x2=\"" + fmt("%.1f", x0) + "\" y2=\"" +
       fmt("%.1f", y1) + "\" stroke=\"black\"/>\n";
  for (int i = 0; i <= 4; ++i) {
    const double fx = x0 + (x1 - x0) * i / 4.0, fy = y0 - (y0 - y1) * i / 4.0;
    const double vx = xmax * i / 4.0, vy = ymax * i / 4.0;
    s += "<text x=\"" + fmt("%.1f", fx) + "\" y=\"" + fmt("%.1f", y0 + 16) + "\" text-anchor=\"middle\">" +
         (percent ? fmt("%.0f", vx * 100) : fmt("%.3g", vx)) + "</text>\n";
    s += "<text x=\"" + fmt("%.1f", x0 - 6) + "\" y=\"" + fmt("%.1f", fy + 4) + "\" text-anchor=\"end\">" +
         (percent ? fmt("%.0f", vy * 100) : fmt("%.3g", vy)) + "</text>\n";
  }
  s += "<text x=\"" + fmt("%.1f", (x0 + x1) / 2) + "\" y=\"" + fmt("%.1f", kH - 18) + "\" text-anchor=\"middle\">" +
       xml_escape(xlabel) + "</text>\n";
  s += "<text transform=\"translate(18," + fmt("%.1f", (y0 + y1) / 2) + ") rotate(-90)\" text-anchor=\"middle\">" +
       xml_escape(ylabel) + "</text>\n";
  return s;
}

double nice_max(double v) {
  if (v <= 0) return 1.0;
  const double mag = std::pow(10.0, std::floor(std::log10(v)));
  for (double m : {1.0, 2.0, 2.5, 5.0, 10.0})
    if (v <= m * mag) return m * mag;
  return 10 * mag;
}

}  // namespace

ReportFormat parse_report_format(std::string_view name) {
  if (name == "md" || name == "markdown") return ReportFormat::kMarkdown;
  if (name == "csv") return ReportFormat::kCsv;
  if (name == "plots" || name == "svg") return ReportFormat::kPlots;
  throw InvalidInput("format", "expected md, csv or plots, got '" + std::string(name) + "'");
}

std::string markdown_report(const std::vector<MetricsReport>& reports) {
  std::string s = "# Repair evaluation\n\n";
  s += "| Agent | N | RR % | RRR % | P2Pass % | Mean steps | Mean tokens | Mean reward |\n";
  s += "|---|---:|---:|---:|---:|---:|---:|---:|\n";
  for (const MetricsReport* r : by_rrr(reports)) {
    const MetricBlock& b = r->overall;
    s += "| " + label(*r) + " | " + std::to_string(b.n) + " | " + pct_ci(b.rr) + " | " + pct_ci(b.rrr) + " | " +
         pct_ci(b.p2pass) + " | " + fmt("%.2f", b.mean_steps) + " | " + fmt("%.0f", b.mean_tokens) + " | " +
         fmt("%.1f", b.mean_reward) + " |\n";
  }
  s += "\nBracketed ranges are 95% Wilson score intervals. P2Pass is RRR / RR and is N/A when nothing was recovered.\n";

  for (const char* metric : {"RRR", "RR"}) {
    s += std::string("\n## ") + metric + " by error type (%)\n\n| Agent |";
    for (ErrorType t : kAllErrorTypes) s += " " + std::string(error_type_name(t)) + " |";
    s += " Overall |\n|---|";
    for (std::size_t i = 0; i <= kAllErrorTypes.size(); ++i) s += "---:|";
    s += "\n";
    for (const MetricsReport* r : by_rrr(reports)) {
      s += "| " + label(*r) + " |";
      for (ErrorType t : kAllErrorTypes) {
        auto it = r->per_type.find(t);
        const bool rrr = std::string(metric) == "RRR";
        s += " " + (it == r->per_type.end() ? std::string("-") : pct(rrr ? it->second.rrr : it->second.rr)) + " |";
      }
      s += " " + pct(std::string(metric) == "RRR" ? r->overall.rrr : r->overall.rr) + " |\n";
    }
  }
  return s;
}

std::string csv_report(const std::vector<MetricsReport>& reports) {
  std::string s = "agent,metric";
  for (ErrorType t : kAllErrorTypes) s += "," + std::string(error_type_name(t));
  s += ",overall\n";
  struct Col {
    const char* name;
    std::optional<double> (*get)(const MetricBlock&);
  };
  const Col cols[] = {
      {"N", [](const MetricBlock& b) -> std::optional<double> { return b.n; }},
      {"RR", [](const MetricBlock& b) { return b.rr.value; }},
      {"RRR", [](const MetricBlock& b) { return b.rrr.value; }},
      {"P2Pass", [](const MetricBlock& b) { return b.p2pass.value; }},
      {"mean_steps", [](const MetricBlock& b) -> std::optional<double> { return b.mean_steps; }},
      {"mean_tokens", [](const MetricBlock& b) -> std::optional<double> { return b.mean_tokens; }},
  };
  auto cell = [](std::optional<double> v) { return v ? fmt("%.6g", *v) : std::string(); };
  for (const MetricsReport* r : by_rrr(reports)) {
    for (const Col& c : cols) {
      s += csv_field(label(*r)) + "," + c.name;
      for (ErrorType t : kAllErrorTypes) {
        auto it = r->per_type.find(t);
        s += "," + (it == r->per_type.end() ? std::string() : cell(c.get(it->second)));
      }
      s += "," + cell(c.get(r->overall)) + "\n";
    }
  }
  return s;
}

std::string svg_rrr_bars(const std::vector<MetricsReport>& reports) {
  std::string s = svg_open("Rational recovery rate by agent");
  s += axes("", "RRR (%)", 1.0, 1.0, true);
  const auto order = by_rrr(reports);
  const double x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;
  const double slot = order.empty() ? 0 : (x1 - x0) / static_cast<double>(order.size());
  for (std::size_t i = 0; i < order.size(); ++i) {
    const double v = order[i]->overall.rrr.value.value_or(0.0);
    const double h = (y0 - y1) * v;
    const double x = x0 + slot * i + slot * 0.15;
    s += "<rect x=\"" + fmt("%.1f", x) + "\" y=\"" + fmt("%.1f", y0 - h) + "\" width=\"" + fmt("%.1f", slot * 0.7) +
         "\" height=\"" + fmt("%.1f", h) + "\" fill=\"#4c72b0\"/>\n";
    s += "<text x=\"" + fmt("%.1f", x + slot * 0.35) + "\" y=\"" + fmt("%.1f", y0 - h - 4) +
         "\" text-anchor=\"middle\">" + pct(order[i]->overall.rrr) + "</text>\n";
    s += "<text x=\"" + fmt("%.1f", x + slot * 0.35) + "\" y=\"" + fmt("%.1f", y0 + 32) +
         "\" text-anchor=\"middle\" font-size=\"10\">" + xml_escape(label(*order[i])) + "</text>\n";
  }
  return s + "</svg>\n";
}

std::string svg_rr_vs_p2pass(const std::vector<MetricsReport>& reports) {
  std::string s = svg_open("Recovery vs. Phase 2 pass rate (size = RRR)");
  s += axes("RR (%)", "P2Pass (%)", 1.0, 1.0, true);
  const double x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;
  for (const MetricsReport& r : reports) {
    const double rr = r.overall.rr.value.value_or(0.0);
    const double p2 = r.overall.p2pass.value.value_or(0.0);
    const double rrr = r.overall.rrr.value.value_or(0.0);
    const double cx = x0 + (x1 - x0) * rr, cy = y0 - (y0 - y1) * p2;
    const double radius = 4.0 + 22.0 * std::sqrt(rrr);
    s += "<circle cx=\"" + fmt("%.1f", cx) + "\" cy=\"" + fmt("%.1f", cy) + "\" r=\"" + fmt("%.1f", radius) +
         "\" fill=\"#dd8452\" fill-opacity=\"0.6\" stroke=\"#8c4a1c\"/>\n";
    s += "<text x=\"" + fmt("%.1f", cx + radius + 3) + "\" y=\"" + fmt("%.1f", cy + 4) + "\" font-size=\"10\">" +
         xml_escape(label(r)) + "</text>\n";
  }
  return s + "</svg>\n";
}

std::string svg_steps_vs_tokens(const std::vector<MetricsReport>& reports) {
  double tmax = 0, smax = 0;
  for (const MetricsReport& r : reports) {
    tmax = std::max(tmax, r.overall.mean_tokens);
    smax = std::max(smax, r.overall.mean_steps);
  }
  tmax = nice_max(tmax);
  smax = nice_max(smax);
  std::string s = svg_open("Mean steps vs. mean tokens per episode");
  s += axes("Mean tokens", "Mean steps", tmax, smax, false);
  const double x0 = kLeft, x1 = kW - kRight, y0 = kH - kBottom, y1 = kTop;
  for (const MetricsReport& r : reports) {
    const double cx = x0 + (x1 - x0) * r.overall.mean_tokens / tmax;
    const double cy = y0 - (y0 - y1) * r.overall.mean_steps / smax;
    s += "<circle cx=\"" + fmt("%.1f", cx) + "\" cy=\"" + fmt("%.1f", cy) + "\" r=\"5\" fill=\"#55a868\"/>\n";
    s += "<text x=\"" + fmt("%.1f", cx + 8) + "\" y=\"" + fmt("%.1f", cy + 4) + "\" font-size=\"10\">" +
         xml_escape(label(r)) + "</text>\n";
  }
  return s + "</svg>\n";
}

std::vector<std::string> write_report(const std::vector<MetricsReport>& reports, const std::set<ReportFormat>& formats,
                                      const std::string& dir) {
  namespace fs = std::filesystem;
  fs::create_directories(dir);
  std::vector<std::string> written;
  auto put = [&](const std::string& name, const std::string& body) {
    const fs::path p = fs::path(dir) / name;
    std::ofstream out(p, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + p.string());
    out << body;
    written.push_back(p.string());
  };
  if (formats.count(ReportFormat::kMarkdown)) put("report.md", markdown_report(reports));
  if (formats.count(ReportFormat::kCsv)) put("report.csv", csv_report(reports));
  if (formats.count(ReportFormat::kPlots)) {
    put("rrr_bars.svg", svg_rrr_bars(reports));
    put("rr_vs_p2pass.svg", svg_rr_vs_p2pass(reports));
    put("steps_vs_tokens.svg", svg_steps_vs_tokens(reports));
  }
  return written;
}

}  // namespace screpair
