#include "screpair/lp_text.hpp"

#include <charconv>
#include <cmath>
#include <sstream>

#include "screpair/error.hpp"

namespace screpair {

namespace {

constexpr std::string_view kHeader = "# screpair-lp 1";

std::string_view trim(std::string_view s) {
  while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r')) s.remove_prefix(1);
  while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r')) s.remove_suffix(1);
  return s;
}

void append_terms(std::string& out, const LpModel& model, const std::vector<Term>& terms) {
  if (terms.empty()) {
    out += '0';
    return;
  }
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) out += " + ";
    out += format_number(terms[i].coef);
    out += '*';
    out += model.variable(terms[i].var).name;
  }
}

std::vector<std::pair<std::string, double>> parse_terms(std::string_view expr, int line_no) {
  std::vector<std::pair<std::string, double>> terms;
  expr = trim(expr);
  if (expr == "0") return terms;
  while (!expr.empty()) {
    std::size_t plus = expr.find(" + ");
    std::string_view token = trim(expr.substr(0, plus));
    expr = plus == std::string_view::npos ? std::string_view{} : expr.substr(plus + 3);
    std::size_t star = token.find('*');
    if (star == std::string_view::npos)
      throw FormatError("line " + std::to_string(line_no) + ": malformed term '" + std::string(token) + "'");
    terms.emplace_back(std::string(trim(token.substr(star + 1))), parse_number(trim(token.substr(0, star))));
  }
  return terms;
}

}  // namespace

std::string format_number(double value) {
  if (std::isinf(value)) return value > 0 ? "inf" : "-inf";
  if (value == 0.0) return "0";
  char buf[64];
  auto [ptr, ec] = std::to_chars(buf, buf + sizeof(buf), value);
  if (ec != std::errc{}) throw FormatError("cannot format number");
  return std::string(buf, ptr);
}

double parse_number(std::string_view text) {
  text = trim(text);
  if (text == "inf" || text == "+inf") return kInfinity;
  if (text == "-inf") return -kInfinity;
  double value = 0.0;
  if (!text.empty() && text.front() == '+') text.remove_prefix(1);
  auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
  if (ec != std::errc{} || ptr != text.data() + text.size())
    throw FormatError("not a number: '" + std::string(text) + "'");
  return value;
}

std::string write_lp_text(const LpModel& model) {
  std::string out(kHeader);
  out += '\n';
  for (const Variable& v : model.variables()) {
    out += "var ";
    out += v.name;
    out += ' ';
    out += format_number(v.lower);
    out += ' ';
    out += format_number(v.upper);
    out += '\n';
  }
  out += "minimize: ";
  std::vector<Term> objective;
  for (int j = 0; j < model.num_variables(); ++j)
    if (model.variable(j).objective != 0.0) objective.push_back({j, model.variable(j).objective});
  append_terms(out, model, objective);
  out += '\n';
  for (const Constraint& c : model.constraints()) {
    out += c.name;
    out += ": ";
    append_terms(out, model, c.terms);
    out += ' ';
    out += sense_symbol(c.sense);
    out += ' ';
    out += format_number(c.rhs);
    out += '\n';
  }
  return out;
}

LpModel read_lp_text(std::string_view text) {
  LpModel model;
  std::istringstream in{std::string(text)};
  std::string raw;
  int line_no = 0;
  bool saw_header = false;
  while (std::getline(in, raw)) {
    ++line_no;
    std::string_view line = trim(raw);
    if (line.empty()) continue;
    if (line.front() == '#') {
      if (line == kHeader) saw_header = true;
      continue;
    }
    if (line.starts_with("var ")) {
      std::istringstream fields{std::string(line.substr(4))};
      std::string name, lo, hi;
      if (!(fields >> name >> lo >> hi))
        throw FormatError("line " + std::to_string(line_no) + ": malformed variable");
      model.add_variable(name, parse_number(lo), parse_number(hi));
      continue;
    }
    if (line.starts_with("minimize:")) {
      for (const auto& [var, coef] : parse_terms(line.substr(9), line_no))
        model.set_objective(model.variable_index(var), coef);
      continue;
    }
    std::size_t colon = line.find(": ");
    if (colon == std::string_view::npos)
      throw FormatError("line " + std::to_string(line_no) + ": expected '<name>: ...'");
    std::string name(line.substr(0, colon));
    std::string_view body = line.substr(colon + 2);
    Sense sense{};
    std::size_t at = std::string_view::npos;
    std::size_t width = 0;
    if ((at = body.rfind(" <= ")) != std::string_view::npos) {
      sense = Sense::kLessEqual;
      width = 4;
    } else if ((at = body.rfind(" >= ")) != std::string_view::npos) {
      sense = Sense::kGreaterEqual;
      width = 4;
    } else if ((at = body.rfind(" = ")) != std::string_view::npos) {
      sense = Sense::kEqual;
      width = 3;
    } else {
      throw FormatError("line " + std::to_string(line_no) + ": missing relation");
    }
    std::vector<Term> terms;
    for (const auto& [var, coef] : parse_terms(body.substr(0, at), line_no))
      terms.push_back({model.variable_index(var), coef});
    model.add_constraint(std::move(name), std::move(terms), sense, parse_number(body.substr(at + width)));
  }
  if (!saw_header) throw FormatError("missing '# screpair-lp 1' header");
  return model;
}

}  // namespace screpair
