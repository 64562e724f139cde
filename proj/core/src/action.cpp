#include "screpair/action.hpp"

#include <array>
#include <cctype>
#include <cmath>
#include <utility>

#include <json.hpp>

#include "screpair/error.hpp"
#include "screpair/lp_model.hpp"
#include "screpair/lp_text.hpp"

namespace screpair {

namespace {

constexpr std::array<std::pair<ActionKind, std::string_view>, 8> kKindNames{{
    {ActionKind::kGetIis, "GET_IIS"},
    {ActionKind::kCheckSlack, "CHECK_SLACK"},
    {ActionKind::kRelaxConstraint, "RELAX_CONSTRAINT"},
    {ActionKind::kDropConstraint, "DROP_CONSTRAINT"},
    {ActionKind::kUpdateObj, "UPDATE_OBJ"},
    {ActionKind::kUpdateBounds, "UPDATE_BOUNDS"},
    {ActionKind::kUpdateRhs, "UPDATE_RHS"},
    {ActionKind::kSubmit, "SUBMIT"},
}};

bool needs_target(ActionKind k) { return k != ActionKind::kGetIis && k != ActionKind::kSubmit; }

std::size_t value_count(ActionKind k) {
  switch (k) {
    case ActionKind::kRelaxConstraint:
    case ActionKind::kUpdateObj:
    case ActionKind::kUpdateRhs:
      return 1;
    case ActionKind::kUpdateBounds:
      return 2;
    default:
      return 0;
  }
}

std::string_view trim(std::string_view s) {
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.front()))) s.remove_prefix(1);
  while (!s.empty() && std::isspace(static_cast<unsigned char>(s.back()))) s.remove_suffix(1);
  return s;
}

std::string_view unquote(std::string_view s) {
  s = trim(s);
  if (s.size() >= 2 && (s.front() == '"' || s.front() == '\'') && s.back() == s.front())
    return s.substr(1, s.size() - 2);
  return s;
}

ActionKind kind_or_throw(std::string_view name) {
  std::string upper;
  for (char c : trim(name)) upper += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (auto k = find_action_kind(upper)) return *k;
  throw FormatError("unknown action '" + std::string(name) + "'");
}

double number_or_throw(std::string_view text) {
  try {
    return parse_number(trim(text));
  } catch (const Error&) {
    throw FormatError("expected a number, got '" + std::string(text) + "'");
  }
}

// Splits on commas outside quotes.
std::vector<std::string_view> split_args(std::string_view s) {
  std::vector<std::string_view> out;
  if (trim(s).empty()) return out;
  char quote = 0;
  std::size_t start = 0;
  for (std::size_t i = 0; i < s.size(); ++i) {
    const char c = s[i];
    if (quote) {
      if (c == quote) quote = 0;
    } else if (c == '"' || c == '\'') {
      quote = c;
    } else if (c == ',') {
      out.push_back(s.substr(start, i - start));
      start = i + 1;
    }
  }
  if (quote) throw FormatError("unterminated quote in action arguments");
  out.push_back(s.substr(start));
  return out;
}

Action parse_call(std::string_view call) {
  call = trim(call);
  // Trailing punctuation from prose ("...(x, 1.0).") is tolerated.
  while (!call.empty() && (call.back() == '.' || call.back() == '`')) call.remove_suffix(1);
  while (!call.empty() && call.front() == '`') call.remove_prefix(1);
  call = trim(call);
  const auto open = call.find('(');
  Action a;
  if (open == std::string_view::npos) {
    a.kind = kind_or_throw(call);
  } else {
    const auto close = call.rfind(')');
    if (close == std::string_view::npos || close < open) throw FormatError("missing ')' in action");
    if (!trim(call.substr(close + 1)).empty()) throw FormatError("unexpected text after action call");
    a.kind = kind_or_throw(call.substr(0, open));
    auto args = split_args(call.substr(open + 1, close - open - 1));
    std::size_t i = 0;
    if (needs_target(a.kind)) {
      if (args.empty()) throw FormatError(std::string(action_kind_name(a.kind)) + " needs a target");
      a.target = std::string(unquote(args[0]));
      i = 1;
    }
    for (; i < args.size(); ++i) a.values.push_back(number_or_throw(unquote(args[i])));
  }
  validate_action(a);
  return a;
}

double json_number(const nlohmann::json& v, const char* field) {
  if (v.is_number()) return v.get<double>();
  if (v.is_string()) return number_or_throw(v.get<std::string>());
  throw FormatError(std::string("field '") + field + "' must be a number");
}

}  // namespace

std::string_view action_kind_name(ActionKind kind) {
  for (const auto& [k, n] : kKindNames)
    if (k == kind) return n;
  return "?";
}

std::optional<ActionKind> find_action_kind(std::string_view name) {
  for (const auto& [k, n] : kKindNames)
    if (n == name) return k;
  return std::nullopt;
}

ActionCategory action_category(ActionKind kind) {
  switch (kind) {
    case ActionKind::kGetIis:
    case ActionKind::kCheckSlack:
      return ActionCategory::kDiagnostic;
    case ActionKind::kSubmit:
      return ActionCategory::kMeta;
    default:
      return ActionCategory::kRepair;
  }
}

void validate_action(const Action& a) {
  const std::string kind(action_kind_name(a.kind));
  if (needs_target(a.kind) && a.target.empty()) throw FormatError(kind + " needs a target");
  if (!needs_target(a.kind) && !a.target.empty()) throw FormatError(kind + " takes no target");
  if (a.values.size() != value_count(a.kind))
    throw FormatError(kind + " takes " + std::to_string(value_count(a.kind)) + " value(s), got " +
                      std::to_string(a.values.size()));
  for (double v : a.values)
    if (std::isnan(v)) throw FormatError(kind + ": value is NaN");
  switch (a.kind) {
    case ActionKind::kRelaxConstraint:
      if (!std::isfinite(a.values[0]) || a.values[0] < 0.0)
        throw FormatError("RELAX_CONSTRAINT amount must be finite and non-negative");
      break;
    case ActionKind::kUpdateObj:
    case ActionKind::kUpdateRhs:
      if (!std::isfinite(a.values[0])) throw FormatError(kind + " value must be finite");
      break;
    case ActionKind::kUpdateBounds:
      if (a.values[0] > a.values[1]) throw FormatError("UPDATE_BOUNDS requires lb <= ub");
      if (a.values[0] == kInfinity || a.values[1] == -kInfinity)
        throw FormatError("UPDATE_BOUNDS bounds are inverted at infinity");
      break;
    default:
      break;
  }
}

std::string format_action(const Action& a) {
  std::string s(action_kind_name(a.kind));
  s += '(';
  bool first = true;
  if (!a.target.empty()) {
    s += a.target;
    first = false;
  }
  for (double v : a.values) {
    if (!first) s += ", ";
    s += format_number(v);
    first = false;
  }
  s += ')';
  return s;
}

ActionMessage parse_action_text(std::string_view text) {
  ActionMessage msg;
  std::string_view line;
  bool found = false;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view l = trim(text.substr(pos, end - pos));
    if (l.rfind("Action:", 0) == 0 || l.rfind("action:", 0) == 0 || l.rfind("ACTION:", 0) == 0) {
      line = l.substr(7);
      found = true;
    }
    pos = end + 1;
  }
  if (!found) {
    // A lone call with nothing else around it.
    std::string_view t = trim(text);
    if (t.empty() || t.find('\n') != std::string_view::npos)
      throw FormatError("no 'Action:' line found in response");
    line = t;
  }
  msg.action = parse_call(line);
  const auto open = text.find("<think>");
  const auto close = text.find("</think>");
  if (open != std::string_view::npos && close != std::string_view::npos && close > open)
    msg.reasoning = std::string(trim(text.substr(open + 7, close - open - 7)));
  return msg;
}

ActionMessage parse_action_json(std::string_view text) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(text);
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("action message must be a JSON object");
  if (!j.contains("action") || !j["action"].is_string()) throw FormatError("missing string field 'action'");
  ActionMessage msg;
  try {
    Action& a = msg.action;
    a.kind = kind_or_throw(j["action"].get<std::string>());
    if (j.contains("target") && !j["target"].is_null()) {
      if (!j["target"].is_string()) throw FormatError("field 'target' must be a string");
      a.target = j["target"].get<std::string>();
    }
    if (j.contains("value") && !j["value"].is_null()) {
      const auto& v = j["value"];
      if (v.is_array()) {
        for (const auto& e : v) a.values.push_back(json_number(e, "value"));
      } else {
        a.values.push_back(json_number(v, "value"));
      }
    }
    if (a.kind == ActionKind::kUpdateBounds && a.values.empty() && (j.contains("lb") || j.contains("ub"))) {
      if (!j.contains("lb") || !j.contains("ub")) throw FormatError("UPDATE_BOUNDS needs both 'lb' and 'ub'");
      a.values = {json_number(j["lb"], "lb"), json_number(j["ub"], "ub")};
    }
    validate_action(a);
    if (j.contains("reasoning") && j["reasoning"].is_string()) msg.reasoning = j["reasoning"].get<std::string>();
    if (j.contains("tokens_used") && !j["tokens_used"].is_null()) {
      const auto& t = j["tokens_used"];
      if (!t.is_number_integer() || t.get<long long>() < 0)
        throw FormatError("'tokens_used' must be a non-negative integer");
      msg.tokens_used = t.get<long long>();
    }
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("malformed action message: ") + e.what());
  }
  return msg;
}

ActionMessage parse_agent_response(std::string_view text) {
  const auto open = text.find('{');
  const auto close = text.rfind('}');
  if (open != std::string_view::npos && close != std::string_view::npos && close > open) {
    try {
      return parse_action_json(text.substr(open, close - open + 1));
    } catch (const FormatError&) {
      // Fall through: braces may belong to prose around an "Action:" line.
      if (text.find("Action:") == std::string_view::npos) throw;
    }
  }
  return parse_action_text(text);
}

std::string action_to_json(const Action& a, std::string_view reasoning, std::optional<long long> tokens_used) {
  nlohmann::json j;
  j["protocol"] = 1;
  j["type"] = "action";
  j["action"] = std::string(action_kind_name(a.kind));
  j["target"] = a.target.empty() ? nlohmann::json(nullptr) : nlohmann::json(a.target);
  // JSON has no infinity; non-finite values travel as strings.
  auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(format_number(v)); };
  if (a.values.empty()) {
    j["value"] = nullptr;
  } else if (a.values.size() == 1) {
    j["value"] = num(a.values[0]);
  } else {
    j["value"] = nlohmann::json::array();
    for (double v : a.values) j["value"].push_back(num(v));
  }
  if (!reasoning.empty()) j["reasoning"] = std::string(reasoning);
  if (tokens_used) j["tokens_used"] = *tokens_used;
  return j.dump();
}

}  // namespace screpair
