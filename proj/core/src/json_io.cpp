#include "json_io.hpp"

#include <cmath>
#include <limits>

#include "screpair/error.hpp"
#include "screpair/lp_text.hpp"

namespace screpair::jsonio {

json number(double v) {
  if (std::isfinite(v)) return v;
  return format_number(v);
}

double number(const json& j, std::string_view field) {
  if (j.is_number()) return j.get<double>();
  if (j.is_string()) {
    try {
      return parse_number(j.get<std::string>());
    } catch (const Error&) {
    }
  }
  throw FormatError(std::string(field) + ": expected a number");
}

const json& at(const json& j, std::string_view key) {
  if (!j.is_object()) throw FormatError("expected an object holding '" + std::string(key) + "'");
  auto it = j.find(key);
  if (it == j.end()) throw FormatError("missing field '" + std::string(key) + "'");
  return *it;
}

std::string string_at(const json& j, std::string_view key) {
  const json& v = at(j, key);
  if (!v.is_string()) throw FormatError(std::string(key) + ": expected a string");
  return v.get<std::string>();
}

double number_at(const json& j, std::string_view key) { return number(at(j, key), key); }

long long integer_at(const json& j, std::string_view key) {
  const json& v = at(j, key);
  if (!v.is_number_integer()) throw FormatError(std::string(key) + ": expected an integer");
  return v.get<long long>();
}

bool bool_at(const json& j, std::string_view key) {
  const json& v = at(j, key);
  if (!v.is_boolean()) throw FormatError(std::string(key) + ": expected a boolean");
  return v.get<bool>();
}

namespace {

std::vector<std::string> strings_at(const json& j, std::string_view key) {
  const json& v = at(j, key);
  if (!v.is_array()) throw FormatError(std::string(key) + ": expected an array");
  std::vector<std::string> out;
  for (const json& e : v) {
    if (!e.is_string()) throw FormatError(std::string(key) + ": expected strings");
    out.push_back(e.get<std::string>());
  }
  return out;
}

std::vector<double> numbers_at(const json& j, std::string_view key) {
  const json& v = at(j, key);
  if (!v.is_array()) throw FormatError(std::string(key) + ": expected an array");
  std::vector<double> out;
  for (const json& e : v) out.push_back(number(e, key));
  return out;
}

json numbers(const std::vector<double>& v) {
  json a = json::array();
  for (double x : v) a.push_back(number(x));
  return a;
}

}  // namespace

SolveStatus parse_status(std::string_view name) {
  for (SolveStatus s : {SolveStatus::kOptimal, SolveStatus::kInfeasible, SolveStatus::kUnbounded})
    if (status_name(s) == name) return s;
  throw FormatError("unknown solver status '" + std::string(name) + "'");
}

Phase parse_phase(std::string_view name) {
  for (Phase p : {Phase::kDebug, Phase::kValidate})
    if (phase_name(p) == name) return p;
  throw FormatError("unknown phase '" + std::string(name) + "'");
}

CheckId parse_check(std::string_view name) {
  for (CheckId id : kAllChecks)
    if (check_name(id) == name) return id;
  throw FormatError("unknown check '" + std::string(name) + "'");
}

CheckStatus parse_check_status(std::string_view name) {
  for (CheckStatus s : {CheckStatus::kPass, CheckStatus::kFail, CheckStatus::kNotApplicable,
                        CheckStatus::kSkippedDegenerate})
    if (check_status_name(s) == name) return s;
  throw FormatError("unknown check status '" + std::string(name) + "'");
}

Sense parse_sense(std::string_view symbol) {
  for (Sense s : {Sense::kLessEqual, Sense::kGreaterEqual, Sense::kEqual})
    if (sense_symbol(s) == symbol) return s;
  throw FormatError("unknown constraint sense '" + std::string(symbol) + "'");
}

json to_json(const Action& a) {
  return {{"kind", action_kind_name(a.kind)}, {"target", a.target}, {"values", numbers(a.values)}};
}

Action action_from_json(const json& j) {
  Action a;
  const std::string kind = string_at(j, "kind");
  auto k = find_action_kind(kind);
  if (!k) throw FormatError("unknown action kind '" + kind + "'");
  a.kind = *k;
  a.target = string_at(j, "target");
  a.values = numbers_at(j, "values");
  return a;
}

json to_json(const IisCertificate& c) {
  json bounds = json::array();
  for (const BoundMember& b : c.bounds)
    bounds.push_back({{"variable", b.variable},
                      {"side", b.side == BoundSide::kLower ? "lower" : "upper"},
                      {"value", number(b.value)}});
  return {{"constraints", c.constraints}, {"bounds", bounds}};
}

IisCertificate iis_from_json(const json& j) {
  IisCertificate c;
  c.constraints = strings_at(j, "constraints");
  const json& bounds = at(j, "bounds");
  if (!bounds.is_array()) throw FormatError("bounds: expected an array");
  for (const json& b : bounds) {
    BoundMember m;
    m.variable = string_at(b, "variable");
    const std::string side = string_at(b, "side");
    if (side != "lower" && side != "upper") throw FormatError("bounds.side: expected lower or upper");
    m.side = side == "lower" ? BoundSide::kLower : BoundSide::kUpper;
    m.value = number_at(b, "value");
    c.bounds.push_back(std::move(m));
  }
  return c;
}

json to_json(const TranscriptEntry& e) {
  json j = {{"step", e.step},
            {"action_text", e.action_text},
            {"action", e.action ? to_json(*e.action) : json(nullptr)},
            {"error", e.error},
            {"constraint_targets", e.constraint_targets},
            {"variable_targets", e.variable_targets},
            {"outcome", e.outcome},
            {"status_after", status_name(e.status_after)},
            {"phase_after", phase_name(e.phase_after)},
            {"loop_after", e.loop_after},
            {"reasoning", e.reasoning},
            {"tokens_used", e.tokens_used ? json(*e.tokens_used) : json(nullptr)}};
  return j;
}

TranscriptEntry transcript_from_json(const json& j) {
  TranscriptEntry e;
  e.step = static_cast<int>(integer_at(j, "step"));
  e.action_text = string_at(j, "action_text");
  if (!at(j, "action").is_null()) e.action = action_from_json(at(j, "action"));
  e.error = bool_at(j, "error");
  e.constraint_targets = strings_at(j, "constraint_targets");
  e.variable_targets = strings_at(j, "variable_targets");
  e.outcome = string_at(j, "outcome");
  e.status_after = parse_status(string_at(j, "status_after"));
  e.phase_after = parse_phase(string_at(j, "phase_after"));
  e.loop_after = static_cast<int>(integer_at(j, "loop_after"));
  e.reasoning = string_at(j, "reasoning");
  if (!at(j, "tokens_used").is_null()) e.tokens_used = integer_at(j, "tokens_used");
  return e;
}

json to_json(const RationalityVerdict& v) {
  json checks = json::array();
  for (const CheckResult& c : v.checks) {
    json ech = json::array();
    for (const EchelonStat& s : c.echelons)
      ech.push_back({{"echelon", s.echelon}, {"value", number(s.value)}, {"status", check_status_name(s.status)}});
    json mm = json::array();
    for (const CostMismatch& m : c.mismatches)
      mm.push_back({{"prefix", m.prefix}, {"model_value", number(m.model_value)}, {"configured", number(m.configured)}});
    checks.push_back({{"name", check_name(c.id)},
                      {"status", check_status_name(c.status)},
                      {"statistic", number(c.statistic)},
                      {"detail", c.detail},
                      {"echelons", ech},
                      {"mismatches", mm},
                      {"monotonicity_violated", c.monotonicity_violated}});
  }
  return {{"pass", v.pass}, {"feedback", v.feedback}, {"checks", checks}};
}

RationalityVerdict verdict_from_json(const json& j) {
  RationalityVerdict v;
  v.pass = bool_at(j, "pass");
  v.feedback = string_at(j, "feedback");
  const json& checks = at(j, "checks");
  if (!checks.is_array() || checks.size() != kAllChecks.size()) throw FormatError("checks: expected five entries");
  for (const json& cj : checks) {
    CheckResult c;
    c.id = parse_check(string_at(cj, "name"));
    c.status = parse_check_status(string_at(cj, "status"));
    c.statistic = number_at(cj, "statistic");
    c.detail = string_at(cj, "detail");
    for (const json& s : at(cj, "echelons"))
      c.echelons.push_back({static_cast<int>(integer_at(s, "echelon")), number_at(s, "value"),
                            parse_check_status(string_at(s, "status"))});
    for (const json& m : at(cj, "mismatches"))
      c.mismatches.push_back({string_at(m, "prefix"), number_at(m, "model_value"), number_at(m, "configured")});
    c.monotonicity_violated = bool_at(cj, "monotonicity_violated");
    v.checks[static_cast<std::size_t>(c.id)] = std::move(c);
  }
  return v;
}

json to_json(const ScInstance& s) {
  json lead = json::array();
  for (int l : s.lead_time) lead.push_back(l);
  return {{"n_echelons", s.n_echelons},
          {"n_periods", s.n_periods},
          {"holding_cost", numbers(s.holding_cost)},
          {"backorder_cost", numbers(s.backorder_cost)},
          {"capacity", numbers(s.capacity)},
          {"lead_time", lead},
          {"demand", numbers(s.demand)},
          {"initial_inventory", numbers(s.initial_inventory)},
          {"demand_pattern",
           {{"kind", demand_kind_name(s.demand_pattern.kind)},
            {"mean", number(s.demand_pattern.mean)},
            {"change_period", s.demand_pattern.change_period},
            {"second_mean", number(s.demand_pattern.second_mean)},
            {"amplitude", number(s.demand_pattern.amplitude)}}}};
}

ScInstance instance_from_json(const json& j) {
  ScInstance s;
  s.n_echelons = static_cast<int>(integer_at(j, "n_echelons"));
  s.n_periods = static_cast<int>(integer_at(j, "n_periods"));
  s.holding_cost = numbers_at(j, "holding_cost");
  s.backorder_cost = numbers_at(j, "backorder_cost");
  s.capacity = numbers_at(j, "capacity");
  for (const json& l : at(j, "lead_time")) {
    if (!l.is_number_integer()) throw FormatError("lead_time: expected integers");
    s.lead_time.push_back(l.get<int>());
  }
  s.demand = numbers_at(j, "demand");
  s.initial_inventory = numbers_at(j, "initial_inventory");
  const json& p = at(j, "demand_pattern");
  try {
    s.demand_pattern.kind = parse_demand_kind(string_at(p, "kind"));
  } catch (const InvalidInput& e) {
    throw FormatError(e.what());
  }
  s.demand_pattern.mean = number_at(p, "mean");
  s.demand_pattern.change_period = static_cast<int>(integer_at(p, "change_period"));
  s.demand_pattern.second_mean = number_at(p, "second_mean");
  s.demand_pattern.amplitude = number_at(p, "amplitude");
  return s;
}

json to_json(const ModelEdit& e) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, edit::SetRhs>) {
          return {{"op", "set_rhs"}, {"row", x.row}, {"value", number(x.value)}};
        } else if constexpr (std::is_same_v<T, edit::SetCoefficient>) {
          return {{"op", "set_coefficient"}, {"row", x.row}, {"var", x.var}, {"value", number(x.value)}};
        } else if constexpr (std::is_same_v<T, edit::SetObjective>) {
          return {{"op", "set_objective"}, {"var", x.var}, {"value", number(x.value)}};
        } else if constexpr (std::is_same_v<T, edit::SetBounds>) {
          return {{"op", "set_bounds"}, {"var", x.var}, {"lower", number(x.lower)}, {"upper", number(x.upper)}};
        } else if constexpr (std::is_same_v<T, edit::AddVariable>) {
          return {{"op", "add_variable"},
                  {"name", x.name},
                  {"lower", number(x.lower)},
                  {"upper", number(x.upper)},
                  {"objective", number(x.objective)}};
        } else {
          json terms = json::array();
          for (const auto& [var, coef] : x.terms) terms.push_back({{"var", var}, {"coef", number(coef)}});
          return {{"op", "add_constraint"},
                  {"name", x.name},
                  {"terms", terms},
                  {"sense", sense_symbol(x.sense)},
                  {"rhs", number(x.rhs)}};
        }
      },
      e);
}

ModelEdit edit_from_json(const json& j) {
  const std::string op = string_at(j, "op");
  if (op == "set_rhs") return edit::SetRhs{string_at(j, "row"), number_at(j, "value")};
  if (op == "set_coefficient")
    return edit::SetCoefficient{string_at(j, "row"), string_at(j, "var"), number_at(j, "value")};
  if (op == "set_objective") return edit::SetObjective{string_at(j, "var"), number_at(j, "value")};
  if (op == "set_bounds") return edit::SetBounds{string_at(j, "var"), number_at(j, "lower"), number_at(j, "upper")};
  if (op == "add_variable")
    return edit::AddVariable{string_at(j, "name"), number_at(j, "lower"), number_at(j, "upper"),
                             number_at(j, "objective")};
  if (op == "add_constraint") {
    edit::AddConstraint c;
    c.name = string_at(j, "name");
    for (const json& t : at(j, "terms")) c.terms.emplace_back(string_at(t, "var"), number_at(t, "coef"));
    c.sense = parse_sense(string_at(j, "sense"));
    c.rhs = number_at(j, "rhs");
    return c;
  }
  throw FormatError("unknown edit op '" + op + "'");
}

json to_json(const EpisodeResult& r) {
  json transcript = json::array();
  for (const TranscriptEntry& e : r.transcript) transcript.push_back(to_json(e));
  const CompositeScore& c = r.composite;
  return {{"episode_id", r.episode_id},
          {"error_type", error_type_name(r.error_type)},
          {"final_status", status_name(r.final_status)},
          {"rational", r.rational},
          {"reward", {{"outcome", r.reward.outcome}, {"rationality", r.reward.rationality}, {"total", r.reward.total}}},
          {"composite",
           {{"r_outcome", number(c.r_outcome)},
            {"diagnosis_accuracy", number(c.diagnosis_accuracy)},
            {"r_diagnosis", number(c.r_diagnosis)},
            {"r_efficiency", number(c.r_efficiency)},
            {"repair_steps", c.repair_steps},
            {"faithfulness_penalty", c.faithfulness_penalty},
            {"composite", number(c.composite)}}},
          {"steps_used", r.steps_used},
          {"loops_used", r.loops_used},
          {"token_count", r.token_count},
          {"tokens_estimated", r.tokens_estimated},
          {"termination", r.termination},
          {"error_tag", r.error_tag},
          {"transcript", transcript}};
}

EpisodeResult result_from_json(const json& j) {
  EpisodeResult r;
  r.episode_id = string_at(j, "episode_id");
  try {
    r.error_type = parse_error_type(string_at(j, "error_type"));
  } catch (const InvalidInput& e) {
    throw FormatError(e.what());
  }
  r.final_status = parse_status(string_at(j, "final_status"));
  r.rational = bool_at(j, "rational");
  const json& rw = at(j, "reward");
  r.reward.outcome = static_cast<int>(integer_at(rw, "outcome"));
  r.reward.rationality = static_cast<int>(integer_at(rw, "rationality"));
  r.reward.total = static_cast<int>(integer_at(rw, "total"));
  const json& c = at(j, "composite");
  r.composite.r_outcome = number_at(c, "r_outcome");
  r.composite.diagnosis_accuracy = number_at(c, "diagnosis_accuracy");
  r.composite.r_diagnosis = number_at(c, "r_diagnosis");
  r.composite.r_efficiency = number_at(c, "r_efficiency");
  r.composite.repair_steps = static_cast<int>(integer_at(c, "repair_steps"));
  r.composite.faithfulness_penalty = bool_at(c, "faithfulness_penalty");
  r.composite.composite = number_at(c, "composite");
  r.steps_used = static_cast<int>(integer_at(j, "steps_used"));
  r.loops_used = static_cast<int>(integer_at(j, "loops_used"));
  r.token_count = integer_at(j, "token_count");
  r.tokens_estimated = bool_at(j, "tokens_estimated");
  r.termination = string_at(j, "termination");
  r.error_tag = string_at(j, "error_tag");
  for (const json& e : at(j, "transcript")) r.transcript.push_back(transcript_from_json(e));
  return r;
}

json parse(std::string_view text) {
  try {
    return json::parse(text);
  } catch (const json::exception& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}

}  // namespace screpair::jsonio
