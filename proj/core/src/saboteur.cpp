#include "screpair/saboteur.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <numeric>

#include "screpair/error.hpp"
#include "screpair/lp_text.hpp"
#include "screpair/model_builder.hpp"
#include "screpair/random.hpp"

namespace screpair {

namespace {

struct TypeInfo {
  ErrorType type;
  std::string_view name;
  std::string_view label;
  Difficulty difficulty;
};

constexpr TypeInfo kTypes[] = {
    {ErrorType::kME1, "ME1", "Demand Inflation", Difficulty::kHard},
    {ErrorType::kME2, "ME2", "Lead Time Error", Difficulty::kHard},
    {ErrorType::kME3, "ME3", "Balance Violation", Difficulty::kEasy},
    {ErrorType::kME4, "ME4", "Capacity Reduction", Difficulty::kHard},
    {ErrorType::kME5, "ME5", "Cost Structure Error", Difficulty::kEasy},
    {ErrorType::kME6, "ME6", "Bullwhip Amplification", Difficulty::kMedium},
    {ErrorType::kME7, "ME7", "Coefficient Perturbation", Difficulty::kMedium},
    {ErrorType::kME8, "ME8", "Sign Error", Difficulty::kMedium},
    {ErrorType::kME9, "ME9", "Redundant Constraint", Difficulty::kMedium},
    {ErrorType::kME10, "ME10", "Index Mismatch", Difficulty::kHard},
};

const TypeInfo& info(ErrorType t) { return kTypes[error_type_index(t)]; }

using names::indexed;
using names::echelon_prefix;

}  // namespace

std::string_view error_type_name(ErrorType type) { return info(type).name; }
std::string_view error_type_label(ErrorType type) { return info(type).label; }
Difficulty error_type_difficulty(ErrorType type) { return info(type).difficulty; }

std::string_view difficulty_name(Difficulty d) {
  switch (d) {
    case Difficulty::kEasy: return "easy";
    case Difficulty::kMedium: return "medium";
    case Difficulty::kHard: return "hard";
  }
  return "?";
}

ErrorType parse_error_type(std::string_view text) {
  std::string s;
  for (char c : text)
    if (c != '-' && c != '_' && c != ' ') s += static_cast<char>(std::toupper(static_cast<unsigned char>(c)));
  if (s.rfind("ME", 0) == 0) s = s.substr(2);
  int k = 0;
  if (s.empty() || s.size() > 2 || !std::all_of(s.begin(), s.end(), [](char c) { return c >= '0' && c <= '9'; }))
    throw InvalidInput("error_type", "unknown error type '" + std::string(text) + "'");
  k = std::stoi(s);
  if (k < 1 || k > 10) throw InvalidInput("error_type", "unknown error type '" + std::string(text) + "'");
  return static_cast<ErrorType>(k);
}

Tightening calibrate_tightening(const LpModel& model, const SolveOutcome& baseline, const ScInstance& in) {
  if (!baseline.optimal()) throw ContractViolation("tightening needs an OPTIMAL baseline");
  Tightening t;
  const double dbar = in.mean_demand();
  for (int n = 1; n <= in.n_echelons; ++n) {
    double max_back = 0.0;
    for (int p = 1; p <= in.n_periods; ++p)
      max_back = std::max(max_back, baseline.primal.at(model.variable_index(indexed(names::kBack, n, p))));
    t.backorder_cap.push_back(std::max(kBackorderCapMargin * max_back, kBackorderCapFloor * dbar));
  }
  double max_x = 0.0;
  for (int p = 1; p <= in.n_periods; ++p)
    max_x = std::max(max_x, baseline.primal.at(model.variable_index(indexed(names::kOrder, in.n_echelons, p))));
  t.supply_cap = kSupplyCapMargin * max_x;
  return t;
}

void apply_tightening(LpModel& model, const ScInstance& in, const Tightening& t) {
  if (static_cast<int>(t.backorder_cap.size()) != in.n_echelons)
    throw InvalidInput("tightening.backorder_cap", "needs one cap per echelon");
  for (int n = 1; n <= in.n_echelons; ++n)
    for (int p = 1; p <= in.n_periods; ++p)
      model.add_constraint(indexed(names::kBackorderCap, n, p),
                           {{model.variable_index(indexed(names::kBack, n, p)), 1.0}}, Sense::kLessEqual,
                           t.backorder_cap[n - 1]);
  const int f = in.n_echelons;
  for (int p = 1; p <= in.n_periods; ++p)
    model.add_constraint(indexed(names::kSupplyCap, f, p), {{model.variable_index(indexed(names::kOrder, f, p)), 1.0}},
                         Sense::kLessEqual, t.supply_cap);
}

LpModel tighten(const LpModel& model, const ScInstance& in, const SolveOutcome& baseline, Tightening* calibrated,
                const SolverOptions& options) {
  Tightening t = calibrate_tightening(model, baseline, in);
  LpModel out = model;
  apply_tightening(out, in, t);
  const SolveOutcome check = solve(out, options);
  if (!check.optimal()) throw Error("tightened model lost feasibility; calibration is wrong");
  const double base = *baseline.objective;
  if (std::abs(*check.objective - base) > options.objective_rel_tol * std::max(1.0, std::abs(base)))
    throw Error("tightening changed the optimal objective");
  if (calibrated) *calibrated = std::move(t);
  return out;
}

namespace {

int arrival_period(const ScInstance& in, int n, int p) { return p - in.lead_time[n - 1]; }

std::vector<int> echelons_from(int lo, int hi) {
  std::vector<int> v;
  for (int n = lo; n <= hi; ++n) v.push_back(n);
  return v;
}

}  // namespace

Sabotage inject(const LpModel& tightened, const ScInstance& in, const Tightening& tight, ErrorType type,
                std::uint64_t seed) {
  Rng rng(mix_seed(seed, static_cast<std::uint64_t>(type)));
  const int N = in.n_echelons;
  const int T = in.n_periods;
  const double dbar = in.mean_demand();
  SabotageRecord rec;
  rec.error_type = type;
  std::vector<ModelEdit>& ed = rec.edits;

  auto with_arrivals = [&] {
    std::vector<int> v;
    for (int n = 1; n <= N; ++n)
      if (in.lead_time[n - 1] >= 1 && in.lead_time[n - 1] < T) v.push_back(n);
    return v;
  };

  switch (type) {
    case ErrorType::kME1: {
      const int n = rng.pick(echelons_from(2, N));
      rec.echelon = n;
      rec.multiplier = rng.uniform(3.0, 6.0);
      rec.magnitude = rec.multiplier * dbar;
      const std::string var = "dem_offset_e" + std::to_string(n);
      rec.target = echelon_prefix(names::kDemandProp, n);
      ed.push_back(edit::AddVariable{var, rec.magnitude, rec.magnitude, 0.0});
      for (int p = 1; p <= T; ++p) ed.push_back(edit::SetCoefficient{indexed(names::kDemandProp, n, p), var, -1.0});
      rec.description = "demand seen by echelon " + std::to_string(n) + " inflated by a fixed offset of " +
                        format_number(rec.magnitude) + " units per period";
      rec.ground_truth_fix = {Action::update_bounds(var, 0.0, 0.0)};
      break;
    }
    case ErrorType::kME2: {
      const std::vector<int> cands = with_arrivals();
      if (cands.empty()) throw ContractViolation("ME2 needs an echelon with a positive lead time");
      const int n = rng.pick(cands);
      rec.echelon = n;
      rec.target = echelon_prefix(names::kInvBalance, n);
      for (int p = 1; p <= T; ++p) {
        const int a = arrival_period(in, n, p);
        if (a >= 1) ed.push_back(edit::SetCoefficient{indexed(names::kInvBalance, n, p), indexed(names::kOrder, n, a), 0.0});
      }
      rec.description = "arrival term removed from every inventory balance row of echelon " + std::to_string(n);
      rec.ground_truth_fix = {Action::drop(echelon_prefix(names::kBackorderCap, n))};
      break;
    }
    case ErrorType::kME3: {
      const int n = rng.uniform_int(1, N);
      rec.echelon = n;
      rec.period = 1;
      const std::string row = indexed(names::kInvBalance, n, 1);
      rec.target = row;
      const double total_init = std::accumulate(in.initial_inventory.begin(), in.initial_inventory.end(), 0.0);
      double push = 6.0 * dbar + total_init + tight.backorder_cap[n - 1];
      if (in.lead_time[n - 1] == 0) push += in.capacity[n - 1];
      rec.original = tightened.constraint(tightened.constraint_index(row)).rhs;
      rec.magnitude = -push;
      rec.multiplier = push / dbar;
      ed.push_back(edit::SetRhs{row, rec.magnitude});
      rec.description = "net inventory of echelon " + std::to_string(n) + " in period 1 forced to " +
                        format_number(rec.magnitude);
      rec.ground_truth_fix = {Action::update_rhs(row, rec.original)};
      break;
    }
    case ErrorType::kME4: {
      rec.echelon = 1;
      rec.multiplier = rng.uniform(0.02, 0.1);
      rec.magnitude = rec.multiplier * dbar;
      rec.original = in.capacity[0];
      rec.target = echelon_prefix(names::kCapacity, 1);
      for (int p = 1; p <= T; ++p) ed.push_back(edit::SetRhs{indexed(names::kCapacity, 1, p), rec.magnitude});
      rec.description = "retailer capacity cut to " + format_number(rec.magnitude) + " units per period";
      rec.ground_truth_fix = {Action::relax(rec.target, rec.original - rec.magnitude)};
      break;
    }
    case ErrorType::kME5: {
      const int n = rng.pick(echelons_from(2, N));
      rec.echelon = n;
      rec.multiplier = rng.uniform(1.5, 3.0);
      rec.magnitude = rec.multiplier * in.holding_cost[n - 2];
      rec.original = in.holding_cost[n - 1];
      rec.target = echelon_prefix(names::kHold, n);
      for (int p = 1; p <= T; ++p) ed.push_back(edit::SetObjective{indexed(names::kHold, n, p), rec.magnitude});
      rec.description = "holding cost of echelon " + std::to_string(n) + " inflated to " +
                        format_number(rec.magnitude) + " (" + format_number(rec.multiplier) + "x echelon " +
                        std::to_string(n - 1) + ")";
      rec.ground_truth_fix = {Action::update_obj(rec.target, rec.original)};
      break;
    }
    case ErrorType::kME6: {
      const int n = rng.pick(echelons_from(2, N));
      rec.echelon = n;
      rec.multiplier = rng.uniform(1.1, 1.5);
      const double headroom = std::max(in.capacity[n - 1] - dbar, 0.1 * dbar);
      rec.magnitude = rec.multiplier * headroom;
      rec.target = echelon_prefix(names::kBullwhipForce, n);
      for (int p = 2; p <= T; ++p)
        ed.push_back(edit::AddConstraint{indexed(names::kBullwhipForce, n, p),
                                         {{indexed(names::kOrder, n, p), 1.0}, {indexed(names::kOrder, n - 1, p - 1), -1.0}},
                                         Sense::kGreaterEqual,
                                         rec.magnitude});
      rec.description = "orders at echelon " + std::to_string(n) + " forced above the downstream order by " +
                        format_number(rec.magnitude);
      rec.ground_truth_fix = {Action::drop(rec.target)};
      break;
    }
    case ErrorType::kME7: {
      const std::vector<int> cands = with_arrivals();
      if (cands.empty()) throw ContractViolation("ME7 needs an echelon with a positive lead time");
      const int n = rng.pick(cands);
      rec.echelon = n;
      rec.multiplier = rng.uniform(0.05, 0.2);
      rec.magnitude = -rec.multiplier;
      rec.original = -1.0;
      rec.target = echelon_prefix(names::kInvBalance, n);
      for (int p = 1; p <= T; ++p) {
        const int a = arrival_period(in, n, p);
        if (a >= 1)
          ed.push_back(edit::SetCoefficient{indexed(names::kInvBalance, n, p), indexed(names::kOrder, n, a), rec.magnitude});
      }
      rec.description = "arrival coefficient at echelon " + std::to_string(n) + " scaled to " +
                        format_number(rec.multiplier);
      rec.ground_truth_fix = {Action::drop(echelon_prefix(names::kBackorderCap, n))};
      break;
    }
    case ErrorType::kME8: {
      const int n = rng.pick(echelons_from(2, N));
      rec.echelon = n;
      rec.target = echelon_prefix(names::kDemandProp, n);
      rec.magnitude = 1.0;
      rec.original = -1.0;
      for (int p = 1; p <= T; ++p)
        ed.push_back(edit::SetCoefficient{indexed(names::kDemandProp, n, p), indexed(names::kOrder, n - 1, p), 1.0});
      rec.description = "downstream order term negated in demand propagation to echelon " + std::to_string(n);
      rec.ground_truth_fix = {Action::drop(rec.target)};
      break;
    }
    case ErrorType::kME9: {
      const int n = N;
      rec.echelon = n;
      rec.multiplier = rng.uniform(1.1, 1.5);
      rec.magnitude = rec.multiplier * std::max(tight.supply_cap, 0.1 * dbar);
      rec.target = echelon_prefix(names::kMinOrder, n);
      for (int p = 1; p <= T; ++p)
        ed.push_back(edit::AddConstraint{indexed(names::kMinOrder, n, p), {{indexed(names::kOrder, n, p), 1.0}},
                                         Sense::kGreaterEqual, rec.magnitude});
      rec.description = "factory minimum order of " + format_number(rec.magnitude) + " per period";
      rec.ground_truth_fix = {Action::drop(rec.target)};
      break;
    }
    case ErrorType::kME10: {
      const int n = rng.pick(echelons_from(2, N));
      rec.echelon = n;
      rec.multiplier = rng.uniform(2.0, 4.0);
      rec.magnitude = rec.multiplier * dbar;
      rec.target = echelon_prefix(names::kDemandProp, n);
      for (int p = 1; p <= T; ++p) {
        const std::string row = indexed(names::kDemandProp, n, p);
        ed.push_back(edit::SetCoefficient{row, indexed(names::kOrder, n - 1, p), 0.0});
        if (p >= 2) ed.push_back(edit::SetCoefficient{row, indexed(names::kOrder, n - 1, p - 1), -1.0});
        ed.push_back(edit::SetRhs{row, rec.magnitude});
      }
      rec.description = "demand propagation to echelon " + std::to_string(n) +
                        " reads the previous period and adds an offset of " + format_number(rec.magnitude);
      rec.ground_truth_fix = {Action::drop(rec.target)};
      break;
    }
  }
  Sabotage out{tightened, std::move(rec)};
  apply_edits(out.model, out.record.edits);
  return out;
}

VerificationReport verify_sabotage(const LpModel& sabotaged, const ScInstance& in, const SabotageRecord& rec,
                                   const EnvironmentConfig& env_config) {
  VerificationReport rep;
  const SolveOutcome o = solve(sabotaged, env_config.solver);
  rep.sabotaged_status = o.status;
  if (rec.error_type == ErrorType::kME5) {
    if (!o.optimal()) {
      rep.diagnostics = "ME5 sabotage should stay OPTIMAL";
      return rep;
    }
    rep.oracle_flags_sabotage = !evaluate(sabotaged, o, in, rec.error_type, env_config.oracle).pass;
    if (!rep.oracle_flags_sabotage) {
      rep.diagnostics = "oracle does not flag the ME5 sabotage";
      return rep;
    }
  } else {
    if (o.status != SolveStatus::kInfeasible) {
      rep.diagnostics = "sabotaged model is " + std::string(status_name(o.status)) + ", expected INFEASIBLE";
      return rep;
    }
    rep.iis = compute_iis(sabotaged, env_config.solver);
    if (rep.iis.empty()) {
      rep.diagnostics = "empty IIS";
      return rep;
    }
  }
  if (rec.ground_truth_fix.empty()) {
    rep.diagnostics = "no ground-truth fix recorded";
    return rep;
  }
  Environment env(env_config);
  env.reset(EpisodeSpec{"verify", rec.error_type, in, sabotaged, {}, rep.iis});
  for (const Action& a : rec.ground_truth_fix) {
    if (env.terminal()) break;
    env.step(a);
  }
  if (!env.terminal()) env.step(Action::submit());
  const EpisodeResult& r = env.result();
  rep.repaired_status = r.final_status;
  rep.repaired_rational = r.rational;
  rep.replay_reward = r.reward.total;
  if (r.reward.total != 150) {
    rep.diagnostics = "ground-truth replay ended with reward " + std::to_string(r.reward.total) + " (" + r.termination +
                      ", status " + std::string(status_name(r.final_status)) + ")";
    for (const TranscriptEntry& e : r.transcript) rep.diagnostics += "; " + e.outcome;
    return rep;
  }
  rep.ok = true;
  return rep;
}

}  // namespace screpair
