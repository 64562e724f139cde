#include "screpair/oracle.hpp"

#include <algorithm>
#include <cmath>

#include "screpair/error.hpp"
#include "screpair/lp_text.hpp"
#include "screpair/model_builder.hpp"

namespace screpair {

namespace {

std::string fmt(double v, int digits = 2) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

CheckStatus aggregate(const std::vector<EchelonStat>& stats) {
  bool any_pass = false;
  for (const EchelonStat& s : stats) {
    if (s.status == CheckStatus::kFail) return CheckStatus::kFail;
    if (s.status == CheckStatus::kPass) any_pass = true;
  }
  return any_pass || stats.empty() ? CheckStatus::kPass : CheckStatus::kSkippedDegenerate;
}

bool counts_as_pass(CheckStatus s) { return s == CheckStatus::kPass || s == CheckStatus::kSkippedDegenerate; }

}  // namespace

std::string_view check_name(CheckId id) {
  switch (id) {
    case CheckId::kBaseStock: return "base_stock";
    case CheckId::kBullwhip: return "bullwhip";
    case CheckId::kAllocation: return "inventory_allocation";
    case CheckId::kCostConsistency: return "cost_consistency";
    case CheckId::kOrderSmoothing: return "order_smoothing";
  }
  return "?";
}

std::string_view check_title(CheckId id) {
  switch (id) {
    case CheckId::kBaseStock: return "Base-stock rationality";
    case CheckId::kBullwhip: return "Bullwhip control";
    case CheckId::kAllocation: return "Inventory allocation";
    case CheckId::kCostConsistency: return "Cost consistency";
    case CheckId::kOrderSmoothing: return "Order smoothing";
  }
  return "?";
}

std::string_view check_status_name(CheckStatus s) {
  switch (s) {
    case CheckStatus::kPass: return "pass";
    case CheckStatus::kFail: return "fail";
    case CheckStatus::kNotApplicable: return "not_applicable";
    case CheckStatus::kSkippedDegenerate: return "skipped_degenerate";
  }
  return "?";
}

std::map<ErrorType, std::set<CheckId>> OracleConfig::default_applicability() {
  const std::set<CheckId> structural{CheckId::kBaseStock, CheckId::kAllocation, CheckId::kCostConsistency};
  const std::set<CheckId> cost_only{CheckId::kCostConsistency};
  return {
      {ErrorType::kME1, structural}, {ErrorType::kME2, structural}, {ErrorType::kME3, structural},
      {ErrorType::kME4, structural}, {ErrorType::kME5, cost_only},  {ErrorType::kME6, {CheckId::kOrderSmoothing}},
      {ErrorType::kME7, cost_only},  {ErrorType::kME8, cost_only},  {ErrorType::kME9, structural},
      {ErrorType::kME10, structural},
  };
}

void OracleConfig::validate() const {
  if (!(tau_base_stock > 0)) throw InvalidInput("tau_base_stock", "must be positive");
  if (!(tau_bullwhip > 0)) throw InvalidInput("tau_bullwhip", "must be positive");
  if (!(tau_allocation > 0)) throw InvalidInput("tau_allocation", "must be positive");
  if (!(tau_smoothing > 0)) throw InvalidInput("tau_smoothing", "must be positive");
  if (!(cost_tolerance >= 0)) throw InvalidInput("cost_tolerance", "must be non-negative");
  for (ErrorType t : kAllErrorTypes)
    if (!applicability.count(t)) throw InvalidInput("applicability", "no entry for " + std::string(error_type_name(t)));
}

double mean_of(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  double s = 0.0;
  for (double x : v) s += x;
  return s / static_cast<double>(v.size());
}

double population_variance(const std::vector<double>& v) {
  if (v.empty()) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return s / static_cast<double>(v.size());
}

Trajectories extract_trajectories(const LpModel& model, const SolveOutcome& outcome, const ScInstance& instance) {
  if (!outcome.optimal()) throw ContractViolation("trajectories need an OPTIMAL solution");
  Trajectories tr;
  const int n = instance.n_echelons;
  const int t = instance.n_periods;
  auto read = [&](std::string_view family, int e, int p) {
    auto idx = model.find_variable(names::indexed(family, e, p));
    return idx ? outcome.primal.at(*idx) : 0.0;
  };
  tr.hold.assign(n, std::vector<double>(t));
  tr.orders.assign(n, std::vector<double>(t));
  for (int e = 1; e <= n; ++e)
    for (int p = 1; p <= t; ++p) {
      tr.hold[e - 1][p - 1] = read(names::kHold, e, p);
      tr.orders[e - 1][p - 1] = read(names::kOrder, e, p);
    }
  tr.demand = instance.demand;
  return tr;
}

CheckResult check_base_stock(const std::vector<std::vector<double>>& hold, const OracleConfig& cfg) {
  CheckResult r;
  r.id = CheckId::kBaseStock;
  std::string bad;
  for (std::size_t e = 0; e < hold.size(); ++e) {
    EchelonStat s{static_cast<int>(e) + 1, 0.0, CheckStatus::kPass};
    const double m = mean_of(hold[e]);
    if (m < cfg.eps_div) {
      s.status = CheckStatus::kSkippedDegenerate;
    } else {
      s.value = std::sqrt(population_variance(hold[e])) / m;
      if (s.value > cfg.tau_base_stock) {
        s.status = CheckStatus::kFail;
        bad += "Echelon " + std::to_string(s.echelon) + " inventory has coefficient of variation " + fmt(s.value) +
               " (limit " + fmt(cfg.tau_base_stock) + "), far from a steady base-stock level. ";
      }
    }
    r.statistic = std::max(r.statistic, s.value);
    r.echelons.push_back(s);
  }
  r.status = aggregate(r.echelons);
  if (!bad.empty()) bad.pop_back();
  r.detail = bad;
  return r;
}

CheckResult check_bullwhip(const std::vector<std::vector<double>>& orders, const std::vector<double>& demand,
                           const OracleConfig& cfg) {
  CheckResult r;
  r.id = CheckId::kBullwhip;
  const double vd = population_variance(demand);
  std::string bad;
  for (std::size_t e = 1; e < orders.size(); ++e) {
    EchelonStat s{static_cast<int>(e) + 1, 0.0, CheckStatus::kPass};
    if (vd < cfg.eps_div) {
      s.status = CheckStatus::kSkippedDegenerate;
    } else {
      s.value = population_variance(orders[e]) / vd;
      if (s.value > cfg.tau_bullwhip) {
        s.status = CheckStatus::kFail;
        bad += "Echelon " + std::to_string(s.echelon) + " order variance is " + fmt(s.value) +
               "x the demand variance (limit " + fmt(cfg.tau_bullwhip) + "). ";
      }
    }
    r.statistic = std::max(r.statistic, s.value);
    r.echelons.push_back(s);
  }
  r.status = vd < cfg.eps_div ? CheckStatus::kSkippedDegenerate : aggregate(r.echelons);
  if (!bad.empty()) bad.pop_back();
  r.detail = bad;
  return r;
}

CheckResult check_inventory_allocation(const std::vector<std::vector<double>>& hold, double mean_demand,
                                       const OracleConfig& cfg) {
  CheckResult r;
  r.id = CheckId::kAllocation;
  if (hold.empty()) return r;
  const double retail = mean_of(hold[0]);
  double upstream = 0.0;
  for (std::size_t e = 1; e < hold.size(); ++e) {
    const double m = mean_of(hold[e]);
    upstream += m;
    r.echelons.push_back({static_cast<int>(e) + 1, m, CheckStatus::kPass});
  }
  r.echelons.insert(r.echelons.begin(), EchelonStat{1, retail, CheckStatus::kPass});
  r.statistic = retail;
  if (retail > cfg.tau_allocation * mean_demand && upstream < cfg.alloc_upstream_frac * mean_demand) {
    r.status = CheckStatus::kFail;
    r.echelons[0].status = CheckStatus::kFail;
    r.detail = "Echelon 1 holds " + fmt(retail) + " units on average (more than " + fmt(cfg.tau_allocation) +
               " of mean demand " + fmt(mean_demand) + ") while upstream echelons together hold " + fmt(upstream) +
               ". Inventory is concentrated at the most expensive location.";
  }
  return r;
}

CheckResult check_cost_consistency(const LpModel& model, const ScInstance& instance, const OracleConfig& cfg) {
  CheckResult r;
  r.id = CheckId::kCostConsistency;
  const int n = instance.n_echelons;
  std::string bad;
  for (int e = 2; e <= n; ++e) {
    const double prev = instance.holding_cost.at(e - 2);
    const double cur = instance.holding_cost.at(e - 1);
    if (cur > prev * (1.0 + cfg.cost_tolerance)) {
      r.monotonicity_violated = true;
      bad += "Holding cost at echelon " + std::to_string(e) + " (" + echelon_role(e, n) + ", h=" + fmt(cur) +
             ") exceeds echelon " + std::to_string(e - 1) + " (" + echelon_role(e - 1, n) + ", h=" + fmt(prev) +
             "); holding costs must not increase upstream. ";
    }
  }
  auto scan = [&](std::string_view family, const std::vector<double>& configured) {
    for (int e = 1; e <= n; ++e) {
      const double want = configured.at(e - 1);
      for (int p = 1; p <= instance.n_periods; ++p) {
        auto idx = model.find_variable(names::indexed(family, e, p));
        if (!idx) continue;
        const double got = model.variable(*idx).objective;
        if (std::abs(got - want) > cfg.cost_tolerance * std::abs(want)) {
          const std::string prefix = names::echelon_prefix(family, e);
          r.mismatches.push_back({prefix, got, want});
          bad += "Objective coefficient of " + prefix + " is " + format_number(got) +
                 " but the configuration specifies " + format_number(want) + " (echelon " + std::to_string(e) +
                 ", " + echelon_role(e, n) + "). ";
          break;
        }
      }
    }
  };
  scan(names::kHold, instance.holding_cost);
  scan(names::kBack, instance.backorder_cost);
  r.statistic = static_cast<double>(r.mismatches.size());
  r.status = bad.empty() ? CheckStatus::kPass : CheckStatus::kFail;
  if (!bad.empty()) bad.pop_back();
  r.detail = bad;
  return r;
}

CheckResult check_order_smoothing(const std::vector<std::vector<double>>& orders, const OracleConfig& cfg) {
  CheckResult r;
  r.id = CheckId::kOrderSmoothing;
  std::string bad;
  for (std::size_t e = 0; e < orders.size(); ++e) {
    EchelonStat s{static_cast<int>(e) + 1, 0.0, CheckStatus::kPass};
    const double m = mean_of(orders[e]);
    if (m < cfg.eps_div) {
      s.status = CheckStatus::kSkippedDegenerate;
    } else {
      double jump = 0.0;
      for (std::size_t t = 1; t < orders[e].size(); ++t) jump = std::max(jump, std::abs(orders[e][t] - orders[e][t - 1]));
      s.value = jump / m;
      if (!(s.value < cfg.tau_smoothing)) {
        s.status = CheckStatus::kFail;
        bad += "Echelon " + std::to_string(s.echelon) + " orders jump by " + fmt(s.value) +
               "x their mean between consecutive periods (limit " + fmt(cfg.tau_smoothing) + "). ";
      }
    }
    r.statistic = std::max(r.statistic, s.value);
    r.echelons.push_back(s);
  }
  r.status = aggregate(r.echelons);
  if (!bad.empty()) bad.pop_back();
  r.detail = bad;
  return r;
}

RationalityVerdict combine(std::array<CheckResult, 5> raw, ErrorType type, const ScInstance& instance,
                           const OracleConfig& cfg) {
  (void)instance;
  RationalityVerdict v;
  const auto it = cfg.applicability.find(type);
  if (it == cfg.applicability.end()) throw InvalidInput("error_type", "no applicability entry");
  std::string feedback;
  for (std::size_t i = 0; i < raw.size(); ++i) {
    CheckResult& c = raw[i];
    c.id = kAllChecks[i];
    if (!it->second.count(c.id)) {
      c.status = CheckStatus::kNotApplicable;
      c.detail.clear();
      continue;
    }
    if (!counts_as_pass(c.status)) {
      v.pass = false;
      feedback += "[" + std::string(check_title(c.id)) + "] " + c.detail + "\n";
    }
  }
  v.checks = std::move(raw);
  if (!v.pass) {
    feedback +=
        "\nThe solver found a feasible solution, but it failed rationality checks. "
        "Address the violated property above and keep the model feasible.";
    v.feedback = std::move(feedback);
  }
  return v;
}

std::array<CheckResult, 5> run_checks(const LpModel& model, const SolveOutcome& outcome, const ScInstance& instance,
                                      const OracleConfig& cfg) {
  const Trajectories tr = extract_trajectories(model, outcome, instance);
  return {check_base_stock(tr.hold, cfg), check_bullwhip(tr.orders, tr.demand, cfg),
          check_inventory_allocation(tr.hold, instance.mean_demand(), cfg), check_cost_consistency(model, instance, cfg),
          check_order_smoothing(tr.orders, cfg)};
}

RationalityVerdict evaluate(const LpModel& model, const SolveOutcome& outcome, const ScInstance& instance,
                            ErrorType type, const OracleConfig& cfg) {
  return combine(run_checks(model, outcome, instance, cfg), type, instance, cfg);
}

}  // namespace screpair
