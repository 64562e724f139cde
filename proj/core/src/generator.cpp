#include "screpair/generator.hpp"

#include <algorithm>
#include <cmath>
#include <functional>

#include "screpair/error.hpp"
#include "screpair/lp_text.hpp"
#include "screpair/model_builder.hpp"
#include "screpair/random.hpp"

namespace screpair {

namespace {

void check_range(const Range& r, const char* field, bool positive) {
  if (!(r.lo <= r.hi) || !std::isfinite(r.lo) || !std::isfinite(r.hi))
    throw InvalidInput(field, "range must be finite with lo <= hi");
  if (positive && r.lo <= 0.0) throw InvalidInput(field, "range must be positive");
}

}  // namespace

void GeneratorConfig::validate() const {
  if (echelons.empty()) throw InvalidInput("echelons", "no choices");
  for (int n : echelons)
    if (n < 2) throw InvalidInput("echelons", "each choice must be >= 2");
  if (periods.empty()) throw InvalidInput("periods", "no choices");
  for (int t : periods)
    if (t < 2) throw InvalidInput("periods", "each choice must be >= 2");
  if (lead_times.empty()) throw InvalidInput("lead_times", "no choices");
  for (int l : lead_times)
    if (l < 0) throw InvalidInput("lead_times", "each choice must be >= 0");
  if (patterns.empty()) throw InvalidInput("patterns", "no choices");
  check_range(holding, "holding", true);
  check_range(backorder, "backorder", true);
  check_range(backorder_ratio, "backorder_ratio", true);
  check_range(capacity, "capacity", true);
  check_range(mean_demand, "mean_demand", true);
  check_range(step_second_mean_multiple, "step_second_mean_multiple", true);
  check_range(seasonal_amplitude_multiple, "seasonal_amplitude_multiple", false);
  if (seasonal_amplitude_multiple.hi >= 1.0)
    throw InvalidInput("seasonal_amplitude_multiple", "amplitude must stay below the mean");
  if (initial_inventory_max_multiple < 0.0)
    throw InvalidInput("initial_inventory_max_multiple", "must be >= 0");
  if (max_attempts < 1) throw InvalidInput("max_attempts", "must be >= 1");
}

ScInstance sample_instance(const GeneratorConfig& config, std::uint64_t seed) {
  config.validate();
  Rng rng(seed);
  ScInstance inst;
  inst.n_echelons = rng.pick(config.echelons);
  inst.n_periods = rng.pick(config.periods);
  const int n = inst.n_echelons;
  const int t = inst.n_periods;

  // Sorting iid draws gives the same law as resampling until non-increasing.
  inst.holding_cost.resize(n);
  for (double& h : inst.holding_cost) h = rng.uniform(config.holding.lo, config.holding.hi);
  std::sort(inst.holding_cost.begin(), inst.holding_cost.end(), std::greater<>());

  inst.backorder_cost.resize(n);
  for (int i = 0; i < n; ++i) {
    const double h = inst.holding_cost[i];
    const double lo = std::max(config.backorder.lo, config.backorder_ratio.lo * h);
    const double hi = std::min(config.backorder.hi, config.backorder_ratio.hi * h);
    if (lo > hi) throw InvalidInput("backorder_ratio", "no backorder cost satisfies both ranges");
    inst.backorder_cost[i] = rng.uniform(lo, hi);
  }
  inst.capacity.resize(n);
  for (double& c : inst.capacity) c = rng.uniform(config.capacity.lo, config.capacity.hi);
  inst.lead_time.resize(n);
  for (int& l : inst.lead_time) l = rng.pick(config.lead_times);

  DemandPattern& p = inst.demand_pattern;
  p.kind = rng.pick(config.patterns);
  p.mean = rng.uniform(config.mean_demand.lo, config.mean_demand.hi);
  if (p.kind == DemandKind::kStepChange) {
    const int lo = (t + 2) / 3;
    const int hi = std::max(lo, std::min(t - 1, 2 * t / 3));
    p.change_period = rng.uniform_int(lo, hi);
    p.second_mean = p.mean * rng.uniform(config.step_second_mean_multiple.lo, config.step_second_mean_multiple.hi);
  } else if (p.kind == DemandKind::kSeasonal) {
    p.amplitude = p.mean * rng.uniform(config.seasonal_amplitude_multiple.lo, config.seasonal_amplitude_multiple.hi);
  }
  inst.demand = demand_series(p, t);

  const double dbar = inst.mean_demand();
  inst.initial_inventory.resize(n);
  for (double& i0 : inst.initial_inventory) i0 = rng.uniform(0.0, config.initial_inventory_max_multiple * dbar);

  validate(inst);
  return inst;
}

Acceptance accept_instance(const ScInstance& instance, const GeneratorConfig& config,
                           const SolverOptions& options) {
  Acceptance a;
  const LpModel model = build_lp(instance);
  a.baseline = solve(model, options);
  if (!a.baseline.optimal()) {
    a.reason = std::string("baseline status ") + std::string(status_name(a.baseline.status));
    return a;
  }
  if (*a.baseline.objective < config.min_objective) {
    a.reason = "optimal objective below the triviality threshold";
    return a;
  }
  a.active_constraints = count_active_constraints(model, a.baseline, options.feasibility_tol);
  if (a.active_constraints < config.min_active_constraints) {
    a.reason = "fewer than " + std::to_string(config.min_active_constraints) + " active constraints";
    return a;
  }
  a.accepted = true;
  return a;
}

ScInstance generate_accepted(const GeneratorConfig& config, std::uint64_t seed, const SolverOptions& options) {
  for (int attempt = 0; attempt < config.max_attempts; ++attempt) {
    ScInstance inst = sample_instance(config, mix_seed(seed, static_cast<std::uint64_t>(attempt)));
    if (accept_instance(inst, config, options).accepted) return inst;
  }
  throw Error("instance generation exhausted " + std::to_string(config.max_attempts) + " attempts");
}

std::string render_nl_description(const ScInstance& in) {
  validate(in);
  const int n = in.n_echelons;
  std::string s;
  s += "Serial supply chain with " + std::to_string(n) + " echelons planned over " +
       std::to_string(in.n_periods) + " periods. Echelon 1 faces external customer demand; each echelon "
       "orders from the next one upstream, and echelon " + std::to_string(n) + " produces.\n";
  for (int i = 0; i < n; ++i) {
    s += "- Echelon " + std::to_string(i + 1) + " (" + echelon_role(i + 1, n) + "): holding cost " +
         format_number(in.holding_cost[i]) + " per unit per period, backorder cost " +
         format_number(in.backorder_cost[i]) + " per unit per period, capacity " +
         format_number(in.capacity[i]) + " units per period, lead time " + std::to_string(in.lead_time[i]) +
         " periods, initial inventory " + format_number(in.initial_inventory[i]) + " units.\n";
  }
  const DemandPattern& p = in.demand_pattern;
  s += "Demand pattern: " + std::string(demand_kind_name(p.kind));
  switch (p.kind) {
    case DemandKind::kStationary:
      s += " with mean " + format_number(p.mean) + " units per period.\n";
      break;
    case DemandKind::kStepChange:
      s += ": mean " + format_number(p.mean) + " through period " + std::to_string(p.change_period) +
           ", then " + format_number(p.second_mean) + ".\n";
      break;
    case DemandKind::kSeasonal:
      s += " with mean " + format_number(p.mean) + " and amplitude " + format_number(p.amplitude) +
           " (sinusoid over the horizon).\n";
      break;
  }
  s += "Per-period demand:";
  for (double d : in.demand) s += " " + format_number(d);
  s += "\nObjective: minimize total holding plus backorder cost. Orders arrive after the lead time; "
       "orders placed before period 1 do not exist.\n";
  return s;
}

}  // namespace screpair
