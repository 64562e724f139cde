#include "screpair/instance.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>

#include "screpair/error.hpp"

namespace screpair {

std::string_view demand_kind_name(DemandKind kind) {
  switch (kind) {
    case DemandKind::kStationary:
      return "stationary";
    case DemandKind::kStepChange:
      return "step_change";
    case DemandKind::kSeasonal:
      return "seasonal";
  }
  return "?";
}

DemandKind parse_demand_kind(std::string_view name) {
  if (name == "stationary") return DemandKind::kStationary;
  if (name == "step_change") return DemandKind::kStepChange;
  if (name == "seasonal") return DemandKind::kSeasonal;
  throw InvalidInput("demand_pattern", "unknown kind '" + std::string(name) + "'");
}

std::vector<double> demand_series(const DemandPattern& pattern, int periods) {
  if (periods < 2) throw InvalidInput("n_periods", "need at least 2 periods");
  if (!(pattern.mean > 0.0)) throw InvalidInput("demand_pattern.mean", "must be positive");
  std::vector<double> d(static_cast<std::size_t>(periods), pattern.mean);
  switch (pattern.kind) {
    case DemandKind::kStationary:
      break;
    case DemandKind::kStepChange:
      if (!(pattern.second_mean > 0.0))
        throw InvalidInput("demand_pattern.second_mean", "must be positive");
      if (pattern.change_period < 1 || pattern.change_period >= periods)
        throw InvalidInput("demand_pattern.change_period", "must lie inside the horizon");
      for (int t = pattern.change_period + 1; t <= periods; ++t) d[t - 1] = pattern.second_mean;
      break;
    case DemandKind::kSeasonal:
      if (pattern.amplitude < 0.0 || pattern.amplitude >= pattern.mean)
        throw InvalidInput("demand_pattern.amplitude", "must satisfy 0 <= A < mean");
      for (int t = 1; t <= periods; ++t)
        d[t - 1] = pattern.mean +
                   pattern.amplitude * std::sin(2.0 * std::numbers::pi * t / static_cast<double>(periods));
      break;
  }
  for (double v : d)
    if (!(v > 0.0)) throw InvalidInput("demand", "non-positive demand in series");
  return d;
}

double ScInstance::mean_demand() const {
  if (demand.empty()) return 0.0;
  return std::accumulate(demand.begin(), demand.end(), 0.0) / static_cast<double>(demand.size());
}

double ScInstance::max_demand() const {
  return demand.empty() ? 0.0 : *std::max_element(demand.begin(), demand.end());
}

void validate(const ScInstance& s) {
  if (s.n_echelons < 2) throw InvalidInput("n_echelons", "need at least 2 echelons");
  if (s.n_periods < 2) throw InvalidInput("n_periods", "need at least 2 periods");
  const auto n = static_cast<std::size_t>(s.n_echelons);
  auto check_size = [n](const auto& v, const char* field) {
    if (v.size() != n) throw InvalidInput(field, "expected one value per echelon");
  };
  check_size(s.holding_cost, "holding_cost");
  check_size(s.backorder_cost, "backorder_cost");
  check_size(s.capacity, "capacity");
  check_size(s.lead_time, "lead_time");
  check_size(s.initial_inventory, "initial_inventory");
  if (s.demand.size() != static_cast<std::size_t>(s.n_periods))
    throw InvalidInput("demand", "expected one value per period");
  for (std::size_t i = 0; i < n; ++i) {
    if (!(s.holding_cost[i] > 0.0) || !std::isfinite(s.holding_cost[i]))
      throw InvalidInput("holding_cost", "must be positive");
    if (!(s.backorder_cost[i] > 0.0) || !std::isfinite(s.backorder_cost[i]))
      throw InvalidInput("backorder_cost", "must be positive");
    if (!(s.capacity[i] > 0.0) || !std::isfinite(s.capacity[i]))
      throw InvalidInput("capacity", "must be positive");
    if (s.lead_time[i] < 0) throw InvalidInput("lead_time", "must be non-negative");
    if (!(s.initial_inventory[i] >= 0.0) || !std::isfinite(s.initial_inventory[i]))
      throw InvalidInput("initial_inventory", "must be non-negative");
  }
  for (double d : s.demand)
    if (!(d > 0.0) || !std::isfinite(d)) throw InvalidInput("demand", "must be positive");
  for (std::size_t i = 1; i < n; ++i)
    if (s.holding_cost[i] > s.holding_cost[i - 1] * (1.0 + kHoldingMonotonicityTolerance))
      throw InvalidInput("holding_cost", "must be non-increasing upstream");
}

std::string echelon_role(int echelon, int n_echelons) {
  if (echelon == 1) return "Retailer";
  if (echelon == n_echelons) return "Factory";
  static const char* const kMiddle[] = {"Warehouse", "Distributor", "Wholesaler"};
  const int middle = echelon - 2;
  if (n_echelons <= 5 && middle < 3) return kMiddle[middle];
  return "Echelon " + std::to_string(echelon);
}

}  // namespace screpair
