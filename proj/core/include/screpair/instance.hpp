#pragma once

#include <string>
#include <string_view>
#include <vector>

namespace screpair {

enum class DemandKind { kStationary, kStepChange, kSeasonal };

std::string_view demand_kind_name(DemandKind kind);
DemandKind parse_demand_kind(std::string_view name);

// Parameters of the external demand series.
//   stationary:  d_t = mean
//   step_change: d_t = mean for t <= change_period, second_mean afterwards
//   seasonal:    d_t = mean + amplitude * sin(2*pi*t/T)
struct DemandPattern {
  DemandKind kind = DemandKind::kStationary;
  double mean = 100.0;
  int change_period = 0;
  double second_mean = 0.0;
  double amplitude = 0.0;

  friend bool operator==(const DemandPattern&, const DemandPattern&) = default;
};

// Per-period demand for t = 1..T (index 0 holds period 1). Throws InvalidInput
// on T < 2, non-positive parameters, or any non-positive resulting demand.
std::vector<double> demand_series(const DemandPattern& pattern, int periods);

// Serial supply chain: echelon 1 is the retailer, echelon N the factory.
// Per-echelon vectors are indexed 0..N-1 for echelons 1..N.
struct ScInstance {
  int n_echelons = 2;
  int n_periods = 12;
  std::vector<double> holding_cost;
  std::vector<double> backorder_cost;
  std::vector<double> capacity;
  std::vector<int> lead_time;
  std::vector<double> demand;
  std::vector<double> initial_inventory;
  DemandPattern demand_pattern;

  double mean_demand() const;
  double max_demand() const;

  friend bool operator==(const ScInstance&, const ScInstance&) = default;
};

inline constexpr double kHoldingMonotonicityTolerance = 0.01;

// Throws InvalidInput naming the first violated field.
void validate(const ScInstance& instance);

std::string echelon_role(int echelon, int n_echelons);

}  // namespace screpair
