#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "screpair/instance.hpp"
#include "screpair/simplex.hpp"

namespace screpair {

struct Range {
  double lo = 0.0;
  double hi = 0.0;
};

struct GeneratorConfig {
  std::vector<int> echelons{2, 3, 4, 5};
  std::vector<int> periods{12, 16, 20, 24};
  Range holding{1.0, 10.0};
  Range backorder{5.0, 50.0};
  Range backorder_ratio{2.0, 10.0};  // b_n / h_n
  Range capacity{50.0, 500.0};
  std::vector<int> lead_times{1, 2, 3};
  double initial_inventory_max_multiple = 2.0;  // of the horizon mean demand
  Range mean_demand{50.0, 200.0};
  std::vector<DemandKind> patterns{DemandKind::kStationary, DemandKind::kStepChange, DemandKind::kSeasonal};
  Range step_second_mean_multiple{0.5, 1.5};
  Range seasonal_amplitude_multiple{0.2, 0.5};

  double min_objective = 1.0;
  int min_active_constraints = 10;
  int max_attempts = 1000;

  // Throws InvalidInput on an empty or inverted range.
  void validate() const;
};

// Deterministic for a given (config, seed).
ScInstance sample_instance(const GeneratorConfig& config, std::uint64_t seed);

struct Acceptance {
  bool accepted = false;
  std::string reason;  // empty when accepted
  SolveOutcome baseline;
  int active_constraints = 0;
};

Acceptance accept_instance(const ScInstance& instance, const GeneratorConfig& config = {},
                           const SolverOptions& options = {});

// Samples with seeds derived from `seed` until an instance is accepted.
// Throws Error once config.max_attempts is exhausted.
ScInstance generate_accepted(const GeneratorConfig& config, std::uint64_t seed,
                             const SolverOptions& options = {});

std::string render_nl_description(const ScInstance& instance);

}  // namespace screpair
