#pragma once

#include <vector>

#include "screpair/lp_model.hpp"
#include "screpair/simplex.hpp"

namespace screpair::detail {

// A subsystem of a model: a subset of rows plus, per variable, which of its
// finite bounds participate. Bounds switched off are treated as infinite.
struct Selection {
  std::vector<int> rows;
  std::vector<char> use_lower;
  std::vector<char> use_upper;
  std::vector<char> include_var;

  static Selection full(const LpModel& model);
};

// Phase-1 result. When infeasible, the supports name the rows and bounds with
// non-zero Farkas multipliers; together they form an infeasible subsystem.
struct FeasibilityResult {
  bool feasible = false;
  std::vector<int> row_support;
  std::vector<int> lower_support;
  std::vector<int> upper_support;
};

FeasibilityResult check_feasibility(const LpModel& model, const Selection& selection,
                                    const SolverOptions& options);

void check_magnitudes(const LpModel& model, const SolverOptions& options);

}  // namespace screpair::detail
