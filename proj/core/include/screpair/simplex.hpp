#pragma once

#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "screpair/lp_model.hpp"

namespace screpair {

enum class SolveStatus { kOptimal, kInfeasible, kUnbounded };

std::string_view status_name(SolveStatus status);  // "OPTIMAL", "INFEASIBLE", "UNBOUNDED"

enum class PricingRule {
  kBland,
  // Dantzig pricing that falls back to Bland's rule while pivots stay degenerate.
  kDantzigBlandFallback,
};

struct SolverOptions {
  double feasibility_tol = 1e-6;   // absolute, on constraint violation
  double objective_rel_tol = 1e-6;
  double pivot_tol = 1e-9;
  double optimality_tol = 1e-9;    // reduced-cost threshold
  double infinity = 1e12;          // |bound| >= infinity is unbounded
  double max_coefficient = 1e9;    // larger magnitudes are rejected before solving
  int max_iterations = 200000;
  PricingRule pricing = PricingRule::kDantzigBlandFallback;

  // Defaults overridden by SCREPAIR_FEAS_TOL / SCREPAIR_OBJ_TOL when set.
  static SolverOptions from_environment();
};

struct SolveOutcome {
  SolveStatus status = SolveStatus::kInfeasible;
  // Present iff status == kOptimal; primal and slacks are indexed like the model.
  std::optional<double> objective;
  std::vector<double> primal;
  std::vector<double> slacks;
  int iterations = 0;

  bool optimal() const noexcept { return status == SolveStatus::kOptimal; }
  double value(const LpModel& model, std::string_view variable) const;
};

// Two-phase primal simplex on a dense tableau. Deterministic for a fixed model.
// Throws InvalidInput for coefficients beyond options.max_coefficient.
SolveOutcome solve(const LpModel& model, const SolverOptions& options = {});

// rhs - activity (<=), activity - rhs (>=), |activity - rhs| (=).
double row_slack(const Constraint& row, double activity);

// Requires an optimal outcome; unknown names raise NameResolutionError.
double check_slack(const LpModel& model, const SolveOutcome& outcome, std::string_view constraint);

// Number of rows whose slack is within the feasibility tolerance.
int count_active_constraints(const LpModel& model, const SolveOutcome& outcome,
                             double tolerance = 1e-6);

}  // namespace screpair
