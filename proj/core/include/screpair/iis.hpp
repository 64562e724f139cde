#pragma once

#include <string>
#include <vector>

#include "screpair/lp_model.hpp"
#include "screpair/simplex.hpp"

namespace screpair {

enum class BoundSide { kLower, kUpper };

struct BoundMember {
  std::string variable;
  BoundSide side = BoundSide::kLower;
  double value = 0.0;
  friend bool operator==(const BoundMember&, const BoundMember&) = default;
};

struct IisCertificate {
  std::vector<std::string> constraints;  // model order
  std::vector<BoundMember> bounds;       // variable order, lower before upper

  bool empty() const noexcept { return constraints.empty() && bounds.empty(); }
  std::size_t size() const noexcept { return constraints.size() + bounds.size(); }
  friend bool operator==(const IisCertificate&, const IisCertificate&) = default;
};

// Deletion filter over a seed set. The seed is the support of a minimum-mass
// vertex of the Farkas alternative system (falling back to the shortest
// infeasible prefix of the canonical order). Finite variable bounds are
// members too. Throws ContractViolation when the model is feasible.
IisCertificate compute_iis(const LpModel& model, const SolverOptions& options = {});

// Feasibility of the subsystem made of the named rows and bounds only (every
// other bound is dropped). Used to check certificates independently.
bool subsystem_feasible(const LpModel& model, const std::vector<std::string>& constraints,
                        const std::vector<BoundMember>& bounds, const SolverOptions& options = {});

}  // namespace screpair
