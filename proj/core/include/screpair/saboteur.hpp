#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "screpair/action.hpp"
#include "screpair/environment.hpp"
#include "screpair/error_type.hpp"
#include "screpair/iis.hpp"
#include "screpair/instance.hpp"
#include "screpair/lp_model.hpp"
#include "screpair/oracle.hpp"
#include "screpair/simplex.hpp"

namespace screpair {

// Operational bounds calibrated from the baseline optimum.
struct Tightening {
  std::vector<double> backorder_cap;  // per echelon
  double supply_cap = 0.0;            // factory orders per period
  friend bool operator==(const Tightening&, const Tightening&) = default;
};

inline constexpr double kBackorderCapMargin = 1.1;
inline constexpr double kBackorderCapFloor = 0.05;  // fraction of mean demand
inline constexpr double kSupplyCapMargin = 1.2;

// Requires an optimal baseline of build_lp(instance).
Tightening calibrate_tightening(const LpModel& model, const SolveOutcome& baseline, const ScInstance& instance);
// Adds backorder_cap_e<n>_t<t> and supply_cap_e<N>_t<t> rows.
void apply_tightening(LpModel& model, const ScInstance& instance, const Tightening& tightening);
// Calibrate + apply + confirm the optimum survives. Throws Error if it does not.
LpModel tighten(const LpModel& model, const ScInstance& instance, const SolveOutcome& baseline,
                Tightening* calibrated = nullptr, const SolverOptions& options = {});

struct SabotageRecord {
  ErrorType error_type = ErrorType::kME1;
  int echelon = 0;      // target echelon
  int period = 0;       // target period, 0 when the change spans the horizon
  std::string target;   // family prefix the perturbation touches
  double multiplier = 0.0;  // the drawn factor
  double magnitude = 0.0;   // resulting value (offset, rhs, coefficient, ...)
  double original = 0.0;    // value before the change, when a single one exists
  std::string description;
  std::vector<ModelEdit> edits;
  std::vector<Action> ground_truth_fix;
  IisCertificate gt_iis;  // filled in by verification
};

struct Sabotage {
  LpModel model;
  SabotageRecord record;
};

// Applies one error mechanism to a tightened model. Deterministic per seed.
// Throws ContractViolation if no echelon admits the mechanism.
Sabotage inject(const LpModel& tightened, const ScInstance& instance, const Tightening& tightening, ErrorType type,
                std::uint64_t seed);

struct VerificationReport {
  bool ok = false;
  SolveStatus sabotaged_status = SolveStatus::kInfeasible;
  IisCertificate iis;
  bool oracle_flags_sabotage = false;  // ME5: optimal but irrational before the fix
  SolveStatus repaired_status = SolveStatus::kInfeasible;
  bool repaired_rational = false;
  int replay_reward = 0;
  std::string diagnostics;  // first failing stage, empty when ok
};

// Confirms the sabotaged status, computes the reference certificate and replays
// the ground-truth fix through an Environment episode.
VerificationReport verify_sabotage(const LpModel& sabotaged, const ScInstance& instance, const SabotageRecord& record,
                                   const EnvironmentConfig& env_config = {});

}  // namespace screpair
