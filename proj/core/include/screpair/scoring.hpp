#pragma once

#include <optional>
#include <string>
#include <vector>

#include "screpair/action.hpp"
#include "screpair/iis.hpp"
#include "screpair/simplex.hpp"

namespace screpair {

enum class Phase { kDebug, kValidate };
std::string_view phase_name(Phase p);  // "DEBUG" | "VALIDATE"

// One agent turn as recorded by the environment.
struct TranscriptEntry {
  int step = 0;
  std::string action_text;      // formatted action, or the raw message when unparseable
  std::optional<Action> action; // absent for malformed messages
  bool error = false;           // action rejected (model untouched)
  // Names the repair touched after prefix expansion; split rows are recorded
  // under their original name.
  std::vector<std::string> constraint_targets;
  std::vector<std::string> variable_targets;
  std::string outcome;
  SolveStatus status_after = SolveStatus::kInfeasible;
  Phase phase_after = Phase::kDebug;
  int loop_after = 0;
  std::string reasoning;
  std::optional<long long> tokens_used;
};

struct RewardBreakdown {
  int outcome = 0;      // +100 when OPTIMAL, else -50
  int rationality = 0;  // +50 rational, -25 optimal but irrational, 0 otherwise
  int total = 0;        // one of +150, +75, -50
  friend bool operator==(const RewardBreakdown&, const RewardBreakdown&) = default;
};

RewardBreakdown outcome_reward(SolveStatus final_status, bool rational);

struct CompositeScore {
  double r_outcome = 0.0;
  double diagnosis_accuracy = 0.0;
  double r_diagnosis = 0.0;
  double r_efficiency = 0.0;
  int repair_steps = 0;
  bool faithfulness_penalty = false;
  double composite = 0.0;
};

inline constexpr double kWeightOutcome = 0.5;
inline constexpr double kWeightDiagnosis = 0.3;
inline constexpr double kWeightEfficiency = 0.2;
inline constexpr double kFaithfulnessPenalty = -20.0;

// Diagnosis accuracy is recall of the reference certificate's constraints by the
// repair targets (1 when the reference has none). The penalty fires once if some
// successful RELAX / DROP / UPDATE_RHS / UPDATE_BOUNDS touched nothing in the
// reference certificate (rows or bound variables).
CompositeScore composite_score(const std::vector<TranscriptEntry>& transcript, SolveStatus final_status,
                               const IisCertificate& reference);

// Whitespace-delimited token count.
long long estimate_tokens(std::string_view text);

}  // namespace screpair
