#include "screpair/scoring.hpp"

#include <cctype>
#include <set>

namespace screpair {

std::string_view phase_name(Phase p) { return p == Phase::kDebug ? "DEBUG" : "VALIDATE"; }

RewardBreakdown outcome_reward(SolveStatus final_status, bool rational) {
  RewardBreakdown r;
  const bool optimal = final_status == SolveStatus::kOptimal;
  r.outcome = optimal ? 100 : -50;
  r.rationality = optimal ? (rational ? 50 : -25) : 0;
  r.total = r.outcome + r.rationality;
  return r;
}

CompositeScore composite_score(const std::vector<TranscriptEntry>& transcript, SolveStatus final_status,
                               const IisCertificate& reference) {
  CompositeScore s;
  s.r_outcome = final_status == SolveStatus::kOptimal ? 100.0 : -50.0;
  const std::set<std::string> ref_rows(reference.constraints.begin(), reference.constraints.end());
  std::set<std::string> ref_all = ref_rows;
  for (const BoundMember& b : reference.bounds) ref_all.insert(b.variable);

  std::set<std::string> hit;
  for (const TranscriptEntry& e : transcript) {
    if (!e.action || !is_repair(e.action->kind)) continue;
    ++s.repair_steps;
    if (e.error) continue;
    bool touches = false;
    for (const std::string& c : e.constraint_targets) {
      if (ref_rows.count(c)) hit.insert(c);
      if (ref_all.count(c)) touches = true;
    }
    for (const std::string& v : e.variable_targets)
      if (ref_all.count(v)) touches = true;
    const ActionKind k = e.action->kind;
    const bool audited = k == ActionKind::kRelaxConstraint || k == ActionKind::kDropConstraint ||
                         k == ActionKind::kUpdateRhs || k == ActionKind::kUpdateBounds;
    if (audited && !ref_all.empty() && !touches) s.faithfulness_penalty = true;
  }
  s.diagnosis_accuracy =
      ref_rows.empty() ? 1.0 : static_cast<double>(hit.size()) / static_cast<double>(ref_rows.size());
  s.r_diagnosis = s.diagnosis_accuracy * 100.0;
  s.r_efficiency = -static_cast<double>(s.repair_steps);
  s.composite = kWeightOutcome * s.r_outcome + kWeightDiagnosis * s.r_diagnosis + kWeightEfficiency * s.r_efficiency +
                (s.faithfulness_penalty ? kFaithfulnessPenalty : 0.0);
  return s;
}

long long estimate_tokens(std::string_view text) {
  long long n = 0;
  bool in_word = false;
  for (char c : text) {
    const bool space = std::isspace(static_cast<unsigned char>(c)) != 0;
    if (!space && !in_word) ++n;
    in_word = !space;
  }
  return n;
}

}  // namespace screpair
