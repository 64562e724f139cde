#pragma once

#include <optional>
#include <string>
#include <vector>

#include "screpair/action.hpp"
#include "screpair/error_type.hpp"
#include "screpair/iis.hpp"
#include "screpair/instance.hpp"
#include "screpair/lp_model.hpp"
#include "screpair/oracle.hpp"
#include "screpair/scoring.hpp"
#include "screpair/simplex.hpp"

namespace screpair {

// What an episode needs: the live (sabotaged) model, the reference instance
// for the oracle, and the reference certificate for scoring.
struct EpisodeSpec {
  std::string id;
  ErrorType error_type = ErrorType::kME1;
  ScInstance instance;
  LpModel model;
  std::string nl_description;
  IisCertificate gt_iis;
};

struct EnvironmentConfig {
  int max_steps = 20;
  int max_loops = 3;
  std::size_t iis_display_limit = 25;
  std::size_t constraint_preview = 10;
  bool attach_iis_at_reset = false;
  OracleConfig oracle;
  SolverOptions solver;
};

struct ProblemSummary {
  int n_echelons = 0;
  int n_periods = 0;
  double mean_demand = 0.0;
};

struct Observation {
  std::string episode_id;
  std::string nl_description;
  ProblemSummary problem;
  SolveStatus status = SolveStatus::kInfeasible;
  std::optional<double> objective;
  std::optional<IisCertificate> iis;
  int n_constraints = 0;
  int n_variables = 0;
  std::vector<std::string> constraint_preview;
  std::vector<TranscriptEntry> history;
  int step = 0;
  Phase phase = Phase::kDebug;
  int loop_count = 0;
  bool loop_back = false;          // this step sent the episode from VALIDATE back to DEBUG
  bool entered_validation = false; // this step reached OPTIMAL and ran the oracle
  std::string rationality_feedback;
  std::optional<RationalityVerdict> verdict;
  std::string message;  // result of the last action
  bool action_error = false;
  bool terminal = false;
};

// Plain-text layout for text agents.
std::string render_observation(const Observation& obs, std::size_t iis_display_limit = 25);

struct EpisodeResult {
  std::string episode_id;
  ErrorType error_type = ErrorType::kME1;
  SolveStatus final_status = SolveStatus::kInfeasible;
  bool rational = false;
  RewardBreakdown reward;
  CompositeScore composite;
  int steps_used = 0;
  int loops_used = 0;
  long long token_count = 0;
  bool tokens_estimated = true;
  std::string termination;  // rational_optimal | submitted | step_budget | loop_budget | aborted
  std::string error_tag;
  std::vector<TranscriptEntry> transcript;
};

// Names a repair touched, after prefix expansion.
struct RepairEffect {
  std::vector<std::string> constraints;
  std::vector<std::string> variables;
};

// Applies one repair action to the model. Zero matches raise
// NameResolutionError; bad values raise FormatError. The model is unchanged
// when it throws.
RepairEffect apply_repair(LpModel& model, const Action& action);

// "<name>_ub" / "<name>_lb" -> "<name>"
std::string strip_split_suffix(std::string_view name);

// One episode as a deterministic state machine.
class Environment {
 public:
  explicit Environment(EnvironmentConfig config = {});

  Observation reset(EpisodeSpec spec);
  Observation step(const Action& action, std::string reasoning = {},
                   std::optional<long long> tokens_used = std::nullopt);
  // A message that did not parse: costs a step, changes nothing else.
  Observation reject(std::string raw, std::string error, std::optional<long long> tokens_used = std::nullopt);
  // Transport loss or agent crash: ends the episode as a failure.
  void abort(std::string tag);

  bool terminal() const noexcept { return terminal_; }
  const EpisodeResult& result() const;
  Observation observe() const;

  const LpModel& model() const noexcept { return spec_.model; }
  SolveStatus status() const noexcept { return outcome_.status; }
  Phase phase() const noexcept { return phase_; }
  int step_index() const noexcept { return step_; }
  int loop_count() const noexcept { return loops_; }
  const EnvironmentConfig& config() const noexcept { return config_; }
  const EpisodeSpec& spec() const noexcept { return spec_; }

 private:
  void resolve_after_repair(TranscriptEntry& entry, Observation& obs);
  void record(TranscriptEntry entry);
  void finish(std::string termination);
  void charge_tokens(const std::string& text, std::optional<long long> reported);
  Observation base_observation() const;
  Observation after_step(Observation obs);

  EnvironmentConfig config_;
  EpisodeSpec spec_;
  SolveOutcome outcome_;
  std::optional<IisCertificate> iis_;
  bool iis_visible_ = false;
  std::optional<RationalityVerdict> verdict_;
  std::string feedback_;
  Phase phase_ = Phase::kDebug;
  int step_ = 0;
  int loops_ = 0;
  bool terminal_ = false;
  bool started_ = false;
  std::vector<TranscriptEntry> transcript_;
  long long reported_tokens_ = 0;
  bool any_reported_ = false;
  long long estimated_tokens_ = 0;
  EpisodeResult result_;
};

}  // namespace screpair
