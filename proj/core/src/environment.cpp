#include "screpair/environment.hpp"

#include <algorithm>
#include <cstdio>

#include "screpair/error.hpp"
#include "screpair/lp_text.hpp"

namespace screpair {

namespace {

std::string fixed(double v, int digits) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.*f", digits, v);
  return buf;
}

std::string quoted_list(const std::vector<std::string>& items, std::size_t limit, std::size_t total) {
  std::string s = "[";
  for (std::size_t i = 0; i < items.size() && i < limit; ++i) {
    if (i) s += ", ";
    s += "'" + items[i] + "'";
  }
  s += "]";
  if (total > limit) s += " (+" + std::to_string(total - limit) + " more, " + std::to_string(total) + " total)";
  return s;
}

std::string bound_text(const BoundMember& b) {
  return b.variable + (b.side == BoundSide::kLower ? " >= " : " <= ") + format_number(b.value);
}

}  // namespace

std::string strip_split_suffix(std::string_view name) {
  for (std::string_view suffix : {"_ub", "_lb"}) {
    while (name.size() > suffix.size() && name.substr(name.size() - suffix.size()) == suffix)
      name.remove_suffix(suffix.size());
  }
  return std::string(name);
}

RepairEffect apply_repair(LpModel& model, const Action& a) {
  validate_action(a);
  RepairEffect eff;
  LpModel work = model;
  auto no_match = [&](bool constraints) -> NameResolutionError {
    return NameResolutionError(a.target, constraints ? work.near_miss_constraints(a.target)
                                                     : work.near_miss_variables(a.target));
  };
  switch (a.kind) {
    case ActionKind::kRelaxConstraint: {
      std::vector<int> rows = work.constraints_matching(a.target);
      if (rows.empty()) throw no_match(true);
      const double amount = a.values[0];
      for (int r : rows) eff.constraints.push_back(strip_split_suffix(work.constraint(r).name));
      // Back to front so splitting an equality does not shift pending indices.
      for (auto it = rows.rbegin(); it != rows.rend(); ++it) {
        const Constraint& c = work.constraint(*it);
        switch (c.sense) {
          case Sense::kLessEqual:
            work.set_rhs(*it, c.rhs + amount);
            break;
          case Sense::kGreaterEqual:
            work.set_rhs(*it, c.rhs - amount);
            break;
          case Sense::kEqual:
            work.split_equality(*it, amount);
            break;
        }
      }
      break;
    }
    case ActionKind::kDropConstraint: {
      std::vector<int> rows = work.constraints_matching(a.target);
      if (rows.empty()) throw no_match(true);
      for (int r : rows) eff.constraints.push_back(strip_split_suffix(work.constraint(r).name));
      work.remove_constraints(rows);
      break;
    }
    case ActionKind::kUpdateRhs: {
      const int r = work.constraint_index(a.target);
      eff.constraints.push_back(strip_split_suffix(work.constraint(r).name));
      work.set_rhs(r, a.values[0]);
      break;
    }
    case ActionKind::kUpdateObj: {
      std::vector<int> vars = work.variables_matching(a.target);
      if (vars.empty()) throw no_match(false);
      for (int v : vars) {
        eff.variables.push_back(work.variable(v).name);
        work.set_objective(v, a.values[0]);
      }
      break;
    }
    case ActionKind::kUpdateBounds: {
      const int v = work.variable_index(a.target);
      eff.variables.push_back(work.variable(v).name);
      work.set_bounds(v, a.values[0], a.values[1]);
      break;
    }
    default:
      throw ContractViolation("apply_repair called with a non-repair action");
  }
  model = std::move(work);
  return eff;
}

std::string render_observation(const Observation& o, std::size_t iis_limit) {
  std::string s;
  if (o.step == 0 && !o.nl_description.empty()) s += "## Problem Description\n" + o.nl_description + "\n";
  s += "## Current State\n";
  s += "- Solver Status: " + std::string(status_name(o.status)) + "\n";
  s += "- Step: " + std::to_string(o.step) + "\n";
  if (o.objective) s += "- Objective Value: " + fixed(*o.objective, 1) + "\n";
  s += "- Phase: " + std::string(phase_name(o.phase)) + "\n";
  if (!o.message.empty()) s += std::string("- Last Action Result: ") + (o.action_error ? "ERROR: " : "") + o.message + "\n";

  if (o.iis) {
    s += "\n## IIS (Irreducible Infeasible Subsystem)\n";
    s += "- Conflicting Constraints: " + quoted_list(o.iis->constraints, iis_limit, o.iis->constraints.size()) + "\n";
    std::vector<std::string> bounds;
    for (const BoundMember& b : o.iis->bounds) bounds.push_back(bound_text(b));
    s += "- Conflicting Bounds: " + quoted_list(bounds, iis_limit, bounds.size()) + "\n";
  }

  s += "\n## Model Structure\n";
  s += "- Total Constraints: " + std::to_string(o.n_constraints) + "\n";
  s += "- Total Variables: " + std::to_string(o.n_variables) + "\n";
  s += "- Constraint Names (first " + std::to_string(o.constraint_preview.size()) +
       "): " + quoted_list(o.constraint_preview, o.constraint_preview.size(), o.constraint_preview.size()) + "\n";

  if (o.entered_validation) s += "\n-> Entering Phase 2 (Rationality Oracle)\n";

  if (o.verdict && o.verdict->pass) {
    s += "\n## Rationality Check: PASSED\n";
    for (const CheckResult& c : o.verdict->checks)
      s += "- " + std::string(check_title(c.id)) + ": " +
           (c.status == CheckStatus::kNotApplicable ? "N/A" : "PASS") + "\n";
  } else if (!o.rationality_feedback.empty()) {
    s += "\n## Rationality Feedback (from Phase 2 Oracle)\n" + o.rationality_feedback + "\n";
  }

  if (o.loop_count > 0 || o.phase == Phase::kValidate) {
    s += "\n## Closed-Loop Status\n";
    s += std::string("- Phase: ") +
         (o.loop_back ? "VALIDATE -> DEBUG (loop-back)" : std::string(phase_name(o.phase))) + "\n";
    s += "- Debug-Validate Loop: " + std::to_string(o.loop_count) + "\n";
  }

  if (!o.history.empty()) {
    s += "\n## Recent History\n";
    const std::size_t from = o.history.size() > 5 ? o.history.size() - 5 : 0;
    for (std::size_t i = from; i < o.history.size(); ++i) {
      const TranscriptEntry& e = o.history[i];
      s += "- Step " + std::to_string(e.step) + ": " + e.action_text + " -> " + (e.error ? "ERROR: " : "") +
           e.outcome + "\n";
    }
  }
  if (o.terminal) {
    s += "\nEpisode complete.\n";
  } else {
    s += "\nWhat action should be taken next?\n";
  }
  return s;
}

Environment::Environment(EnvironmentConfig config) : config_(std::move(config)) {
  config_.oracle.validate();
  if (config_.max_steps < 1) throw InvalidInput("max_steps", "must be >= 1");
  if (config_.max_loops < 0) throw InvalidInput("max_loops", "must be >= 0");
}

Observation Environment::reset(EpisodeSpec spec) {
  validate(spec.instance);
  spec_ = std::move(spec);
  outcome_ = solve(spec_.model, config_.solver);
  iis_.reset();
  iis_visible_ = false;
  verdict_.reset();
  feedback_.clear();
  phase_ = Phase::kDebug;
  step_ = 0;
  loops_ = 0;
  terminal_ = false;
  started_ = true;
  transcript_.clear();
  reported_tokens_ = 0;
  any_reported_ = false;
  estimated_tokens_ = 0;
  result_ = EpisodeResult{};

  if (outcome_.optimal()) {
    phase_ = Phase::kValidate;
    verdict_ = evaluate(spec_.model, outcome_, spec_.instance, spec_.error_type, config_.oracle);
    feedback_ = verdict_->feedback;
  } else if (outcome_.status == SolveStatus::kInfeasible && config_.attach_iis_at_reset) {
    iis_ = compute_iis(spec_.model, config_.solver);
    iis_visible_ = true;
  }
  Observation obs = observe();
  estimated_tokens_ += estimate_tokens(render_observation(obs, config_.iis_display_limit));
  return obs;
}

Observation Environment::base_observation() const {
  Observation o;
  o.episode_id = spec_.id;
  o.nl_description = spec_.nl_description;
  o.problem = {spec_.instance.n_echelons, spec_.instance.n_periods, spec_.instance.mean_demand()};
  o.status = outcome_.status;
  o.objective = outcome_.objective;
  if (iis_visible_ && iis_ && outcome_.status == SolveStatus::kInfeasible) o.iis = iis_;
  o.n_constraints = spec_.model.num_constraints();
  o.n_variables = spec_.model.num_variables();
  const int k = std::min<int>(static_cast<int>(config_.constraint_preview), spec_.model.num_constraints());
  for (int i = 0; i < k; ++i) o.constraint_preview.push_back(spec_.model.constraint(i).name);
  o.history = transcript_;
  o.step = step_;
  o.phase = phase_;
  o.loop_count = loops_;
  if (phase_ == Phase::kValidate || loops_ > 0) o.rationality_feedback = feedback_;
  o.verdict = verdict_;
  o.terminal = terminal_;
  return o;
}

Observation Environment::observe() const {
  if (!started_) throw ContractViolation("observe() before reset()");
  return base_observation();
}

const EpisodeResult& Environment::result() const {
  if (!terminal_) throw ContractViolation("episode is still running");
  return result_;
}

void Environment::charge_tokens(const std::string& text, std::optional<long long> reported) {
  if (reported) {
    reported_tokens_ += *reported;
    any_reported_ = true;
  }
  estimated_tokens_ += estimate_tokens(text);
}

void Environment::record(TranscriptEntry entry) {
  entry.status_after = outcome_.status;
  entry.phase_after = phase_;
  entry.loop_after = loops_;
  transcript_.push_back(std::move(entry));
}

void Environment::finish(std::string termination) {
  terminal_ = true;
  EpisodeResult& r = result_;
  r.episode_id = spec_.id;
  r.error_type = spec_.error_type;
  r.final_status = outcome_.status;
  r.termination = std::move(termination);
  const bool aborted = r.termination == "aborted";
  r.rational = !aborted && outcome_.optimal() && verdict_ && verdict_->pass;
  r.reward = aborted ? RewardBreakdown{-50, 0, -50} : outcome_reward(outcome_.status, r.rational);
  r.composite = composite_score(transcript_, aborted ? SolveStatus::kInfeasible : outcome_.status, spec_.gt_iis);
  r.steps_used = step_;
  r.loops_used = loops_;
  r.tokens_estimated = !any_reported_;
  r.token_count = any_reported_ ? reported_tokens_ : estimated_tokens_;
  r.transcript = transcript_;
}

void Environment::resolve_after_repair(TranscriptEntry& entry, Observation& obs) {
  outcome_ = solve(spec_.model, config_.solver);
  iis_.reset();
  iis_visible_ = false;
  switch (outcome_.status) {
    case SolveStatus::kInfeasible:
      iis_ = compute_iis(spec_.model, config_.solver);
      iis_visible_ = true;
      phase_ = Phase::kDebug;
      entry.outcome += "; status INFEASIBLE, IIS has " + std::to_string(iis_->size()) + " members";
      return;
    case SolveStatus::kUnbounded:
      phase_ = Phase::kDebug;
      entry.outcome += "; status UNBOUNDED";
      return;
    case SolveStatus::kOptimal:
      break;
  }
  phase_ = Phase::kValidate;
  obs.entered_validation = true;
  verdict_ = evaluate(spec_.model, outcome_, spec_.instance, spec_.error_type, config_.oracle);
  entry.outcome += "; status OPTIMAL, objective " + fixed(*outcome_.objective, 1);
  if (verdict_->pass) {
    feedback_.clear();
    entry.outcome += ", rationality PASSED";
    record(std::move(entry));
    finish("rational_optimal");
    return;
  }
  feedback_ = verdict_->feedback;
  entry.outcome += ", rationality FAILED";
  if (loops_ < config_.max_loops) {
    ++loops_;
    phase_ = Phase::kDebug;
    obs.loop_back = true;
  } else {
    record(std::move(entry));
    finish("loop_budget");
  }
}

Observation Environment::after_step(Observation partial) {
  if (!terminal_ && step_ >= config_.max_steps) finish("step_budget");
  Observation obs = base_observation();
  obs.message = partial.message;
  obs.action_error = partial.action_error;
  obs.loop_back = partial.loop_back;
  obs.entered_validation = partial.entered_validation;
  estimated_tokens_ += estimate_tokens(render_observation(obs, config_.iis_display_limit));
  if (terminal_) result_.token_count = any_reported_ ? reported_tokens_ : estimated_tokens_;
  return obs;
}

Observation Environment::step(const Action& action, std::string reasoning, std::optional<long long> tokens_used) {
  if (!started_) throw ContractViolation("step() before reset()");
  if (terminal_) throw ContractViolation("step() on a finished episode");
  ++step_;
  TranscriptEntry entry;
  entry.step = step_;
  entry.action = action;
  entry.reasoning = std::move(reasoning);
  entry.tokens_used = tokens_used;
  Observation partial;
  try {
    validate_action(action);
    entry.action_text = format_action(action);
  } catch (const FormatError& e) {
    entry.action_text = std::string(action_kind_name(action.kind)) + "(" + action.target + ")";
    entry.error = true;
    entry.outcome = e.what();
  }
  charge_tokens(entry.action_text + " " + entry.reasoning, tokens_used);

  bool recorded = false;
  if (!entry.error) {
    switch (action.kind) {
      case ActionKind::kGetIis:
        if (outcome_.status != SolveStatus::kInfeasible) {
          entry.error = true;
          entry.outcome = "GET_IIS requires an INFEASIBLE model; status is " + std::string(status_name(outcome_.status));
        } else {
          if (!iis_) iis_ = compute_iis(spec_.model, config_.solver);
          iis_visible_ = true;
          entry.outcome = "IIS has " + std::to_string(iis_->constraints.size()) + " constraints and " +
                          std::to_string(iis_->bounds.size()) + " bounds";
        }
        break;
      case ActionKind::kCheckSlack:
        if (!outcome_.optimal()) {
          entry.error = true;
          entry.outcome = "CHECK_SLACK requires an OPTIMAL solution; status is " +
                          std::string(status_name(outcome_.status));
        } else {
          try {
            entry.outcome = "slack of " + action.target + " = " + format_number(check_slack(spec_.model, outcome_, action.target));
          } catch (const NameResolutionError& e) {
            entry.error = true;
            entry.outcome = e.what();
          }
        }
        break;
      case ActionKind::kSubmit:
        entry.outcome = "submitted";
        record(std::move(entry));
        recorded = true;
        finish("submitted");
        break;
      default:
        try {
          RepairEffect eff = apply_repair(spec_.model, action);
          entry.constraint_targets = std::move(eff.constraints);
          entry.variable_targets = std::move(eff.variables);
          entry.outcome = "applied to " + std::to_string(entry.constraint_targets.size() + entry.variable_targets.size()) +
                          (entry.constraint_targets.empty() ? " variable(s)" : " constraint(s)");
          resolve_after_repair(entry, partial);
          recorded = terminal_;
        } catch (const NameResolutionError& e) {
          entry.error = true;
          entry.outcome = e.what();
        } catch (const FormatError& e) {
          entry.error = true;
          entry.outcome = e.what();
        } catch (const InvalidInput& e) {
          entry.error = true;
          entry.outcome = e.what();
        }
        break;
    }
  }
  partial.message = recorded ? transcript_.back().outcome : entry.outcome;
  partial.action_error = recorded ? transcript_.back().error : entry.error;
  if (!recorded) record(std::move(entry));
  return after_step(std::move(partial));
}

Observation Environment::reject(std::string raw, std::string error, std::optional<long long> tokens_used) {
  if (!started_) throw ContractViolation("reject() before reset()");
  if (terminal_) throw ContractViolation("reject() on a finished episode");
  ++step_;
  TranscriptEntry entry;
  entry.step = step_;
  entry.action_text = std::move(raw);
  entry.error = true;
  entry.outcome = "unparseable action: " + error;
  entry.tokens_used = tokens_used;
  charge_tokens(entry.action_text, tokens_used);
  Observation partial;
  partial.message = entry.outcome;
  partial.action_error = true;
  record(std::move(entry));
  return after_step(std::move(partial));
}

void Environment::abort(std::string tag) {
  if (!started_) throw ContractViolation("abort() before reset()");
  if (terminal_) return;
  finish("aborted");
  result_.error_tag = std::move(tag);
}

}  // namespace screpair
