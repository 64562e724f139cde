#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace screpair {

enum class ActionKind {
  kGetIis,
  kCheckSlack,
  kRelaxConstraint,
  kDropConstraint,
  kUpdateObj,
  kUpdateBounds,
  kUpdateRhs,
  kSubmit,
};

enum class ActionCategory { kDiagnostic, kRepair, kMeta };

std::string_view action_kind_name(ActionKind kind);  // "RELAX_CONSTRAINT", ...
std::optional<ActionKind> find_action_kind(std::string_view name);
ActionCategory action_category(ActionKind kind);
inline bool is_repair(ActionKind kind) { return action_category(kind) == ActionCategory::kRepair; }

struct Action {
  ActionKind kind = ActionKind::kSubmit;
  std::string target;          // constraint/variable name or prefix; empty when unused
  std::vector<double> values;  // 1 scalar, or {lb, ub} for UPDATE_BOUNDS

  friend bool operator==(const Action&, const Action&) = default;

  static Action get_iis() { return {ActionKind::kGetIis, {}, {}}; }
  static Action submit() { return {ActionKind::kSubmit, {}, {}}; }
  static Action check_slack(std::string name) { return {ActionKind::kCheckSlack, std::move(name), {}}; }
  static Action relax(std::string prefix, double amount) {
    return {ActionKind::kRelaxConstraint, std::move(prefix), {amount}};
  }
  static Action drop(std::string prefix) { return {ActionKind::kDropConstraint, std::move(prefix), {}}; }
  static Action update_obj(std::string prefix, double v) { return {ActionKind::kUpdateObj, std::move(prefix), {v}}; }
  static Action update_rhs(std::string name, double v) { return {ActionKind::kUpdateRhs, std::move(name), {v}}; }
  static Action update_bounds(std::string var, double lb, double ub) {
    return {ActionKind::kUpdateBounds, std::move(var), {lb, ub}};
  }
};

// Arity and value checks (target presence, value count, finite numbers,
// lb <= ub, non-negative relax amount). Throws FormatError.
void validate_action(const Action& action);

// "KIND(target, v1, v2)"
std::string format_action(const Action& action);

// An agent reply normalized from either wire shape.
struct ActionMessage {
  Action action;
  std::string reasoning;
  std::optional<long long> tokens_used;
};

// Parses "Action: KIND(args)" (the last such line wins; <think> blocks are kept
// as reasoning). A bare "KIND(args)" is accepted too. Throws FormatError.
ActionMessage parse_action_text(std::string_view text);

// Parses the JSON object shape {"action", "target", "value", "reasoning"?,
// "tokens_used"?}. UPDATE_BOUNDS takes "value": [lb, ub] or "lb"/"ub" keys.
// Throws FormatError.
ActionMessage parse_action_json(std::string_view text);

// JSON first (if the text holds an object), else the text form.
ActionMessage parse_agent_response(std::string_view text);

std::string action_to_json(const Action& action, std::string_view reasoning = {},
                           std::optional<long long> tokens_used = std::nullopt);

}  // namespace screpair
