#include "screpair/lp_model.hpp"

#include <algorithm>
#include <cmath>

#include "screpair/error.hpp"

namespace screpair {

namespace {

std::size_t edit_distance(std::string_view a, std::string_view b) {
  std::vector<std::size_t> prev(b.size() + 1), cur(b.size() + 1);
  for (std::size_t j = 0; j <= b.size(); ++j) prev[j] = j;
  for (std::size_t i = 1; i <= a.size(); ++i) {
    cur[0] = i;
    for (std::size_t j = 1; j <= b.size(); ++j) {
      std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
    }
    std::swap(prev, cur);
  }
  return prev[b.size()];
}

template <typename Range, typename NameOf>
std::vector<std::string> closest_names(const Range& items, NameOf name_of, std::string_view name,
                                       std::size_t limit) {
  std::vector<std::pair<std::size_t, std::string>> scored;
  scored.reserve(items.size());
  for (const auto& item : items) {
    const std::string& candidate = name_of(item);
    scored.emplace_back(edit_distance(name, candidate), candidate);
  }
  std::stable_sort(scored.begin(), scored.end(),
                   [](const auto& a, const auto& b) { return a.first < b.first; });
  std::vector<std::string> out;
  for (std::size_t i = 0; i < scored.size() && i < limit; ++i) out.push_back(scored[i].second);
  return out;
}

std::string join(const std::vector<std::string>& names) {
  std::string out;
  for (std::size_t i = 0; i < names.size(); ++i) {
    if (i) out += ", ";
    out += names[i];
  }
  return out;
}

}  // namespace

NameResolutionError::NameResolutionError(std::string name, std::vector<std::string> near_misses)
    : Error("unknown name '" + name + "'" +
            (near_misses.empty() ? std::string() : "; did you mean: " + join(near_misses))),
      name_(std::move(name)),
      near_misses_(std::move(near_misses)) {}

std::string_view sense_symbol(Sense sense) {
  switch (sense) {
    case Sense::kLessEqual:
      return "<=";
    case Sense::kGreaterEqual:
      return ">=";
    case Sense::kEqual:
      return "=";
  }
  return "?";
}

bool matches_prefix(std::string_view name, std::string_view prefix) {
  if (prefix.empty() || !name.starts_with(prefix)) return false;
  return name.size() == prefix.size() || name[prefix.size()] == '_';
}

int LpModel::add_variable(std::string name, double lower, double upper, double objective) {
  if (name.empty()) throw InvalidInput("variable", "empty name");
  if (std::isnan(lower) || std::isnan(upper) || !std::isfinite(objective))
    throw InvalidInput(name, "non-numeric bound or objective");
  if (variable_lookup_.contains(name)) throw InvalidInput(name, "duplicate variable name");
  const int index = num_variables();
  variable_lookup_.emplace(name, index);
  variables_.push_back(Variable{std::move(name), lower, upper, objective});
  return index;
}

int LpModel::add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs) {
  if (name.empty()) throw InvalidInput("constraint", "empty name");
  if (constraint_lookup_.contains(name)) throw InvalidInput(name, "duplicate constraint name");
  if (!std::isfinite(rhs)) throw InvalidInput(name, "non-finite right-hand side");
  for (const Term& t : terms) {
    if (t.var < 0 || t.var >= num_variables())
      throw InvalidInput(name, "term references a missing variable");
    if (!std::isfinite(t.coef)) throw InvalidInput(name, "non-finite coefficient");
  }
  std::erase_if(terms, [](const Term& t) { return t.coef == 0.0; });
  const int index = num_constraints();
  constraint_lookup_.emplace(name, index);
  constraints_.push_back(Constraint{std::move(name), std::move(terms), sense, rhs});
  return index;
}

std::optional<int> LpModel::find_variable(std::string_view name) const {
  auto it = variable_lookup_.find(std::string(name));
  if (it == variable_lookup_.end()) return std::nullopt;
  return it->second;
}

std::optional<int> LpModel::find_constraint(std::string_view name) const {
  auto it = constraint_lookup_.find(std::string(name));
  if (it == constraint_lookup_.end()) return std::nullopt;
  return it->second;
}

int LpModel::variable_index(std::string_view name) const {
  if (auto idx = find_variable(name)) return *idx;
  throw NameResolutionError(std::string(name), near_miss_variables(name));
}

int LpModel::constraint_index(std::string_view name) const {
  if (auto idx = find_constraint(name)) return *idx;
  throw NameResolutionError(std::string(name), near_miss_constraints(name));
}

std::vector<int> LpModel::constraints_matching(std::string_view prefix) const {
  std::vector<int> out;
  for (int i = 0; i < num_constraints(); ++i)
    if (matches_prefix(constraints_[i].name, prefix)) out.push_back(i);
  return out;
}

std::vector<int> LpModel::variables_matching(std::string_view prefix) const {
  std::vector<int> out;
  for (int i = 0; i < num_variables(); ++i)
    if (matches_prefix(variables_[i].name, prefix)) out.push_back(i);
  return out;
}

void LpModel::set_rhs(int row, double rhs) {
  if (!std::isfinite(rhs)) throw InvalidInput(constraints_.at(row).name, "non-finite right-hand side");
  constraints_.at(row).rhs = rhs;
}

void LpModel::set_sense(int row, Sense sense) { constraints_.at(row).sense = sense; }

void LpModel::set_bounds(int var, double lower, double upper) {
  Variable& v = variables_.at(var);
  if (std::isnan(lower) || std::isnan(upper)) throw InvalidInput(v.name, "non-numeric bound");
  v.lower = lower;
  v.upper = upper;
}

void LpModel::set_objective(int var, double coef) {
  if (!std::isfinite(coef)) throw InvalidInput(variables_.at(var).name, "non-finite objective");
  variables_.at(var).objective = coef;
}

void LpModel::set_coefficient(int row, int var, double coef) {
  if (var < 0 || var >= num_variables()) throw InvalidInput("term", "missing variable");
  if (!std::isfinite(coef)) throw InvalidInput(constraints_.at(row).name, "non-finite coefficient");
  auto& terms = constraints_.at(row).terms;
  auto it = std::find_if(terms.begin(), terms.end(), [var](const Term& t) { return t.var == var; });
  if (coef == 0.0) {
    if (it != terms.end()) terms.erase(it);
  } else if (it != terms.end()) {
    it->coef = coef;
  } else {
    terms.push_back(Term{var, coef});
  }
}

double LpModel::coefficient(int row, int var) const {
  for (const Term& t : constraints_.at(row).terms)
    if (t.var == var) return t.coef;
  return 0.0;
}

void LpModel::remove_constraints(std::span<const int> rows) {
  if (rows.empty()) return;
  std::vector<bool> drop(constraints_.size(), false);
  for (int r : rows) drop.at(r) = true;
  std::vector<Constraint> kept;
  kept.reserve(constraints_.size());
  for (std::size_t i = 0; i < constraints_.size(); ++i)
    if (!drop[i]) kept.push_back(std::move(constraints_[i]));
  constraints_ = std::move(kept);
  reindex_constraints();
}

void LpModel::split_equality(int row, double amount) {
  Constraint original = constraints_.at(row);
  if (original.sense != Sense::kEqual) throw ContractViolation("split_equality on inequality row");
  const std::string upper_name = original.name + "_ub";
  const std::string lower_name = original.name + "_lb";
  if (constraint_lookup_.contains(upper_name) || constraint_lookup_.contains(lower_name))
    throw InvalidInput(original.name, "split rows already exist");
  Constraint upper{upper_name, original.terms, Sense::kLessEqual, original.rhs + amount};
  Constraint lower{lower_name, original.terms, Sense::kGreaterEqual, original.rhs - amount};
  constraints_[row] = std::move(upper);
  constraints_.insert(constraints_.begin() + row + 1, std::move(lower));
  reindex_constraints();
}

std::vector<std::string> LpModel::near_miss_constraints(std::string_view name, std::size_t limit) const {
  return closest_names(constraints_, [](const Constraint& c) -> const std::string& { return c.name; },
                       name, limit);
}

std::vector<std::string> LpModel::near_miss_variables(std::string_view name, std::size_t limit) const {
  return closest_names(variables_, [](const Variable& v) -> const std::string& { return v.name; },
                       name, limit);
}

double LpModel::activity(int row, std::span<const double> primal) const {
  double sum = 0.0;
  for (const Term& t : constraints_.at(row).terms) sum += t.coef * primal[t.var];
  return sum;
}

void LpModel::reindex_constraints() {
  constraint_lookup_.clear();
  for (int i = 0; i < num_constraints(); ++i) constraint_lookup_.emplace(constraints_[i].name, i);
}

void apply_edit(LpModel& model, const ModelEdit& e) {
  std::visit(
      [&model](const auto& op) {
        using T = std::decay_t<decltype(op)>;
        if constexpr (std::is_same_v<T, edit::SetRhs>) {
          model.set_rhs(model.constraint_index(op.row), op.value);
        } else if constexpr (std::is_same_v<T, edit::SetCoefficient>) {
          model.set_coefficient(model.constraint_index(op.row), model.variable_index(op.var), op.value);
        } else if constexpr (std::is_same_v<T, edit::SetObjective>) {
          model.set_objective(model.variable_index(op.var), op.value);
        } else if constexpr (std::is_same_v<T, edit::SetBounds>) {
          model.set_bounds(model.variable_index(op.var), op.lower, op.upper);
        } else if constexpr (std::is_same_v<T, edit::AddVariable>) {
          model.add_variable(op.name, op.lower, op.upper, op.objective);
        } else if constexpr (std::is_same_v<T, edit::AddConstraint>) {
          std::vector<Term> terms;
          terms.reserve(op.terms.size());
          for (const auto& [var, coef] : op.terms) terms.push_back(Term{model.variable_index(var), coef});
          model.add_constraint(op.name, std::move(terms), op.sense, op.rhs);
        }
      },
      e);
}

void apply_edits(LpModel& model, std::span<const ModelEdit> edits) {
  for (const ModelEdit& e : edits) apply_edit(model, e);
}

}  // namespace screpair
