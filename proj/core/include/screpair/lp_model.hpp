#pragma once

#include <limits>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <unordered_map>
#include <variant>
#include <vector>

namespace screpair {

inline constexpr double kInfinity = std::numeric_limits<double>::infinity();

enum class Sense { kLessEqual, kGreaterEqual, kEqual };

std::string_view sense_symbol(Sense sense);

struct Term {
  int var = 0;
  double coef = 0.0;
  friend bool operator==(const Term&, const Term&) = default;
};

struct Variable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;
  friend bool operator==(const Variable&, const Variable&) = default;
};

struct Constraint {
  std::string name;
  std::vector<Term> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
  friend bool operator==(const Constraint&, const Constraint&) = default;
};

// True when `name` is `prefix` itself or continues it with '_' (so
// "capacity_e1" selects capacity_e1_t3 but "capacity_e1_t1" does not select
// capacity_e1_t10).
bool matches_prefix(std::string_view name, std::string_view prefix);

// A minimization LP over named variables and named linear rows. Names are
// unique within each kind; terms reference variables by index.
class LpModel {
 public:
  int add_variable(std::string name, double lower = 0.0, double upper = kInfinity,
                   double objective = 0.0);
  int add_constraint(std::string name, std::vector<Term> terms, Sense sense, double rhs);

  const std::vector<Variable>& variables() const noexcept { return variables_; }
  const std::vector<Constraint>& constraints() const noexcept { return constraints_; }
  int num_variables() const noexcept { return static_cast<int>(variables_.size()); }
  int num_constraints() const noexcept { return static_cast<int>(constraints_.size()); }

  const Variable& variable(int index) const { return variables_.at(index); }
  const Constraint& constraint(int index) const { return constraints_.at(index); }

  std::optional<int> find_variable(std::string_view name) const;
  std::optional<int> find_constraint(std::string_view name) const;
  // Throwing lookups: NameResolutionError carries near-miss suggestions.
  int variable_index(std::string_view name) const;
  int constraint_index(std::string_view name) const;

  std::vector<int> constraints_matching(std::string_view prefix) const;
  std::vector<int> variables_matching(std::string_view prefix) const;

  void set_rhs(int row, double rhs);
  void set_sense(int row, Sense sense);
  void set_bounds(int var, double lower, double upper);
  void set_objective(int var, double coef);
  // A zero coefficient removes the term.
  void set_coefficient(int row, int var, double coef);
  double coefficient(int row, int var) const;

  // Removes the given rows (indices into constraints()); order of the rest is kept.
  void remove_constraints(std::span<const int> rows);
  // Replaces an equality row by the pair {lhs <= rhs + amount, lhs >= rhs - amount}
  // named `<name>_ub` / `<name>_lb`, kept at the original position.
  void split_equality(int row, double amount);

  std::vector<std::string> near_miss_constraints(std::string_view name, std::size_t limit = 3) const;
  std::vector<std::string> near_miss_variables(std::string_view name, std::size_t limit = 3) const;

  // Row activity sum(coef * value) for a primal vector indexed like variables().
  double activity(int row, std::span<const double> primal) const;

  friend bool operator==(const LpModel& a, const LpModel& b) {
    return a.variables_ == b.variables_ && a.constraints_ == b.constraints_;
  }

 private:
  void reindex_constraints();

  std::vector<Variable> variables_;
  std::vector<Constraint> constraints_;
  std::unordered_map<std::string, int> variable_lookup_;
  std::unordered_map<std::string, int> constraint_lookup_;
};

// Serializable model edits. Sabotage recipes are lists of these so a bundle can
// rebuild its model from the clean instance.
namespace edit {
struct SetRhs {
  std::string row;
  double value = 0.0;
};
struct SetCoefficient {
  std::string row;
  std::string var;
  double value = 0.0;
};
struct SetObjective {
  std::string var;
  double value = 0.0;
};
struct SetBounds {
  std::string var;
  double lower = 0.0;
  double upper = kInfinity;
};
struct AddVariable {
  std::string name;
  double lower = 0.0;
  double upper = kInfinity;
  double objective = 0.0;
};
struct AddConstraint {
  std::string name;
  std::vector<std::pair<std::string, double>> terms;
  Sense sense = Sense::kLessEqual;
  double rhs = 0.0;
};
}  // namespace edit

using ModelEdit = std::variant<edit::SetRhs, edit::SetCoefficient, edit::SetObjective,
                               edit::SetBounds, edit::AddVariable, edit::AddConstraint>;

void apply_edit(LpModel& model, const ModelEdit& e);
void apply_edits(LpModel& model, std::span<const ModelEdit> edits);

}  // namespace screpair
