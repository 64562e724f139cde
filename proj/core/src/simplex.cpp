#include "screpair/simplex.hpp"

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <memory>
#include <string>

#include "screpair/error.hpp"
#include "simplex_internal.hpp"

namespace screpair {

namespace detail {

namespace {

enum class ColumnKind : unsigned char { kStructural, kSlack, kArtificial };

// How a model variable is expressed through non-negative tableau columns.
enum class VarForm : unsigned char {
  kAbsent,   // not part of the subsystem
  kShifted,  // x = lower + y
  kMirrored, // x = upper - y
  kFree,     // x = y_plus - y_minus
};

struct VarMap {
  VarForm form = VarForm::kAbsent;
  int col = -1;
  int col_neg = -1;
  double anchor = 0.0;
};

// Where a standardized row came from.
struct RowOrigin {
  bool is_upper_bound = false;
  int index = -1;  // model row, or variable for an upper-bound row
};

class Tableau {
 public:
  Tableau(int rows, int cols) : m_(rows), n_(cols), a_(static_cast<std::size_t>(rows) * cols, 0.0),
        b_(rows, 0.0), d_(cols, 0.0), basis_(rows, -1), eligible_(cols, 1), active_(rows, 1) {}

  double& at(int i, int j) { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double at(int i, int j) const { return a_[static_cast<std::size_t>(i) * n_ + j]; }
  double* row(int i) { return &a_[static_cast<std::size_t>(i) * n_]; }

  int m_;
  int n_;
  std::vector<double> a_;
  std::vector<double> b_;
  std::vector<double> d_;
  double z_ = 0.0;
  std::vector<int> basis_;
  std::vector<char> eligible_;
  std::vector<char> active_;

  void pivot(int r, int q) {
    double* pr = row(r);
    const double inv = 1.0 / pr[q];
    nz_.clear();
    for (int k = 0; k < n_; ++k) {
      if (pr[k] == 0.0) continue;
      pr[k] *= inv;
      if (std::abs(pr[k]) < 1e-13) {
        pr[k] = 0.0;
        continue;
      }
      nz_.push_back(k);
    }
    pr[q] = 1.0;
    b_[r] *= inv;
    for (int i = 0; i < m_; ++i) {
      if (i == r) continue;
      double* pi = row(i);
      const double f = pi[q];
      if (f == 0.0) continue;
      for (int k : nz_) {
        double v = pi[k] - f * pr[k];
        pi[k] = std::abs(v) < 1e-13 ? 0.0 : v;
      }
      pi[q] = 0.0;
      b_[i] -= f * b_[r];
      if (b_[i] < 0.0 && b_[i] > -1e-11) b_[i] = 0.0;
    }
    const double f = d_[q];
    if (f != 0.0) {
      for (int k : nz_) d_[k] -= f * pr[k];
      d_[q] = 0.0;
      z_ += f * b_[r];
    }
    basis_[r] = q;
  }

 private:
  std::vector<int> nz_;
};

enum class IterateResult { kOptimal, kUnbounded };

class Engine {
 public:
  Engine(const LpModel& model, const Selection& sel, const SolverOptions& opt)
      : model_(model), sel_(sel), opt_(opt) {
    build();
  }

  // Phase 1; returns true if feasible.
  bool phase_one() {
    const bool ok = iterate() == IterateResult::kOptimal;
    if (!ok) throw SolverError("phase 1 reported unbounded");
    double w = 0.0;
    for (int i = 0; i < tab_->m_; ++i)
      if (kind_[tab_->basis_[i]] == ColumnKind::kArtificial) w += tab_->b_[i];
    return w <= opt_.feasibility_tol;
  }

  FeasibilityResult certificate() const {
    FeasibilityResult res;
    const Tableau& t = *tab_;
    const double tol = 1e-9;
    std::vector<double> y(t.m_);
    for (int i = 0; i < t.m_; ++i) {
      const int c = init_col_[i];
      const double cost = kind_[c] == ColumnKind::kArtificial ? 1.0 : 0.0;
      y[i] = cost - t.d_[c];
    }
    std::vector<char> row_member(model_.num_constraints(), 0);
    std::vector<char> lower_member(model_.num_variables(), 0), upper_member(model_.num_variables(), 0);
    for (int i = 0; i < t.m_; ++i) {
      if (std::abs(y[i]) <= tol) continue;
      if (origin_[i].is_upper_bound)
        upper_member[origin_[i].index] = 1;
      else
        row_member[origin_[i].index] = 1;
    }
    for (int j = 0; j < model_.num_variables(); ++j) {
      const VarMap& vm = vars_[j];
      if (vm.form == VarForm::kShifted && t.d_[vm.col] > tol) lower_member[j] = 1;
      if (vm.form == VarForm::kMirrored && t.d_[vm.col] > tol) upper_member[j] = 1;
    }
    for (int r : sel_.rows)
      if (row_member[r]) res.row_support.push_back(r);
    for (int j = 0; j < model_.num_variables(); ++j) {
      if (lower_member[j]) res.lower_support.push_back(j);
      if (upper_member[j]) res.upper_support.push_back(j);
    }
    return res;
  }

  SolveOutcome phase_two() {
    Tableau& t = *tab_;
    // Drive zero-level artificials out of the basis; rows where that is
    // impossible are redundant and get switched off.
    for (int i = 0; i < t.m_; ++i) {
      if (kind_[t.basis_[i]] != ColumnKind::kArtificial) continue;
      int best = -1;
      double best_abs = opt_.pivot_tol;
      for (int k = 0; k < t.n_; ++k) {
        if (kind_[k] == ColumnKind::kArtificial) continue;
        const double v = std::abs(t.at(i, k));
        if (v > best_abs) {
          best_abs = v;
          best = k;
        }
      }
      t.b_[i] = 0.0;
      if (best >= 0)
        t.pivot(i, best);
      else
        t.active_[i] = 0;
    }
    for (int k = 0; k < t.n_; ++k)
      if (kind_[k] == ColumnKind::kArtificial) t.eligible_[k] = 0;

    std::fill(t.d_.begin(), t.d_.end(), 0.0);
    for (int k = 0; k < t.n_; ++k) t.d_[k] = cost_[k];
    t.z_ = 0.0;
    for (int i = 0; i < t.m_; ++i) {
      const double cb = cost_[t.basis_[i]];
      if (cb == 0.0) continue;
      const double* pi = t.row(i);
      for (int k = 0; k < t.n_; ++k)
        if (pi[k] != 0.0) t.d_[k] -= cb * pi[k];
      t.z_ += cb * t.b_[i];
    }

    SolveOutcome out;
    const IterateResult r = iterate();
    out.iterations = iterations_;
    if (r == IterateResult::kUnbounded) {
      out.status = SolveStatus::kUnbounded;
      return out;
    }
    std::vector<double> colval(t.n_, 0.0);
    for (int i = 0; i < t.m_; ++i) colval[t.basis_[i]] = std::max(0.0, t.b_[i]);
    out.status = SolveStatus::kOptimal;
    out.primal.assign(model_.num_variables(), 0.0);
    for (int j = 0; j < model_.num_variables(); ++j) {
      const VarMap& vm = vars_[j];
      switch (vm.form) {
        case VarForm::kShifted:
          out.primal[j] = vm.anchor + colval[vm.col];
          break;
        case VarForm::kMirrored:
          out.primal[j] = vm.anchor - colval[vm.col];
          break;
        case VarForm::kFree:
          out.primal[j] = colval[vm.col] - colval[vm.col_neg];
          break;
        case VarForm::kAbsent:
          break;
      }
    }
    return out;
  }

  int iterations() const { return iterations_; }

 private:
  void build() {
    const double inf = opt_.infinity;
    const int nv = model_.num_variables();
    vars_.assign(nv, VarMap{});
    int ncols = 0;
    std::vector<std::pair<int, double>> ub_rows;  // (var, bound value - anchor)
    for (int j = 0; j < nv; ++j) {
      if (!sel_.include_var[j]) continue;
      const Variable& v = model_.variable(j);
      const double lo = sel_.use_lower[j] && v.lower > -inf ? v.lower : -kInfinity;
      const double hi = sel_.use_upper[j] && v.upper < inf ? v.upper : kInfinity;
      VarMap& vm = vars_[j];
      if (std::isfinite(lo)) {
        vm.form = VarForm::kShifted;
        vm.anchor = lo;
        vm.col = ncols++;
        if (std::isfinite(hi)) ub_rows.emplace_back(j, hi - lo);
      } else if (std::isfinite(hi)) {
        vm.form = VarForm::kMirrored;
        vm.anchor = hi;
        vm.col = ncols++;
      } else {
        vm.form = VarForm::kFree;
        vm.col = ncols++;
        vm.col_neg = ncols++;
      }
    }
    const int nstruct = ncols;

    struct RowSpec {
      std::vector<std::pair<int, double>> coefs;
      Sense sense;
      double rhs;
      RowOrigin origin;
    };
    std::vector<RowSpec> rows;
    rows.reserve(sel_.rows.size() + ub_rows.size());
    for (int r : sel_.rows) {
      const Constraint& c = model_.constraint(r);
      RowSpec spec{{}, c.sense, c.rhs, RowOrigin{false, r}};
      for (const Term& term : c.terms) {
        const VarMap& vm = vars_[term.var];
        switch (vm.form) {
          case VarForm::kShifted:
            spec.coefs.emplace_back(vm.col, term.coef);
            spec.rhs -= term.coef * vm.anchor;
            break;
          case VarForm::kMirrored:
            spec.coefs.emplace_back(vm.col, -term.coef);
            spec.rhs -= term.coef * vm.anchor;
            break;
          case VarForm::kFree:
            spec.coefs.emplace_back(vm.col, term.coef);
            spec.coefs.emplace_back(vm.col_neg, -term.coef);
            break;
          case VarForm::kAbsent:
            throw SolverError("row '" + c.name + "' references a variable outside the subsystem");
        }
      }
      rows.push_back(std::move(spec));
    }
    for (auto [j, width] : ub_rows)
      rows.push_back(RowSpec{{{vars_[j].col, 1.0}}, Sense::kLessEqual, width, RowOrigin{true, j}});

    const int m = static_cast<int>(rows.size());
    int nslack = 0;
    for (const RowSpec& r : rows)
      if (r.sense != Sense::kEqual) ++nslack;
    // An artificial is needed unless the row's slack enters with +1 after
    // making the right-hand side non-negative.
    int nart = 0;
    for (const RowSpec& r : rows) {
      const bool flip = r.rhs < 0.0;
      const bool slack_plus = (r.sense == Sense::kLessEqual && !flip) || (r.sense == Sense::kGreaterEqual && flip);
      if (!slack_plus) ++nart;
    }
    const int ntotal = nstruct + nslack + nart;
    tab_ = std::make_unique<Tableau>(m, ntotal);
    Tableau& t = *tab_;
    kind_.assign(ntotal, ColumnKind::kStructural);
    cost_.assign(ntotal, 0.0);
    init_col_.assign(m, -1);
    origin_.resize(m);

    for (int j = 0; j < nv; ++j) {
      const VarMap& vm = vars_[j];
      const double c = model_.variable(j).objective;
      switch (vm.form) {
        case VarForm::kShifted:
          cost_[vm.col] = c;
          break;
        case VarForm::kMirrored:
          cost_[vm.col] = -c;
          break;
        case VarForm::kFree:
          cost_[vm.col] = c;
          cost_[vm.col_neg] = -c;
          break;
        case VarForm::kAbsent:
          break;
      }
    }

    int next_slack = nstruct;
    int next_art = nstruct + nslack;
    for (int i = 0; i < m; ++i) {
      const RowSpec& r = rows[i];
      origin_[i] = r.origin;
      const double sign = r.rhs < 0.0 ? -1.0 : 1.0;
      double* pi = t.row(i);
      for (auto [col, coef] : r.coefs) pi[col] += sign * coef;
      t.b_[i] = sign * r.rhs;
      int slack_col = -1;
      double slack_coef = 0.0;
      if (r.sense != Sense::kEqual) {
        slack_col = next_slack++;
        kind_[slack_col] = ColumnKind::kSlack;
        slack_coef = sign * (r.sense == Sense::kLessEqual ? 1.0 : -1.0);
        pi[slack_col] = slack_coef;
      }
      if (slack_col >= 0 && slack_coef > 0.0) {
        init_col_[i] = slack_col;
      } else {
        const int art = next_art++;
        kind_[art] = ColumnKind::kArtificial;
        pi[art] = 1.0;
        init_col_[i] = art;
      }
      t.basis_[i] = init_col_[i];
    }

    // Phase-1 reduced costs: artificial columns cost 1.
    for (int i = 0; i < m; ++i) {
      if (kind_[t.basis_[i]] != ColumnKind::kArtificial) continue;
      const double* pi = t.row(i);
      for (int k = 0; k < ntotal; ++k)
        if (kind_[k] != ColumnKind::kArtificial && pi[k] != 0.0) t.d_[k] -= pi[k];
      t.z_ += t.b_[i];
    }
  }

  int choose_entering(bool bland) const {
    const Tableau& t = *tab_;
    int best = -1;
    double best_d = -opt_.optimality_tol;
    for (int k = 0; k < t.n_; ++k) {
      if (!t.eligible_[k]) continue;
      const double dk = t.d_[k];
      if (dk < best_d) {
        if (bland) return k;
        best_d = dk;
        best = k;
      }
    }
    return best;
  }

  int ratio_test(int q, bool bland) const {
    const Tableau& t = *tab_;
    double theta = kInfinity;
    for (int i = 0; i < t.m_; ++i) {
      if (!t.active_[i]) continue;
      const double aiq = t.at(i, q);
      if (aiq <= opt_.pivot_tol) continue;
      theta = std::min(theta, std::max(0.0, t.b_[i]) / aiq);
    }
    if (!std::isfinite(theta)) return -1;
    const double slack = 1e-12 * std::max(1.0, theta);
    int best = -1;
    double best_pivot = 0.0;
    for (int i = 0; i < t.m_; ++i) {
      if (!t.active_[i]) continue;
      const double aiq = t.at(i, q);
      if (aiq <= opt_.pivot_tol) continue;
      if (std::max(0.0, t.b_[i]) / aiq > theta + slack) continue;
      if (best < 0) {
        best = i;
        best_pivot = aiq;
        continue;
      }
      if (bland) {
        if (t.basis_[i] < t.basis_[best]) best = i;
      } else if (aiq > best_pivot * (1.0 + 1e-9) ||
                 (aiq >= best_pivot * (1.0 - 1e-9) && t.basis_[i] < t.basis_[best])) {
        best = i;
        best_pivot = aiq;
      }
    }
    return best;
  }

  IterateResult iterate() {
    Tableau& t = *tab_;
    int degenerate_streak = 0;
    for (;;) {
      if (++iterations_ > opt_.max_iterations) throw SolverError("simplex iteration limit reached");
      const bool bland = opt_.pricing == PricingRule::kBland || degenerate_streak > 50;
      const int q = choose_entering(bland);
      if (q < 0) return IterateResult::kOptimal;
      const int r = ratio_test(q, bland);
      if (r < 0) return IterateResult::kUnbounded;
      const double step = std::max(0.0, t.b_[r]) / t.at(r, q);
      degenerate_streak = step <= 1e-12 ? degenerate_streak + 1 : 0;
      const int leaving = t.basis_[r];
      t.pivot(r, q);
      if (kind_[leaving] == ColumnKind::kArtificial) t.eligible_[leaving] = 0;
    }
  }

  const LpModel& model_;
  const Selection& sel_;
  const SolverOptions& opt_;
  std::vector<VarMap> vars_;
  std::vector<ColumnKind> kind_;
  std::vector<double> cost_;
  std::vector<int> init_col_;
  std::vector<RowOrigin> origin_;
  std::unique_ptr<Tableau> tab_;
  int iterations_ = 0;
};

}  // namespace

Selection Selection::full(const LpModel& model) {
  Selection s;
  s.rows.resize(model.num_constraints());
  for (int i = 0; i < model.num_constraints(); ++i) s.rows[i] = i;
  s.use_lower.assign(model.num_variables(), 1);
  s.use_upper.assign(model.num_variables(), 1);
  s.include_var.assign(model.num_variables(), 1);
  return s;
}

void check_magnitudes(const LpModel& model, const SolverOptions& options) {
  const double cap = options.max_coefficient;
  for (const Constraint& c : model.constraints()) {
    if (std::abs(c.rhs) > cap) throw InvalidInput(c.name, "right-hand side magnitude exceeds solver cap");
    for (const Term& t : c.terms)
      if (std::abs(t.coef) > cap) throw InvalidInput(c.name, "coefficient magnitude exceeds solver cap");
  }
  for (const Variable& v : model.variables()) {
    if (std::abs(v.objective) > cap) throw InvalidInput(v.name, "objective magnitude exceeds solver cap");
    if (std::isfinite(v.lower) && std::abs(v.lower) > cap && std::abs(v.lower) < options.infinity)
      throw InvalidInput(v.name, "bound magnitude exceeds solver cap");
    if (std::isfinite(v.upper) && std::abs(v.upper) > cap && std::abs(v.upper) < options.infinity)
      throw InvalidInput(v.name, "bound magnitude exceeds solver cap");
  }
}

FeasibilityResult check_feasibility(const LpModel& model, const Selection& selection,
                                    const SolverOptions& options) {
  Engine engine(model, selection, options);
  FeasibilityResult res;
  res.feasible = engine.phase_one();
  if (!res.feasible) res = engine.certificate();
  return res;
}

}  // namespace detail

std::string_view status_name(SolveStatus status) {
  switch (status) {
    case SolveStatus::kOptimal:
      return "OPTIMAL";
    case SolveStatus::kInfeasible:
      return "INFEASIBLE";
    case SolveStatus::kUnbounded:
      return "UNBOUNDED";
  }
  return "?";
}

SolverOptions SolverOptions::from_environment() {
  SolverOptions opt;
  if (const char* v = std::getenv("SCREPAIR_FEAS_TOL")) opt.feasibility_tol = std::stod(v);
  if (const char* v = std::getenv("SCREPAIR_OBJ_TOL")) opt.objective_rel_tol = std::stod(v);
  return opt;
}

double SolveOutcome::value(const LpModel& model, std::string_view variable) const {
  if (!optimal()) throw ContractViolation("no primal solution: status is not OPTIMAL");
  return primal.at(model.variable_index(variable));
}

SolveOutcome solve(const LpModel& model, const SolverOptions& options) {
  detail::check_magnitudes(model, options);
  const detail::Selection sel = detail::Selection::full(model);
  detail::Engine engine(model, sel, options);
  if (!engine.phase_one()) {
    SolveOutcome out;
    out.status = SolveStatus::kInfeasible;
    out.iterations = engine.iterations();
    return out;
  }
  SolveOutcome out = engine.phase_two();
  if (!out.optimal()) return out;
  double objective = 0.0;
  for (int j = 0; j < model.num_variables(); ++j) objective += model.variable(j).objective * out.primal[j];
  out.objective = objective;
  out.slacks.resize(model.num_constraints());
  for (int i = 0; i < model.num_constraints(); ++i)
    out.slacks[i] = row_slack(model.constraint(i), model.activity(i, out.primal));
  return out;
}

double row_slack(const Constraint& row, double activity) {
  switch (row.sense) {
    case Sense::kLessEqual:
      return row.rhs - activity;
    case Sense::kGreaterEqual:
      return activity - row.rhs;
    case Sense::kEqual:
      return std::abs(activity - row.rhs);
  }
  return 0.0;
}

double check_slack(const LpModel& model, const SolveOutcome& outcome, std::string_view constraint) {
  const int row = model.constraint_index(constraint);
  if (!outcome.optimal()) throw ContractViolation("slack requires an OPTIMAL solution");
  if (outcome.slacks.size() != static_cast<std::size_t>(model.num_constraints()))
    throw ContractViolation("outcome does not belong to this model");
  return outcome.slacks[row];
}

int count_active_constraints(const LpModel& model, const SolveOutcome& outcome, double tolerance) {
  if (!outcome.optimal()) return 0;
  int active = 0;
  for (int i = 0; i < model.num_constraints(); ++i)
    if (std::abs(outcome.slacks[i]) <= tolerance) ++active;
  return active;
}

}  // namespace screpair
