#pragma once

// Shared helpers for the unit and acceptance suites: hand-rolled random
// generators, a brute-force vertex enumeration oracle and small fixtures.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "screpair/environment.hpp"
#include "screpair/iis.hpp"
#include "screpair/instance.hpp"
#include "screpair/lp_model.hpp"
#include "screpair/model_builder.hpp"
#include "screpair/random.hpp"
#include "screpair/saboteur.hpp"
#include "screpair/simplex.hpp"

namespace screpair::testing {

// Small dense LP with integer data. Roughly a third of the variables are free
// so the generator also produces unbounded problems.
inline LpModel random_small_lp(Rng& rng, int max_vars = 6, int max_rows = 8) {
  LpModel m;
  const int n = rng.uniform_int(1, max_vars);
  const int rows = rng.uniform_int(1, max_rows);
  for (int j = 0; j < n; ++j) {
    const int kind = rng.uniform_int(0, 5);
    double lo = 0.0, hi = kInfinity;
    if (kind == 0) {
      lo = -kInfinity;
    } else if (kind <= 2) {
      lo = rng.uniform_int(-5, 2);
      hi = lo + rng.uniform_int(0, 8);
    } else if (kind == 3) {
      lo = -kInfinity;
      hi = rng.uniform_int(-2, 6);
    }
    m.add_variable("v" + std::to_string(j), lo, hi, rng.uniform_int(-5, 5));
  }
  for (int i = 0; i < rows; ++i) {
    std::vector<Term> terms;
    for (int j = 0; j < n; ++j) {
      if (rng.uniform_int(0, 3) == 0) continue;
      const int c = rng.uniform_int(-5, 5);
      if (c != 0) terms.push_back({j, static_cast<double>(c)});
    }
    const int s = rng.uniform_int(0, 6);
    const Sense sense = s < 3 ? Sense::kLessEqual : (s < 6 ? Sense::kGreaterEqual : Sense::kEqual);
    m.add_constraint("r" + std::to_string(i), std::move(terms), sense, rng.uniform_int(-10, 10));
  }
  return m;
}

struct BruteResult {
  SolveStatus status = SolveStatus::kInfeasible;
  double objective = 0.0;
};

namespace detail {

// A halfspace a.x <= b.
struct Halfspace {
  std::vector<double> a;
  double b = 0.0;
};

// Solves the square system; nullopt when singular.
inline std::optional<std::vector<double>> solve_square(std::vector<std::vector<double>> a, std::vector<double> b) {
  const int n = static_cast<int>(b.size());
  for (int col = 0; col < n; ++col) {
    int piv = col;
    for (int r = col + 1; r < n; ++r)
      if (std::fabs(a[r][col]) > std::fabs(a[piv][col])) piv = r;
    if (std::fabs(a[piv][col]) < 1e-9) return std::nullopt;
    std::swap(a[piv], a[col]);
    std::swap(b[piv], b[col]);
    for (int r = 0; r < n; ++r) {
      if (r == col) continue;
      const double f = a[r][col] / a[col][col];
      if (f == 0.0) continue;
      for (int c = col; c < n; ++c) a[r][c] -= f * a[col][c];
      b[r] -= f * b[col];
    }
  }
  std::vector<double> x(n);
  for (int i = 0; i < n; ++i) x[i] = b[i] / a[i][i];
  return x;
}

// Minimum of c.x over every vertex of {a.x <= b}; nullopt when no vertex is
// feasible. The caller boxes every variable, so a non-empty region always has
// a vertex cut out by some n of the halfspaces.
inline std::optional<double> enumerate_vertices(const std::vector<Halfspace>& rows, const std::vector<double>& c) {
  const int n = static_cast<int>(c.size());
  const int m = static_cast<int>(rows.size());
  std::optional<double> best;
  if (n > m) return best;
  std::vector<int> pick(m, 0);
  std::fill(pick.begin(), pick.begin() + n, 1);
  do {
    std::vector<std::vector<double>> a;
    std::vector<double> b;
    for (int i = 0; i < m; ++i)
      if (pick[i]) {
        a.push_back(rows[i].a);
        b.push_back(rows[i].b);
      }
    const auto x = solve_square(a, b);
    if (!x) continue;
    const bool ok = std::all_of(rows.begin(), rows.end(), [&](const Halfspace& h) {
      double act = 0.0;
      for (int j = 0; j < n; ++j) act += h.a[j] * (*x)[j];
      return act <= h.b + 1e-7 * std::max(1.0, std::fabs(h.b));
    });
    if (!ok) continue;
    double v = 0.0;
    for (int j = 0; j < n; ++j) v += c[j] * (*x)[j];
    if (!best || v < *best) best = v;
  } while (std::prev_permutation(pick.begin(), pick.end()));
  return best;
}

inline std::optional<double> boxed_minimum(const LpModel& model, double box) {
  const int n = model.num_variables();
  std::vector<Halfspace> ineq;
  std::vector<double> c(n);
  for (int j = 0; j < n; ++j) {
    const Variable& v = model.variable(j);
    c[j] = v.objective;
    Halfspace lo{std::vector<double>(n, 0.0), 0.0}, hi = lo;
    lo.a[j] = -1.0;
    lo.b = std::isfinite(v.lower) ? -v.lower : box;
    hi.a[j] = 1.0;
    hi.b = std::isfinite(v.upper) ? v.upper : box;
    ineq.push_back(lo);
    ineq.push_back(hi);
  }
  for (const Constraint& row : model.constraints()) {
    Halfspace h{std::vector<double>(n, 0.0), row.rhs};
    for (const Term& t : row.terms) h.a[t.var] += t.coef;
    Halfspace flipped = h;
    for (double& a : flipped.a) a = -a;
    flipped.b = -h.b;
    // An equality is the pair of opposing inequalities.
    if (row.sense != Sense::kGreaterEqual) ineq.push_back(h);
    if (row.sense != Sense::kLessEqual) ineq.push_back(flipped);
  }
  return enumerate_vertices(ineq, c);
}

}  // namespace detail

// Status and optimum by enumerating basic solutions. Free directions are
// boxed at two radii: a bounded problem gives the same minimum for both, an
// unbounded one keeps decreasing.
inline BruteResult brute_force_solve(const LpModel& model) {
  constexpr double kBox = 1e5;
  const auto small = detail::boxed_minimum(model, kBox);
  if (!small) return {SolveStatus::kInfeasible, 0.0};
  const auto large = detail::boxed_minimum(model, 2 * kBox);
  if (large && *large < *small - 1e-6 * std::max(1.0, std::fabs(*small))) return {SolveStatus::kUnbounded, 0.0};
  return {SolveStatus::kOptimal, *small};
}

// A model made only of the named rows and bounds; every other bound is freed.
inline LpModel restrict_to(const LpModel& model, const std::vector<std::string>& rows,
                           const std::vector<BoundMember>& bounds) {
  LpModel out;
  for (const Variable& v : model.variables()) out.add_variable(v.name, -kInfinity, kInfinity, 0.0);
  for (const BoundMember& b : bounds) {
    const int j = out.variable_index(b.variable);
    const Variable& v = out.variable(j);
    if (b.side == BoundSide::kLower)
      out.set_bounds(j, b.value, v.upper);
    else
      out.set_bounds(j, v.lower, b.value);
  }
  for (const std::string& name : rows) {
    const Constraint& c = model.constraint(model.constraint_index(name));
    out.add_constraint(c.name, c.terms, c.sense, c.rhs);
  }
  return out;
}

inline bool restricted_feasible(const LpModel& model, const std::vector<std::string>& rows,
                                const std::vector<BoundMember>& bounds) {
  return solve(restrict_to(model, rows, bounds)).status != SolveStatus::kInfeasible;
}

// Irreducibility: the member set is infeasible and dropping any one member
// makes it feasible. Returns an empty string on success.
inline std::string irreducibility_failure(const LpModel& model, const IisCertificate& iis) {
  if (iis.empty()) return "empty certificate";
  if (restricted_feasible(model, iis.constraints, iis.bounds)) return "member set is feasible";
  for (std::size_t i = 0; i < iis.constraints.size(); ++i) {
    auto rows = iis.constraints;
    rows.erase(rows.begin() + static_cast<long>(i));
    if (!restricted_feasible(model, rows, iis.bounds)) return "still infeasible without " + iis.constraints[i];
  }
  for (std::size_t i = 0; i < iis.bounds.size(); ++i) {
    auto bounds = iis.bounds;
    bounds.erase(bounds.begin() + static_cast<long>(i));
    if (!restricted_feasible(model, iis.constraints, bounds))
      return "still infeasible without a bound on " + iis.bounds[i].variable;
  }
  return {};
}

// Three echelons, sixteen periods, flat demand of 45, unit lead times.
inline ScInstance desk_instance() {
  ScInstance in;
  in.n_echelons = 3;
  in.n_periods = 16;
  in.holding_cost = {3, 2, 1};
  in.backorder_cost = {30, 20, 10};
  in.capacity = {70, 100, 100};
  in.lead_time = {1, 1, 1};
  in.demand.assign(16, 45.0);
  in.initial_inventory = {0, 0, 0};
  in.demand_pattern.kind = DemandKind::kStationary;
  in.demand_pattern.mean = 45.0;
  return in;
}

// The desk instance, tightened, with the retailer capacity cut to 20 and the
// retailer holding cost raised to 8.
inline EpisodeSpec desk_episode() {
  EpisodeSpec spec;
  spec.id = "desk-capacity";
  spec.error_type = ErrorType::kME4;
  spec.instance = desk_instance();
  const LpModel base = build_lp(spec.instance);
  spec.model = tighten(base, spec.instance, solve(base));
  for (int r : spec.model.constraints_matching("capacity_e1")) spec.model.set_rhs(r, 20.0);
  for (int v : spec.model.variables_matching("hold_e1")) spec.model.set_objective(v, 8.0);
  spec.gt_iis = compute_iis(spec.model);
  return spec;
}

// Composite score recomputed from a transcript without the library's scorer.
struct ExpectedComposite {
  double da = 0.0;
  int repair_steps = 0;
  bool penalty = false;
  double composite = 0.0;
};

inline ExpectedComposite expected_composite(const std::vector<TranscriptEntry>& transcript, SolveStatus final_status,
                                            const IisCertificate& ref) {
  auto in = [](const std::vector<std::string>& v, const std::string& s) {
    return std::find(v.begin(), v.end(), s) != v.end();
  };
  std::vector<std::string> ref_vars;
  for (const BoundMember& b : ref.bounds) ref_vars.push_back(b.variable);
  ExpectedComposite e;
  std::vector<std::string> covered;
  for (const TranscriptEntry& t : transcript) {
    if (!t.action) continue;
    const ActionKind k = t.action->kind;
    const bool repair = k == ActionKind::kRelaxConstraint || k == ActionKind::kDropConstraint ||
                        k == ActionKind::kUpdateObj || k == ActionKind::kUpdateBounds || k == ActionKind::kUpdateRhs;
    if (!repair) continue;
    e.repair_steps += 1;
    if (t.error) continue;
    bool overlap = false;
    for (const std::string& c : t.constraint_targets) {
      if (in(ref.constraints, c)) {
        overlap = true;
        if (!in(covered, c)) covered.push_back(c);
      }
      if (in(ref_vars, c)) overlap = true;
    }
    for (const std::string& v : t.variable_targets)
      if (in(ref.constraints, v) || in(ref_vars, v)) overlap = true;
    if (k != ActionKind::kUpdateObj && !ref.empty() && !overlap) e.penalty = true;
  }
  e.da = ref.constraints.empty() ? 1.0 : double(covered.size()) / double(ref.constraints.size());
  const double outcome = final_status == SolveStatus::kOptimal ? 100.0 : -50.0;
  e.composite = 0.5 * outcome + 0.3 * (100.0 * e.da) + 0.2 * (-e.repair_steps) + (e.penalty ? -20.0 : 0.0);
  return e;
}

inline bool near(double a, double b, double tol) { return std::fabs(a - b) <= tol * std::max(1.0, std::fabs(b)); }

}  // namespace screpair::testing
