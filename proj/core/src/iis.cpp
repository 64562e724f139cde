#include "screpair/iis.hpp"

#include <algorithm>
#include <optional>
#include <string>

#include "screpair/error.hpp"
#include "simplex_internal.hpp"

namespace screpair {

namespace {

struct Member {
  enum Kind : unsigned char { kRow, kLower, kUpper } kind;
  int index;
  friend bool operator==(const Member&, const Member&) = default;
};

bool before(const Member& a, const Member& b) {
  const bool a_row = a.kind == Member::kRow;
  const bool b_row = b.kind == Member::kRow;
  if (a_row != b_row) return a_row;
  if (a.index != b.index) return a.index < b.index;
  return a.kind < b.kind;
}

detail::Selection select(const LpModel& model, const std::vector<Member>& members) {
  detail::Selection sel;
  sel.use_lower.assign(model.num_variables(), 0);
  sel.use_upper.assign(model.num_variables(), 0);
  sel.include_var.assign(model.num_variables(), 0);
  for (const Member& m : members) {
    switch (m.kind) {
      case Member::kRow:
        sel.rows.push_back(m.index);
        for (const Term& t : model.constraint(m.index).terms) sel.include_var[t.var] = 1;
        break;
      case Member::kLower:
        sel.use_lower[m.index] = 1;
        sel.include_var[m.index] = 1;
        break;
      case Member::kUpper:
        sel.use_upper[m.index] = 1;
        sel.include_var[m.index] = 1;
        break;
    }
  }
  std::sort(sel.rows.begin(), sel.rows.end());
  return sel;
}

std::vector<Member> support_members(const detail::FeasibilityResult& r) {
  std::vector<Member> out;
  for (int i : r.row_support) out.push_back({Member::kRow, i});
  for (int j : r.lower_support) out.push_back({Member::kLower, j});
  for (int j : r.upper_support) out.push_back({Member::kUpper, j});
  std::sort(out.begin(), out.end(), before);
  return out;
}

std::vector<Member> all_members(const LpModel& model, const SolverOptions& opt) {
  std::vector<Member> out;
  for (int i = 0; i < model.num_constraints(); ++i) out.push_back({Member::kRow, i});
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variable(j);
    if (v.lower > -opt.infinity) out.push_back({Member::kLower, j});
    if (v.upper < opt.infinity) out.push_back({Member::kUpper, j});
  }
  std::sort(out.begin(), out.end(), before);
  return out;
}

// Minimum-mass vertex of the alternative polyhedron
//   { lambda >= 0 : sum_k lambda_k g_k = 0, sum_k lambda_k h_k = -1 }
// over every inequality g_k x <= h_k of the system (rows, with equalities
// split, plus finite bounds). Vertex supports are exactly the IISs.
std::optional<std::vector<Member>> alternative_vertex(const LpModel& model, const SolverOptions& opt) {
  struct Ineq {
    Member member;
    double sign;  // g_k = sign * (row or unit vector), h_k = sign * rhs
  };
  std::vector<Ineq> ineqs;
  for (int i = 0; i < model.num_constraints(); ++i) {
    const Sense s = model.constraint(i).sense;
    if (s != Sense::kGreaterEqual) ineqs.push_back({{Member::kRow, i}, 1.0});
    if (s != Sense::kLessEqual) ineqs.push_back({{Member::kRow, i}, -1.0});
  }
  for (int j = 0; j < model.num_variables(); ++j) {
    const Variable& v = model.variable(j);
    if (v.lower > -opt.infinity) ineqs.push_back({{Member::kLower, j}, -1.0});
    if (v.upper < opt.infinity) ineqs.push_back({{Member::kUpper, j}, 1.0});
  }
  LpModel alt;
  std::vector<std::vector<Term>> cols(model.num_variables());
  std::vector<Term> norm;
  for (std::size_t k = 0; k < ineqs.size(); ++k) {
    const Ineq& q = ineqs[k];
    const int lam = alt.add_variable("l" + std::to_string(k), 0.0, kInfinity, 1.0);
    double h = 0.0;
    if (q.member.kind == Member::kRow) {
      const Constraint& c = model.constraint(q.member.index);
      for (const Term& t : c.terms) cols[t.var].push_back({lam, q.sign * t.coef});
      h = q.sign * c.rhs;
    } else {
      const Variable& v = model.variable(q.member.index);
      cols[q.member.index].push_back({lam, q.sign});
      h = q.member.kind == Member::kLower ? -v.lower : v.upper;
    }
    if (h != 0.0) norm.push_back({lam, h});
  }
  for (int j = 0; j < model.num_variables(); ++j)
    if (!cols[j].empty()) alt.add_constraint("v" + std::to_string(j), std::move(cols[j]), Sense::kEqual, 0.0);
  if (norm.empty()) return std::nullopt;
  alt.add_constraint("norm", std::move(norm), Sense::kEqual, -1.0);
  SolveOutcome o;
  try {
    o = solve(alt, opt);
  } catch (const Error&) {
    return std::nullopt;
  }
  if (!o.optimal()) return std::nullopt;
  std::vector<Member> out;
  for (std::size_t k = 0; k < ineqs.size(); ++k)
    if (o.primal[k] > 1e-9 && (out.empty() || !(out.back() == ineqs[k].member))) out.push_back(ineqs[k].member);
  std::sort(out.begin(), out.end(), before);
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace

IisCertificate compute_iis(const LpModel& model, const SolverOptions& options) {
  detail::check_magnitudes(model, options);
  const std::vector<Member> members = all_members(model, options);
  auto prefix = [&](std::size_t len) { return std::vector<Member>(members.begin(), members.begin() + static_cast<std::ptrdiff_t>(len)); };
  if (detail::check_feasibility(model, select(model, members), options).feasible)
    throw ContractViolation("compute_iis called on a feasible model");

  std::vector<Member> current;
  if (auto vertex = alternative_vertex(model, options);
      vertex && !detail::check_feasibility(model, select(model, *vertex), options).feasible) {
    current = std::move(*vertex);
  } else {
    // Fallback: shortest infeasible prefix of the canonical order, then its
    // Farkas support.
    std::size_t lo = 1, hi = members.size();
    while (lo < hi) {
      const std::size_t mid = lo + (hi - lo) / 2;
      if (detail::check_feasibility(model, select(model, prefix(mid)), options).feasible)
        lo = mid + 1;
      else
        hi = mid;
    }
    current = prefix(hi);
    detail::FeasibilityResult seed = detail::check_feasibility(model, select(model, current), options);
    std::vector<Member> supp = support_members(seed);
    if (!detail::check_feasibility(model, select(model, supp), options).feasible) current = std::move(supp);
  }

  std::size_t pos = 0;
  while (pos < current.size()) {
    std::vector<Member> trial;
    trial.reserve(current.size() - 1);
    for (std::size_t k = 0; k < current.size(); ++k)
      if (k != pos) trial.push_back(current[k]);
    detail::FeasibilityResult r = detail::check_feasibility(model, select(model, trial), options);
    if (r.feasible) {
      ++pos;
      continue;
    }
    // Still infeasible without this member: keep the already-confirmed prefix
    // and shrink the untested tail to the new certificate's support.
    std::vector<Member> supp = support_members(r);
    std::vector<Member> next(current.begin(), current.begin() + static_cast<std::ptrdiff_t>(pos));
    for (std::size_t k = pos + 1; k < current.size(); ++k)
      if (std::find(supp.begin(), supp.end(), current[k]) != supp.end()) next.push_back(current[k]);
    // Guard against a numerically inconsistent support.
    if (detail::check_feasibility(model, select(model, next), options).feasible) next = std::move(trial);
    current = std::move(next);
  }

  IisCertificate cert;
  for (const Member& m : current) {
    switch (m.kind) {
      case Member::kRow:
        cert.constraints.push_back(model.constraint(m.index).name);
        break;
      case Member::kLower:
        cert.bounds.push_back({model.variable(m.index).name, BoundSide::kLower, model.variable(m.index).lower});
        break;
      case Member::kUpper:
        cert.bounds.push_back({model.variable(m.index).name, BoundSide::kUpper, model.variable(m.index).upper});
        break;
    }
  }
  return cert;
}

bool subsystem_feasible(const LpModel& model, const std::vector<std::string>& constraints,
                        const std::vector<BoundMember>& bounds, const SolverOptions& options) {
  std::vector<Member> members;
  for (const std::string& name : constraints) members.push_back({Member::kRow, model.constraint_index(name)});
  for (const BoundMember& b : bounds)
    members.push_back({b.side == BoundSide::kLower ? Member::kLower : Member::kUpper, model.variable_index(b.variable)});
  return detail::check_feasibility(model, select(model, members), options).feasible;
}

}  // namespace screpair
