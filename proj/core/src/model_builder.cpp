#include "screpair/model_builder.hpp"

#include <cctype>

namespace screpair {

namespace names {

std::string indexed(std::string_view family, int echelon, int period) {
  std::string out(family);
  out += "_e";
  out += std::to_string(echelon);
  out += "_t";
  out += std::to_string(period);
  return out;
}

std::string echelon_prefix(std::string_view family, int echelon) {
  std::string out(family);
  out += "_e";
  out += std::to_string(echelon);
  return out;
}

std::string family_prefix(std::string_view name) {
  // Find the last "_t<digits>" token.
  for (std::size_t pos = name.rfind("_t"); pos != std::string_view::npos;
       pos = pos == 0 ? std::string_view::npos : name.rfind("_t", pos - 1)) {
    std::size_t end = pos + 2;
    while (end < name.size() && std::isdigit(static_cast<unsigned char>(name[end]))) ++end;
    if (end > pos + 2 && (end == name.size() || name[end] == '_')) return std::string(name.substr(0, pos));
  }
  return std::string(name);
}

}  // namespace names

LpModel build_lp(const ScInstance& s) {
  validate(s);
  const int N = s.n_echelons;
  const int T = s.n_periods;
  LpModel m;

  // Variable indices per echelon; period 0 maps to the fixed initial state.
  std::vector<std::vector<int>> x(N + 1), hold(N + 1), back(N + 1), dem(N + 1);
  for (int n = 1; n <= N; ++n) {
    const double h = s.holding_cost[n - 1];
    const double b = s.backorder_cost[n - 1];
    const double init = s.initial_inventory[n - 1];
    x[n].assign(T + 1, -1);
    hold[n].assign(T + 1, -1);
    back[n].assign(T + 1, -1);
    dem[n].assign(T + 1, -1);
    hold[n][0] = m.add_variable(names::indexed(names::kInitHold, n, 0), init, init);
    back[n][0] = m.add_variable(names::indexed(names::kInitBack, n, 0), 0.0, 0.0);
    for (int t = 1; t <= T; ++t) {
      x[n][t] = m.add_variable(names::indexed(names::kOrder, n, t));
      hold[n][t] = m.add_variable(names::indexed(names::kHold, n, t), 0.0, kInfinity, h);
      back[n][t] = m.add_variable(names::indexed(names::kBack, n, t), 0.0, kInfinity, b);
    }
    if (n >= 2)
      for (int t = 1; t <= T; ++t) dem[n][t] = m.add_variable(names::indexed(names::kDemand, n, t));
  }

  for (int n = 1; n <= N; ++n) {
    const int lead = s.lead_time[n - 1];
    for (int t = 1; t <= T; ++t) {
      std::vector<Term> terms{{hold[n][t], 1.0}, {back[n][t], -1.0}, {hold[n][t - 1], -1.0},
                              {back[n][t - 1], 1.0}};
      // Orders placed before the horizon never arrive.
      if (t - lead >= 1) terms.push_back({x[n][t - lead], -1.0});
      double rhs = 0.0;
      if (n == 1)
        rhs = -s.demand[t - 1];
      else
        terms.push_back({dem[n][t], 1.0});
      m.add_constraint(names::indexed(names::kInvBalance, n, t), std::move(terms), Sense::kEqual, rhs);
    }
  }
  for (int n = 2; n <= N; ++n)
    for (int t = 1; t <= T; ++t)
      m.add_constraint(names::indexed(names::kDemandProp, n, t), {{dem[n][t], 1.0}, {x[n - 1][t], -1.0}},
                       Sense::kEqual, 0.0);
  for (int n = 1; n <= N; ++n)
    for (int t = 1; t <= T; ++t)
      m.add_constraint(names::indexed(names::kCapacity, n, t), {{x[n][t], 1.0}}, Sense::kLessEqual,
                       s.capacity[n - 1]);
  return m;
}

int decision_variable_count(const LpModel& model) {
  int count = 0;
  for (const Variable& v : model.variables()) {
    const std::string prefix = names::family_prefix(v.name);
    const bool decision = prefix.starts_with("x_e") || prefix.starts_with("hold_e") ||
                          prefix.starts_with("back_e");
    if (decision && !v.name.ends_with("_t0")) ++count;
  }
  return count;
}

}  // namespace screpair
