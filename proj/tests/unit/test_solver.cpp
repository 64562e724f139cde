#include <gtest/gtest.h>

#include <algorithm>

#include "screpair/error.hpp"
#include "screpair/iis.hpp"
#include "screpair/simplex.hpp"
#include "support.hpp"

namespace screpair {
namespace {

using testing::brute_force_solve;
using testing::irreducibility_failure;

TEST(Simplex, ContradictoryBoundsInfeasible) {
  LpModel m;
  const int x = m.add_variable("x", 0.0, kInfinity, 1.0);
  m.add_constraint("le", {{x, 1.0}}, Sense::kLessEqual, 5);
  m.add_constraint("ge", {{x, 1.0}}, Sense::kGreaterEqual, 10);
  EXPECT_EQ(solve(m).status, SolveStatus::kInfeasible);
}

TEST(Simplex, DetectsUnbounded) {
  LpModel m;
  m.add_variable("x", 0.0, kInfinity, -1.0);
  EXPECT_EQ(solve(m).status, SolveStatus::kUnbounded);
}

TEST(Simplex, SlackArithmetic) {
  LpModel m;
  const int x = m.add_variable("x", 0.0, kInfinity, -1.0);
  const int y = m.add_variable("y", 0.0, kInfinity, 0.5);
  m.add_constraint("capacity", {{x, 1.0}}, Sense::kLessEqual, 500);
  m.add_constraint("order", {{x, 1.0}}, Sense::kLessEqual, 480);
  m.add_constraint("balance", {{x, 1.0}, {y, -1.0}}, Sense::kEqual, 100);
  const auto out = solve(m);
  ASSERT_TRUE(out.optimal());
  EXPECT_NEAR(check_slack(m, out, "capacity"), 20.0, 1e-9);
  EXPECT_NEAR(check_slack(m, out, "order"), 0.0, 1e-6);
  EXPECT_NEAR(check_slack(m, out, "balance"), 0.0, 1e-6);
  EXPECT_THROW(check_slack(m, out, "missing"), NameResolutionError);
  EXPECT_EQ(count_active_constraints(m, out), 2);
}

TEST(Simplex, SlackNeedsOptimum) {
  LpModel m;
  const int x = m.add_variable("x");
  m.add_constraint("c", {{x, 1.0}}, Sense::kLessEqual, -1);
  const auto out = solve(m);
  EXPECT_THROW(check_slack(m, out, "c"), ContractViolation);
}

TEST(Simplex, RejectsHugeCoefficients) {
  LpModel m;
  const int x = m.add_variable("x");
  m.add_constraint("c", {{x, 1e12}}, Sense::kLessEqual, 1);
  EXPECT_THROW(solve(m), InvalidInput);
}

TEST(Simplex, AgreesWithVertexEnumeration) {
  Rng rng(20240611);
  int counts[3] = {0, 0, 0};
  for (int k = 0; k < 200; ++k) {
    const LpModel m = testing::random_small_lp(rng);
    const auto expected = brute_force_solve(m);
    const auto got = solve(m);
    ASSERT_EQ(got.status, expected.status) << "case " << k;
    ++counts[static_cast<int>(expected.status)];
    if (expected.status == SolveStatus::kOptimal) {
      ASSERT_TRUE(got.objective.has_value());
      EXPECT_TRUE(testing::near(*got.objective, expected.objective, 1e-6))
          << "case " << k << ": " << *got.objective << " vs " << expected.objective;
    }
  }
  // The generator must exercise all three outcomes.
  EXPECT_GT(counts[0], 0);
  EXPECT_GT(counts[1], 0);
  EXPECT_GT(counts[2], 0);
}

TEST(Simplex, BlandAndDantzigAgree) {
  Rng rng(77);
  SolverOptions bland;
  bland.pricing = PricingRule::kBland;
  for (int k = 0; k < 100; ++k) {
    const LpModel m = testing::random_small_lp(rng);
    const auto a = solve(m);
    const auto b = solve(m, bland);
    ASSERT_EQ(a.status, b.status);
    if (a.optimal()) EXPECT_TRUE(testing::near(*a.objective, *b.objective, 1e-6));
  }
}

TEST(Simplex, PrimalSatisfiesModel) {
  Rng rng(99);
  for (int k = 0; k < 200; ++k) {
    const LpModel m = testing::random_small_lp(rng);
    const auto out = solve(m);
    if (!out.optimal()) continue;
    for (int j = 0; j < m.num_variables(); ++j) {
      EXPECT_GE(out.primal[j], m.variable(j).lower - 1e-7);
      EXPECT_LE(out.primal[j], m.variable(j).upper + 1e-7);
    }
    for (int i = 0; i < m.num_constraints(); ++i) {
      const Constraint& c = m.constraint(i);
      const double act = m.activity(i, out.primal);
      if (c.sense != Sense::kGreaterEqual) EXPECT_LE(act, c.rhs + 1e-6);
      if (c.sense != Sense::kLessEqual) EXPECT_GE(act, c.rhs - 1e-6);
    }
  }
}

TEST(Iis, UniqueMinimalConflict) {
  LpModel m;
  const int x = m.add_variable("x", -kInfinity, kInfinity);
  const int y = m.add_variable("y", -kInfinity, kInfinity);
  m.add_constraint("x_le", {{x, 1.0}}, Sense::kLessEqual, 5);
  m.add_constraint("x_ge", {{x, 1.0}}, Sense::kGreaterEqual, 10);
  m.add_constraint("y_le", {{y, 1.0}}, Sense::kLessEqual, 3);
  const IisCertificate iis = compute_iis(m);
  EXPECT_EQ(iis.constraints, (std::vector<std::string>{"x_le", "x_ge"}));
  EXPECT_TRUE(iis.bounds.empty());
}

TEST(Iis, BoundsCanBeMembers) {
  LpModel m;
  const int x = m.add_variable("x", 0.0, 4.0);
  m.add_constraint("x_ge", {{x, 1.0}}, Sense::kGreaterEqual, 10);
  const IisCertificate iis = compute_iis(m);
  EXPECT_EQ(iis.constraints, std::vector<std::string>{"x_ge"});
  ASSERT_EQ(iis.bounds.size(), 1u);
  EXPECT_EQ(iis.bounds[0], (BoundMember{"x", BoundSide::kUpper, 4.0}));
}

TEST(Iis, FeasibleModelIsAContractViolation) {
  LpModel m;
  m.add_variable("x", 0.0, 1.0);
  EXPECT_THROW(compute_iis(m), ContractViolation);
}

TEST(Iis, RandomInfeasibleModelsGiveIrreducibleCertificates) {
  Rng rng(4242);
  int checked = 0;
  for (int k = 0; k < 600 && checked < 150; ++k) {
    const LpModel m = testing::random_small_lp(rng, 6, 10);
    if (solve(m).status != SolveStatus::kInfeasible) continue;
    ++checked;
    const IisCertificate iis = compute_iis(m);
    EXPECT_EQ(irreducibility_failure(m, iis), "") << "case " << k;
    // The library's own subsystem check agrees with the independent one.
    EXPECT_FALSE(subsystem_feasible(m, iis.constraints, iis.bounds));
    // Certificates list rows in model order.
    std::vector<int> idx;
    for (const auto& c : iis.constraints) idx.push_back(m.constraint_index(c));
    EXPECT_TRUE(std::is_sorted(idx.begin(), idx.end()));
  }
  EXPECT_GE(checked, 100);
}

TEST(Iis, Deterministic) {
  Rng rng(8);
  for (int k = 0; k < 200; ++k) {
    const LpModel m = testing::random_small_lp(rng, 6, 10);
    if (solve(m).status != SolveStatus::kInfeasible) continue;
    EXPECT_EQ(compute_iis(m), compute_iis(m));
  }
}

TEST(Iis, DeskCapacityCutConflictsWithBalanceRows) {
  const EpisodeSpec spec = testing::desk_episode();
  const IisCertificate& iis = spec.gt_iis;
  EXPECT_EQ(irreducibility_failure(spec.model, iis), "");
  const auto capacity_rows = std::count_if(iis.constraints.begin(), iis.constraints.end(),
                                           [](const std::string& c) { return c.starts_with("capacity_e1"); });
  EXPECT_GE(capacity_rows, 2);
  EXPECT_TRUE(std::any_of(iis.constraints.begin(), iis.constraints.end(),
                          [](const std::string& c) { return c.starts_with("inv_balance"); }));
}

}  // namespace
}  // namespace screpair
