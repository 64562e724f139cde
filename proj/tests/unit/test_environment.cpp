#include <gtest/gtest.h>

#include "screpair/environment.hpp"
#include "screpair/error.hpp"
#include "support.hpp"

namespace screpair {
namespace {

using testing::desk_episode;

// x in a family of two <= rows, one >= row and one equality.
EpisodeSpec toy_episode() {
  EpisodeSpec s;
  s.id = "toy";
  s.error_type = ErrorType::kME4;
  s.instance = testing::desk_instance();
  LpModel& m = s.model;
  const int x = m.add_variable("x_e1_t1", 0.0, kInfinity, 1.0);
  const int y = m.add_variable("y", 0.0, kInfinity, 1.0);
  m.add_constraint("cap_e1_t1", {{x, 1.0}}, Sense::kLessEqual, 5);
  m.add_constraint("cap_e1_t2", {{x, 1.0}, {y, 1.0}}, Sense::kLessEqual, 6);
  m.add_constraint("need_e1_t1", {{x, 1.0}}, Sense::kGreaterEqual, 10);
  m.add_constraint("bal_e1_t1", {{x, 1.0}, {y, -1.0}}, Sense::kEqual, 2);
  s.gt_iis = compute_iis(m);
  return s;
}

TEST(Repair, RelaxMovesEachSenseOutward) {
  LpModel m = toy_episode().model;
  const auto eff = apply_repair(m, Action::relax("cap_e1", 3));
  EXPECT_EQ(eff.constraints, (std::vector<std::string>{"cap_e1_t1", "cap_e1_t2"}));
  EXPECT_EQ(m.constraint(m.constraint_index("cap_e1_t1")).rhs, 8);
  EXPECT_EQ(m.constraint(m.constraint_index("cap_e1_t2")).rhs, 9);
  apply_repair(m, Action::relax("need_e1_t1", 4));
  EXPECT_EQ(m.constraint(m.constraint_index("need_e1_t1")).rhs, 6);
  const auto split = apply_repair(m, Action::relax("bal_e1_t1", 1.5));
  EXPECT_EQ(split.constraints, std::vector<std::string>{"bal_e1_t1"});
  EXPECT_EQ(m.constraint(m.constraint_index("bal_e1_t1_ub")).rhs, 3.5);
  EXPECT_EQ(m.constraint(m.constraint_index("bal_e1_t1_lb")).rhs, 0.5);
  // Relaxing the split pair again widens both sides.
  apply_repair(m, Action::relax("bal_e1_t1", 1));
  EXPECT_EQ(m.constraint(m.constraint_index("bal_e1_t1_ub")).rhs, 4.5);
  EXPECT_EQ(m.constraint(m.constraint_index("bal_e1_t1_lb")).rhs, -0.5);
}

TEST(Repair, DropRhsObjAndBounds) {
  LpModel m = toy_episode().model;
  apply_repair(m, Action::drop("cap_e1"));
  EXPECT_FALSE(m.find_constraint("cap_e1_t1"));
  EXPECT_FALSE(m.find_constraint("cap_e1_t2"));
  apply_repair(m, Action::update_rhs("need_e1_t1", 1));
  EXPECT_EQ(m.constraint(m.constraint_index("need_e1_t1")).rhs, 1);
  const auto obj = apply_repair(m, Action::update_obj("x_e1", 7));
  EXPECT_EQ(obj.variables, std::vector<std::string>{"x_e1_t1"});
  EXPECT_EQ(m.variable(m.variable_index("x_e1_t1")).objective, 7);
  apply_repair(m, Action::update_bounds("y", 1, 2));
  EXPECT_EQ(m.variable(m.variable_index("y")).upper, 2);
}

TEST(Repair, FailuresLeaveModelUntouched) {
  const LpModel original = toy_episode().model;
  LpModel m = original;
  EXPECT_THROW(apply_repair(m, Action::drop("nothing_here")), NameResolutionError);
  EXPECT_THROW(apply_repair(m, Action::update_rhs("cap_e1", 3)), NameResolutionError);  // exact names only
  EXPECT_THROW(apply_repair(m, Action::update_bounds("y", 3, 1)), FormatError);
  EXPECT_THROW(apply_repair(m, Action::relax("cap_e1", -1)), FormatError);
  EXPECT_EQ(m, original);
}

TEST(Environment, DeskTranscriptReplay) {
  Environment env;
  auto obs = env.reset(desk_episode());
  EXPECT_EQ(obs.status, SolveStatus::kInfeasible);
  EXPECT_EQ(obs.phase, Phase::kDebug);

  obs = env.step(Action::relax("capacity_e1", 50.0));
  EXPECT_EQ(obs.status, SolveStatus::kOptimal);
  EXPECT_TRUE(obs.entered_validation);
  EXPECT_TRUE(obs.loop_back);
  EXPECT_EQ(obs.loop_count, 1);
  EXPECT_NE(obs.rationality_feedback.find("hold_e1"), std::string::npos);
  EXPECT_FALSE(obs.terminal);

  obs = env.step(Action::update_obj("hold_e1", 3.0));
  ASSERT_TRUE(obs.terminal);
  const EpisodeResult& r = env.result();
  EXPECT_EQ(r.final_status, SolveStatus::kOptimal);
  EXPECT_TRUE(r.rational);
  EXPECT_EQ(r.steps_used, 2);
  EXPECT_EQ(r.loops_used, 1);
  EXPECT_EQ(r.reward.total, 150);
  EXPECT_EQ(r.termination, "rational_optimal");
  ASSERT_TRUE(obs.verdict.has_value());
  for (const CheckResult& c : obs.verdict->checks)
    EXPECT_TRUE(c.status == CheckStatus::kPass || c.status == CheckStatus::kNotApplicable ||
                c.status == CheckStatus::kSkippedDegenerate);
}

TEST(Environment, ResetIsDeterministic) {
  Environment a, b;
  const auto oa = a.reset(desk_episode());
  const auto ob = b.reset(desk_episode());
  EXPECT_EQ(render_observation(oa), render_observation(ob));
}

TEST(Environment, OptimalStartEntersValidation) {
  EpisodeSpec s = desk_episode();
  for (int r : s.model.constraints_matching("capacity_e1")) s.model.set_rhs(r, 70.0);
  s.error_type = ErrorType::kME5;
  Environment env;
  const auto obs = env.reset(std::move(s));
  EXPECT_EQ(obs.status, SolveStatus::kOptimal);
  EXPECT_EQ(obs.phase, Phase::kValidate);
  EXPECT_FALSE(obs.rationality_feedback.empty());
}

TEST(Environment, DiagnosticsDoNotMutate) {
  Environment env;
  env.reset(desk_episode());
  const LpModel before = env.model();
  auto obs = env.step(Action::get_iis());
  ASSERT_TRUE(obs.iis.has_value());
  EXPECT_FALSE(obs.action_error);
  obs = env.step(Action::check_slack("capacity_e1_t1"));
  EXPECT_TRUE(obs.action_error);  // no primal while infeasible
  EXPECT_EQ(env.model(), before);
  EXPECT_EQ(obs.step, 2);
}

TEST(Environment, NoMatchIsNonFatal) {
  Environment env;
  env.reset(desk_episode());
  const LpModel before = env.model();
  const auto obs = env.step(Action::drop("capacity_e9"));
  EXPECT_TRUE(obs.action_error);
  EXPECT_FALSE(obs.terminal);
  EXPECT_EQ(obs.step, 1);
  EXPECT_EQ(env.model(), before);
  EXPECT_NE(obs.message.find("capacity_e9"), std::string::npos);
}

TEST(Environment, StepBudgetEndsEpisode) {
  Environment env;
  env.reset(desk_episode());
  Observation obs;
  for (int i = 0; i < 20; ++i) {
    ASSERT_FALSE(env.terminal());
    obs = env.step(Action::get_iis());
  }
  EXPECT_TRUE(obs.terminal);
  EXPECT_EQ(env.result().termination, "step_budget");
  EXPECT_EQ(env.result().reward.total, -50);
  EXPECT_THROW(env.step(Action::get_iis()), ContractViolation);
}

TEST(Environment, LoopBudgetEndsEpisode) {
  Environment env;
  env.reset(desk_episode());
  auto obs = env.step(Action::relax("capacity_e1", 50.0));
  EXPECT_EQ(obs.loop_count, 1);
  // Keep the irrational cost while re-entering validation.
  for (double v : {8.5, 9.0}) {
    obs = env.step(Action::update_obj("hold_e1", v));
    EXPECT_FALSE(obs.terminal);
  }
  EXPECT_EQ(obs.loop_count, 3);
  obs = env.step(Action::update_obj("hold_e1", 9.5));
  ASSERT_TRUE(obs.terminal);
  EXPECT_EQ(env.result().termination, "loop_budget");
  EXPECT_EQ(env.result().reward.total, 75);
  EXPECT_EQ(env.result().loops_used, 3);
}

TEST(Environment, SubmitWhileInfeasibleFails) {
  Environment env;
  env.reset(desk_episode());
  const auto obs = env.step(Action::submit());
  ASSERT_TRUE(obs.terminal);
  EXPECT_EQ(env.result().reward.total, -50);
  EXPECT_EQ(env.result().termination, "submitted");
}

TEST(Environment, RejectedMessagesCostAStep) {
  Environment env;
  env.reset(desk_episode());
  const auto obs = env.reject("gibberish", "no action");
  EXPECT_EQ(obs.step, 1);
  EXPECT_TRUE(obs.action_error);
  EXPECT_EQ(obs.history.back().action_text, "gibberish");
}

TEST(Environment, AbortIsFailure) {
  Environment env;
  env.reset(desk_episode());
  env.step(Action::relax("capacity_e1", 50.0));
  env.abort("transport: pipe closed");
  ASSERT_TRUE(env.terminal());
  EXPECT_EQ(env.result().reward.total, -50);
  EXPECT_EQ(env.result().error_tag, "transport: pipe closed");
}

TEST(Environment, ReportedTokensReplaceEstimate) {
  Environment env;
  env.reset(desk_episode());
  env.step(Action::relax("capacity_e1", 50.0), "widen", 120);
  env.step(Action::update_obj("hold_e1", 3.0), "restore", 80);
  EXPECT_EQ(env.result().token_count, 200);
  EXPECT_FALSE(env.result().tokens_estimated);

  Environment est;
  est.reset(desk_episode());
  est.step(Action::submit());
  EXPECT_TRUE(est.result().tokens_estimated);
  EXPECT_GT(est.result().token_count, 0);
}

// Random action sequences on the desk episode: rewards stay in the
// trichotomy, budgets hold, the composite is reproducible from the
// transcript and the whole episode is deterministic.
TEST(Environment, RandomEpisodesKeepInvariants) {
  const EpisodeSpec spec = desk_episode();
  const std::vector<Action> menu{
      Action::get_iis(),
      Action::check_slack("capacity_e2_t3"),
      Action::relax("capacity_e1", 10),
      Action::relax("capacity_e1", 60),
      Action::relax("inv_balance_e1", 30),
      Action::relax("backorder_cap_e1", 100),
      Action::drop("capacity_e1"),
      Action::drop("capacity_e3"),
      Action::update_obj("hold_e1", 3),
      Action::update_obj("hold_e1", 5),
      Action::update_rhs("capacity_e1_t2", 90),
      Action::update_bounds("x_e1_t1", 0, 80),
      Action::drop("no_such_row"),
  };
  Rng rng(17);
  for (int ep = 0; ep < 30; ++ep) {
    std::vector<Action> plan;
    for (int i = 0; i < 22; ++i) plan.push_back(menu[rng.uniform_int(0, static_cast<int>(menu.size()) - 1)]);
    if (rng.unit() < 0.3) plan[rng.uniform_int(3, 10)] = Action::submit();

    auto run = [&]() {
      Environment env;
      env.reset(spec);
      for (const Action& a : plan) {
        if (env.terminal()) break;
        env.step(a);
      }
      if (!env.terminal()) env.abort("unfinished");
      return env.result();
    };
    const EpisodeResult r = run();
    const int total = r.reward.total;
    EXPECT_TRUE(total == 150 || total == 75 || total == -50) << total;
    EXPECT_EQ(total == 150, r.final_status == SolveStatus::kOptimal && r.rational);
    EXPECT_LE(r.steps_used, 20);
    EXPECT_LE(r.loops_used, 3);
    const auto expect = testing::expected_composite(r.transcript, r.final_status, spec.gt_iis);
    EXPECT_NEAR(r.composite.composite, expect.composite, 1e-12);
    EXPECT_EQ(r.composite.faithfulness_penalty, expect.penalty);

    const EpisodeResult again = run();
    EXPECT_EQ(again.reward, r.reward);
    ASSERT_EQ(again.transcript.size(), r.transcript.size());
    for (std::size_t i = 0; i < r.transcript.size(); ++i) {
      EXPECT_EQ(again.transcript[i].action_text, r.transcript[i].action_text);
      EXPECT_EQ(again.transcript[i].outcome, r.transcript[i].outcome);
    }
  }
}

TEST(Render, ObservationLayoutNamesStatusAndIis) {
  Environment env;
  env.reset(desk_episode());
  const auto obs = env.step(Action::get_iis());
  const std::string text = render_observation(obs);
  EXPECT_NE(text.find("INFEASIBLE"), std::string::npos);
  EXPECT_NE(text.find("capacity_e1_t"), std::string::npos);
}

TEST(Render, IisListingTruncates) {
  Observation obs;
  obs.status = SolveStatus::kInfeasible;
  IisCertificate iis;
  for (int i = 0; i < 40; ++i) iis.constraints.push_back("row_" + std::to_string(i));
  obs.iis = iis;
  const std::string text = render_observation(obs, 25);
  EXPECT_NE(text.find("row_24"), std::string::npos);
  EXPECT_EQ(text.find("row_25"), std::string::npos);
  EXPECT_NE(text.find("15 more"), std::string::npos);
}

}  // namespace
}  // namespace screpair
