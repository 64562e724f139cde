#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

#include "screpair/agents.hpp"
#include "screpair/dataset.hpp"
#include "screpair/error.hpp"
#include "screpair/evaluation.hpp"
#include "screpair/protocol.hpp"
#include "support.hpp"

#ifndef SCREPAIR_CLI_PATH
#error "SCREPAIR_CLI_PATH must point at the screpair executable"
#endif

namespace screpair {
namespace {

Observation infeasible_obs(double mean_demand) {
  Observation o;
  o.status = SolveStatus::kInfeasible;
  o.problem.mean_demand = mean_demand;
  return o;
}

TEST(GtReplay, EmptyFixIsConfigurationError) { EXPECT_THROW(GtReplayAgent({}), ConfigurationError); }

TEST(GtReplay, EmitsFixThenSubmit) {
  GtReplayAgent a({Action::relax("capacity_e1", 5), Action::update_obj("hold_e1", 3)});
  const Observation o = infeasible_obs(10);
  EXPECT_EQ(a.act(o).action, Action::relax("capacity_e1", 5));
  EXPECT_EQ(a.act(o).action, Action::update_obj("hold_e1", 3));
  EXPECT_EQ(a.act(o).action, Action::submit());
  EXPECT_EQ(a.act(o).action, Action::submit());
}

TEST(Greedy, FirstInfeasibleObservationAsksForIis) {
  GreedyIisAgent g;
  EXPECT_EQ(g.act(infeasible_obs(80)).action, Action::get_iis());
}

TEST(Greedy, RelaxesDominantFamilyOnDoublingSchedule) {
  GreedyIisAgent g;
  Observation o = infeasible_obs(80);
  IisCertificate iis;
  iis.constraints = {"capacity_e1_t1", "capacity_e1_t2", "inv_balance_e1_t2", "capacity_e1_t3"};
  o.iis = iis;
  EXPECT_EQ(g.act(o).action, Action::relax("capacity_e1", 40));
  EXPECT_EQ(g.act(o).action, Action::relax("capacity_e1", 80));
  EXPECT_EQ(g.act(o).action, Action::relax("capacity_e1", 160));
  o.iis->constraints = {"inv_balance_e2_t1", "inv_balance_e2_t2_ub"};
  EXPECT_EQ(g.act(o).action, Action::relax("inv_balance_e2", 40));
}

TEST(Greedy, DominantFamilyTiesGoToFirstSeen) {
  IisCertificate iis;
  iis.constraints = {"demand_prop_e2_t1", "capacity_e2_t1", "capacity_e2_t2", "demand_prop_e2_t2"};
  EXPECT_EQ(dominant_family(iis), "demand_prop_e2");
}

TEST(Greedy, RestoresFlaggedCostThenSubmits) {
  GreedyIisAgent g;
  Observation o;
  o.status = SolveStatus::kOptimal;
  o.phase = Phase::kDebug;
  o.loop_count = 1;
  RationalityVerdict v;
  v.pass = false;
  v.checks[static_cast<std::size_t>(CheckId::kCostConsistency)].id = CheckId::kCostConsistency;
  v.checks[static_cast<std::size_t>(CheckId::kCostConsistency)].status = CheckStatus::kFail;
  v.checks[static_cast<std::size_t>(CheckId::kCostConsistency)].mismatches = {{"hold_e2", 9.0, 3.0}};
  v.feedback = "cost";
  o.verdict = v;
  EXPECT_EQ(g.act(o).action, Action::update_obj("hold_e2", 3.0));
  EXPECT_EQ(g.act(o).action, Action::submit());
}

TEST(Greedy, DeskEpisodeRecovers) {
  Environment env;
  GreedyIisAgent g;
  const EpisodeResult r = run_episode(env, testing::desk_episode(), g);
  EXPECT_EQ(r.final_status, SolveStatus::kOptimal);
  EXPECT_EQ(r.transcript.front().action_text, "GET_IIS()");
  EXPECT_EQ(r.reward.total, 150);
}

class ThrowingAgent final : public Agent {
 public:
  std::string name() const override { return "thrower"; }
  AgentTurn act(const Observation&) override { throw TransportError("pipe closed"); }
};

TEST(RunEpisode, TransportLossAbortsEpisode) {
  Environment env;
  ThrowingAgent a;
  const EpisodeResult r = run_episode(env, testing::desk_episode(), a);
  EXPECT_EQ(r.termination, "aborted");
  EXPECT_EQ(r.reward.total, -50);
  EXPECT_NE(r.error_tag.find("pipe closed"), std::string::npos);
}

TEST(Protocol, ObservationMessageRoundTrip) {
  Environment env;
  env.reset(testing::desk_episode());
  env.step(Action::get_iis());
  const Observation obs = env.step(Action::relax("capacity_e1", 50.0));
  const std::string line = observation_message(obs);
  EXPECT_EQ(line.find('\n'), std::string::npos);
  const Observation back = observation_from_message(line);
  EXPECT_EQ(render_observation(back), render_observation(obs));
  EXPECT_EQ(back.verdict, obs.verdict);
  EXPECT_EQ(back.loop_back, obs.loop_back);
}

TEST(Protocol, RepliesInBothShapes) {
  const AgentTurn a = parse_agent_reply(
      R"({"protocol":1,"type":"action","action":"RELAX_CONSTRAINT","target":"capacity_e1","value":50.0,"tokens_used":9})");
  ASSERT_TRUE(a.action);
  EXPECT_EQ(*a.action, Action::relax("capacity_e1", 50.0));
  EXPECT_EQ(a.tokens_used, 9);
  const AgentTurn b = parse_agent_reply("Action: RELAX_CONSTRAINT(capacity_e1, 50.0)");
  EXPECT_EQ(b.action, a.action);
  EXPECT_FALSE(parse_agent_reply("no idea").action);
  EXPECT_FALSE(parse_agent_reply(R"({"protocol":2,"action":"SUBMIT"})").action);
}

TEST(Protocol, EndpointParsing) {
  EXPECT_EQ(AgentEndpoint::parse("gt").mode, EndpointMode::kInProcess);
  const auto p = AgentEndpoint::parse("proto:python3 agent.py");
  EXPECT_EQ(p.mode, EndpointMode::kSubprocessStdio);
  EXPECT_EQ(p.command, "python3 agent.py");
  const auto h = AgentEndpoint::parse("http://127.0.0.1:8080/act");
  EXPECT_EQ(h.mode, EndpointMode::kHttp);
  EXPECT_EQ(h.url, "http://127.0.0.1:8080/act");
  EXPECT_THROW(AgentEndpoint::parse("smtp:foo"), ConfigurationError);
  EXPECT_THROW(AgentEndpoint::parse("proto:"), ConfigurationError);
}

TEST(Protocol, StdioServerAnswersEachObservation) {
  Environment env;
  const Observation obs = env.reset(testing::desk_episode());
  std::istringstream in(observation_message(obs) + "\nnot json\n");
  std::ostringstream out;
  serve_stdio_agent([] { return std::make_unique<GreedyIisAgent>(); }, in, out);
  std::istringstream lines(out.str());
  std::string first, second;
  std::getline(lines, first);
  std::getline(lines, second);
  ASSERT_TRUE(parse_agent_reply(first).action);
  EXPECT_EQ(*parse_agent_reply(first).action, Action::get_iis());
  EXPECT_NE(second.find("\"error\""), std::string::npos);
}

// Shared small corpus for the evaluation tests.
const std::vector<ProblemBundle>& corpus() {
  static const std::vector<ProblemBundle> bundles = [] {
    DatasetConfig cfg;
    cfg.counts = parse_counts("ME1=1,ME3=2,ME4=2,ME5=1,ME9=1");
    cfg.seed = 77;
    return build_dataset(cfg).bundles;
  }();
  return bundles;
}

void expect_same_results(const std::vector<EpisodeResult>& a, const std::vector<EpisodeResult>& b) {
  ASSERT_EQ(a.size(), b.size());
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].episode_id, b[i].episode_id);
    EXPECT_EQ(a[i].reward, b[i].reward);
    EXPECT_EQ(a[i].steps_used, b[i].steps_used);
    EXPECT_EQ(a[i].termination, b[i].termination);
    ASSERT_EQ(a[i].transcript.size(), b[i].transcript.size());
    for (std::size_t k = 0; k < a[i].transcript.size(); ++k)
      EXPECT_EQ(a[i].transcript[k].action_text, b[i].transcript[k].action_text);
  }
}

TEST(Evaluation, GroundTruthReplayRecoversEverything) {
  EvalOptions opt;
  const auto results = run_eval(corpus(), make_agent_factory(AgentEndpoint::parse("gt")), opt);
  ASSERT_EQ(results.size(), corpus().size());
  for (const auto& r : results) {
    EXPECT_EQ(r.reward.total, 150) << r.episode_id;
    EXPECT_TRUE(r.rational);
  }
}

TEST(Evaluation, EmptyBundleList) {
  EXPECT_TRUE(run_eval({}, make_agent_factory(AgentEndpoint::parse("gt")), EvalOptions{}).empty());
}

TEST(Evaluation, ResumeIsIdempotent) {
  const auto path = std::filesystem::temp_directory_path() / "screpair_resume_test.jsonl";
  std::filesystem::remove(path);
  EvalOptions opt;
  opt.results_path = path.string();
  opt.agent_label = "greedy";
  opt.parallel = 2;
  const auto factory = make_agent_factory(AgentEndpoint::parse("greedy"));

  // A partial first run, then a torn line as if the process died mid-write.
  std::vector<ProblemBundle> head(corpus().begin(), corpus().begin() + 3);
  run_eval(head, factory, opt);
  { std::ofstream(path, std::ios::app) << R"({"agent":"greedy","episode_id":"ME)"; }

  int reran = 0;
  const auto full = run_eval(corpus(), factory, opt, [&](const EpisodeResult&) { ++reran; });
  EXPECT_EQ(reran, static_cast<int>(corpus().size()) - 3);

  int again = 0;
  const auto third = run_eval(corpus(), factory, opt, [&](const EpisodeResult&) { ++again; });
  EXPECT_EQ(again, 0);
  expect_same_results(full, third);

  const auto stored = load_results(path.string());
  EXPECT_EQ(stored.size(), corpus().size());
  EvalOptions fresh;
  expect_same_results(run_eval(corpus(), factory, fresh), full);
  std::filesystem::remove(path);
}

TEST(Evaluation, ResultLineRoundTrip) {
  const auto results = run_eval(corpus(), make_agent_factory(AgentEndpoint::parse("greedy")), EvalOptions{});
  for (const auto& r : results) {
    const EvalRecord rec = parse_result_line(result_line("greedy", r));
    EXPECT_EQ(rec.agent, "greedy");
    EXPECT_EQ(result_line("greedy", rec.result), result_line("greedy", r));
  }
  EXPECT_THROW(parse_result_line("{"), FormatError);
}

std::string cli_agent_command() { return std::string("'") + SCREPAIR_CLI_PATH + "' agent --policy greedy"; }

TEST(Evaluation, SubprocessAgentMatchesInProcessGreedy) {
  const auto local = run_eval(corpus(), make_agent_factory(AgentEndpoint::parse("greedy")), EvalOptions{});
  const auto remote = run_eval(corpus(), make_agent_factory(AgentEndpoint::parse("proto:" + cli_agent_command())),
                               EvalOptions{});
  expect_same_results(local, remote);
}

TEST(Evaluation, HttpAgentMatchesInProcessGreedy) {
  AgentHttpServer server([] { return std::make_unique<GreedyIisAgent>(); });
  const int port = server.start("127.0.0.1", 0);
  ASSERT_GT(port, 0);
  EvalOptions opt;
  opt.parallel = 2;
  const auto remote = run_eval(
      corpus(), make_agent_factory(AgentEndpoint::parse("http://127.0.0.1:" + std::to_string(port) + "/act")), opt);
  server.stop();
  const auto local = run_eval(corpus(), make_agent_factory(AgentEndpoint::parse("greedy")), EvalOptions{});
  expect_same_results(local, remote);
}

TEST(Evaluation, MalformedRepliesCostStepsNotEpisodes) {
  const std::string cmd = "proto:while read line; do echo 'I would relax something'; done";
  std::vector<ProblemBundle> one{corpus()[1]};
  const auto r = run_eval(one, make_agent_factory(AgentEndpoint::parse(cmd)), EvalOptions{});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].termination, "step_budget");
  EXPECT_EQ(r[0].steps_used, 20);
  for (const auto& e : r[0].transcript) EXPECT_TRUE(e.error);
}

TEST(Evaluation, VanishingAgentAbortsEpisode) {
  std::vector<ProblemBundle> one{corpus()[1]};
  const auto r = run_eval(one, make_agent_factory(AgentEndpoint::parse("proto:true")), EvalOptions{});
  ASSERT_EQ(r.size(), 1u);
  EXPECT_EQ(r[0].termination, "aborted");
  EXPECT_EQ(r[0].reward.total, -50);
  EXPECT_FALSE(r[0].error_tag.empty());
}

TEST(Evaluation, SilentAgentTimesOut) {
  AgentEndpoint ep = AgentEndpoint::parse("proto:sleep 30");
  ep.reply_timeout = std::chrono::milliseconds(300);
  std::vector<ProblemBundle> one{corpus()[1]};
  const auto start = std::chrono::steady_clock::now();
  const auto r = run_eval(one, make_agent_factory(ep), EvalOptions{});
  EXPECT_LT(std::chrono::steady_clock::now() - start, std::chrono::seconds(10));
  EXPECT_EQ(r[0].termination, "aborted");
}

TEST(Evaluation, UnreachableHttpAgentAborts) {
  AgentEndpoint ep = AgentEndpoint::parse("http://127.0.0.1:1/act");
  ep.reply_timeout = std::chrono::milliseconds(500);
  std::vector<ProblemBundle> one{corpus()[1]};
  const auto r = run_eval(one, make_agent_factory(ep), EvalOptions{});
  EXPECT_EQ(r[0].termination, "aborted");
}

}  // namespace
}  // namespace screpair
