#include "screpair/evaluation.hpp"

#include <algorithm>
#include <atomic>
#include <filesystem>
#include <fstream>
#include <iterator>
#include <map>
#include <mutex>
#include <thread>

#include "json_io.hpp"
#include "screpair/error.hpp"

namespace screpair {

using jsonio::json;

AgentFactory make_agent_factory(const AgentEndpoint& ep, std::size_t iis_limit) {
  switch (ep.mode) {
    case EndpointMode::kInProcess:
      if (ep.policy == "gt")
        return [](const ProblemBundle& b) -> std::unique_ptr<Agent> {
          return std::make_unique<GtReplayAgent>(b.record.ground_truth_fix);
        };
      if (ep.policy == "greedy")
        return [](const ProblemBundle&) -> std::unique_ptr<Agent> { return std::make_unique<GreedyIisAgent>(); };
      throw ConfigurationError("unknown in-process policy '" + ep.policy + "'");
    case EndpointMode::kSubprocessStdio:
      return [ep, iis_limit](const ProblemBundle&) -> std::unique_ptr<Agent> {
        return std::make_unique<ProtocolAgent>(std::make_unique<SubprocessTransport>(ep.command, ep.reply_timeout),
                                               ep.identity, iis_limit);
      };
    case EndpointMode::kHttp:
      return [ep, iis_limit](const ProblemBundle&) -> std::unique_ptr<Agent> {
        return std::make_unique<ProtocolAgent>(std::make_unique<HttpTransport>(ep.url, ep.reply_timeout), ep.identity,
                                               iis_limit);
      };
  }
  throw ConfigurationError("unknown endpoint mode");
}

std::string result_line(std::string_view agent, const EpisodeResult& r) {
  json j = jsonio::to_json(r);
  j["agent"] = std::string(agent);
  return j.dump();
}

EvalRecord parse_result_line(std::string_view line) {
  const json j = jsonio::parse(line);
  EvalRecord rec;
  rec.agent = j.contains("agent") && j["agent"].is_string() ? j["agent"].get<std::string>() : std::string();
  rec.result = jsonio::result_from_json(j);
  return rec;
}

std::vector<EvalRecord> load_results(const std::string& path) {
  std::vector<EvalRecord> out;
  std::ifstream in(path);
  if (!in) return out;
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line))
    if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  for (std::size_t i = 0; i < lines.size(); ++i) {
    try {
      out.push_back(parse_result_line(lines[i]));
    } catch (const FormatError& e) {
      if (i + 1 == lines.size()) break;  // torn tail from an interrupted run
      throw FormatError(path + ":" + std::to_string(i + 1) + ": " + e.what());
    }
  }
  return out;
}

namespace {

EpisodeResult failed_result(const ProblemBundle& b, const std::string& tag) {
  EpisodeResult r;
  r.episode_id = b.id;
  r.error_type = b.error_type;
  r.final_status = SolveStatus::kInfeasible;
  r.reward = outcome_reward(SolveStatus::kInfeasible, false);
  r.composite = composite_score({}, SolveStatus::kInfeasible, b.record.gt_iis);
  r.termination = "aborted";
  r.error_tag = tag;
  return r;
}

}  // namespace

EpisodeResult run_bundle(const ProblemBundle& bundle, const AgentFactory& factory, const EnvironmentConfig& cfg) {
  EpisodeSpec spec;
  try {
    spec = episode_spec(bundle);
  } catch (const Error& e) {
    return failed_result(bundle, std::string("bundle: ") + e.what());
  }
  Environment env(cfg);
  std::unique_ptr<Agent> agent;
  try {
    agent = factory(bundle);
  } catch (const std::exception& e) {
    env.reset(std::move(spec));
    env.abort(std::string("agent: ") + e.what());
    return env.result();
  }
  try {
    return run_episode(env, std::move(spec), *agent);
  } catch (const std::exception& e) {
    return failed_result(bundle, std::string("environment: ") + e.what());
  }
}

std::vector<EpisodeResult> run_eval(const std::vector<ProblemBundle>& bundles, const AgentFactory& factory,
                                    const EvalOptions& opt, const std::function<void(const EpisodeResult&)>& on_done) {
  std::map<std::string, EpisodeResult> done;
  if (!opt.results_path.empty())
    for (EvalRecord& r : load_results(opt.results_path)) done.emplace(r.result.episode_id, std::move(r.result));

  std::vector<EpisodeResult> results(bundles.size());
  std::vector<std::size_t> pending;
  for (std::size_t i = 0; i < bundles.size(); ++i) {
    auto it = done.find(bundles[i].id);
    if (it != done.end())
      results[i] = it->second;
    else
      pending.push_back(i);
  }

  std::ofstream out;
  if (!opt.results_path.empty() && !pending.empty()) {
    // Drop a torn tail line left by an interrupted run; its episode is rerun.
    {
      std::ifstream probe(opt.results_path, std::ios::binary);
      const std::string text((std::istreambuf_iterator<char>(probe)), std::istreambuf_iterator<char>());
      probe.close();
      if (!text.empty() && text.back() != '\n') {
        const auto keep = text.rfind('\n');
        std::filesystem::resize_file(opt.results_path, keep == std::string::npos ? 0 : keep + 1);
      }
    }
    out.open(opt.results_path, std::ios::app);
    if (!out) throw FormatError("cannot append to " + opt.results_path);
  }
  std::mutex out_mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t k = next++; k < pending.size(); k = next++) {
      const std::size_t i = pending[k];
      EpisodeResult r = run_bundle(bundles[i], factory, opt.env);
      std::lock_guard lock(out_mu);
      if (out.is_open()) out << result_line(opt.agent_label, r) << '\n' << std::flush;
      if (on_done) on_done(r);
      results[i] = std::move(r);
    }
  };
  const int workers = std::clamp<int>(opt.parallel, 1, static_cast<int>(std::max<std::size_t>(pending.size(), 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();
  return results;
}

}  // namespace screpair
