#include "screpair/agents.hpp"

#include <algorithm>
#include <cmath>

#include "screpair/error.hpp"
#include "screpair/model_builder.hpp"

namespace screpair {

GtReplayAgent::GtReplayAgent(std::vector<Action> fix) : fix_(std::move(fix)) {
  if (fix_.empty()) throw ConfigurationError("ground-truth replay needs a non-empty fix script");
}

AgentTurn GtReplayAgent::act(const Observation&) {
  if (next_ < fix_.size()) return AgentTurn::of(fix_[next_++], "replaying recorded fix");
  return AgentTurn::of(Action::submit());
}

std::string dominant_family(const IisCertificate& iis) {
  std::vector<std::pair<std::string, int>> counts;
  for (const std::string& c : iis.constraints) {
    const std::string fam = names::family_prefix(c);
    auto it = std::find_if(counts.begin(), counts.end(), [&](const auto& p) { return p.first == fam; });
    if (it == counts.end())
      counts.emplace_back(fam, 1);
    else
      ++it->second;
  }
  std::string best;
  int best_n = 0;
  for (const auto& [fam, n] : counts)
    if (n > best_n) {
      best = fam;
      best_n = n;
    }
  return best;
}

AgentTurn GreedyIisAgent::act(const Observation& obs) {
  if (obs.status == SolveStatus::kInfeasible) {
    if (!obs.iis) return AgentTurn::of(Action::get_iis(), "no certificate in view");
    const std::string fam = dominant_family(*obs.iis);
    if (fam.empty()) return AgentTurn::of(Action::submit(), "certificate holds bounds only");
    const int k = relax_count_[fam]++;
    const double amount = 0.5 * obs.problem.mean_demand * std::pow(2.0, k);
    return AgentTurn::of(Action::relax(fam, amount), "relaxing the most frequent family " + fam);
  }
  if (obs.status == SolveStatus::kOptimal && obs.verdict && !obs.verdict->pass) {
    const CheckResult& cost = obs.verdict->check(CheckId::kCostConsistency);
    if (cost.status == CheckStatus::kFail) {
      for (const CostMismatch& m : cost.mismatches) {
        if (cost_fixes_[m.prefix]++ == 0)
          return AgentTurn::of(Action::update_obj(m.prefix, m.configured), "restoring configured cost");
      }
    }
  }
  return AgentTurn::of(Action::submit());
}

EpisodeResult run_episode(Environment& env, EpisodeSpec spec, Agent& agent) {
  Observation obs = env.reset(std::move(spec));
  while (!env.terminal()) {
    AgentTurn turn;
    try {
      turn = agent.act(obs);
    } catch (const TransportError& e) {
      env.abort(std::string("transport: ") + e.what());
      break;
    } catch (const std::exception& e) {
      env.abort(std::string("agent: ") + e.what());
      break;
    }
    if (turn.action)
      obs = env.step(*turn.action, std::move(turn.reasoning), turn.tokens_used);
    else
      obs = env.reject(std::move(turn.raw), std::move(turn.error), turn.tokens_used);
  }
  EpisodeResult result = env.result();
  try {
    agent.finish(result);
  } catch (const std::exception&) {
    // Session teardown failures do not change a finished episode.
  }
  return result;
}

}  // namespace screpair
