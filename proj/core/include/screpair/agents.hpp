#pragma once

#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "screpair/action.hpp"
#include "screpair/environment.hpp"

namespace screpair {

// One agent reply. A reply without an action is a malformed message: the
// environment charges a step and records `raw`.
struct AgentTurn {
  std::optional<Action> action;
  std::string raw;
  std::string error;
  std::string reasoning;
  std::optional<long long> tokens_used;

  static AgentTurn of(Action a, std::string reasoning = {}) {
    AgentTurn t;
    t.action = std::move(a);
    t.reasoning = std::move(reasoning);
    return t;
  }
};

class Agent {
 public:
  virtual ~Agent() = default;
  virtual std::string name() const = 0;
  virtual AgentTurn act(const Observation& obs) = 0;
  // Called once with the terminal result. Transports use it to close sessions.
  virtual void finish(const EpisodeResult&) {}
};

// Emits the recorded fix in order, then SUBMIT (repeated until the episode ends).
class GtReplayAgent final : public Agent {
 public:
  // Throws ConfigurationError on an empty fix.
  explicit GtReplayAgent(std::vector<Action> fix);
  std::string name() const override { return "gt_replay"; }
  AgentTurn act(const Observation& obs) override;

 private:
  std::vector<Action> fix_;
  std::size_t next_ = 0;
};

// Scripted IIS-following baseline:
//   infeasible, no certificate in view   -> GET_IIS
//   infeasible, certificate in view      -> RELAX the most frequent family prefix,
//                                           amounts d/2, d, 2d, ... per prefix
//   optimal with cost mismatches flagged -> UPDATE_OBJ back to the configured value
//   anything else                        -> SUBMIT
class GreedyIisAgent final : public Agent {
 public:
  std::string name() const override { return "greedy_iis"; }
  AgentTurn act(const Observation& obs) override;

 private:
  std::map<std::string, int> relax_count_;
  std::map<std::string, int> cost_fixes_;
};

// Most frequent family prefix among certificate constraints (ties: first seen).
std::string dominant_family(const IisCertificate& iis);

// Resets the environment on `spec` and drives it to completion. A
// TransportError from the agent aborts the episode with its message as tag;
// any other exception is recorded the same way.
EpisodeResult run_episode(Environment& env, EpisodeSpec spec, Agent& agent);

}  // namespace screpair
