#pragma once

#include <functional>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "screpair/agents.hpp"
#include "screpair/bundle.hpp"
#include "screpair/protocol.hpp"

namespace screpair {

using AgentFactory = std::function<std::unique_ptr<Agent>(const ProblemBundle&)>;

// gt -> GtReplayAgent over the bundle's fix, greedy -> GreedyIisAgent,
// proto:/http: -> ProtocolAgent with a fresh session per episode.
AgentFactory make_agent_factory(const AgentEndpoint& endpoint, std::size_t iis_display_limit = 25);

struct EvalOptions {
  int parallel = 1;
  std::string results_path;  // JSONL, appended as episodes finish; empty keeps results in memory
  std::string agent_label;
  EnvironmentConfig env;
};

struct EvalRecord {
  std::string agent;
  EpisodeResult result;
};

std::string result_line(std::string_view agent, const EpisodeResult& result);
EvalRecord parse_result_line(std::string_view line);  // throws FormatError
// Missing file -> empty. A torn final line (interrupted write) is ignored.
std::vector<EvalRecord> load_results(const std::string& path);

// One result per bundle, in bundle order. Episodes whose id is already in
// `results_path` are not rerun; their stored results are returned as-is.
// Agent or transport failures end that episode as an aborted failure.
std::vector<EpisodeResult> run_eval(const std::vector<ProblemBundle>& bundles, const AgentFactory& factory,
                                    const EvalOptions& options,
                                    const std::function<void(const EpisodeResult&)>& on_done = {});

// Runs one bundle end to end with a fresh Environment.
EpisodeResult run_bundle(const ProblemBundle& bundle, const AgentFactory& factory, const EnvironmentConfig& env);

}  // namespace screpair
