#pragma once

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "screpair/environment.hpp"

namespace screpair {

// k successes out of n with a Wilson score interval.
struct Proportion {
  int successes = 0;
  int trials = 0;
  std::optional<double> value;  // absent when trials == 0
  double lower = 0.0;
  double upper = 0.0;
};

Proportion wilson(int successes, int trials, double z = 1.959963984540054);

struct MetricBlock {
  int n = 0;
  int optimal = 0;   // episodes ending OPTIMAL
  int rational = 0;  // OPTIMAL and every applicable check passing
  Proportion rr;      // optimal / n
  Proportion rrr;     // rational / n
  Proportion p2pass;  // rational / optimal, not applicable when optimal == 0
  double mean_steps = 0.0;
  double mean_tokens = 0.0;
  double mean_reward = 0.0;
  double mean_composite = 0.0;
};

struct MetricsReport {
  std::string agent;
  MetricBlock overall;
  std::map<ErrorType, MetricBlock> per_type;  // only types present in the results
};

MetricBlock summarize(const std::vector<const EpisodeResult*>& results);
MetricsReport compute_metrics(const std::vector<EpisodeResult>& results, std::string agent = {});

}  // namespace screpair
