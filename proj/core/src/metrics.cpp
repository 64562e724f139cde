#include "screpair/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace screpair {

Proportion wilson(int k, int n, double z) {
  Proportion p;
  p.successes = k;
  p.trials = n;
  if (n <= 0) return p;
  const double phat = static_cast<double>(k) / n;
  p.value = phat;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double centre = (phat + z2 / (2.0 * n)) / denom;
  const double half = z * std::sqrt(phat * (1.0 - phat) / n + z2 / (4.0 * n * n)) / denom;
  p.lower = std::max(0.0, centre - half);
  p.upper = std::min(1.0, centre + half);
  // The closed form meets the ends exactly; rounding does not.
  if (k == 0) p.lower = 0.0;
  if (k == n) p.upper = 1.0;
  return p;
}

MetricBlock summarize(const std::vector<const EpisodeResult*>& results) {
  MetricBlock b;
  b.n = static_cast<int>(results.size());
  double steps = 0.0, tokens = 0.0, reward = 0.0, composite = 0.0;
  for (const EpisodeResult* r : results) {
    const bool optimal = r->final_status == SolveStatus::kOptimal;
    if (optimal) ++b.optimal;
    if (optimal && r->rational) ++b.rational;
    steps += r->steps_used;
    tokens += static_cast<double>(r->token_count);
    reward += r->reward.total;
    composite += r->composite.composite;
  }
  b.rr = wilson(b.optimal, b.n);
  b.rrr = wilson(b.rational, b.n);
  b.p2pass = wilson(b.rational, b.optimal);
  if (b.n > 0) {
    b.mean_steps = steps / b.n;
    b.mean_tokens = tokens / b.n;
    b.mean_reward = reward / b.n;
    b.mean_composite = composite / b.n;
  }
  return b;
}

MetricsReport compute_metrics(const std::vector<EpisodeResult>& results, std::string agent) {
  MetricsReport rep;
  rep.agent = std::move(agent);
  std::vector<const EpisodeResult*> all;
  std::map<ErrorType, std::vector<const EpisodeResult*>> by_type;
  for (const EpisodeResult& r : results) {
    all.push_back(&r);
    by_type[r.error_type].push_back(&r);
  }
  rep.overall = summarize(all);
  for (const auto& [t, rs] : by_type) rep.per_type[t] = summarize(rs);
  return rep;
}

}  // namespace screpair
