#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "screpair/environment.hpp"
#include "screpair/error_type.hpp"
#include "screpair/instance.hpp"
#include "screpair/saboteur.hpp"

namespace screpair {

enum class Split { kTrain, kTest };
std::string_view split_name(Split s);  // "train" | "test"
Split parse_split(std::string_view name);

// Verification outcome stored with a bundle; re-verification must reproduce it.
struct StoredVerdict {
  SolveStatus sabotaged_status = SolveStatus::kInfeasible;
  bool oracle_flags_sabotage = false;
  SolveStatus repaired_status = SolveStatus::kOptimal;
  bool repaired_rational = true;
  int replay_reward = 150;
  friend bool operator==(const StoredVerdict&, const StoredVerdict&) = default;
};

// A dataset entry: the source instance plus the recipe that turns it into the
// broken model. The LP itself is rebuilt on load.
struct ProblemBundle {
  std::string id;
  std::string instance_id;
  std::uint64_t seed = 0;  // sabotage seed
  ErrorType error_type = ErrorType::kME1;
  Split split = Split::kTrain;
  std::string nl_description;
  ScInstance instance;
  Tightening tightening;
  SabotageRecord record;  // record.gt_iis holds the reference certificate
  StoredVerdict verdict;

  Difficulty difficulty() const { return error_type_difficulty(error_type); }
};

// One JSON object on one line.
std::string bundle_to_json(const ProblemBundle& bundle);
ProblemBundle bundle_from_json(std::string_view line);  // throws FormatError

// build_lp(instance) + tightening + recorded edits.
LpModel rebuild_model(const ProblemBundle& bundle);
EpisodeSpec episode_spec(const ProblemBundle& bundle);

struct ReverifyReport {
  bool ok = false;
  std::string mismatch;  // first differing field, empty when ok
  VerificationReport fresh;
};

// Rebuilds the model, re-runs verification and compares every stored verdict
// including the reference certificate.
ReverifyReport reverify(const ProblemBundle& bundle, const EnvironmentConfig& env = {});

std::vector<ProblemBundle> load_bundles(const std::string& path);  // JSONL
void save_bundles(const std::string& path, const std::vector<ProblemBundle>& bundles);

}  // namespace screpair
