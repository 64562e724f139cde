#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "screpair/bundle.hpp"
#include "screpair/generator.hpp"

namespace screpair {

struct SplitCounts {
  int train = 0;
  int test = 0;
  int total() const { return train + test; }
  friend bool operator==(const SplitCounts&, const SplitCounts&) = default;
};

inline constexpr double kDefaultTestFraction = 284.0 / 976.0;

// Per-type train/test counts of the published 976-problem dataset.
std::map<ErrorType, SplitCounts> full_size_counts();
// k bundles per type, test share rounded from `test_fraction`.
std::map<ErrorType, SplitCounts> counts_per_type(int k, double test_fraction = kDefaultTestFraction);
// "10", "full" or "ME1=5,ME4=12" (totals). Throws InvalidInput.
std::map<ErrorType, SplitCounts> parse_counts(std::string_view spec, double test_fraction = kDefaultTestFraction);

struct DatasetConfig {
  GeneratorConfig generator;
  std::map<ErrorType, SplitCounts> counts;
  std::uint64_t seed = 1;
  // Abort once a type needs more than this many attempts per requested bundle.
  int max_attempts_per_bundle = 60;
  int parallel = 1;
  EnvironmentConfig env;
};

struct TypeBuildStats {
  int requested = 0;
  int accepted = 0;
  int attempts = 0;
  std::map<std::string, int> rejections;  // reason -> count
};

struct DatasetBuild {
  std::vector<ProblemBundle> bundles;  // grouped by type, ME1 first
  std::map<ErrorType, TypeBuildStats> stats;
  std::vector<std::string> signature_nonconformers;  // "<id>: <reason>"
};

// Generates, tightens, sabotages and verifies until every type reaches its
// count, then assigns stratified splits. Deterministic for a given config
// regardless of `parallel`. Throws ConfigurationError on acceptance collapse.
DatasetBuild build_dataset(const DatasetConfig& config,
                           const std::function<void(std::string_view)>& progress = {});

// Per type: a seeded shuffle, the first `test` bundles go to test. Every
// bundle has its own source instance, so the splits never share one.
void assign_splits(std::vector<ProblemBundle>& bundles, const std::map<ErrorType, SplitCounts>& counts,
                   std::uint64_t seed);
bool splits_disjoint(const std::vector<ProblemBundle>& bundles);

// Expected certificate shapes: ME3 exactly one inv_balance row, ME4 at least
// two capacity rows, ME8 at least two demand_prop rows. nullopt for types
// without a signature; otherwise an empty string when conforming, or the reason.
std::optional<std::string> iis_signature_violation(ErrorType type, const IisCertificate& iis);
bool has_iis_signature(ErrorType type);

// Writes <dir>/<bundle id>.lp for every bundle.
void export_lp_files(const std::vector<ProblemBundle>& bundles, const std::string& dir);

// Generator settings from JSON; absent keys keep their defaults. Throws FormatError.
GeneratorConfig generator_config_from_json(std::string_view text);
std::string generator_config_to_json(const GeneratorConfig& config);

}  // namespace screpair
