#pragma once

#include <array>
#include <map>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "screpair/error_type.hpp"
#include "screpair/instance.hpp"
#include "screpair/lp_model.hpp"
#include "screpair/simplex.hpp"

namespace screpair {

enum class CheckId { kBaseStock, kBullwhip, kAllocation, kCostConsistency, kOrderSmoothing };
inline constexpr std::array<CheckId, 5> kAllChecks{CheckId::kBaseStock, CheckId::kBullwhip, CheckId::kAllocation,
                                                   CheckId::kCostConsistency, CheckId::kOrderSmoothing};
std::string_view check_name(CheckId id);   // "base_stock", ...
std::string_view check_title(CheckId id);  // "Base-stock rationality", ...

enum class CheckStatus { kPass, kFail, kNotApplicable, kSkippedDegenerate };
std::string_view check_status_name(CheckStatus s);  // "pass" | "fail" | "not_applicable" | "skipped_degenerate"

struct OracleConfig {
  double tau_base_stock = 2.0;
  double tau_bullwhip = 3.0;
  double tau_allocation = 0.25;
  double tau_smoothing = 5.0;
  double cost_tolerance = 0.01;      // relative
  double eps_div = 1e-9;             // mean/variance guard
  double alloc_upstream_frac = 0.01; // "approximately zero" upstream, as a fraction of mean demand
  std::map<ErrorType, std::set<CheckId>> applicability = default_applicability();

  static std::map<ErrorType, std::set<CheckId>> default_applicability();
  void validate() const;
};

struct EchelonStat {
  int echelon = 0;
  double value = 0.0;
  CheckStatus status = CheckStatus::kPass;
  friend bool operator==(const EchelonStat&, const EchelonStat&) = default;
};

// A variable family whose objective coefficient disagrees with the configuration.
struct CostMismatch {
  std::string prefix;     // e.g. "hold_e2"
  double model_value = 0.0;
  double configured = 0.0;
  friend bool operator==(const CostMismatch&, const CostMismatch&) = default;
};

struct CheckResult {
  CheckId id = CheckId::kBaseStock;
  CheckStatus status = CheckStatus::kPass;
  std::vector<EchelonStat> echelons;
  double statistic = 0.0;  // headline number (max over echelons, or mean retail inventory)
  std::string detail;      // violation prose when failing
  std::vector<CostMismatch> mismatches;
  bool monotonicity_violated = false;
  friend bool operator==(const CheckResult&, const CheckResult&) = default;
};

struct RationalityVerdict {
  std::array<CheckResult, 5> checks;  // indexed like kAllChecks
  bool pass = true;
  std::string feedback;  // non-empty iff !pass

  const CheckResult& check(CheckId id) const { return checks[static_cast<std::size_t>(id)]; }
  friend bool operator==(const RationalityVerdict&, const RationalityVerdict&) = default;
};

// Per-echelon trajectories for t = 1..T, read from an optimal solution.
struct Trajectories {
  std::vector<std::vector<double>> hold;    // [n][t]
  std::vector<std::vector<double>> orders;  // [n][t]
  std::vector<double> demand;               // external demand
};

// Missing variables (e.g. after agent edits) read as zero.
Trajectories extract_trajectories(const LpModel& model, const SolveOutcome& outcome, const ScInstance& instance);

double mean_of(const std::vector<double>& v);
double population_variance(const std::vector<double>& v);

CheckResult check_base_stock(const std::vector<std::vector<double>>& hold, const OracleConfig& cfg = {});
CheckResult check_bullwhip(const std::vector<std::vector<double>>& orders, const std::vector<double>& demand,
                           const OracleConfig& cfg = {});
CheckResult check_inventory_allocation(const std::vector<std::vector<double>>& hold, double mean_demand,
                                       const OracleConfig& cfg = {});
CheckResult check_cost_consistency(const LpModel& model, const ScInstance& instance, const OracleConfig& cfg = {});
CheckResult check_order_smoothing(const std::vector<std::vector<double>>& orders, const OracleConfig& cfg = {});

// Combines raw results under the error type's applicability: excluded checks are
// marked not_applicable and ignored. Builds the feedback prose.
RationalityVerdict combine(std::array<CheckResult, 5> raw, ErrorType type, const ScInstance& instance,
                           const OracleConfig& cfg = {});

// Runs all five checks, then combine(). Requires an optimal outcome.
std::array<CheckResult, 5> run_checks(const LpModel& model, const SolveOutcome& outcome, const ScInstance& instance,
                                      const OracleConfig& cfg = {});
RationalityVerdict evaluate(const LpModel& model, const SolveOutcome& outcome, const ScInstance& instance,
                            ErrorType type, const OracleConfig& cfg = {});

}  // namespace screpair
