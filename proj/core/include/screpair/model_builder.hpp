#pragma once

#include <string>
#include <string_view>

#include "screpair/instance.hpp"
#include "screpair/lp_model.hpp"

namespace screpair {

// Canonical names. Variables: x (orders), hold (on-hand inventory), back
// (backorders), dem (demand seen by upstream echelons), init_hold / init_back
// (fixed period-0 state). Row families are listed in kRowFamilies.
namespace names {
inline constexpr std::string_view kOrder = "x";
inline constexpr std::string_view kHold = "hold";
inline constexpr std::string_view kBack = "back";
inline constexpr std::string_view kDemand = "dem";
inline constexpr std::string_view kInitHold = "init_hold";
inline constexpr std::string_view kInitBack = "init_back";

inline constexpr std::string_view kInvBalance = "inv_balance";
inline constexpr std::string_view kDemandProp = "demand_prop";
inline constexpr std::string_view kCapacity = "capacity";
inline constexpr std::string_view kMinOrder = "min_order";
inline constexpr std::string_view kBullwhipForce = "bullwhip_force";
inline constexpr std::string_view kBackorderCap = "backorder_cap";
inline constexpr std::string_view kSupplyCap = "supply_cap";

inline constexpr std::string_view kRowFamilies[] = {kInvBalance,    kDemandProp,    kCapacity,
                                                    kMinOrder,      kBullwhipForce, kBackorderCap,
                                                    kSupplyCap};

// "<family>_e<n>_t<t>"
std::string indexed(std::string_view family, int echelon, int period);
// "<family>_e<n>", the prefix selecting every period of one echelon.
std::string echelon_prefix(std::string_view family, int echelon);

// Strips a trailing "_t<digits>" (and any split suffix after it), giving the
// family-and-echelon prefix of a row or variable name.
std::string family_prefix(std::string_view name);
}  // namespace names

// Deterministically builds the multi-echelon LP. Throws InvalidInput if the
// instance violates its invariants.
LpModel build_lp(const ScInstance& instance);

// Number of x / hold / back variables for periods 1..T (3*N*T for a fresh build).
int decision_variable_count(const LpModel& model);

}  // namespace screpair
