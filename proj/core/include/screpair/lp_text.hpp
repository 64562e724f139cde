#pragma once

#include <string>
#include <string_view>

#include "screpair/lp_model.hpp"

namespace screpair {

// Canonical text form, deterministic for a given model:
//
//   # screpair-lp 1
//   var <name> <lower> <upper>
//   minimize: <c>*<var> + <c>*<var> ...
//   <row>: <c>*<var> + <c>*<var> ... <= | >= | = <rhs>
//
// One line per variable and per constraint, in model order. Numbers use the
// shortest round-trip decimal form; infinite bounds print as inf / -inf.
std::string write_lp_text(const LpModel& model);
LpModel read_lp_text(std::string_view text);

// Shortest decimal that parses back to exactly `value`.
std::string format_number(double value);
double parse_number(std::string_view text);

}  // namespace screpair
