#pragma once

// JSON conversions shared by the wire protocol, bundle persistence and result
// files. Kept out of the public headers so installed consumers do not need the
// vendored json header.

#include <string_view>

#include <json.hpp>

#include "screpair/action.hpp"
#include "screpair/environment.hpp"
#include "screpair/iis.hpp"
#include "screpair/instance.hpp"
#include "screpair/lp_model.hpp"
#include "screpair/oracle.hpp"
#include "screpair/scoring.hpp"
#include "screpair/simplex.hpp"

namespace screpair::jsonio {

using nlohmann::json;

// Non-finite values travel as "inf" / "-inf" strings.
json number(double v);
double number(const json& j, std::string_view field);

// Member access that raises FormatError naming the field.
const json& at(const json& j, std::string_view key);
std::string string_at(const json& j, std::string_view key);
double number_at(const json& j, std::string_view key);
long long integer_at(const json& j, std::string_view key);
bool bool_at(const json& j, std::string_view key);

SolveStatus parse_status(std::string_view name);
Phase parse_phase(std::string_view name);
CheckId parse_check(std::string_view name);
CheckStatus parse_check_status(std::string_view name);
Sense parse_sense(std::string_view symbol);

json to_json(const Action& a);
Action action_from_json(const json& j);

json to_json(const IisCertificate& c);
IisCertificate iis_from_json(const json& j);

json to_json(const TranscriptEntry& e);
TranscriptEntry transcript_from_json(const json& j);

json to_json(const RationalityVerdict& v);
RationalityVerdict verdict_from_json(const json& j);

json to_json(const ScInstance& s);
ScInstance instance_from_json(const json& j);

json to_json(const ModelEdit& e);
ModelEdit edit_from_json(const json& j);

json to_json(const EpisodeResult& r);
EpisodeResult result_from_json(const json& j);

json parse(std::string_view text);

}  // namespace screpair::jsonio
