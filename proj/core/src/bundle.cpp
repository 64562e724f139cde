#include "screpair/bundle.hpp"

#include <fstream>

#include "json_io.hpp"
#include "screpair/error.hpp"
#include "screpair/model_builder.hpp"

namespace screpair {

using jsonio::json;

std::string_view split_name(Split s) { return s == Split::kTrain ? "train" : "test"; }

Split parse_split(std::string_view name) {
  if (name == "train") return Split::kTrain;
  if (name == "test") return Split::kTest;
  throw FormatError("unknown split '" + std::string(name) + "'");
}

namespace {

json record_to_json(const SabotageRecord& r) {
  json edits = json::array();
  for (const ModelEdit& e : r.edits) edits.push_back(jsonio::to_json(e));
  json fix = json::array();
  for (const Action& a : r.ground_truth_fix) fix.push_back(jsonio::to_json(a));
  return {{"error_type", error_type_name(r.error_type)},
          {"echelon", r.echelon},
          {"period", r.period},
          {"target", r.target},
          {"multiplier", jsonio::number(r.multiplier)},
          {"magnitude", jsonio::number(r.magnitude)},
          {"original", jsonio::number(r.original)},
          {"description", r.description},
          {"edits", edits},
          {"ground_truth_fix", fix},
          {"gt_iis", jsonio::to_json(r.gt_iis)}};
}

SabotageRecord record_from_json(const json& j) {
  SabotageRecord r;
  r.error_type = parse_error_type(jsonio::string_at(j, "error_type"));
  r.echelon = static_cast<int>(jsonio::integer_at(j, "echelon"));
  r.period = static_cast<int>(jsonio::integer_at(j, "period"));
  r.target = jsonio::string_at(j, "target");
  r.multiplier = jsonio::number_at(j, "multiplier");
  r.magnitude = jsonio::number_at(j, "magnitude");
  r.original = jsonio::number_at(j, "original");
  r.description = jsonio::string_at(j, "description");
  for (const json& e : jsonio::at(j, "edits")) r.edits.push_back(jsonio::edit_from_json(e));
  for (const json& a : jsonio::at(j, "ground_truth_fix")) r.ground_truth_fix.push_back(jsonio::action_from_json(a));
  r.gt_iis = jsonio::iis_from_json(jsonio::at(j, "gt_iis"));
  return r;
}

}  // namespace

std::string bundle_to_json(const ProblemBundle& b) {
  json backorder = json::array();
  for (double v : b.tightening.backorder_cap) backorder.push_back(jsonio::number(v));
  const StoredVerdict& v = b.verdict;
  json j = {{"id", b.id},
            {"instance_id", b.instance_id},
            {"seed", b.seed},
            {"error_type", error_type_name(b.error_type)},
            {"difficulty", difficulty_name(b.difficulty())},
            {"split", split_name(b.split)},
            {"nl_description", b.nl_description},
            {"instance", jsonio::to_json(b.instance)},
            {"tightening", {{"backorder_cap", backorder}, {"supply_cap", jsonio::number(b.tightening.supply_cap)}}},
            {"sabotage", record_to_json(b.record)},
            {"verdict",
             {{"sabotaged_status", status_name(v.sabotaged_status)},
              {"oracle_flags_sabotage", v.oracle_flags_sabotage},
              {"repaired_status", status_name(v.repaired_status)},
              {"repaired_rational", v.repaired_rational},
              {"replay_reward", v.replay_reward}}}};
  return j.dump();
}

ProblemBundle bundle_from_json(std::string_view line) {
  const json j = jsonio::parse(line);
  ProblemBundle b;
  try {
    b.id = jsonio::string_at(j, "id");
    b.instance_id = jsonio::string_at(j, "instance_id");
    const json& seed = jsonio::at(j, "seed");
    if (!seed.is_number_unsigned() && !seed.is_number_integer()) throw FormatError("seed: expected an integer");
    b.seed = seed.get<std::uint64_t>();
    b.error_type = parse_error_type(jsonio::string_at(j, "error_type"));
    b.split = parse_split(jsonio::string_at(j, "split"));
    b.nl_description = jsonio::string_at(j, "nl_description");
    b.instance = jsonio::instance_from_json(jsonio::at(j, "instance"));
    const json& t = jsonio::at(j, "tightening");
    for (const json& c : jsonio::at(t, "backorder_cap")) b.tightening.backorder_cap.push_back(jsonio::number(c, "backorder_cap"));
    b.tightening.supply_cap = jsonio::number_at(t, "supply_cap");
    b.record = record_from_json(jsonio::at(j, "sabotage"));
    const json& v = jsonio::at(j, "verdict");
    b.verdict.sabotaged_status = jsonio::parse_status(jsonio::string_at(v, "sabotaged_status"));
    b.verdict.oracle_flags_sabotage = jsonio::bool_at(v, "oracle_flags_sabotage");
    b.verdict.repaired_status = jsonio::parse_status(jsonio::string_at(v, "repaired_status"));
    b.verdict.repaired_rational = jsonio::bool_at(v, "repaired_rational");
    b.verdict.replay_reward = static_cast<int>(jsonio::integer_at(v, "replay_reward"));
  } catch (const InvalidInput& e) {
    throw FormatError(std::string("bundle: ") + e.what());
  } catch (const json::exception& e) {
    throw FormatError(std::string("bundle: ") + e.what());
  }
  if (b.record.error_type != b.error_type) throw FormatError("bundle " + b.id + ": sabotage record type mismatch");
  return b;
}

LpModel rebuild_model(const ProblemBundle& b) {
  LpModel m = build_lp(b.instance);
  apply_tightening(m, b.instance, b.tightening);
  apply_edits(m, b.record.edits);
  return m;
}

EpisodeSpec episode_spec(const ProblemBundle& b) {
  return EpisodeSpec{b.id, b.error_type, b.instance, rebuild_model(b), b.nl_description, b.record.gt_iis};
}

ReverifyReport reverify(const ProblemBundle& b, const EnvironmentConfig& env) {
  ReverifyReport rep;
  try {
    rep.fresh = verify_sabotage(rebuild_model(b), b.instance, b.record, env);
  } catch (const Error& e) {
    rep.mismatch = std::string("rebuild failed: ") + e.what();
    return rep;
  }
  const VerificationReport& f = rep.fresh;
  const StoredVerdict& s = b.verdict;
  if (!f.ok)
    rep.mismatch = "verification failed: " + f.diagnostics;
  else if (f.sabotaged_status != s.sabotaged_status)
    rep.mismatch = "sabotaged status";
  else if (f.oracle_flags_sabotage != s.oracle_flags_sabotage)
    rep.mismatch = "oracle verdict on the sabotaged model";
  else if (f.repaired_status != s.repaired_status)
    rep.mismatch = "repaired status";
  else if (f.repaired_rational != s.repaired_rational)
    rep.mismatch = "repaired rationality";
  else if (f.replay_reward != s.replay_reward)
    rep.mismatch = "replay reward";
  else if (!(f.iis == b.record.gt_iis))
    rep.mismatch = "reference certificate";
  rep.ok = rep.mismatch.empty();
  return rep;
}

std::vector<ProblemBundle> load_bundles(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw FormatError("cannot open dataset " + path);
  std::vector<ProblemBundle> out;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      out.push_back(bundle_from_json(line));
    } catch (const FormatError& e) {
      throw FormatError(path + ":" + std::to_string(lineno) + ": " + e.what());
    }
  }
  return out;
}

void save_bundles(const std::string& path, const std::vector<ProblemBundle>& bundles) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + path);
  for (const ProblemBundle& b : bundles) out << bundle_to_json(b) << '\n';
  if (!out) throw FormatError("write to " + path + " failed");
}

}  // namespace screpair
