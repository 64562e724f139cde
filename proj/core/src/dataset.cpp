#include "screpair/dataset.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <mutex>
#include <set>
#include <thread>

#include "json_io.hpp"
#include "screpair/error.hpp"
#include "screpair/lp_text.hpp"
#include "screpair/model_builder.hpp"
#include "screpair/random.hpp"

namespace screpair {

using jsonio::json;

std::map<ErrorType, SplitCounts> full_size_counts() {
  using E = ErrorType;
  return {{E::kME1, {78, 27}}, {E::kME2, {89, 31}}, {E::kME3, {87, 30}}, {E::kME4, {89, 31}},
          {E::kME5, {71, 30}}, {E::kME6, {40, 28}}, {E::kME7, {66, 24}}, {E::kME8, {71, 25}},
          {E::kME9, {56, 28}}, {E::kME10, {45, 30}}};
}

namespace {

SplitCounts split_total(int total, double test_fraction) {
  const int test = static_cast<int>(std::lround(total * test_fraction));
  return {total - test, test};
}

std::string hex16(std::uint64_t v) {
  char buf[20];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(v));
  return buf;
}

std::string short_reason(const std::string& diag) {
  const auto cut = diag.find(" (");
  std::string s = diag.substr(0, cut);
  const auto semi = s.find(';');
  return s.substr(0, semi);
}

struct TypeOutcome {
  std::vector<ProblemBundle> bundles;
  TypeBuildStats stats;
  std::string failure;
};

TypeOutcome build_type(const DatasetConfig& cfg, ErrorType type, int requested,
                       const std::function<void(std::string_view)>& progress, std::mutex& progress_mu) {
  TypeOutcome out;
  out.stats.requested = requested;
  const std::uint64_t type_seed = mix_seed(cfg.seed, static_cast<std::uint64_t>(type));
  const int limit = std::max(cfg.max_attempts_per_bundle * requested, cfg.max_attempts_per_bundle);
  std::uint64_t attempt = 0;
  while (static_cast<int>(out.bundles.size()) < requested) {
    if (out.stats.attempts >= limit) {
      out.failure = std::string(error_type_name(type)) + ": acceptance-rate collapse after " +
                    std::to_string(out.stats.attempts) + " attempts (" + std::to_string(out.bundles.size()) + "/" +
                    std::to_string(requested) + " accepted)";
      for (const auto& [reason, n] : out.stats.rejections) out.failure += "; " + std::to_string(n) + "x " + reason;
      return out;
    }
    ++out.stats.attempts;
    const std::uint64_t inst_seed = mix_seed(type_seed, attempt++);
    auto reject = [&](const std::string& reason) { ++out.stats.rejections[reason]; };
    try {
      ScInstance inst = generate_accepted(cfg.generator, inst_seed, cfg.env.solver);
      const LpModel base = build_lp(inst);
      const SolveOutcome baseline = solve(base, cfg.env.solver);
      Tightening tight;
      LpModel tightened = tighten(base, inst, baseline, &tight, cfg.env.solver);
      Sabotage sab = inject(tightened, inst, tight, type, inst_seed);
      VerificationReport rep = verify_sabotage(sab.model, inst, sab.record, cfg.env);
      if (!rep.ok) {
        reject(short_reason(rep.diagnostics));
        continue;
      }
      ProblemBundle b;
      b.id = std::string(error_type_name(type)) + "-" + std::to_string(out.bundles.size() + 1);
      b.instance_id = "inst-" + hex16(inst_seed);
      b.seed = inst_seed;
      b.error_type = type;
      b.nl_description = render_nl_description(inst);
      b.instance = std::move(inst);
      b.tightening = std::move(tight);
      b.record = std::move(sab.record);
      b.record.gt_iis = rep.iis;
      b.verdict = {rep.sabotaged_status, rep.oracle_flags_sabotage, rep.repaired_status, rep.repaired_rational,
                   rep.replay_reward};
      out.bundles.push_back(std::move(b));
      if (progress) {
        std::lock_guard lock(progress_mu);
        progress(std::string(error_type_name(type)) + " " + std::to_string(out.bundles.size()) + "/" +
                 std::to_string(requested));
      }
    } catch (const ContractViolation& e) {
      reject(std::string("mechanism not applicable: ") + e.what());
    } catch (const Error& e) {
      reject(short_reason(e.what()));
    } catch (const std::exception& e) {
      reject(std::string("internal: ") + e.what());
    }
  }
  out.stats.accepted = static_cast<int>(out.bundles.size());
  return out;
}

}  // namespace

std::map<ErrorType, SplitCounts> counts_per_type(int k, double test_fraction) {
  if (k < 0) throw InvalidInput("count_per_type", "must be >= 0");
  if (!(test_fraction >= 0.0 && test_fraction <= 1.0)) throw InvalidInput("test_fraction", "must lie in [0, 1]");
  std::map<ErrorType, SplitCounts> m;
  for (ErrorType t : kAllErrorTypes) m[t] = split_total(k, test_fraction);
  return m;
}

std::map<ErrorType, SplitCounts> parse_counts(std::string_view spec, double test_fraction) {
  if (spec == "full") return full_size_counts();
  if (spec.find('=') == std::string_view::npos) {
    int k = 0;
    try {
      std::size_t used = 0;
      k = std::stoi(std::string(spec), &used);
      if (used != spec.size()) throw std::invalid_argument("trailing");
    } catch (const std::exception&) {
      throw InvalidInput("count_per_type", "expected an integer, 'full' or ME<k>=<n> pairs");
    }
    return counts_per_type(k, test_fraction);
  }
  std::map<ErrorType, SplitCounts> m;
  while (!spec.empty()) {
    const auto comma = spec.find(',');
    std::string_view item = spec.substr(0, comma);
    spec = comma == std::string_view::npos ? std::string_view{} : spec.substr(comma + 1);
    const auto eq = item.find('=');
    if (eq == std::string_view::npos) throw InvalidInput("count_per_type", "expected ME<k>=<n> in '" + std::string(item) + "'");
    const ErrorType t = parse_error_type(item.substr(0, eq));
    int n = 0;
    try {
      n = std::stoi(std::string(item.substr(eq + 1)));
    } catch (const std::exception&) {
      throw InvalidInput("count_per_type", "bad count in '" + std::string(item) + "'");
    }
    if (n < 0) throw InvalidInput("count_per_type", "counts must be >= 0");
    m[t] = split_total(n, test_fraction);
  }
  return m;
}

DatasetBuild build_dataset(const DatasetConfig& cfg, const std::function<void(std::string_view)>& progress) {
  cfg.generator.validate();
  std::vector<ErrorType> types;
  for (const auto& [t, c] : cfg.counts)
    if (c.total() > 0) types.push_back(t);
  std::vector<TypeOutcome> outcomes(types.size());
  std::mutex progress_mu;
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < types.size(); i = next++)
      outcomes[i] = build_type(cfg, types[i], cfg.counts.at(types[i]).total(), progress, progress_mu);
  };
  const int workers = std::clamp(cfg.parallel, 1, static_cast<int>(std::max<std::size_t>(types.size(), 1)));
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(worker);
  worker();
  for (std::thread& t : pool) t.join();

  DatasetBuild build;
  std::string failures;
  for (std::size_t i = 0; i < types.size(); ++i) {
    build.stats[types[i]] = outcomes[i].stats;
    if (!outcomes[i].failure.empty()) failures += (failures.empty() ? "" : "\n") + outcomes[i].failure;
    for (ProblemBundle& b : outcomes[i].bundles) build.bundles.push_back(std::move(b));
  }
  if (!failures.empty()) throw ConfigurationError(failures);
  assign_splits(build.bundles, cfg.counts, cfg.seed);
  for (const ProblemBundle& b : build.bundles) {
    auto v = iis_signature_violation(b.error_type, b.record.gt_iis);
    if (v && !v->empty()) build.signature_nonconformers.push_back(b.id + ": " + *v);
  }
  return build;
}

void assign_splits(std::vector<ProblemBundle>& bundles, const std::map<ErrorType, SplitCounts>& counts,
                   std::uint64_t seed) {
  for (ErrorType t : kAllErrorTypes) {
    std::vector<ProblemBundle*> group;
    for (ProblemBundle& b : bundles)
      if (b.error_type == t) group.push_back(&b);
    if (group.empty()) continue;
    Rng rng(mix_seed(seed, 0x5e11u + static_cast<std::uint64_t>(t)));
    for (std::size_t i = group.size(); i > 1; --i)
      std::swap(group[i - 1], group[static_cast<std::size_t>(rng.uniform_int(0, static_cast<int>(i) - 1))]);
    auto it = counts.find(t);
    const std::size_t n_test =
        it == counts.end() ? 0 : std::min<std::size_t>(group.size(), static_cast<std::size_t>(it->second.test));
    for (std::size_t i = 0; i < group.size(); ++i) group[i]->split = i < n_test ? Split::kTest : Split::kTrain;
  }
}

bool splits_disjoint(const std::vector<ProblemBundle>& bundles) {
  std::set<std::string> train, test;
  for (const ProblemBundle& b : bundles) (b.split == Split::kTrain ? train : test).insert(b.instance_id);
  for (const std::string& id : test)
    if (train.count(id)) return false;
  return true;
}

bool has_iis_signature(ErrorType t) {
  return t == ErrorType::kME3 || t == ErrorType::kME4 || t == ErrorType::kME8;
}

std::optional<std::string> iis_signature_violation(ErrorType type, const IisCertificate& iis) {
  if (!has_iis_signature(type)) return std::nullopt;
  auto count = [&](std::string_view family) {
    const std::string p = std::string(family) + "_";
    return std::count_if(iis.constraints.begin(), iis.constraints.end(),
                         [&](const std::string& c) { return c.rfind(p, 0) == 0; });
  };
  switch (type) {
    case ErrorType::kME3: {
      const auto n = count(names::kInvBalance);
      return n == 1 ? std::string() : "expected exactly one inv_balance row, found " + std::to_string(n);
    }
    case ErrorType::kME4: {
      const auto n = count(names::kCapacity);
      return n >= 2 ? std::string() : "expected at least two capacity rows, found " + std::to_string(n);
    }
    default: {
      const auto n = count(names::kDemandProp);
      return n >= 2 ? std::string() : "expected at least two demand_prop rows, found " + std::to_string(n);
    }
  }
}

void export_lp_files(const std::vector<ProblemBundle>& bundles, const std::string& dir) {
  std::filesystem::create_directories(dir);
  for (const ProblemBundle& b : bundles) {
    const auto path = std::filesystem::path(dir) / (b.id + ".lp");
    std::ofstream out(path, std::ios::trunc);
    if (!out) throw FormatError("cannot write " + path.string());
    out << write_lp_text(rebuild_model(b));
  }
}

namespace {

Range range_from(const json& j, std::string_view key) {
  const json& v = jsonio::at(j, key);
  if (!v.is_array() || v.size() != 2) throw FormatError(std::string(key) + ": expected [lo, hi]");
  return {jsonio::number(v[0], key), jsonio::number(v[1], key)};
}

std::vector<int> ints_from(const json& j, std::string_view key) {
  const json& v = jsonio::at(j, key);
  if (!v.is_array()) throw FormatError(std::string(key) + ": expected an array of integers");
  std::vector<int> out;
  for (const json& e : v) {
    if (!e.is_number_integer()) throw FormatError(std::string(key) + ": expected integers");
    out.push_back(e.get<int>());
  }
  return out;
}

}  // namespace

GeneratorConfig generator_config_from_json(std::string_view text) {
  const json j = jsonio::parse(text);
  if (!j.is_object()) throw FormatError("generator config must be a JSON object");
  static const std::set<std::string> known{"echelons",
                                           "periods",
                                           "holding",
                                           "backorder",
                                           "backorder_ratio",
                                           "capacity",
                                           "lead_times",
                                           "initial_inventory_max_multiple",
                                           "mean_demand",
                                           "patterns",
                                           "step_second_mean_multiple",
                                           "seasonal_amplitude_multiple",
                                           "min_objective",
                                           "min_active_constraints",
                                           "max_attempts"};
  for (auto it = j.begin(); it != j.end(); ++it)
    if (!known.count(it.key())) throw FormatError("unknown generator setting '" + it.key() + "'");
  GeneratorConfig c;
  if (j.contains("echelons")) c.echelons = ints_from(j, "echelons");
  if (j.contains("periods")) c.periods = ints_from(j, "periods");
  if (j.contains("lead_times")) c.lead_times = ints_from(j, "lead_times");
  if (j.contains("holding")) c.holding = range_from(j, "holding");
  if (j.contains("backorder")) c.backorder = range_from(j, "backorder");
  if (j.contains("backorder_ratio")) c.backorder_ratio = range_from(j, "backorder_ratio");
  if (j.contains("capacity")) c.capacity = range_from(j, "capacity");
  if (j.contains("mean_demand")) c.mean_demand = range_from(j, "mean_demand");
  if (j.contains("step_second_mean_multiple")) c.step_second_mean_multiple = range_from(j, "step_second_mean_multiple");
  if (j.contains("seasonal_amplitude_multiple"))
    c.seasonal_amplitude_multiple = range_from(j, "seasonal_amplitude_multiple");
  if (j.contains("initial_inventory_max_multiple"))
    c.initial_inventory_max_multiple = jsonio::number_at(j, "initial_inventory_max_multiple");
  if (j.contains("min_objective")) c.min_objective = jsonio::number_at(j, "min_objective");
  if (j.contains("min_active_constraints"))
    c.min_active_constraints = static_cast<int>(jsonio::integer_at(j, "min_active_constraints"));
  if (j.contains("max_attempts")) c.max_attempts = static_cast<int>(jsonio::integer_at(j, "max_attempts"));
  if (j.contains("patterns")) {
    c.patterns.clear();
    for (const json& p : jsonio::at(j, "patterns")) {
      if (!p.is_string()) throw FormatError("patterns: expected names");
      try {
        c.patterns.push_back(parse_demand_kind(p.get<std::string>()));
      } catch (const InvalidInput& e) {
        throw FormatError(e.what());
      }
    }
  }
  try {
    c.validate();
  } catch (const InvalidInput& e) {
    throw FormatError(std::string("generator config: ") + e.what());
  }
  return c;
}

std::string generator_config_to_json(const GeneratorConfig& c) {
  auto range = [](const Range& r) { return json::array({r.lo, r.hi}); };
  json patterns = json::array();
  for (DemandKind k : c.patterns) patterns.push_back(demand_kind_name(k));
  json j = {{"echelons", c.echelons},
            {"periods", c.periods},
            {"holding", range(c.holding)},
            {"backorder", range(c.backorder)},
            {"backorder_ratio", range(c.backorder_ratio)},
            {"capacity", range(c.capacity)},
            {"lead_times", c.lead_times},
            {"initial_inventory_max_multiple", c.initial_inventory_max_multiple},
            {"mean_demand", range(c.mean_demand)},
            {"patterns", patterns},
            {"step_second_mean_multiple", range(c.step_second_mean_multiple)},
            {"seasonal_amplitude_multiple", range(c.seasonal_amplitude_multiple)},
            {"min_objective", c.min_objective},
            {"min_active_constraints", c.min_active_constraints},
            {"max_attempts", c.max_attempts}};
  return j.dump(2);
}

}  // namespace screpair
