#include <gtest/gtest.h>

#include <filesystem>
#include <map>
#include <set>

#include "screpair/bundle.hpp"
#include "screpair/dataset.hpp"
#include "screpair/error.hpp"
#include "screpair/generator.hpp"
#include "screpair/lp_text.hpp"
#include "screpair/oracle.hpp"
#include "screpair/saboteur.hpp"
#include "support.hpp"

namespace screpair {
namespace {

TEST(Generator, SamplesStayInConfiguredRanges) {
  const GeneratorConfig cfg;
  for (std::uint64_t seed = 0; seed < 300; ++seed) {
    const ScInstance in = sample_instance(cfg, seed);
    EXPECT_NO_THROW(validate(in));
    EXPECT_GE(in.n_echelons, 2);
    EXPECT_LE(in.n_echelons, 5);
    EXPECT_TRUE(in.n_periods == 12 || in.n_periods == 16 || in.n_periods == 20 || in.n_periods == 24);
    for (int n = 0; n < in.n_echelons; ++n) {
      const double ratio = in.backorder_cost[n] / in.holding_cost[n];
      EXPECT_GE(ratio, 2.0 - 1e-9);
      EXPECT_LE(ratio, 10.0 + 1e-9);
      EXPECT_GE(in.capacity[n], 50.0);
      EXPECT_LE(in.capacity[n], 500.0);
      EXPECT_GE(in.lead_time[n], 1);
      EXPECT_LE(in.lead_time[n], 3);
    }
    EXPECT_EQ(static_cast<int>(in.demand.size()), in.n_periods);
  }
}

TEST(Generator, DeterministicPerSeed) {
  const GeneratorConfig cfg;
  EXPECT_EQ(sample_instance(cfg, 42), sample_instance(cfg, 42));
  EXPECT_NE(sample_instance(cfg, 42), sample_instance(cfg, 43));
}

TEST(Generator, RejectsDegenerateAndAcceptsNominal) {
  GeneratorConfig strict;
  strict.min_active_constraints = 100000;
  const ScInstance in = generate_accepted(GeneratorConfig{}, 42);
  const auto rejected = accept_instance(in, strict);
  EXPECT_FALSE(rejected.accepted);
  EXPECT_NE(rejected.reason.find("active constraints"), std::string::npos);

  const auto ok = accept_instance(in);
  EXPECT_TRUE(ok.accepted);
  EXPECT_EQ(ok.baseline.status, SolveStatus::kOptimal);
  // Independent count of zero-slack rows on the same baseline.
  const LpModel m = build_lp(in);
  int active = 0;
  for (int i = 0; i < m.num_constraints(); ++i)
    if (std::abs(row_slack(m.constraint(i), m.activity(i, ok.baseline.primal))) <= 1e-6) ++active;
  EXPECT_EQ(ok.active_constraints, active);
  EXPECT_GE(active, 10);
}

TEST(Generator, InvalidConfigRejected) {
  GeneratorConfig cfg;
  cfg.holding = {5.0, 1.0};
  EXPECT_THROW(cfg.validate(), InvalidInput);
  cfg = GeneratorConfig{};
  cfg.echelons.clear();
  EXPECT_THROW(cfg.validate(), InvalidInput);
}

TEST(Generator, DescriptionNamesParameters) {
  ScInstance in = testing::desk_instance();
  const std::string text = render_nl_description(in);
  EXPECT_NE(text.find("3 echelons"), std::string::npos);
  for (double h : in.holding_cost) EXPECT_NE(text.find("holding cost " + format_number(h)), std::string::npos);
  EXPECT_EQ(text, render_nl_description(in));
  in.demand_pattern = {DemandKind::kSeasonal, 45.0, 0, 0.0, 9.0};
  in.demand = demand_series(in.demand_pattern, in.n_periods);
  const std::string seasonal = render_nl_description(in);
  EXPECT_NE(seasonal.find("seasonal"), std::string::npos);
  EXPECT_NE(seasonal.find("amplitude 9"), std::string::npos);
}

TEST(Generator, ConfigJsonRoundTrip) {
  GeneratorConfig cfg;
  cfg.echelons = {3};
  cfg.capacity = {80.0, 90.0};
  cfg.patterns = {DemandKind::kSeasonal};
  const GeneratorConfig back = generator_config_from_json(generator_config_to_json(cfg));
  EXPECT_EQ(back.echelons, cfg.echelons);
  EXPECT_EQ(back.capacity.lo, 80.0);
  EXPECT_EQ(back.patterns, cfg.patterns);
  EXPECT_EQ(generator_config_from_json("{}").periods, GeneratorConfig{}.periods);
  EXPECT_THROW(generator_config_from_json("{\"echelons\": \"many\"}"), FormatError);
}

TEST(Tightening, CapsAboveRealisedValuesAndKeepOptimum) {
  for (std::uint64_t seed = 0; seed < 10; ++seed) {
    const ScInstance in = generate_accepted(GeneratorConfig{}, seed);
    const LpModel base = build_lp(in);
    const auto baseline = solve(base);
    Tightening t;
    const LpModel tight = tighten(base, in, baseline, &t);
    const double dbar = in.mean_demand();
    for (int n = 1; n <= in.n_echelons; ++n) {
      double max_back = 0.0;
      for (int p = 1; p <= in.n_periods; ++p) max_back = std::max(max_back, baseline.value(base, names::indexed("back", n, p)));
      EXPECT_NEAR(t.backorder_cap[n - 1], std::max(1.1 * max_back, 0.05 * dbar), 1e-9);
    }
    double max_factory = 0.0;
    for (int p = 1; p <= in.n_periods; ++p)
      max_factory = std::max(max_factory, baseline.value(base, names::indexed("x", in.n_echelons, p)));
    EXPECT_NEAR(t.supply_cap, 1.2 * max_factory, 1e-6 * std::max(1.0, max_factory));
    const auto re = solve(tight);
    ASSERT_TRUE(re.optimal());
    EXPECT_TRUE(testing::near(*re.objective, *baseline.objective, 1e-6));
    EXPECT_EQ(static_cast<int>(tight.constraints_matching("backorder_cap").size()), in.n_echelons * in.n_periods);
  }
}

struct Prepared {
  ScInstance instance;
  Tightening tightening;
  LpModel tightened;
};

Prepared prepare(std::uint64_t seed) {
  Prepared p;
  p.instance = generate_accepted(GeneratorConfig{}, seed);
  const LpModel base = build_lp(p.instance);
  p.tightened = tighten(base, p.instance, solve(base), &p.tightening);
  return p;
}

TEST(Saboteur, RetailerCapacityCutMatchesMultiplier) {
  const Prepared p = prepare(3);
  const Sabotage s = inject(p.tightened, p.instance, p.tightening, ErrorType::kME4, 11);
  EXPECT_EQ(s.record.echelon, 1);
  EXPECT_GE(s.record.multiplier, 0.02);
  EXPECT_LE(s.record.multiplier, 0.1);
  EXPECT_NEAR(s.record.magnitude, s.record.multiplier * p.instance.mean_demand(), 1e-9);
  for (int r : s.model.constraints_matching("capacity_e1")) EXPECT_EQ(s.model.constraint(r).rhs, s.record.magnitude);
}

TEST(Saboteur, UpstreamHoldingInflation) {
  const Prepared p = prepare(4);
  const Sabotage s = inject(p.tightened, p.instance, p.tightening, ErrorType::kME5, 5);
  const int n = s.record.echelon;
  ASSERT_GE(n, 2);
  EXPECT_GE(s.record.multiplier, 1.5);
  EXPECT_LE(s.record.multiplier, 3.0);
  const double inflated = s.model.variable(s.model.variable_index(names::indexed("hold", n, 1))).objective;
  EXPECT_NEAR(inflated, s.record.multiplier * p.instance.holding_cost[n - 2], 1e-9);
  EXPECT_GT(inflated, p.instance.holding_cost[n - 2]);
}

TEST(Saboteur, NegatedPropagationTerm) {
  const Prepared p = prepare(5);
  const Sabotage s = inject(p.tightened, p.instance, p.tightening, ErrorType::kME8, 5);
  const int n = s.record.echelon;
  const int row = s.model.constraint_index(names::indexed("demand_prop", n, 1));
  EXPECT_EQ(s.model.coefficient(row, s.model.variable_index(names::indexed("x", n - 1, 1))), 1.0);
}

TEST(Saboteur, DeterministicPerSeed) {
  const Prepared p = prepare(6);
  for (ErrorType t : kAllErrorTypes) {
    const Sabotage a = inject(p.tightened, p.instance, p.tightening, t, 99);
    const Sabotage b = inject(p.tightened, p.instance, p.tightening, t, 99);
    EXPECT_EQ(a.model, b.model) << error_type_name(t);
    EXPECT_EQ(a.record.ground_truth_fix, b.record.ground_truth_fix);
  }
}

// Every mechanism on a few instances: either infeasible with a certificate or
// (cost inflation only) optimal and flagged, and the recorded fix restores a
// rational optimum worth +150.
// A verification may only fail for a reason the dataset builder resamples on:
// the tightened baseline already fails the oracle for that type, or the
// injected error did not change the solve status.
TEST(Saboteur, VerificationHoldsAcrossTypes) {
  std::map<ErrorType, int> verified;
  for (std::uint64_t seed : {10u, 11u, 12u}) {
    const Prepared p = prepare(seed);
    const SolveOutcome baseline = solve(p.tightened);
    ASSERT_TRUE(baseline.optimal());
    for (ErrorType t : kAllErrorTypes) {
      Sabotage s;
      try {
        s = inject(p.tightened, p.instance, p.tightening, t, seed * 31 + 7);
      } catch (const ContractViolation&) {
        continue;  // mechanism not applicable to this instance
      }
      const VerificationReport v = verify_sabotage(s.model, p.instance, s.record);
      if (!v.ok) {
        const bool baseline_irrational = !evaluate(p.tightened, baseline, p.instance, t).pass;
        const bool not_binding = v.diagnostics.rfind("sabotaged model is", 0) == 0;
        EXPECT_TRUE(baseline_irrational || not_binding) << error_type_name(t) << ": " << v.diagnostics;
        continue;
      }
      ++verified[t];
      if (t == ErrorType::kME5) {
        EXPECT_EQ(v.sabotaged_status, SolveStatus::kOptimal);
        EXPECT_TRUE(v.oracle_flags_sabotage);
        EXPECT_TRUE(v.iis.empty());
      } else {
        EXPECT_EQ(v.sabotaged_status, SolveStatus::kInfeasible);
        EXPECT_FALSE(v.iis.empty());
        EXPECT_EQ(testing::irreducibility_failure(s.model, v.iis), "") << error_type_name(t);
      }
      EXPECT_EQ(v.repaired_status, SolveStatus::kOptimal);
      EXPECT_TRUE(v.repaired_rational);
      EXPECT_EQ(v.replay_reward, 150);
    }
  }
  for (ErrorType t : kAllErrorTypes) EXPECT_GT(verified[t], 0) << error_type_name(t);
}

TEST(Counts, PublishedSplitTotals) {
  const auto counts = full_size_counts();
  int train = 0, test = 0;
  for (const auto& [t, c] : counts) {
    train += c.train;
    test += c.test;
  }
  EXPECT_EQ(train, 692);
  EXPECT_EQ(test, 284);
  EXPECT_EQ(counts.at(ErrorType::kME6), (SplitCounts{40, 28}));
}

TEST(Counts, ParseForms) {
  const auto ten = parse_counts("10");
  ASSERT_EQ(ten.size(), 10u);
  for (const auto& [t, c] : ten) {
    EXPECT_EQ(c.total(), 10);
    EXPECT_EQ(c.test, 3);
  }
  EXPECT_EQ(parse_counts("full"), full_size_counts());
  const auto some = parse_counts("ME1=5,ME4=12");
  EXPECT_EQ(some.size(), 2u);
  EXPECT_EQ(some.at(ErrorType::kME4).total(), 12);
  EXPECT_THROW(parse_counts("ME11=3"), InvalidInput);
  EXPECT_THROW(parse_counts("-2"), InvalidInput);
  EXPECT_THROW(parse_counts("ME1=x"), InvalidInput);
}

TEST(Signatures, ShapesPerType) {
  IisCertificate one_balance;
  one_balance.constraints = {"inv_balance_e2_t1", "backorder_cap_e2_t1"};
  EXPECT_EQ(iis_signature_violation(ErrorType::kME3, one_balance), std::optional<std::string>(""));
  IisCertificate two_balance = one_balance;
  two_balance.constraints.push_back("inv_balance_e2_t2");
  EXPECT_NE(iis_signature_violation(ErrorType::kME3, two_balance), std::optional<std::string>(""));
  IisCertificate caps;
  caps.constraints = {"capacity_e1_t1", "capacity_e1_t2", "inv_balance_e1_t2"};
  EXPECT_EQ(iis_signature_violation(ErrorType::kME4, caps), std::optional<std::string>(""));
  caps.constraints = {"capacity_e1_t1", "inv_balance_e1_t2"};
  EXPECT_NE(iis_signature_violation(ErrorType::kME4, caps), std::optional<std::string>(""));
  IisCertificate props;
  props.constraints = {"demand_prop_e2_t1", "demand_prop_e2_t2"};
  EXPECT_EQ(iis_signature_violation(ErrorType::kME8, props), std::optional<std::string>(""));
  EXPECT_FALSE(iis_signature_violation(ErrorType::kME1, props).has_value());
  EXPECT_TRUE(has_iis_signature(ErrorType::kME3));
  EXPECT_FALSE(has_iis_signature(ErrorType::kME9));
}

class SmallDataset : public ::testing::Test {
 protected:
  static void SetUpTestSuite() {
    DatasetConfig cfg;
    cfg.counts = counts_per_type(2);
    cfg.seed = 2024;
    build_ = new DatasetBuild(build_dataset(cfg));
  }
  static void TearDownTestSuite() {
    delete build_;
    build_ = nullptr;
  }
  static DatasetBuild* build_;
};
DatasetBuild* SmallDataset::build_ = nullptr;

TEST_F(SmallDataset, CountsAndIds) {
  const auto& b = build_->bundles;
  ASSERT_EQ(b.size(), 20u);
  std::set<std::string> ids, instances;
  for (const auto& x : b) {
    ids.insert(x.id);
    instances.insert(x.instance_id);
  }
  EXPECT_EQ(ids.size(), 20u);
  EXPECT_EQ(instances.size(), 20u);
  EXPECT_EQ(b.front().id, "ME1-1");
  EXPECT_TRUE(splits_disjoint(b));
  int test = 0;
  for (const auto& x : b) test += x.split == Split::kTest;
  EXPECT_EQ(test, 10);  // round(2 * 284/976) = 1 per type
}

TEST_F(SmallDataset, BundlesRoundTripAndReverify) {
  for (const ProblemBundle& b : build_->bundles) {
    const std::string line = bundle_to_json(b);
    EXPECT_EQ(line.find('\n'), std::string::npos);
    const ProblemBundle back = bundle_from_json(line);
    EXPECT_EQ(bundle_to_json(back), line);
    EXPECT_EQ(write_lp_text(rebuild_model(back)), write_lp_text(rebuild_model(b)));
    const ReverifyReport rep = reverify(back);
    EXPECT_TRUE(rep.ok) << b.id << ": " << rep.mismatch;
  }
}

TEST_F(SmallDataset, TamperedVerdictDetected) {
  ProblemBundle b = build_->bundles.front();
  b.verdict.replay_reward = 75;
  EXPECT_FALSE(reverify(b).ok);
  b = build_->bundles.front();
  b.record.gt_iis.constraints.pop_back();
  EXPECT_FALSE(reverify(b).ok);
}

TEST_F(SmallDataset, ParallelBuildIsIdentical) {
  DatasetConfig cfg;
  cfg.counts = counts_per_type(2);
  cfg.seed = 2024;
  cfg.parallel = 3;
  const DatasetBuild again = build_dataset(cfg);
  ASSERT_EQ(again.bundles.size(), build_->bundles.size());
  for (std::size_t i = 0; i < again.bundles.size(); ++i)
    EXPECT_EQ(bundle_to_json(again.bundles[i]), bundle_to_json(build_->bundles[i]));
}

TEST_F(SmallDataset, SaveLoadAndExport) {
  const auto dir = std::filesystem::temp_directory_path() / "screpair_dataset_test";
  std::filesystem::remove_all(dir);
  std::filesystem::create_directories(dir);
  const std::string path = (dir / "d.jsonl").string();
  save_bundles(path, build_->bundles);
  const auto loaded = load_bundles(path);
  ASSERT_EQ(loaded.size(), build_->bundles.size());
  for (std::size_t i = 0; i < loaded.size(); ++i)
    EXPECT_EQ(bundle_to_json(loaded[i]), bundle_to_json(build_->bundles[i]));
  export_lp_files(build_->bundles, (dir / "lp").string());
  EXPECT_TRUE(std::filesystem::exists(dir / "lp" / "ME4-1.lp"));
  std::filesystem::remove_all(dir);
}

TEST(Bundles, CorruptLinesRejected) {
  EXPECT_THROW(bundle_from_json("{"), FormatError);
  EXPECT_THROW(bundle_from_json("{\"id\": 3}"), FormatError);
  EXPECT_THROW(load_bundles("/nonexistent/path.jsonl"), Error);
}

TEST(Splits, StratifiedAndSeeded) {
  std::vector<ProblemBundle> bundles;
  for (ErrorType t : {ErrorType::kME1, ErrorType::kME2})
    for (int i = 0; i < 10; ++i) {
      ProblemBundle b;
      b.error_type = t;
      b.id = std::string(error_type_name(t)) + "-" + std::to_string(i + 1);
      b.instance_id = b.id;
      bundles.push_back(b);
    }
  std::map<ErrorType, SplitCounts> counts{{ErrorType::kME1, {7, 3}}, {ErrorType::kME2, {6, 4}}};
  auto a = bundles;
  assign_splits(a, counts, 5);
  auto b = bundles;
  assign_splits(b, counts, 5);
  int me1_test = 0, me2_test = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    EXPECT_EQ(a[i].split, b[i].split);
    if (a[i].split == Split::kTest) (a[i].error_type == ErrorType::kME1 ? me1_test : me2_test)++;
  }
  EXPECT_EQ(me1_test, 3);
  EXPECT_EQ(me2_test, 4);
}

}  // namespace
}  // namespace screpair
