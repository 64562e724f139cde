#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "screpair/dataset.hpp"
#include "screpair/error.hpp"
#include "screpair/evaluation.hpp"
#include "screpair/iis.hpp"
#include "screpair/lp_text.hpp"
#include "screpair/metrics.hpp"
#include "screpair/protocol.hpp"
#include "screpair/report.hpp"

namespace {

using namespace screpair;

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitVerification = 2;

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw InvalidInput(path, "cannot open file");
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::string pct(const Proportion& p) {
  if (!p.value) return "N/A";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.1f%%", *p.value * 100.0);
  return buf;
}

void print_block(std::ostream& os, const std::string& name, const MetricBlock& b) {
  os << "  " << name << ": N=" << b.n << " RR=" << pct(b.rr) << " RRR=" << pct(b.rrr) << " P2Pass=" << pct(b.p2pass)
     << " steps=" << b.mean_steps << "\n";
}

EnvironmentConfig env_config() {
  EnvironmentConfig env;
  env.solver = SolverOptions::from_environment();
  return env;
}

struct GenerateArgs {
  std::string config;
  std::string counts;
  std::uint64_t seed = 1;
  std::string out;
  std::string lp_dir;
  double test_fraction = kDefaultTestFraction;
  int parallel = 1;
  bool quiet = false;
};

int cmd_generate(const GenerateArgs& a) {
  DatasetConfig cfg;
  if (!a.config.empty()) cfg.generator = generator_config_from_json(read_file(a.config));
  cfg.counts = parse_counts(a.counts, a.test_fraction);
  cfg.seed = a.seed;
  cfg.parallel = a.parallel;
  cfg.env = env_config();
  DatasetBuild build;
  try {
    build = build_dataset(cfg, [&](std::string_view msg) {
      if (!a.quiet) std::cerr << "\r" << msg << "      " << std::flush;
    });
  } catch (const ConfigurationError& e) {
    std::cerr << "\ngeneration aborted:\n" << e.what() << "\n";
    return kExitVerification;
  }
  if (!a.quiet) std::cerr << "\n";
  save_bundles(a.out, build.bundles);
  if (!a.lp_dir.empty()) export_lp_files(build.bundles, a.lp_dir);
  int train = 0, test = 0;
  for (const ProblemBundle& b : build.bundles) (b.split == Split::kTrain ? train : test)++;
  std::cout << "wrote " << build.bundles.size() << " bundles (" << train << " train / " << test << " test) to "
            << a.out << "\n";
  for (const auto& [t, s] : build.stats) {
    std::cout << "  " << error_type_name(t) << ": " << s.accepted << "/" << s.requested << " after " << s.attempts
              << " attempts";
    for (const auto& [reason, n] : s.rejections) std::cout << "; " << n << "x " << reason;
    std::cout << "\n";
  }
  for (const std::string& n : build.signature_nonconformers) std::cerr << "signature nonconformer " << n << "\n";
  return kExitOk;
}

int cmd_validate(const std::string& path) {
  const std::vector<ProblemBundle> bundles = load_bundles(path);
  const EnvironmentConfig env = env_config();
  int failed = 0;
  for (const ProblemBundle& b : bundles) {
    const ReverifyReport r = reverify(b, env);
    if (!r.ok) {
      ++failed;
      std::cout << "FAIL " << b.id << ": " << r.mismatch << "\n";
    }
  }
  const bool disjoint = splits_disjoint(bundles);
  if (!disjoint) std::cout << "FAIL train/test splits share source instances\n";
  std::cout << bundles.size() - failed << "/" << bundles.size() << " bundles reproduce their stored verdicts\n";
  return failed == 0 && disjoint ? kExitOk : kExitVerification;
}

struct RunArgs {
  std::string dataset;
  std::string agent;
  int parallel = 1;
  std::string out;
  std::string split = "all";
  std::string label;
  int reply_timeout_s = 300;
};

int cmd_run(const RunArgs& a) {
  std::vector<ProblemBundle> bundles = load_bundles(a.dataset);
  if (a.split != "all") {
    const Split want = parse_split(a.split);
    std::erase_if(bundles, [&](const ProblemBundle& b) { return b.split != want; });
  }
  AgentEndpoint ep = AgentEndpoint::parse(a.agent);
  ep.reply_timeout = std::chrono::seconds(a.reply_timeout_s);
  EvalOptions opt;
  opt.parallel = a.parallel;
  opt.results_path = a.out;
  opt.agent_label = a.label.empty() ? ep.identity : a.label;
  opt.env = env_config();
  std::size_t done = 0;
  const auto results = run_eval(bundles, make_agent_factory(ep, opt.env.iis_display_limit), opt,
                                [&](const EpisodeResult&) { std::cerr << "\r" << ++done << " episodes" << std::flush; });
  if (done) std::cerr << "\n";
  const MetricsReport m = compute_metrics(results, opt.agent_label);
  std::cout << opt.agent_label << "\n";
  print_block(std::cout, "overall", m.overall);
  for (const auto& [t, b] : m.per_type) print_block(std::cout, std::string(error_type_name(t)), b);
  return kExitOk;
}

int cmd_report(const std::vector<std::string>& files, const std::vector<std::string>& formats,
               const std::string& out_dir) {
  std::map<std::string, std::vector<EpisodeResult>> by_agent;
  std::vector<std::string> order;
  for (const std::string& f : files) {
    std::ifstream probe(f);
    if (!probe) throw InvalidInput(f, "cannot open results file");
    for (EvalRecord& r : load_results(f)) {
      const std::string agent = r.agent.empty() ? f : r.agent;
      if (!by_agent.count(agent)) order.push_back(agent);
      by_agent[agent].push_back(std::move(r.result));
    }
  }
  std::vector<MetricsReport> reports;
  for (const std::string& agent : order) reports.push_back(compute_metrics(by_agent[agent], agent));
  std::set<ReportFormat> fmts;
  for (const std::string& f : formats) {
    std::stringstream ss(f);
    std::string item;
    while (std::getline(ss, item, ',')) fmts.insert(parse_report_format(item));
  }
  for (const std::string& p : write_report(reports, fmts, out_dir)) std::cout << "wrote " << p << "\n";
  return kExitOk;
}

int cmd_diagnose(const std::string& path) {
  const LpModel model = read_lp_text(read_file(path));
  const SolverOptions opt = SolverOptions::from_environment();
  const SolveOutcome o = solve(model, opt);
  std::cout << "status: " << status_name(o.status) << "\n";
  std::cout << "variables: " << model.num_variables() << ", constraints: " << model.num_constraints() << "\n";
  if (o.objective) std::cout << "objective: " << format_number(*o.objective) << "\n";
  if (o.status == SolveStatus::kInfeasible) {
    const IisCertificate iis = compute_iis(model, opt);
    std::cout << "IIS (" << iis.constraints.size() << " constraints, " << iis.bounds.size() << " bounds)\n";
    for (const std::string& c : iis.constraints) std::cout << "  " << c << "\n";
    for (const BoundMember& b : iis.bounds)
      std::cout << "  " << b.variable << (b.side == BoundSide::kLower ? " >= " : " <= ") << format_number(b.value)
                << "\n";
  }
  return kExitOk;
}

int cmd_agent(const std::string& policy, int http_port) {
  PolicyFactory factory;
  if (policy == "greedy")
    factory = [] { return std::unique_ptr<Agent>(std::make_unique<GreedyIisAgent>()); };
  else
    throw InvalidInput("policy", "only 'greedy' can run without a bundle");
  if (http_port > 0) {
    AgentHttpServer server(factory);
    std::cerr << "serving greedy policy on http://127.0.0.1:" << http_port << "/\n";
    server.listen("127.0.0.1", http_port);
    return kExitOk;
  }
  std::ios::sync_with_stdio(false);
  serve_stdio_agent(factory, std::cin, std::cout);
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Supply chain LP repair environment: dataset generation, verification, evaluation and reporting"};
  app.require_subcommand(1);

  GenerateArgs gen;
  auto* g = app.add_subcommand("generate", "Generate and verify a sabotaged problem dataset");
  g->add_option("--config", gen.config, "Generator settings (JSON)")->check(CLI::ExistingFile);
  g->add_option("--count-per-type", gen.counts, "Bundles per type: K, 'full', or ME1=K1,ME2=K2,...")->required();
  g->add_option("--seed", gen.seed, "Dataset seed");
  g->add_option("--out", gen.out, "Output JSONL")->required();
  g->add_option("--lp-dir", gen.lp_dir, "Also write one LP text file per bundle here");
  g->add_option("--test-fraction", gen.test_fraction, "Test share when counts are totals")->check(CLI::Range(0.0, 1.0));
  g->add_option("--parallel", gen.parallel, "Worker threads")->check(CLI::PositiveNumber);
  g->add_flag("--quiet", gen.quiet, "No progress output");

  std::string validate_path;
  auto* v = app.add_subcommand("validate", "Rebuild every bundle and re-run its verification");
  v->add_option("dataset", validate_path, "Dataset JSONL")->required()->check(CLI::ExistingFile);

  RunArgs run;
  auto* r = app.add_subcommand("run", "Run an agent over a dataset");
  r->add_option("--dataset", run.dataset, "Dataset JSONL")->required()->check(CLI::ExistingFile);
  r->add_option("--agent", run.agent, "gt | greedy | proto:CMD | http:URL")->required();
  r->add_option("--parallel", run.parallel, "Concurrent episodes")->check(CLI::PositiveNumber);
  r->add_option("--out", run.out, "Results JSONL (appended; finished episodes are skipped)")->required();
  r->add_option("--split", run.split, "all | train | test")->check(CLI::IsMember({"all", "train", "test"}));
  r->add_option("--label", run.label, "Agent label in results and reports");
  r->add_option("--reply-timeout", run.reply_timeout_s, "Seconds to wait for an external agent reply")
      ->check(CLI::PositiveNumber);

  std::vector<std::string> report_files;
  std::vector<std::string> report_formats{"md"};
  std::string report_dir = "report";
  auto* rep = app.add_subcommand("report", "Metrics tables and plots from result files");
  rep->add_option("results", report_files, "Result JSONL files")->required();
  rep->add_option("--format", report_formats, "md, csv, plots (comma separated or repeated)");
  rep->add_option("--out-dir", report_dir, "Output directory");

  std::string lp_path;
  auto* d = app.add_subcommand("diagnose", "Solve an LP text file and print its IIS when infeasible");
  d->add_option("model", lp_path, "LP text file")->required()->check(CLI::ExistingFile);

  std::string policy = "greedy";
  int http_port = 0;
  auto* ag = app.add_subcommand("agent", "Serve a scripted policy over the agent protocol (stdio by default)");
  ag->add_option("--policy", policy, "Policy name")->check(CLI::IsMember({"greedy"}));
  ag->add_option("--http", http_port, "Serve over HTTP on this port instead of stdio")->check(CLI::Range(1, 65535));

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kExitOk : kExitUsage;
  }

  try {
    if (*g) return cmd_generate(gen);
    if (*v) return cmd_validate(validate_path);
    if (*r) return cmd_run(run);
    if (*rep) return cmd_report(report_files, report_formats, report_dir);
    if (*d) return cmd_diagnose(lp_path);
    if (*ag) return cmd_agent(policy, http_port);
  } catch (const InvalidInput& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const ConfigurationError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const Error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitVerification;
  }
  return kExitUsage;
}
