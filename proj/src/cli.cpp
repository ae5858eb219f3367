#include "coopfarm/cli.hpp"

#include <cstdlib>
#include <filesystem>
#include <iostream>

#include <CLI11.hpp>
#include <json.hpp>

#include "coopfarm/numfmt.hpp"
#include "coopfarm/scenario_io.hpp"

namespace coopfarm::cli {

namespace fs = std::filesystem;

namespace {

struct Options {
  std::string scenario_path;
  std::string output_dir = ".";
  std::string input_path;
  std::optional<std::uint64_t> seed_override;
  bool json_only = false;
  bool csv = false;
  std::string arm = "fair";
  std::optional<int> rounds;
};

class SeedError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::uint64_t parse_seed(const std::string& text) {
  std::size_t used = 0;
  unsigned long long v = 0;
  try {
    v = std::stoull(text, &used, 10);
  } catch (const std::exception&) {
    used = 0;
  }
  if (used == 0 || used != text.size() || text.front() == '-')
    throw SeedError(std::string(kSeedEnvVar) + ": not an unsigned 64-bit integer: '" + text + "'");
  return v;
}

ScenarioConfig load_with_seed(const Options& opt, const Context& ctx) {
  auto config = load_scenario(opt.scenario_path);
  if (opt.seed_override)
    config.seed = *opt.seed_override;
  else if (ctx.env_seed)
    config.seed = parse_seed(*ctx.env_seed);
  return config;
}

fs::path prepare_output(const Options& opt) {
  const fs::path dir(opt.output_dir);
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw IoError(dir, "cannot create output directory");
  return dir;
}

SimulationReport base_report(const std::string& command, const ScenarioConfig& config) {
  SimulationReport rep;
  rep.command = command;
  rep.scenario = config;
  rep.farms = build_farms(config);
  return rep;
}

void print_blocs(std::ostream& out, const BlocAssignment& a) {
  std::size_t cooperators = 0;
  for (auto s : a.strategy_of) cooperators += s == Strategy::CP;
  out << "Blocs: " << a.blocs.size() << "\n";
  for (const auto& b : a.blocs) {
    out << "  bloc (cluster " << b.cluster << "): members";
    for (auto m : b.members) out << ' ' << m;
    out << ", co-op accuracy " << format_double(b.coop_accuracy) << "\n";
  }
  out << "Cooperators: " << cooperators << " of " << a.strategy_of.size() << "\n";
}

void print_rounds(std::ostream& out, const std::vector<RoundTrace>& rounds) {
  std::size_t total = 0;
  for (const auto& t : rounds) {
    if (t.defections_this_round.empty()) continue;
    total += t.defections_this_round.size();
    out << "Round " << t.round << " defections:";
    for (auto id : t.defections_this_round) out << ' ' << id;
    out << "\n";
  }
  out << "Rounds: " << rounds.size() << ", total defections: " << total << "\n";
}

void print_equilibrium(std::ostream& out, const EquilibriumAnalysis& a) {
  out << "Profiles evaluated: " << a.report.profiles_evaluated << "\n";
  out << "Nash equilibria: " << a.report.nash_masks.size() << "\n";
  out << "All-DF NE: " << (a.report.all_df_is_ne ? "true" : "false") << "\n";
  out << "All-CP NE: " << (a.report.all_cp_is_ne ? "true" : "false") << "\n";
  out << "All-DF cost condition met: " << (a.theorem1.condition_met ? "true" : "false")
      << ", holds: " << (a.theorem1.holds ? "true" : "false") << "\n";
  out << "Claim that All-CP is never a NE holds: " << (a.theorem2.claim_holds ? "true" : "false")
      << "\n";
  if (a.theorem2.counterexample)
    out << "That claim is parameter-dependent: All-CP is a NE for this scenario\n";
}

void print_summary(std::ostream& out, const SimulationReport& rep) {
  out << "Command: " << rep.command << (rep.arm.empty() ? "" : " (" + rep.arm + " arm)") << "\n";
  out << "Farms: " << rep.farms.size() << "\n";
  if (!rep.scores.empty()) {
    out << "Scored accuracy:";
    for (const auto& s : rep.scores) out << ' ' << format_double(s.accuracy);
    out << "\n";
  }
  if (rep.equilibrium) print_equilibrium(out, *rep.equilibrium);
  if (rep.assignment) print_blocs(out, *rep.assignment);
  if (!rep.rounds.empty()) print_rounds(out, rep.rounds);
}

void finish_report(const SimulationReport& rep, const Options& opt, Context& ctx) {
  const auto dir = prepare_output(opt);
  const auto files = write_report(rep, dir / "report.json", opt.csv);
  if (!opt.json_only) {
    print_summary(ctx.out, rep);
    ctx.out << "Report: " << files.json.string() << "\n";
  }
}

int cmd_generate(const Options& opt, Context& ctx) {
  const auto config = load_with_seed(opt, ctx);
  const auto dir = prepare_output(opt);
  const auto farms = build_farms(config);
  const auto datasets = generate_datasets(farms, config.pipeline.gen, config.seed);

  nlohmann::ordered_json manifest;
  manifest["version"] = "coopfarm-datasets/1";
  manifest["seed"] = config.seed;
  manifest["columns"] = nlohmann::ordered_json::array();
  for (const auto& spec : kFieldSpecs) manifest["columns"].push_back(std::string(spec.name));
  manifest["columns"].push_back("label");
  manifest["farms"] = nlohmann::ordered_json::array();
  for (const auto& ds : datasets) {
    const auto name = "farm_" + std::to_string(ds.farm_id) + ".csv";
    write_dataset_csv(ds, dir / name);
    std::size_t anomalous = 0;
    for (const auto& r : ds.records) anomalous += r.label == RecordLabel::anomalous;
    manifest["farms"].push_back({{"farm_id", ds.farm_id},
                                 {"file", name},
                                 {"records", ds.records.size()},
                                 {"anomalous", anomalous},
                                 {"generation_seed", ds.generation_seed}});
  }
  write_text_file(dir / "manifest.json", manifest.dump(2) + "\n");
  if (!opt.json_only)
    ctx.out << "Generated " << datasets.size() << " datasets in " << dir.string() << "\n";
  return kOk;
}

int cmd_equilibrium(const Options& opt, Context& ctx) {
  const auto config = load_with_seed(opt, ctx);
  if (config.farms.size() > kMaxEnumerationFarms) {
    ctx.err << "error: " << config.farms.size() << " farms exceeds the enumeration limit of "
            << kMaxEnumerationFarms << " (profile space too large)\n";
    return kGuardViolation;
  }
  auto rep = base_report("equilibrium", config);
  rep.equilibrium =
      analyze_equilibria(rep.farms, config.costs, config.payoff, config.dynamics.epsilon);
  finish_report(rep, opt, ctx);
  return kOk;
}

int cmd_fair(const Options& opt, Context& ctx) {
  const auto config = load_with_seed(opt, ctx);
  auto rep = base_report("fair", config);
  rep.arm = "fair";
  auto outcome = run_fair_strategy(config);
  rep.scores = std::move(outcome.scores);
  rep.clustering = std::move(outcome.clustering);
  rep.assignment = std::move(outcome.assignment);
  finish_report(rep, opt, ctx);
  return kOk;
}

int cmd_naive(const Options& opt, Context& ctx) {
  const auto config = load_with_seed(opt, ctx);
  auto rep = base_report("naive", config);
  rep.arm = "naive";
  rep.assignment = run_naive_coop(rep.farms, config.payoff.accuracy_model);
  finish_report(rep, opt, ctx);
  return kOk;
}

int cmd_simulate(const Options& opt, Context& ctx) {
  const auto config = load_with_seed(opt, ctx);
  auto rep = base_report("simulate", config);
  rep.arm = opt.arm;
  if (opt.arm == "fair") {
    auto outcome = run_fair_strategy(config);
    rep.scores = std::move(outcome.scores);
    rep.clustering = std::move(outcome.clustering);
    rep.assignment = std::move(outcome.assignment);
  } else {
    rep.assignment = run_naive_coop(rep.farms, config.payoff.accuracy_model);
  }
  const int rounds = opt.rounds.value_or(config.dynamics.rounds);
  if (rounds < 1) throw ScenarioError(ScenarioErrorKind::validation, "rounds", "--rounds: must be >= 1");
  rep.rounds = simulate_rounds(rep.farms, *rep.assignment, config.costs, config.payoff, rounds,
                               config.dynamics.epsilon);
  finish_report(rep, opt, ctx);
  return kOk;
}

int cmd_report(const Options& opt, Context& ctx) {
  const auto rep = load_report(opt.input_path);
  const auto dir = prepare_output(opt);
  const auto stem = fs::path(opt.input_path).stem().string();
  write_text_file(dir / (stem + "_scores.csv"), scores_csv(rep));
  write_text_file(dir / (stem + "_rounds.csv"), rounds_csv(rep));
  if (!opt.json_only) print_summary(ctx.out, rep);
  return kOk;
}

}  // namespace

Context process_context() {
  Context ctx{std::cout, std::cerr, std::nullopt};
  if (const char* v = std::getenv(kSeedEnvVar)) ctx.env_seed = std::string(v);
  return ctx;
}

int run(const std::vector<std::string>& args, Context& ctx) {
  CLI::App app{"Cooperative smart-farming game simulator", "coopfarm"};
  app.require_subcommand(1);
  Options opt;

  auto add_common = [&](CLI::App* sub) {
    sub->add_option("--scenario,-s", opt.scenario_path, "Scenario JSON file")->required();
    sub->add_option("--out,-o", opt.output_dir, "Output directory");
    sub->add_option("--seed", opt.seed_override, "Seed (overrides COOPFARM_SEED and the scenario)");
    sub->add_flag("--json-only", opt.json_only, "Write files only; no summary on stdout");
  };

  auto* generate = app.add_subcommand("generate", "Write per-farm synthetic datasets as CSV");
  add_common(generate);

  auto* equilibrium = app.add_subcommand("equilibrium", "Enumerate pure Nash equilibria");
  add_common(equilibrium);

  auto* fair = app.add_subcommand("fair", "Run the fair strategy (score, cluster, assign)");
  add_common(fair);
  fair->add_flag("--csv", opt.csv, "Also write CSV tables");

  auto* naive = app.add_subcommand("naive", "Single bloc containing every farm");
  add_common(naive);
  naive->add_flag("--csv", opt.csv, "Also write CSV tables");

  auto* simulate = app.add_subcommand("simulate", "Repeated-round defection dynamics");
  add_common(simulate);
  simulate->add_flag("--csv", opt.csv, "Also write CSV tables");
  simulate->add_option("--arm", opt.arm, "Starting assignment")->check(CLI::IsMember({"fair", "naive"}));
  simulate->add_option("--rounds", opt.rounds, "Number of rounds (default: scenario dynamics.rounds)");

  auto* report = app.add_subcommand("report", "Validate a report and export its CSV tables");
  report->add_option("--input,-i", opt.input_path, "Report JSON file")->required();
  report->add_option("--out,-o", opt.output_dir, "Output directory");
  report->add_flag("--json-only", opt.json_only, "No summary on stdout");

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    ctx.out << app.help();
    return kOk;
  } catch (const CLI::ParseError& e) {
    ctx.err << "error: " << e.what() << "\n" << app.help();
    return kConfigError;
  }

  try {
    if (generate->parsed()) return cmd_generate(opt, ctx);
    if (equilibrium->parsed()) return cmd_equilibrium(opt, ctx);
    if (fair->parsed()) return cmd_fair(opt, ctx);
    if (naive->parsed()) return cmd_naive(opt, ctx);
    if (simulate->parsed()) return cmd_simulate(opt, ctx);
    if (report->parsed()) return cmd_report(opt, ctx);
  } catch (const ScenarioError& e) {
    ctx.err << "error: " << e.what() << "\n";
    return e.kind() == ScenarioErrorKind::missing_file ? kIoError : kConfigError;
  } catch (const SeedError& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const IoError& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const fs::filesystem_error& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kIoError;
  } catch (const std::invalid_argument& e) {
    ctx.err << "error: " << e.what() << "\n";
    return kConfigError;
  }
  return kConfigError;
}

}  // namespace coopfarm::cli
