#include <fstream>
#include <sstream>

#include "coopfarm/cli.hpp"
#include "coopfarm/scenario_io.hpp"
#include "doctest.h"
#include "oracles.hpp"

using namespace coopfarm;

namespace {

struct Run {
  int code;
  std::string out, err;
};

Run invoke(std::vector<std::string> args, std::optional<std::string> env_seed = std::nullopt) {
  std::ostringstream out, err;
  cli::Context ctx{out, err, std::move(env_seed)};
  const int code = cli::run(args, ctx);
  return {code, out.str(), err.str()};
}

std::string fx(const char* name) { return oracle::fixture(name).string(); }

std::filesystem::path write_big_scenario(const std::filesystem::path& dir) {
  std::string farms;
  for (int i = 0; i < 21; ++i) farms += std::string(i ? ", " : "") + R"({"device_count": 2, "quality": 0.5})";
  const auto path = dir / "n21.json";
  std::ofstream(path) << "{\"farms\": [" << farms << "]}";
  return path;
}

}  // namespace

TEST_CASE("equilibrium on the two-farm fixture") {
  const auto dir = oracle::scratch_dir("cli_eq");
  const auto r = invoke({"equilibrium", "--scenario", fx("two_farm.json"), "--out", dir.string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("All-DF NE: true\n") != std::string::npos);
  CHECK(r.out.find("All-CP NE: false\n") != std::string::npos);
  const auto rep = load_report(dir / "report.json");
  REQUIRE(rep.equilibrium.has_value());
  CHECK(rep.equilibrium->report.all_df_is_ne);
  std::filesystem::remove_all(dir);
}

TEST_CASE("synergy fixture flags the claim as parameter-dependent") {
  const auto dir = oracle::scratch_dir("cli_syn");
  const auto r = invoke({"equilibrium", "-s", fx("synergy.json"), "-o", dir.string()});
  CHECK(r.code == cli::kOk);
  CHECK(r.out.find("All-CP NE: true") != std::string::npos);
  CHECK(read_text_file(dir / "report.json").find("\"claim_is_parameter_dependent\": true") != std::string::npos);
  std::filesystem::remove_all(dir);
}

TEST_CASE("more than 20 farms trips the guard") {
  const auto dir = oracle::scratch_dir("cli_guard");
  const auto r = invoke({"equilibrium", "--scenario", write_big_scenario(dir).string(), "--out", dir.string()});
  CHECK(r.code == cli::kGuardViolation);
  CHECK(r.err.find("profile space too large") != std::string::npos);
  CHECK_FALSE(std::filesystem::exists(dir / "report.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("fair, naive and simulate on the four-farm fixture") {
  const auto dir = oracle::scratch_dir("cli_arms");
  auto fair = invoke({"fair", "--scenario", fx("four_farm.json"), "--out", (dir / "fair").string()});
  CHECK(fair.code == 0);
  CHECK(load_report(dir / "fair" / "report.json").assignment->blocs.size() == 2);

  auto naive = invoke({"naive", "--scenario", fx("four_farm.json"), "--out", (dir / "naive").string()});
  CHECK(naive.code == 0);
  CHECK(load_report(dir / "naive" / "report.json").assignment->blocs.size() == 1);

  auto sim = invoke({"simulate", "--scenario", fx("four_farm.json"), "--arm", "naive", "--rounds", "10", "--csv",
                     "--out", (dir / "sim").string()});
  CHECK(sim.code == 0);
  const auto rep = load_report(dir / "sim" / "report.json");
  CHECK(rep.rounds.size() == 10);
  CHECK_FALSE(rep.rounds[0].defections_this_round.empty());
  CHECK(std::filesystem::exists(dir / "sim" / "report_rounds.csv"));
  CHECK(std::filesystem::exists(dir / "sim" / "report_scores.csv"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("generate writes one CSV per farm and a manifest") {
  const auto dir = oracle::scratch_dir("cli_gen");
  const auto r = invoke({"generate", "--scenario", fx("four_farm.json"), "--out", dir.string()});
  CHECK(r.code == 0);
  for (int i = 0; i < 4; ++i) CHECK(std::filesystem::exists(dir / ("farm_" + std::to_string(i) + ".csv")));
  CHECK(std::filesystem::exists(dir / "manifest.json"));
  CHECK(read_dataset_csv(dir / "farm_0.csv").size() == 500);
  std::filesystem::remove_all(dir);
}

TEST_CASE("seed priority: flag over environment over scenario") {
  const auto dir = oracle::scratch_dir("cli_seed");
  auto gen = [&](const std::string& sub, std::vector<std::string> extra, std::optional<std::string> env) {
    std::vector<std::string> args{"generate", "--scenario", fx("four_farm.json"), "--out", (dir / sub).string(),
                                  "--json-only"};
    args.insert(args.end(), extra.begin(), extra.end());
    CHECK(invoke(args, env).code == 0);
    return read_text_file(dir / sub / "farm_1.csv");
  };
  const auto base = gen("base", {}, std::nullopt);
  const auto flag = gen("flag", {"--seed", "5"}, std::nullopt);
  const auto flag_again = gen("flag2", {"--seed", "5"}, std::nullopt);
  const auto env = gen("env", {}, std::string("5"));
  const auto both = gen("both", {"--seed", "6"}, std::string("5"));
  CHECK(flag != base);
  CHECK(flag == flag_again);
  CHECK(env == flag);
  CHECK(both != flag);
  CHECK(both == gen("six", {"--seed", "6"}, std::nullopt));

  CHECK(invoke({"generate", "--scenario", fx("four_farm.json"), "--out", dir.string()}, std::string("abc")).code ==
        cli::kConfigError);
  CHECK(invoke({"generate", "--scenario", fx("four_farm.json"), "--out", dir.string(), "--seed", "-3"}).code ==
        cli::kConfigError);
  std::filesystem::remove_all(dir);
}

TEST_CASE("--json-only keeps stdout empty") {
  const auto dir = oracle::scratch_dir("cli_quiet");
  const auto r = invoke({"naive", "--scenario", fx("four_farm.json"), "--out", dir.string(), "--json-only"});
  CHECK(r.code == 0);
  CHECK(r.out.empty());
  CHECK(std::filesystem::exists(dir / "report.json"));
  std::filesystem::remove_all(dir);
}

TEST_CASE("report re-exports CSV tables from a saved report") {
  const auto dir = oracle::scratch_dir("cli_report");
  REQUIRE(invoke({"simulate", "--scenario", fx("four_farm.json"), "--arm", "fair", "--rounds", "3", "--out",
                  dir.string(), "--json-only"})
              .code == 0);
  const auto r = invoke({"report", "--input", (dir / "report.json").string(), "--out", (dir / "x").string()});
  CHECK(r.code == 0);
  CHECK(r.out.find("Farms: 4") != std::string::npos);
  CHECK(read_text_file(dir / "x" / "report_rounds.csv").find("round") == 0);
  std::filesystem::remove_all(dir);
}

TEST_CASE("exit codes for bad input") {
  const auto dir = oracle::scratch_dir("cli_bad");
  CHECK(invoke({}).code == cli::kConfigError);
  CHECK(invoke({"frobnicate"}).code == cli::kConfigError);
  CHECK(invoke({"fair"}).code == cli::kConfigError);
  CHECK(invoke({"simulate", "-s", fx("four_farm.json"), "--arm", "greedy"}).code == cli::kConfigError);

  auto missing = invoke({"fair", "--scenario", (dir / "nope.json").string(), "--out", dir.string()});
  CHECK(missing.code == cli::kIoError);
  CHECK_FALSE(missing.err.empty());

  std::ofstream(dir / "bad.json") << R"({"farms": [{"device_count": 1, "quality": 1.5}]})";
  auto bad = invoke({"fair", "--scenario", (dir / "bad.json").string(), "--out", dir.string()});
  CHECK(bad.code == cli::kConfigError);
  CHECK(bad.err.find("farms[0].quality") != std::string::npos);

  std::ofstream(dir / "dup.json") << R"({"farms": [{"device_count": 1, "quality": 0.5}], "seed": 1, "seed": 2})";
  CHECK(invoke({"naive", "--scenario", (dir / "dup.json").string(), "--out", dir.string()}).code ==
        cli::kConfigError);

  // Output path blocked by a regular file.
  std::ofstream(dir / "file") << "x";
  CHECK(invoke({"naive", "--scenario", fx("four_farm.json"), "--out", (dir / "file").string()}).code ==
        cli::kIoError);
  CHECK(invoke({"report", "--input", (dir / "nope.json").string(), "--out", dir.string()}).code ==
        cli::kIoError);
  CHECK(invoke({"simulate", "-s", fx("four_farm.json"), "--rounds", "0", "-o", dir.string()}).code ==
        cli::kConfigError);
  std::filesystem::remove_all(dir);
}
