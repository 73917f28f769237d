#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sys/wait.h>

#include "bellgames/errors.hpp"
#include "bellgames/harness/acceptance.hpp"
#include "bellgames/harness/dispatch.hpp"
#include "bellgames/harness/run_config.hpp"

using namespace bellgames;
using namespace bellgames::harness;

namespace {

RunConfig cfg(std::string command, std::string sub) {
  RunConfig c;
  c.command = std::move(command);
  c.subcommand = std::move(sub);
  return c;
}

int cli_status(const std::string& args) {
  const std::string cmd = std::string(BELLGAMES_CLI_PATH) + " " + args + " > /dev/null 2>&1";
  const int raw = std::system(cmd.c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

std::string cli_output(const std::string& args) {
  const std::string cmd = std::string(BELLGAMES_CLI_PATH) + " " + args + " 2>/dev/null";
  std::string out;
  FILE* pipe = popen(cmd.c_str(), "r");
  char buf[4096];
  while (std::size_t got = std::fread(buf, 1, sizeof buf, pipe)) out.append(buf, got);
  pclose(pipe);
  return out;
}

}  // namespace

TEST(Rounding, TwelveSignificantDigits) {
  EXPECT_EQ(format12(1.0 / 3.0), "0.333333333333");
  EXPECT_EQ(round12(0.1234567890123456), 0.123456789012);
  EXPECT_EQ(round12(0.0), 0.0);
  EXPECT_EQ(format12(4.0), "4");
}

TEST(Config, FlagsOverrideFile) {
  RunConfig file = cfg("jp", "build");
  file.n = 3;
  file.k = 2;
  file.seed = 9;
  RunConfig flags = cfg("jp", "build");
  flags.k = 4;
  const auto merged = merge_configs(file, flags);
  EXPECT_EQ(merged.n, 3);
  EXPECT_EQ(merged.k, 4);
  EXPECT_EQ(merged.seed, 9u);
}

TEST(Config, JsonRoundTripAndUnknownField) {
  RunConfig c = cfg("coset", "optimize");
  c.n = 8;
  c.grid_betas = {0.5, 1.0};
  const auto back = config_from_json(to_json(c));
  EXPECT_EQ(back.n, 8);
  EXPECT_EQ(back.grid_betas, c.grid_betas);
  EXPECT_THROW(config_from_json(nlohmann::json{{"bogus", 1}}), ValidationError);
}

TEST(Config, MissingSeedOnStochasticRunRejected) {
  RunConfig c = cfg("jp", "probe-expectation");
  c.k = 4;
  EXPECT_THROW(validate(c), ValidationError);
  c.seed = 1;
  EXPECT_NO_THROW(validate(c));
  RunConfig e = cfg("claims", "entropy-gap");
  EXPECT_NO_THROW(validate(e));
}

TEST(Config, BadParametersRejected) {
  RunConfig c = cfg("coset", "value");
  c.n = 12;
  EXPECT_THROW(validate(c), ValidationError);
  RunConfig t = cfg("claims", "norm-tail");
  t.k = 2;
  t.R = 1.5;
  t.seed = 1;
  EXPECT_THROW(validate(t), ValidationError);
  EXPECT_THROW(validate(cfg("jp", "fly")), ValidationError);
}

TEST(Dispatch, ProbeExpectationNearFour) {
  RunConfig c = cfg("jp", "probe-expectation");
  c.k = 16;
  c.samples = 100000;
  c.seed = 7;
  const auto rec = dispatch(c);
  ASSERT_EQ(rec.rows.size(), 1u);
  EXPECT_NEAR(rec.rows[0]["mean"].get<double>(), 4.0, 3 * rec.rows[0]["std_err"].get<double>());
  EXPECT_EQ(exit_status(rec), 0);
}

TEST(Dispatch, MaxentAuditAllLinksPass) {
  RunConfig c = cfg("maxent", "audit");
  c.n = 4;
  c.m = 1;
  c.seeds = 20;
  c.seed = 1;
  const auto rec = dispatch(c);
  ASSERT_EQ(rec.rows.size(), 20u);
  for (const auto& row : rec.rows) EXPECT_TRUE(row["all_links_pass"].get<bool>());
  EXPECT_TRUE(rec.all_checks_pass());
}

TEST(Dispatch, IdenticalConfigReproducesNumbers) {
  RunConfig c = cfg("jp", "violation");
  c.n = 3;
  c.k = 2;
  c.seeds = 3;
  c.seed = 11;
  auto a = to_json(dispatch(c)), b = to_json(dispatch(c));
  EXPECT_EQ(a["results"].dump(), b["results"].dump());
  EXPECT_EQ(a["schema"], kRunRecordSchema);
}

TEST(Output, CsvColumnsInFirstAppearanceOrder) {
  RunRecord rec;
  rec.rows.push_back(nlohmann::ordered_json{{"n", 4}, {"value", 1.0 / 3.0}});
  rec.rows.push_back(nlohmann::ordered_json{{"n", 8}, {"extra", "a,b"}, {"value", 0.5}});
  rec.checks.emplace_back("ok", true);
  EXPECT_EQ(to_csv(rec), "n,value,extra,check_ok\n4,0.333333333333,,true\n8,0.5,\"a,b\",true\n");
}

TEST(Output, JsonRoundsFloats) {
  RunRecord rec;
  rec.config = cfg("claims", "entropy-gap");
  rec.rows.push_back(nlohmann::ordered_json{{"x", 0.1234567890123456}});
  EXPECT_EQ(to_json(rec)["results"][0]["x"].get<double>(), 0.123456789012);
}

TEST(Acceptance, TiersAndNames) {
  EXPECT_EQ(tier_criteria(Tier::full).size(), 13u);
  EXPECT_EQ(tier_criteria(Tier::smoke).front(), 1);
  EXPECT_EQ(criterion_name(1), "chsh-golden");
  EXPECT_THROW(tier_from_string("medium"), ValidationError);
}

TEST(Acceptance, CriterionRerunIsBitwiseIdentical) {
  const auto a = run_criterion(11, kAcceptanceSeed), b = run_criterion(11, kAcceptanceSeed);
  EXPECT_TRUE(a.passed);
  EXPECT_EQ(a.metrics.dump(), b.metrics.dump());
}

TEST(Cli, ExitStatuses) {
  EXPECT_EQ(cli_status("jp probe-expectation --k 4 --samples 1000"), 1);
  EXPECT_EQ(cli_status("jp probe-expectation --k 4 --samples 1000 --seed 3"), 0);
  EXPECT_EQ(cli_status("coset value --n 6"), 1);
  EXPECT_EQ(cli_status("nonsense"), 1);
  EXPECT_EQ(cli_status("claims entropy-gap --step 0.01"), 0);
}

TEST(Cli, CsvAndConfigFile) {
  const auto csv = cli_output("coset value --n 8 --method quantum --format csv");
  EXPECT_EQ(csv.substr(0, csv.find('\n')), "method,value,bias,beta,gamma_sq,bias_sqrt_n,n");
  const auto path = std::filesystem::temp_directory_path() / "bellgames_cfg_test.json";
  std::ofstream(path) << R"({"n": 4, "seeds": 2, "seed": 5, "m": 2})";
  const auto j = nlohmann::json::parse(cli_output("maxent audit --config " + path.string() + " --seeds 3"));
  std::filesystem::remove(path);
  EXPECT_EQ(j["results"].size(), 3u);
  EXPECT_EQ(j["config"]["m"], 2);
  EXPECT_TRUE(j["all_checks_pass"].get<bool>());
}
