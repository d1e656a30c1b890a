#include "proxreg/harness.hpp"

#include <gtest/gtest.h>

#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <sys/wait.h>

using namespace proxreg;
namespace fs = std::filesystem;

namespace {

const char* kMinimal = R"({
  "problem": {"operators": [{"type": "linear", "A": [[1, 0], [0, 1]]}], "x0": [1, 0]},
  "algorithm": "proximal"
})";

const char* kTwoAxes = R"({
  "problem": {
    "operators": [
      {"type": "normal_cone", "set": {"type": "hyperplane", "a": [0, 1], "b": 0}},
      {"type": "normal_cone", "set": {"type": "hyperplane", "a": [1, 0], "b": 0}}
    ],
    "x0": [1, 1]
  },
  "algorithm": "randomized",
  "schedule": {"type": "constant", "lambda": 2},
  "max_iters": 200,
  "seed": 42,
  "estimation": {"radius": 1, "n_samples": 2000},
  "verification": {"gamma_bar": 1, "kappa_bar": 1.05, "n_trials": 200}
})";

std::string read_file(const fs::path& p)
{
    std::ifstream in(p, std::ios::binary);
    std::ostringstream s;
    s << in.rdbuf();
    return s.str();
}

fs::path scratch(const std::string& name)
{
    const auto p = fs::temp_directory_path() / ("proxreg_harness_" + name);
    fs::remove_all(p);
    return p;
}

CommandOptions options_in(const fs::path& dir)
{
    CommandOptions o;
    o.out_dir = dir;
    o.timestamp = "2000-01-01T00:00:00Z";
    return o;
}

std::string config_error(const std::string& text)
{
    try {
        (void)parse_config(text);
    } catch (const ConfigError& e) {
        return e.what();
    }
    return {};
}

} // namespace

TEST(Config, MinimalConfigGetsDefaults)
{
    const auto cfg = parse_config(kMinimal);
    EXPECT_EQ(cfg.run.max_iters, 1000);
    EXPECT_EQ(cfg.run.residual_tol, 1e-10);
    EXPECT_EQ(cfg.run.seed, 0u);
    EXPECT_EQ(cfg.run.schedule.lambda0(), 1.0);
    const Json echoed = to_json(cfg);
    EXPECT_EQ(echoed.at("max_iters"), 1000);
    EXPECT_EQ(echoed.at("residual_tol"), 1e-10);
    EXPECT_EQ(echoed.at("schedule").at("type"), "constant");
}

TEST(Config, RoundTrip)
{
    for (const char* text : {kMinimal, kTwoAxes}) {
        const Json once = to_json(parse_config(text));
        EXPECT_EQ(to_json(config_from_json(once)), once);
    }
}

TEST(Config, MonotonicityGateNamesEigenvalue)
{
    const std::string ok = R"({"problem": {"operators": [{"type": "linear", "A": [[0, 1], [-1, 0]]}], "x0": [1, 0]},
                               "algorithm": "proximal"})";
    EXPECT_NO_THROW((void)parse_config(ok));
    const std::string bad = R"({"problem": {"operators": [{"type": "linear", "A": [[-1, 0], [0, 0]]}], "x0": [1, 0]},
                                "algorithm": "proximal"})";
    const auto msg = config_error(bad);
    EXPECT_NE(msg.find("problem.operators[0].A"), std::string::npos) << msg;
    EXPECT_NE(msg.find("-1"), std::string::npos) << msg;
}

TEST(Config, MixedDimensionsNameBothFields)
{
    const std::string bad = R"({"problem": {"operators": [{"type": "linear", "A": [[1, 0], [0, 1]]}], "x0": [1, 0, 0]},
                                "algorithm": "proximal"})";
    const auto msg = config_error(bad);
    EXPECT_NE(msg.find("problem.x0"), std::string::npos) << msg;
    EXPECT_NE(msg.find("problem.operators[0]"), std::string::npos) << msg;
}

TEST(Config, SchemaViolations)
{
    EXPECT_NE(config_error("{not json").find("$"), std::string::npos);
    EXPECT_NE(config_error(R"({"problem": {"operators": [], "x0": [1]}, "algorithm": "proximal"})"), "");
    EXPECT_NE(config_error(R"({"problem": {"operators": [{"type": "subdiff_l1", "w": 1, "dim": 1}], "x0": [1]},
                              "algorithm": "gradient"})")
                  .find("algorithm"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"problem": {"operators": [{"type": "subdiff_l1", "w": 1, "dim": 1}], "x0": [1]},
                              "algorithm": "proximal", "colour": 1})")
                  .find("colour"),
              std::string::npos);
    EXPECT_NE(config_error(R"({"problem": {"operators": [{"type": "subdiff_l1", "w": 1, "dim": 1}], "x0": [1]},
                              "algorithm": "proximal", "verification": {"gamma_bar": 1, "n_trials": 10}})")
                  .find("verification.n_trials"),
              std::string::npos);
}

TEST(Commands, RunWritesTraceAndReport)
{
    const auto dir = scratch("run");
    const auto result = cmd_run(parse_config(kMinimal), options_in(dir));
    ASSERT_EQ(result.exit_code, kExitPass) << result.message;
    const auto csv = read_file(dir / "trace.csv");
    EXPECT_EQ(csv.substr(0, csv.find('\n')), "k,lambda,dist,ratio_sq,residual,chosen_index");
    const auto report = Json::parse(read_file(dir / "report.json"));
    std::vector<std::string> keys;
    for (const auto& [k, v] : report.items()) {
        keys.push_back(k);
    }
    EXPECT_EQ(keys, (std::vector<std::string>{"config", "results", "assertions", "version", "timestamp"}));
    EXPECT_EQ(report.at("results").at("status"), "converged");
    EXPECT_EQ(report.at("results").at("iterations"), 34);
    EXPECT_LT(report.at("results").at("final_dist").get<double>(), 1e-10);
    EXPECT_EQ(report.at("version"), std::string(version()));
}

TEST(Commands, ReportsDifferOnlyInTimestamp)
{
    const auto cfg = parse_config(kTwoAxes);
    auto a = options_in(scratch("ts_a"));
    auto b = options_in(scratch("ts_b"));
    b.timestamp = "2001-02-03T04:05:06Z";
    ASSERT_EQ(cmd_run(cfg, a).exit_code, kExitPass);
    ASSERT_EQ(cmd_run(cfg, b).exit_code, kExitPass);
    auto ja = Json::parse(read_file(a.out_dir / "report.json"));
    auto jb = Json::parse(read_file(b.out_dir / "report.json"));
    EXPECT_NE(ja.at("timestamp"), jb.at("timestamp"));
    ja.erase("timestamp");
    jb.erase("timestamp");
    EXPECT_EQ(ja.dump(), jb.dump());
    EXPECT_EQ(read_file(a.out_dir / "trace.csv"), read_file(b.out_dir / "trace.csv"));
}

TEST(Commands, EstimateSingularLinear)
{
    const std::string text = R"({
      "problem": {"operators": [{"type": "linear", "A": [[2, 0], [0, 0]]}], "x0": [3, 7], "center": [0, 0]},
      "algorithm": "proximal",
      "estimation": {"radius": 1, "n_samples": 10000}
    })";
    const auto dir = scratch("estimate");
    const auto result = cmd_estimate(parse_config(text), options_in(dir));
    ASSERT_EQ(result.exit_code, kExitPass) << result.message;
    const auto& op = result.report.at("results").at("operators").at(0);
    EXPECT_NEAR(op.at("estimate").at("modulus").get<double>(), 0.5, 0.025);
    EXPECT_DOUBLE_EQ(op.at("spectral_modulus").get<double>(), 0.5);
    EXPECT_TRUE(op.contains("relative_gap"));
    EXPECT_NEAR(result.report.at("results").at("kappa").at("modulus").get<double>(), 1.0, 0.02);
}

TEST(Commands, EstimateTwoAxesDefaultsCenterToCommonZero)
{
    const auto result = cmd_estimate(parse_config(kTwoAxes), options_in(scratch("estimate2")));
    ASSERT_EQ(result.exit_code, kExitPass) << result.message;
    EXPECT_NEAR(result.report.at("results").at("kappa").at("modulus").get<double>(), 1.0, 0.05);
}

TEST(Commands, EstimateRejectsNonZeroCenter)
{
    auto cfg = parse_config(kMinimal);
    cfg.center = Vector::Ones(2);
    cfg.estimation = EstimationSettings{1.0, 100};
    EXPECT_EQ(cmd_estimate(cfg, options_in(scratch("estimate3"))).exit_code, kExitConfigError);
}

TEST(Commands, VerifyRandomizedPasses)
{
    const auto result = cmd_verify(parse_config(kTwoAxes), options_in(scratch("verify")));
    ASSERT_EQ(result.exit_code, kExitPass) << result.message;
    EXPECT_TRUE(result.report.at("results").at("passed").get<bool>());
    EXPECT_FALSE(result.report.at("assertions").empty());
}

TEST(Commands, VerifyReportsFailureWithExitOne)
{
    auto cfg = parse_config(kMinimal);
    cfg.verification = VerificationSettings{0.1, std::nullopt, 1000};
    const auto result = cmd_verify(cfg, options_in(scratch("verify_fail")));
    EXPECT_EQ(result.exit_code, kExitFail);
    EXPECT_FALSE(result.report.at("results").at("passed").get<bool>());
}

TEST(Commands, VerifyAssumptionGateIsConfigError)
{
    auto cfg = parse_config(kTwoAxes);
    cfg.run.schedule = LambdaSchedule::constant(1.0);
    const auto dir = scratch("verify_gate");
    const auto result = cmd_verify(cfg, options_in(dir));
    EXPECT_EQ(result.exit_code, kExitConfigError);
    EXPECT_NE(result.message.find("assumption λ² > 3γ̄²"), std::string::npos) << result.message;
    EXPECT_FALSE(fs::exists(dir / "report.json"));
}

TEST(Commands, MissingBlocksAreConfigErrors)
{
    const auto cfg = parse_config(kMinimal);
    EXPECT_EQ(cmd_verify(cfg, options_in(scratch("nover"))).exit_code, kExitConfigError);
    EXPECT_EQ(cmd_estimate(cfg, options_in(scratch("noest"))).exit_code, kExitConfigError);
}

TEST(Cli, OverridesAndExitCodes)
{
    const auto dir = scratch("cli");
    fs::create_directories(dir);
    {
        std::ofstream(dir / "cfg.json") << kTwoAxes;
    }
    const std::string cli = PROXREG_CLI_PATH;
    const auto run = [&](const std::string& args) {
        const int status = std::system((cli + " " + args + " >/dev/null 2>&1").c_str());
        return WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    };
    EXPECT_EQ(run("run --config " + (dir / "cfg.json").string() + " --out " + (dir / "a").string() +
                  " --seed 7 --iters 50"),
              0);
    const auto report = Json::parse(read_file(dir / "a" / "report.json"));
    EXPECT_EQ(report.at("config").at("seed"), 7);
    EXPECT_EQ(report.at("config").at("max_iters"), 50);
    EXPECT_EQ(run("run --config " + (dir / "missing.json").string()), 2);
    EXPECT_EQ(run("frobnicate"), 2);
    EXPECT_EQ(run("--version"), 0);
}
