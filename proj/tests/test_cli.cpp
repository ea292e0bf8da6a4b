#include <gtest/gtest.h>

#include <cstdlib>
#include <sys/wait.h>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "med/commands.hpp"

namespace fs = std::filesystem;

namespace {

class CliTest : public ::testing::Test {
 protected:
  void SetUp() override {
    dir_ = fs::temp_directory_path() /
           ("medsim_" + std::string(::testing::UnitTest::GetInstance()->current_test_info()->name()));
    fs::remove_all(dir_);
    fs::create_directories(dir_);
  }
  void TearDown() override { fs::remove_all(dir_); }

  fs::path write_config(const std::string& text, const std::string& name = "config.json") {
    const auto p = dir_ / name;
    std::ofstream(p) << text;
    return p;
  }

  med::CommandOptions options(const fs::path& cfg, const std::string& out = "out") {
    med::CommandOptions o;
    o.config_path = cfg;
    o.out_dir = dir_ / out;
    return o;
  }

  fs::path dir_;
  std::ostringstream log_;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return {std::istreambuf_iterator<char>(in), {}};
}

std::vector<std::string> lines(const fs::path& p) {
  std::vector<std::string> out;
  std::istringstream in(slurp(p));
  for (std::string l; std::getline(in, l);) out.push_back(l);
  return out;
}

std::vector<std::string> split(const std::string& s) {
  std::vector<std::string> out;
  std::stringstream ss(s);
  for (std::string f; std::getline(ss, f, ',');) out.push_back(f);
  return out;
}

TEST_F(CliTest, EmptyConfigYieldsReferenceDefaults) {
  const auto cfg = med::load_config(write_config("{}"));
  const auto& s = cfg.sim;
  EXPECT_EQ(s.rows, 8);
  EXPECT_EQ(s.cols, 8);
  EXPECT_EQ(s.resolved_users(), (std::vector<med::NodeId>{0, 7, 56, 63}));
  EXPECT_EQ(s.q, 0.7);
  EXPECT_EQ(s.k, 0.5);
  EXPECT_EQ(s.trials, 10000u);
  EXPECT_EQ(s.device.tau_e, 123e-6);
  EXPECT_EQ(s.device.tau_s, 2157e-6);
  EXPECT_EQ(s.device.tau_f, 300e-6);
  EXPECT_EQ(s.device.c_fibre, 2e5);
  EXPECT_FALSE(s.p_override.has_value());
  EXPECT_EQ(med::sweep_lengths(cfg).size(), 29u);
}

TEST_F(CliTest, ConfigFieldsParse) {
  const auto cfg = med::load_config(write_config(R"({
    "grid": {"rows": 4, "cols": 5}, "users": [0, 19], "edge_length_km": 3.5,
    "protocol": {"p": 0.25, "q": 0.9, "k": 0.6},
    "device": {"tau_e_s": 1e-4, "t_coherence_s": "inf"},
    "trials": 12, "seed": 99, "bins": 7,
    "sweep": {"L_values_km": [1, 2.5]}
  })"));
  EXPECT_EQ(cfg.sim.rows, 4);
  EXPECT_EQ(cfg.sim.users, (std::vector<med::NodeId>{0, 19}));
  EXPECT_EQ(cfg.sim.protocol_params().p, 0.25);
  EXPECT_EQ(cfg.sim.device.tau_e, 1e-4);
  EXPECT_TRUE(std::isinf(cfg.sim.device.t_coherence));
  EXPECT_EQ(cfg.sim.master_seed, 99u);
  EXPECT_EQ(med::sweep_lengths(cfg), (std::vector<double>{1.0, 2.5}));
}

TEST_F(CliTest, MalformedConfigsAreConfigErrors) {
  EXPECT_THROW(med::load_config(write_config("{\"trails\": 5}")), med::ConfigError);
  EXPECT_THROW(med::load_config(write_config("{\"protocol\": {\"q\": \"x\"}}")), med::ConfigError);
  EXPECT_THROW(med::load_config(write_config("{not json")), med::ConfigError);
  EXPECT_THROW(med::load_config(dir_ / "missing.json"), med::ConfigError);
}

TEST_F(CliTest, RangeExpansion) {
  EXPECT_EQ(med::expand_range({1, 29, 1}).size(), 29u);
  EXPECT_EQ(med::expand_range({0.5, 2.0, 0.5}), (std::vector<double>{0.5, 1.0, 1.5, 2.0}));
  EXPECT_TRUE(med::expand_range({5, 1, 1}).empty());
  EXPECT_THROW(med::expand_range({1, 5, 0}), med::ConfigError);
}

TEST_F(CliTest, ValidateDefaultConfigPasses) {
  auto o = options(write_config("{}"));
  EXPECT_EQ(med::cmd_validate(o, log_), med::kExitOk);
  const auto j = nlohmann::json::parse(slurp(o.out_dir / "validate.json"));
  EXPECT_TRUE(j["pass"].get<bool>());
  EXPECT_EQ(j["trials"].get<int>(), 10000);
  EXPECT_EQ(j["segment_counts"], nlohmann::json({6, 7, 7, 8}));
  const auto m = nlohmann::json::parse(slurp(o.out_dir / "manifest.json"));
  EXPECT_EQ(m["outputs"], nlohmann::json({"validate.json"}));
}

TEST_F(CliTest, ZeroFusionProbabilityIsConfigError) {
  auto o = options(write_config(R"({"protocol": {"k": 0}})"));
  EXPECT_EQ(med::cmd_validate(o, log_), med::kExitConfigError);
}

TEST_F(CliTest, TrialsOverrideEchoedInManifest) {
  auto o = options(write_config(R"({"trials": 5})"));
  o.trials = 321;
  o.deterministic = true;
  EXPECT_EQ(med::cmd_validate(o, log_), med::kExitOk);
  const auto m = nlohmann::json::parse(slurp(o.out_dir / "manifest.json"));
  EXPECT_EQ(m["config"]["trials"].get<int>(), 321);
  EXPECT_EQ(m["command"], "validate");
  EXPECT_EQ(m["version"], MED_VERSION);
}

TEST_F(CliTest, SweepDefaultRangeHas29Rows) {
  auto o = options(write_config(R"({"trials": 30})"));
  EXPECT_EQ(med::cmd_sweep(o, log_), med::kExitOk);
  const auto ls = lines(o.out_dir / "sweep.csv");
  ASSERT_EQ(ls.size(), 30u);
  EXPECT_EQ(ls[0],
            "L_km,p,mean_n_e,mean_n_s,mean_n_f,mean_tau_classical_s,mean_tau_quantum_s,"
            "mean_total_s,classical_share,feasible_frac");
  EXPECT_EQ(split(ls[1])[0], "1");
  EXPECT_EQ(split(ls[29])[0], "29");
}

TEST_F(CliTest, DeterministicSweepRowMatchesFormula) {
  auto o = options(write_config(R"({"trials": 3})"));
  o.deterministic = true;
  o.L_start_km = 1.0;
  o.L_end_km = 1.0;
  EXPECT_EQ(med::cmd_sweep(o, log_), med::kExitOk);
  const auto ls = lines(o.out_dir / "sweep.csv");
  ASSERT_EQ(ls.size(), 2u);
  const auto f = split(ls[1]);
  EXPECT_EQ(std::stod(f[2]), 28.0);
  EXPECT_EQ(std::stod(f[3]), 24.0);
  EXPECT_EQ(std::stod(f[4]), 1.0);
  const double tc = 28 * 8e-5 + 24 * 7e-5;
  const double tq = 28 * (123e-6 + 1.0 / 2e5) + 24 * 2157e-6 + 300e-6;
  EXPECT_NEAR(std::stod(f[5]), tc, 1e-12 * tc);
  EXPECT_NEAR(std::stod(f[6]), tq, 1e-12 * tq);
  EXPECT_NEAR(std::stod(f[8]), tc / (tc + tq), 1e-12);
}

TEST_F(CliTest, EmptyLengthListIsConfigError) {
  auto o = options(write_config(R"({"trials": 3, "sweep": {"L_values_km": []}})"));
  EXPECT_EQ(med::cmd_sweep(o, log_), med::kExitConfigError);
}

TEST_F(CliTest, HistWritesConsistentFiles) {
  auto o = options(write_config(R"({"trials": 400, "bins": 20})"));
  EXPECT_EQ(med::cmd_hist(o, log_), med::kExitOk);
  const auto trials = lines(o.out_dir / "trials.csv");
  EXPECT_EQ(trials.size(), 401u);
  EXPECT_EQ(trials[0], "trial,n_e,n_s,n_f,tau_classical_s,tau_quantum_s,total_s");
  const auto hist = lines(o.out_dir / "hist.csv");
  ASSERT_EQ(hist.size(), 21u);
  EXPECT_EQ(hist[0], "bin_lo,bin_hi,count");
  long total = 0;
  for (std::size_t i = 1; i < hist.size(); ++i) total += std::stol(split(hist[i])[2]);
  EXPECT_EQ(total, 400);
  EXPECT_TRUE(fs::exists(o.out_dir / "validate.json"));
  const auto m = nlohmann::json::parse(slurp(o.out_dir / "manifest.json"));
  EXPECT_EQ(m["outputs"].size(), 3u);
}

TEST_F(CliTest, HistIsByteIdenticalAcrossRunsAndThreads) {
  auto a = options(write_config(R"({"trials": 300})"), "a");
  auto b = options(write_config(R"({"trials": 300})"), "b");
  a.threads = 1;
  b.threads = 4;
  ASSERT_EQ(med::cmd_hist(a, log_), med::kExitOk);
  ASSERT_EQ(med::cmd_hist(b, log_), med::kExitOk);
  for (const char* f : {"trials.csv", "hist.csv", "validate.json"})
    EXPECT_EQ(slurp(a.out_dir / f), slurp(b.out_dir / f)) << f;
}

TEST_F(CliTest, OpCapAbortExitsWith3) {
  auto o = options(write_config(R"({"trials": 3, "op_cap": 10})"));
  EXPECT_EQ(med::cmd_hist(o, log_), med::kExitRuntimeAbort);
}

TEST(FormatDouble, LocaleIndependentShortest) {
  EXPECT_EQ(med::format_double(0.5), "0.5");
  EXPECT_EQ(med::format_double(1.0), "1");
  EXPECT_EQ(med::format_double(3.92e-3), "0.00392");
  EXPECT_EQ(std::stod(med::format_double(0.1 + 0.2)), 0.1 + 0.2);
}

#ifdef MEDSIM_PATH
int run_tool(const std::string& args) {
  const std::string cmd = std::string(MEDSIM_PATH) + " " + args + " > /dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  return WIFEXITED(rc) ? WEXITSTATUS(rc) : -1;
}

TEST_F(CliTest, ToolExitCodes) {
  const auto good = write_config(R"({"trials": 50})");
  const auto bad = write_config(R"({"protocol": {"k": 0}})", "bad.json");
  const auto out = (dir_ / "tool").string();
  EXPECT_EQ(run_tool("hist --config " + good.string() + " --out " + out + " --seed 7"), 0);
  EXPECT_EQ(lines(dir_ / "tool" / "trials.csv").size(), 51u);
  EXPECT_EQ(run_tool("validate --config " + good.string() + " --out " + out + " --deterministic"), 0);
  EXPECT_EQ(run_tool("validate --config " + bad.string() + " --out " + out), 2);
  EXPECT_EQ(run_tool("sweep --config " + good.string() + " --out " + out +
                     " --L-start 2 --L-end 4 --L-step 1 --trials 10"), 0);
  EXPECT_EQ(lines(dir_ / "tool" / "sweep.csv").size(), 4u);
  EXPECT_EQ(run_tool("frobnicate"), 2);
}
#endif

}  // namespace
