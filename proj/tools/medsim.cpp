#include <CLI11.hpp>

#include "med/commands.hpp"

int main(int argc, char** argv) {
  CLI::App app{"Monte Carlo latency simulator for GHZ-state distribution over grid networks"};
  app.set_version_flag("--version", MED_VERSION);
  app.require_subcommand(1);

  med::CommandOptions opts;
  std::string config_path;
  std::uint64_t seed = 0, trials = 0;
  unsigned threads = 0;
  int bins = 0;
  double L_start = 0, L_end = 0, L_step = 0;
  std::string out_dir = ".";

  auto add_common = [&](CLI::App* cmd) {
    cmd->add_option("--config", config_path, "JSON run configuration");
    cmd->add_option("--seed", seed, "Master seed (64-bit)");
    cmd->add_option("--trials", trials, "Trials per run")->check(CLI::PositiveNumber);
    cmd->add_option("--threads", threads, "Worker threads (0 = all cores)");
    cmd->add_option("--out", out_dir, "Output directory");
    cmd->add_option("--bins", bins, "Histogram bins")->check(CLI::PositiveNumber);
    cmd->add_flag("--deterministic", opts.deterministic, "Force p = q = k = 1");
  };

  auto* validate = app.add_subcommand("validate", "Compare Monte Carlo means against the Markov chain");
  auto* sweep = app.add_subcommand("sweep", "Latency breakdown as a function of link length");
  auto* hist = app.add_subcommand("hist", "Per-trial counts and total-operation histogram");
  for (auto* cmd : {validate, sweep, hist}) add_common(cmd);
  sweep->add_option("--L-start", L_start, "First link length (km)");
  sweep->add_option("--L-end", L_end, "Last link length (km)");
  sweep->add_option("--L-step", L_step, "Link length step (km)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int rc = app.exit(e);
    return rc == 0 ? 0 : med::kExitConfigError;
  }

  auto* cmd = app.get_subcommands().front();
  if (!config_path.empty()) opts.config_path = config_path;
  if (cmd->count("--seed")) opts.seed = seed;
  if (cmd->count("--trials")) opts.trials = trials;
  if (cmd->count("--threads")) opts.threads = threads;
  if (cmd->count("--bins")) opts.bins = bins;
  if (cmd == sweep) {
    if (sweep->count("--L-start")) opts.L_start_km = L_start;
    if (sweep->count("--L-end")) opts.L_end_km = L_end;
    if (sweep->count("--L-step")) opts.L_step_km = L_step;
  }
  opts.out_dir = out_dir;

  if (cmd == validate) return med::cmd_validate(opts);
  if (cmd == sweep) return med::cmd_sweep(opts);
  return med::cmd_hist(opts);
}
