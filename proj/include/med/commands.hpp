#pragma once

#include <array>
#include <charconv>
#include <chrono>
#include <cstdint>
#include <ctime>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <system_error>
#include <vector>

#include <json.hpp>

#include "med/config.hpp"
#include "med/error.hpp"
#include "med/montecarlo.hpp"

#define MED_VERSION "1.0.0"

namespace med {

enum ExitCode : int {
  kExitOk = 0,
  kExitValidationFailed = 1,
  kExitConfigError = 2,
  kExitRuntimeAbort = 3,
};

// Command-line overrides applied on top of the config file.
struct CommandOptions {
  std::optional<std::filesystem::path> config_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::uint64_t> trials;
  std::optional<unsigned> threads;
  std::optional<int> bins;
  std::optional<double> L_start_km;
  std::optional<double> L_end_km;
  std::optional<double> L_step_km;
  bool deterministic = false;  // p = q = k = 1
  std::filesystem::path out_dir = ".";
};

// Shortest round-trip decimal form; never depends on the C locale.
inline std::string format_double(double v) {
  std::array<char, 64> buf{};
  const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
  return std::string(buf.data(), res.ptr);
}

inline RunConfig resolve_config(const CommandOptions& opts) {
  RunConfig cfg = opts.config_path ? load_config(*opts.config_path) : RunConfig{};
  auto& sim = cfg.sim;
  if (opts.seed) sim.master_seed = *opts.seed;
  if (opts.trials) sim.trials = *opts.trials;
  if (opts.threads) sim.threads = *opts.threads;
  if (opts.bins) sim.bins = *opts.bins;
  if (opts.deterministic) {
    sim.p_override = 1.0;
    sim.q = 1.0;
    sim.k = 1.0;
  }
  if (opts.L_start_km || opts.L_end_km || opts.L_step_km) {
    cfg.lengths_km.reset();
    if (opts.L_start_km) cfg.range.start_km = *opts.L_start_km;
    if (opts.L_end_km) cfg.range.end_km = *opts.L_end_km;
    if (opts.L_step_km) cfg.range.step_km = *opts.L_step_km;
  }
  sim.validate();
  return cfg;
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write " + path.string());
  return out;
}

inline nlohmann::json stat_json(const Stat& s) {
  return {{"mean", s.mean}, {"std", s.stddev}, {"stderr", s.std_error}};
}

inline std::string utc_timestamp() {
  const auto now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
  std::tm tm{};
  gmtime_r(&now, &tm);
  std::array<char, 32> buf{};
  std::strftime(buf.data(), buf.size(), "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf.data();
}

inline void write_manifest(const std::filesystem::path& out_dir, const std::string& command,
                           const RunConfig& cfg, const std::vector<std::filesystem::path>& outputs) {
  nlohmann::json m;
  m["tool"] = "medsim";
  m["version"] = MED_VERSION;
  m["command"] = command;
  m["timestamp"] = utc_timestamp();
  m["master_seed"] = cfg.sim.master_seed;
  m["config"] = to_json(cfg.sim);
  if (command == "sweep") m["config"]["L_values_km"] = sweep_lengths(cfg);
  auto& files = m["outputs"] = nlohmann::json::array();
  for (const auto& p : outputs) files.push_back(p.filename().string());
  open_output(out_dir / "manifest.json") << m.dump(2) << '\n';
}

}  // namespace detail

inline nlohmann::json validation_json(const ValidationReport& rep, const SimConfig& sim,
                                      const NetworkPlan& net) {
  const auto& s = rep.summary;
  const auto& a = rep.analytic;
  const auto params = sim.protocol_params();
  nlohmann::json j;
  j["trials"] = s.trials;
  j["seed"] = sim.master_seed;
  j["edge_length_km"] = sim.edge_length_km;
  j["params"] = {{"p", params.p}, {"q", params.q}, {"k", params.k}};
  j["central_node"] = net.routes.central_node;
  j["segment_counts"] = net.routes.segment_counts();
  j["v_max"] = net.routes.v_max;
  j["mc"] = {{"n_e", detail::stat_json(s.n_e)},
             {"n_s", detail::stat_json(s.n_s)},
             {"n_f", detail::stat_json(s.n_f)},
             {"total_ops", detail::stat_json(s.total_ops)}};
  j["analytic"] = {{"n_e", a.e_ne}, {"n_s", a.e_ns}, {"n_f", a.e_nf},
                   {"total_ops", a.e_ne + a.e_ns + a.e_nf}};
  j["z"] = {{"n_e", rep.z_ne}, {"n_s", rep.z_ns}, {"n_f", rep.z_nf}};
  j["z_threshold"] = kZThreshold;
  j["pass"] = rep.pass;
  return j;
}

inline void write_trials_csv(std::ostream& out, const std::vector<TrialResult>& results) {
  out << "trial,n_e,n_s,n_f,tau_classical_s,tau_quantum_s,total_s\n";
  for (const auto& r : results) {
    out << r.trial << ',' << r.counts.n_e << ',' << r.counts.n_s << ',' << r.counts.n_f << ','
        << format_double(r.latency.tau_classical) << ',' << format_double(r.latency.tau_quantum)
        << ',' << format_double(r.latency.total) << '\n';
  }
}

inline void write_hist_csv(std::ostream& out, const Histogram& h) {
  out << "bin_lo,bin_hi,count\n";
  for (std::size_t i = 0; i < h.counts.size(); ++i)
    out << format_double(h.edges[i]) << ',' << format_double(h.edges[i + 1]) << ',' << h.counts[i]
        << '\n';
}

inline void write_sweep_csv(std::ostream& out, const std::vector<SweepPoint>& points) {
  out << "L_km,p,mean_n_e,mean_n_s,mean_n_f,mean_tau_classical_s,mean_tau_quantum_s,"
         "mean_total_s,classical_share,feasible_frac\n";
  for (const auto& pt : points) {
    const auto& s = pt.summary;
    out << format_double(pt.edge_length_km) << ',' << format_double(pt.p) << ','
        << format_double(s.n_e.mean) << ',' << format_double(s.n_s.mean) << ','
        << format_double(s.n_f.mean) << ',' << format_double(s.tau_classical.mean) << ','
        << format_double(s.tau_quantum.mean) << ',' << format_double(s.total_latency.mean) << ','
        << format_double(s.classical_share) << ',' << format_double(pt.feasible_frac) << '\n';
  }
}

// Wraps a command body with the exit-code contract: configuration problems
// map to 2, operation-cap aborts and I/O failures to 3.
template <class Body>
int run_command(const char* name, Body&& body, std::ostream& err = std::cerr) {
  try {
    return body();
  } catch (const OpCapExceeded& e) {
    err << name << ": aborted: " << e.what() << '\n';
    return kExitRuntimeAbort;
  } catch (const ConfigError& e) {
    err << name << ": configuration error: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const ParameterError& e) {
    err << name << ": invalid parameter: " << e.what() << '\n';
    return kExitConfigError;
  } catch (const std::exception& e) {
    err << name << ": " << e.what() << '\n';
    return kExitRuntimeAbort;
  }
}

namespace detail {

inline void ensure_dir(const std::filesystem::path& dir) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw std::runtime_error("cannot create output directory " + dir.string());
}

}  // namespace detail

inline int cmd_validate(const CommandOptions& opts, std::ostream& log = std::cout) {
  return run_command("validate", [&] {
    const auto cfg = resolve_config(opts);
    detail::ensure_dir(opts.out_dir);
    const auto net = plan_network(cfg.sim);
    const auto rep = validate(cfg.sim);
    const auto path = opts.out_dir / "validate.json";
    detail::open_output(path) << validation_json(rep, cfg.sim, net).dump(2) << '\n';
    detail::write_manifest(opts.out_dir, "validate", cfg, {path});
    log << "validate: n_e z=" << format_double(rep.z_ne) << " n_s z=" << format_double(rep.z_ns)
        << " n_f z=" << format_double(rep.z_nf) << (rep.pass ? "  PASS" : "  FAIL") << '\n';
    return rep.pass ? kExitOk : kExitValidationFailed;
  });
}

inline int cmd_hist(const CommandOptions& opts, std::ostream& log = std::cout) {
  return run_command("hist", [&] {
    const auto cfg = resolve_config(opts);
    detail::ensure_dir(opts.out_dir);
    const auto net = plan_network(cfg.sim);
    const auto results = run_trials(cfg.sim);
    const auto summary = summarize(results, cfg.sim.bins);
    const auto rep = compare_to_oracle(summary, analytic_for(cfg.sim));

    const auto trials_path = opts.out_dir / "trials.csv";
    const auto hist_path = opts.out_dir / "hist.csv";
    const auto json_path = opts.out_dir / "validate.json";
    {
      auto out = detail::open_output(trials_path);
      write_trials_csv(out, results);
    }
    {
      auto out = detail::open_output(hist_path);
      write_hist_csv(out, summary.ops_histogram);
    }
    detail::open_output(json_path) << validation_json(rep, cfg.sim, net).dump(2) << '\n';
    detail::write_manifest(opts.out_dir, "hist", cfg, {trials_path, hist_path, json_path});
    log << "hist: " << results.size() << " trials, mean total ops "
        << format_double(summary.total_ops.mean) << '\n';
    return kExitOk;
  });
}

inline int cmd_sweep(const CommandOptions& opts, std::ostream& log = std::cout) {
  return run_command("sweep", [&] {
    const auto cfg = resolve_config(opts);
    const auto lengths = sweep_lengths(cfg);
    if (lengths.empty()) throw ConfigError("sweep has no link lengths");
    detail::ensure_dir(opts.out_dir);
    const auto points = sweep(cfg.sim, lengths);
    const auto path = opts.out_dir / "sweep.csv";
    {
      auto out = detail::open_output(path);
      write_sweep_csv(out, points);
    }
    detail::write_manifest(opts.out_dir, "sweep", cfg, {path});
    log << "sweep: " << points.size() << " points written to " << path.string() << '\n';
    return kExitOk;
  });
}

}  // namespace med
