#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <exception>
#include <limits>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "med/error.hpp"
#include "med/latency.hpp"
#include "med/markov.hpp"
#include "med/protocol.hpp"
#include "med/rng.hpp"
#include "med/topology.hpp"

namespace med {

inline constexpr std::uint64_t kDefaultTrials = 10'000;
inline constexpr std::uint64_t kDefaultSeed = 20240601;
inline constexpr int kDefaultBins = 50;
inline constexpr double kZThreshold = 4.0;

struct SimConfig {
  int rows = 8;
  int cols = 8;
  std::vector<NodeId> users;  // empty: the four grid corners
  double edge_length_km = 2.0;
  std::optional<double> p_override;
  double q = 0.7;
  double k = 0.5;
  DeviceParams device;
  std::uint64_t trials = kDefaultTrials;
  std::uint64_t master_seed = kDefaultSeed;
  std::uint64_t op_cap = kDefaultOpCap;
  unsigned threads = 0;  // 0: hardware concurrency
  int bins = kDefaultBins;

  std::vector<NodeId> resolved_users() const {
    if (!users.empty()) return users;
    return {0, cols - 1, (rows - 1) * cols, rows * cols - 1};
  }

  ProtocolParams protocol_params() const {
    return {p_override.value_or(success_prob(edge_length_km)), q, k};
  }

  void validate() const {
    if (trials < 1) throw ConfigError("trials must be at least 1");
    if (bins < 1) throw ConfigError("bins must be at least 1");
    if (op_cap < 1) throw ConfigError("op cap must be at least 1");
    if (resolved_users().size() < 2) throw ConfigError("at least two users are required");
    (void)build_grid(rows, cols, edge_length_km);
    protocol_params().validate();
    device.validate();
  }
};

struct NetworkPlan {
  GridTopology topology;
  RoutePlan routes;
};

inline NetworkPlan plan_network(const SimConfig& config) {
  auto topo = build_grid(config.rows, config.cols, config.edge_length_km);
  const auto users = config.resolved_users();
  const NodeId cn = select_central_node(topo, users);
  auto routes = compute_routes(topo, cn, users);
  return {std::move(topo), std::move(routes)};
}

struct TrialResult {
  std::uint64_t trial = 0;
  OpCounts counts;
  LatencyBreakdown latency;
};

// Trial i always draws from substream (master_seed, i), so the output is
// identical for any thread count.
inline std::vector<TrialResult> run_trials(const SimConfig& config) {
  config.validate();
  const auto net = plan_network(config);
  const auto segments = net.routes.segment_counts();
  const auto params = config.protocol_params();

  std::vector<TrialResult> results(config.trials);
  auto run_one = [&](std::uint64_t i) {
    auto rng = make_trial_engine(config.master_seed, i);
    OpCounts counts;
    try {
      counts = run_protocol(segments, params, rng, config.op_cap);
    } catch (const OpCapExceeded&) {
      throw OpCapExceeded(i, config.op_cap);
    }
    results[i] = {i, counts, breakdown(counts, net.routes, net.topology, config.device)};
  };

  unsigned workers = config.threads != 0 ? config.threads
                                         : std::max(1u, std::thread::hardware_concurrency());
  workers = static_cast<unsigned>(std::min<std::uint64_t>(workers, config.trials));
  if (workers <= 1) {
    for (std::uint64_t i = 0; i < config.trials; ++i) run_one(i);
    return results;
  }

  std::vector<std::exception_ptr> errors(workers);
  std::vector<std::uint64_t> failed_at(workers, std::numeric_limits<std::uint64_t>::max());
  {
    std::vector<std::jthread> pool;
    pool.reserve(workers);
    for (unsigned w = 0; w < workers; ++w) {
      pool.emplace_back([&, w] {
        for (std::uint64_t i = w; i < config.trials; i += workers) {
          try {
            run_one(i);
          } catch (...) {
            errors[w] = std::current_exception();
            failed_at[w] = i;
            return;
          }
        }
      });
    }
  }
  // Report the lowest failing trial so the diagnostic is schedule-independent.
  const auto first = std::min_element(failed_at.begin(), failed_at.end()) - failed_at.begin();
  if (errors[static_cast<std::size_t>(first)]) std::rethrow_exception(errors[static_cast<std::size_t>(first)]);
  return results;
}

struct Stat {
  double mean = 0.0;
  double stddev = 0.0;    // sample standard deviation (n-1)
  double std_error = 0.0;  // std / sqrt(n)
};

struct Histogram {
  std::vector<double> edges;  // bins + 1 ascending edges
  std::vector<std::uint64_t> counts;
};

struct Summary {
  std::uint64_t trials = 0;
  Stat n_e, n_s, n_f, total_ops;
  Stat tau_classical, tau_quantum, total_latency;
  double classical_share = 0.0;  // share of the mean latencies
  double classical_share_stderr = 0.0;
  Histogram ops_histogram;
};

namespace detail {

template <class Fn>
Stat stat_of(const std::vector<TrialResult>& results, Fn&& value) {
  const auto n = static_cast<double>(results.size());
  double sum = 0.0;
  for (const auto& r : results) sum += value(r);
  Stat s;
  s.mean = sum / n;
  if (results.size() > 1) {
    double ss = 0.0;
    for (const auto& r : results) {
      const double d = value(r) - s.mean;
      ss += d * d;
    }
    s.stddev = std::sqrt(ss / (n - 1.0));
    s.std_error = s.stddev / std::sqrt(n);
  }
  return s;
}

}  // namespace detail

// Equal-width bins over [min, max] of n_e + n_s + n_f; the last bin is closed.
inline Histogram histogram_of_total_ops(const std::vector<TrialResult>& results, int bins) {
  if (results.empty()) throw std::invalid_argument("histogram of an empty result set");
  if (bins < 1) throw std::invalid_argument("bins must be at least 1");
  std::uint64_t lo = results.front().counts.total();
  std::uint64_t hi = lo;
  for (const auto& r : results) {
    lo = std::min(lo, r.counts.total());
    hi = std::max(hi, r.counts.total());
  }
  const double min = static_cast<double>(lo);
  const double range = static_cast<double>(hi - lo);
  const double width = range > 0.0 ? range / bins : 1.0 / bins;

  Histogram h;
  h.edges.resize(static_cast<std::size_t>(bins) + 1);
  for (int i = 0; i <= bins; ++i) h.edges[static_cast<std::size_t>(i)] = min + width * i;
  if (range > 0.0) h.edges.back() = static_cast<double>(hi);
  h.counts.assign(static_cast<std::size_t>(bins), 0);
  for (const auto& r : results) {
    const double x = static_cast<double>(r.counts.total()) - min;
    auto b = static_cast<long>(std::floor(x / width));
    b = std::clamp<long>(b, 0, bins - 1);
    ++h.counts[static_cast<std::size_t>(b)];
  }
  return h;
}

inline Summary summarize(const std::vector<TrialResult>& results, int bins = kDefaultBins) {
  if (results.empty()) throw std::invalid_argument("cannot summarize an empty result set");
  using detail::stat_of;
  Summary s;
  s.trials = results.size();
  s.n_e = stat_of(results, [](const TrialResult& r) { return double(r.counts.n_e); });
  s.n_s = stat_of(results, [](const TrialResult& r) { return double(r.counts.n_s); });
  s.n_f = stat_of(results, [](const TrialResult& r) { return double(r.counts.n_f); });
  s.total_ops = stat_of(results, [](const TrialResult& r) { return double(r.counts.total()); });
  s.tau_classical = stat_of(results, [](const TrialResult& r) { return r.latency.tau_classical; });
  s.tau_quantum = stat_of(results, [](const TrialResult& r) { return r.latency.tau_quantum; });
  s.total_latency = stat_of(results, [](const TrialResult& r) { return r.latency.total; });

  const double mean_total = s.tau_classical.mean + s.tau_quantum.mean;
  if (mean_total > 0.0) {
    const double share = s.tau_classical.mean / mean_total;
    s.classical_share = share;
    // Delta method: linearised residual of the ratio estimator per trial.
    const auto resid = stat_of(results, [&](const TrialResult& r) {
      return (r.latency.tau_classical - share * r.latency.total) / mean_total;
    });
    s.classical_share_stderr = resid.std_error;
  }
  s.ops_histogram = histogram_of_total_ops(results, bins);
  return s;
}

struct ValidationReport {
  Summary summary;
  ExpectedOps analytic;
  double z_ne = 0.0;
  double z_ns = 0.0;
  double z_nf = 0.0;
  bool pass = false;
};

namespace detail {

inline double z_score(const Stat& mc, double analytic) {
  const double diff = mc.mean - analytic;
  if (mc.std_error > 0.0) return diff / mc.std_error;
  if (diff == 0.0) return 0.0;
  return diff > 0.0 ? std::numeric_limits<double>::infinity()
                    : -std::numeric_limits<double>::infinity();
}

}  // namespace detail

inline ValidationReport compare_to_oracle(const Summary& summary, const ExpectedOps& analytic,
                                          double z_threshold = kZThreshold) {
  ValidationReport rep;
  rep.summary = summary;
  rep.analytic = analytic;
  rep.z_ne = detail::z_score(summary.n_e, analytic.e_ne);
  rep.z_ns = detail::z_score(summary.n_s, analytic.e_ns);
  rep.z_nf = detail::z_score(summary.n_f, analytic.e_nf);
  rep.pass = std::abs(rep.z_ne) < z_threshold && std::abs(rep.z_ns) < z_threshold &&
             std::abs(rep.z_nf) < z_threshold;
  return rep;
}

inline ExpectedOps analytic_for(const SimConfig& config) {
  const auto net = plan_network(config);
  return expected_protocol_ops(net.routes.segment_counts(), config.protocol_params());
}

inline ValidationReport validate(const SimConfig& config) {
  const auto results = run_trials(config);
  return compare_to_oracle(summarize(results, config.bins), analytic_for(config));
}

struct SweepPoint {
  double edge_length_km = 0.0;
  double p = 0.0;
  Summary summary;
  double feasible_frac = 0.0;  // trials with total latency within coherence time
};

// One Monte Carlo run per link length. Every point reuses the master seed.
inline std::vector<SweepPoint> sweep(const SimConfig& config, const std::vector<double>& lengths_km) {
  if (lengths_km.empty()) throw ConfigError("link length list is empty");
  for (std::size_t i = 0; i < lengths_km.size(); ++i) {
    if (!(lengths_km[i] > 0.0)) throw ConfigError("link lengths must be positive");
    if (i > 0 && lengths_km[i] < lengths_km[i - 1])
      throw ConfigError("link lengths must be sorted ascending");
  }

  std::vector<SweepPoint> out;
  out.reserve(lengths_km.size());
  for (double L : lengths_km) {
    SimConfig point = config;
    point.edge_length_km = L;
    const auto results = run_trials(point);
    SweepPoint sp;
    sp.edge_length_km = L;
    sp.p = point.protocol_params().p;
    sp.summary = summarize(results, point.bins);
    std::uint64_t ok = 0;
    for (const auto& r : results) ok += feasibility(r.latency, point.device.t_coherence) ? 1 : 0;
    sp.feasible_frac = static_cast<double>(ok) / static_cast<double>(results.size());
    out.push_back(std::move(sp));
  }
  return out;
}

}  // namespace med
