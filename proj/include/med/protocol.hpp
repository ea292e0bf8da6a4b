#pragma once

#include <cstdint>
#include <span>
#include <string>

#include "med/error.hpp"
#include "med/rng.hpp"

namespace med {

// Success probabilities of Bell-pair generation, swapping and fusion.
struct ProtocolParams {
  double p = 1.0;
  double q = 1.0;
  double k = 1.0;

  void validate() const {
    auto check = [](double v, const char* name) {
      if (!(v > 0.0 && v <= 1.0))
        throw ParameterError(std::string(name) + " must lie in (0, 1], got " +
                             std::to_string(v));
    };
    check(p, "p");
    check(q, "q");
    check(k, "k");
  }
};

struct OpCounts {
  std::uint64_t n_e = 0;
  std::uint64_t n_s = 0;
  std::uint64_t n_f = 0;

  std::uint64_t total() const noexcept { return n_e + n_s + n_f; }

  OpCounts& operator+=(const OpCounts& o) noexcept {
    n_e += o.n_e;
    n_s += o.n_s;
    n_f += o.n_f;
    return *this;
  }
  friend OpCounts operator+(OpCounts a, const OpCounts& b) noexcept { return a += b; }
  friend bool operator==(const OpCounts&, const OpCounts&) = default;
};

// Number of consecutive segments, counted from the central node, that are
// currently spanned by a single entangled pair.
struct RouteState {
  int prefix_len = 0;
  friend bool operator==(const RouteState&, const RouteState&) = default;
};

struct StepResult {
  RouteState state;
  OpCounts delta;
};

inline constexpr std::uint64_t kDefaultOpCap = 1'000'000'000ULL;

// One step of sequential swapping outward from the central node: generate
// the next elementary pair, then (unless this is the first segment) swap it
// onto the prefix. A failed swap destroys the whole prefix.
template <class Engine>
StepResult advance_route(RouteState state, int num_segments,
                         const ProtocolParams& params, Engine& rng) {
  if (state.prefix_len < 0 || state.prefix_len >= num_segments)
    throw ContractViolation("advance_route called on a completed or invalid route state");

  StepResult out{state, {}};
  out.delta.n_e = attempts_until_success(rng, params.p);
  if (state.prefix_len == 0) {
    out.state.prefix_len = 1;
    return out;
  }
  out.delta.n_s = 1;
  out.state.prefix_len = bernoulli(rng, params.q) ? state.prefix_len + 1 : 0;
  return out;
}

// Counts for establishing one central-node-to-user pair over `num_segments`
// links. `op_budget` bounds n_e + n_s; exceeding it throws OpCapExceeded.
template <class Engine>
OpCounts simulate_route(int num_segments, const ProtocolParams& params,
                        Engine& rng, std::uint64_t op_budget = kDefaultOpCap) {
  if (num_segments < 1) throw ConfigError("route must have at least one segment");
  OpCounts counts;
  RouteState state;
  while (state.prefix_len < num_segments) {
    const auto step = advance_route(state, num_segments, params, rng);
    counts += step.delta;
    state = step.state;
    if (counts.total() > op_budget) throw OpCapExceeded(0, op_budget);
  }
  return counts;
}

// Full run: all routes to completion, then one fusion attempt; a failed
// fusion sends every route back to an empty prefix.
template <class Engine>
OpCounts run_protocol(std::span<const int> route_segment_counts,
                      const ProtocolParams& params, Engine& rng,
                      std::uint64_t op_cap = kDefaultOpCap) {
  if (route_segment_counts.empty()) throw ConfigError("no routes to run");
  for (int m : route_segment_counts)
    if (m < 1) throw ConfigError("route must have at least one segment");
  params.validate();

  OpCounts total;
  for (;;) {
    for (int m : route_segment_counts) {
      if (total.total() >= op_cap) throw OpCapExceeded(0, op_cap);
      total += simulate_route(m, params, rng, op_cap - total.total());
    }
    total.n_f += 1;
    if (total.total() > op_cap) throw OpCapExceeded(0, op_cap);
    if (bernoulli(rng, params.k)) return total;
  }
}

}  // namespace med
