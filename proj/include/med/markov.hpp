#pragma once

#include <span>
#include <string>

#include "med/error.hpp"
#include "med/protocol.hpp"

namespace med {

struct RouteExpectation {
  double n_e = 0.0;
  double n_s = 0.0;
};

struct ExpectedOps {
  double e_ne = 0.0;
  double e_ns = 0.0;
  double e_nf = 0.0;
};

// Expected generation attempts and swaps to build one pair over `num_segments`
// links under sequential swapping with full-prefix reset.
//
// States i = 0..m count the covered prefix; m is absorbing. With c the
// per-visit cost (1/p attempts for generation, 1 swap for i >= 1):
//   N(m) = 0
//   N(i) = c + q N(i+1) + (1-q) N(0),   1 <= i < m
//   N(0) = c0 + N(1)
// Writing N(i) = a_i + b_i N(0) and sweeping i = m-1..1 leaves one scalar
// equation for N(0).
inline RouteExpectation expected_route_ops(int num_segments, double p, double q) {
  if (num_segments < 1) throw ConfigError("route must have at least one segment");
  if (!(p > 0.0 && p <= 1.0)) throw ParameterError("p must lie in (0, 1]");
  if (!(q > 0.0 && q <= 1.0)) throw ParameterError("q must lie in (0, 1]");

  auto solve = [&](double cost_at_zero, double cost_per_swap_state) {
    double a = 0.0;
    double b = 0.0;
    for (int i = num_segments - 1; i >= 1; --i) {
      a = cost_per_swap_state + q * a;
      b = q * b + (1.0 - q);
    }
    // N(0) = c0 + a_1 + b_1 N(0); 1 - b_1 = q^(m-1) > 0.
    return (cost_at_zero + a) / (1.0 - b);
  };

  return {solve(1.0 / p, 1.0 / p), solve(0.0, 1.0)};
}

// Every fusion round costs an independent full set of route builds and the
// number of rounds is geometric with mean 1/k.
inline ExpectedOps expected_protocol_ops(std::span<const int> route_segment_counts,
                                         const ProtocolParams& params) {
  if (route_segment_counts.empty()) throw ConfigError("no routes given");
  params.validate();
  ExpectedOps out;
  for (int m : route_segment_counts) {
    const auto r = expected_route_ops(m, params.p, params.q);
    out.e_ne += r.n_e;
    out.e_ns += r.n_s;
  }
  out.e_ne /= params.k;
  out.e_ns /= params.k;
  out.e_nf = 1.0 / params.k;
  return out;
}

}  // namespace med
