#pragma once

#include <cmath>
#include <limits>

#include "med/error.hpp"
#include "med/protocol.hpp"
#include "med/topology.hpp"

namespace med {

inline constexpr double kInfiniteCoherence = std::numeric_limits<double>::infinity();

// Timing constants, all in seconds except c_fibre (km/s).
struct DeviceParams {
  double tau_e = 123e-6;
  double tau_s = 2157e-6;
  double tau_f = 300e-6;
  double c_fibre = 2.0e5;
  double t_coherence = 4.0;

  void validate() const {
    if (!(tau_e > 0.0) || !(tau_s > 0.0) || !(tau_f > 0.0))
      throw ParameterError("operation times must be positive");
    if (!(c_fibre > 0.0) || std::isinf(c_fibre))
      throw ParameterError("fibre light speed must be positive and finite");
    if (!(t_coherence > 0.0)) throw ParameterError("coherence time must be positive");
  }
};

struct LatencyBreakdown {
  double tau_classical = 0.0;
  double tau_quantum = 0.0;
  double total = 0.0;
  double classical_share = 0.0;
};

// Heralded Bell-pair success probability over an L km link: 1.8% at the
// source, 0.2 dB/km fibre attenuation.
inline double success_prob(double edge_length_km) {
  if (!(edge_length_km >= 0.0)) throw ParameterError("link length must be non-negative");
  return 0.018 * std::pow(10.0, -0.2 * edge_length_km / 10.0);
}

// Worst-case control-plane round trips. Every generation attempt waits on a
// round trip to the farthest user (V-1 hops), every swap on one to the
// farthest repeater (V-2 hops). Fusion is local to the central node.
inline double classical_latency(const OpCounts& counts, int v_max,
                                double edge_length_km, double c_fibre) {
  if (v_max < 2) throw ConfigError("route plan must span at least two vertices");
  const double hop = edge_length_km / c_fibre;
  return static_cast<double>(counts.n_e) * 2.0 * (v_max - 1) * hop +
         static_cast<double>(counts.n_s) * 2.0 * (v_max - 2) * hop;
}

inline double quantum_latency(const OpCounts& counts, double edge_length_km,
                              const DeviceParams& device) {
  return static_cast<double>(counts.n_e) * (device.tau_e + edge_length_km / device.c_fibre) +
         static_cast<double>(counts.n_s) * device.tau_s +
         static_cast<double>(counts.n_f) * device.tau_f;
}

inline LatencyBreakdown make_breakdown(double tau_classical, double tau_quantum) {
  LatencyBreakdown b;
  b.tau_classical = tau_classical;
  b.tau_quantum = tau_quantum;
  b.total = tau_classical + tau_quantum;
  b.classical_share = b.total > 0.0 ? tau_classical / b.total : 0.0;
  return b;
}

inline LatencyBreakdown breakdown(const OpCounts& counts, int v_max,
                                  double edge_length_km, const DeviceParams& device) {
  return make_breakdown(classical_latency(counts, v_max, edge_length_km, device.c_fibre),
                        quantum_latency(counts, edge_length_km, device));
}

// The plan does not carry L; take it from the topology the plan was built on.
inline LatencyBreakdown breakdown(const OpCounts& counts, const RoutePlan& plan,
                                  const GridTopology& topo, const DeviceParams& device) {
  return breakdown(counts, plan.v_max, topo.edge_length_km(), device);
}

inline bool feasibility(const LatencyBreakdown& b, double t_coherence) {
  if (std::isinf(t_coherence)) return true;
  return b.total <= t_coherence;
}

}  // namespace med
