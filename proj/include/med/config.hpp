#pragma once

#include <cmath>
#include <filesystem>
#include <fstream>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <json.hpp>

#include "med/error.hpp"
#include "med/montecarlo.hpp"

namespace med {

struct LengthRange {
  double start_km = 1.0;
  double end_km = 29.0;
  double step_km = 1.0;
};

// A run configuration file: the simulation setup plus the link lengths a
// sweep should visit. Every field is optional.
struct RunConfig {
  SimConfig sim;
  std::optional<std::vector<double>> lengths_km;  // explicit list wins over range
  LengthRange range;
};

inline std::vector<double> expand_range(const LengthRange& r) {
  if (!(r.step_km > 0.0)) throw ConfigError("L step must be positive");
  if (!(r.start_km > 0.0)) throw ConfigError("L start must be positive");
  if (r.end_km < r.start_km) return {};
  const auto n = static_cast<std::size_t>(std::floor((r.end_km - r.start_km) / r.step_km + 1e-9)) + 1;
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) out[i] = r.start_km + static_cast<double>(i) * r.step_km;
  return out;
}

inline std::vector<double> sweep_lengths(const RunConfig& cfg) {
  return cfg.lengths_km ? *cfg.lengths_km : expand_range(cfg.range);
}

namespace detail {

using nlohmann::json;

inline void reject_unknown(const json& obj, std::initializer_list<const char*> allowed,
                           const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + " must be a JSON object");
  std::set<std::string> ok(allowed.begin(), allowed.end());
  for (const auto& [key, _] : obj.items())
    if (!ok.count(key)) throw ConfigError("unknown key '" + key + "' in " + where);
}

template <class T>
void read_if(const json& obj, const char* key, T& dst) {
  if (auto it = obj.find(key); it != obj.end() && !it->is_null()) dst = it->get<T>();
}

// Seconds, or the string "inf" / null for an unbounded coherence time.
inline double read_seconds_or_inf(const json& v) {
  if (v.is_null()) return kInfiniteCoherence;
  if (v.is_string()) {
    if (v.get<std::string>() == "inf") return kInfiniteCoherence;
    throw ConfigError("t_coherence_s must be a number, null or \"inf\"");
  }
  return v.get<double>();
}

}  // namespace detail

inline RunConfig parse_config(const nlohmann::json& root) {
  using detail::read_if;
  RunConfig cfg;
  auto& sim = cfg.sim;
  try {
    if (root.is_null()) return cfg;
    detail::reject_unknown(root,
                           {"grid", "users", "edge_length_km", "protocol", "device", "trials",
                            "seed", "op_cap", "threads", "bins", "sweep"},
                           "config");
    if (auto it = root.find("grid"); it != root.end()) {
      detail::reject_unknown(*it, {"rows", "cols"}, "grid");
      read_if(*it, "rows", sim.rows);
      read_if(*it, "cols", sim.cols);
    }
    read_if(root, "users", sim.users);
    read_if(root, "edge_length_km", sim.edge_length_km);
    if (auto it = root.find("protocol"); it != root.end()) {
      detail::reject_unknown(*it, {"p", "q", "k"}, "protocol");
      if (auto p = it->find("p"); p != it->end() && !p->is_null()) sim.p_override = p->get<double>();
      read_if(*it, "q", sim.q);
      read_if(*it, "k", sim.k);
    }
    if (auto it = root.find("device"); it != root.end()) {
      detail::reject_unknown(
          *it, {"tau_e_s", "tau_s_s", "tau_f_s", "c_fibre_km_per_s", "t_coherence_s"}, "device");
      read_if(*it, "tau_e_s", sim.device.tau_e);
      read_if(*it, "tau_s_s", sim.device.tau_s);
      read_if(*it, "tau_f_s", sim.device.tau_f);
      read_if(*it, "c_fibre_km_per_s", sim.device.c_fibre);
      if (auto tc = it->find("t_coherence_s"); tc != it->end())
        sim.device.t_coherence = detail::read_seconds_or_inf(*tc);
    }
    read_if(root, "trials", sim.trials);
    read_if(root, "seed", sim.master_seed);
    read_if(root, "op_cap", sim.op_cap);
    read_if(root, "threads", sim.threads);
    read_if(root, "bins", sim.bins);
    if (auto it = root.find("sweep"); it != root.end()) {
      detail::reject_unknown(*it, {"L_values_km", "L_start_km", "L_end_km", "L_step_km"}, "sweep");
      if (auto v = it->find("L_values_km"); v != it->end())
        cfg.lengths_km = v->get<std::vector<double>>();
      read_if(*it, "L_start_km", cfg.range.start_km);
      read_if(*it, "L_end_km", cfg.range.end_km);
      read_if(*it, "L_step_km", cfg.range.step_km);
    }
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }
  return cfg;
}

inline RunConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  try {
    return parse_config(nlohmann::json::parse(in));
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("config " + path.string() + " is not valid JSON: " + e.what());
  }
}

// Fully resolved configuration, written into run manifests.
inline nlohmann::json to_json(const SimConfig& sim) {
  nlohmann::json j;
  j["grid"] = {{"rows", sim.rows}, {"cols", sim.cols}};
  j["users"] = sim.resolved_users();
  j["edge_length_km"] = sim.edge_length_km;
  j["protocol"] = {{"p", sim.p_override ? nlohmann::json(*sim.p_override) : nlohmann::json()},
                   {"q", sim.q},
                   {"k", sim.k}};
  j["device"] = {{"tau_e_s", sim.device.tau_e},
                 {"tau_s_s", sim.device.tau_s},
                 {"tau_f_s", sim.device.tau_f},
                 {"c_fibre_km_per_s", sim.device.c_fibre},
                 {"t_coherence_s", std::isinf(sim.device.t_coherence)
                                       ? nlohmann::json("inf")
                                       : nlohmann::json(sim.device.t_coherence)}};
  j["trials"] = sim.trials;
  j["seed"] = sim.master_seed;
  j["op_cap"] = sim.op_cap;
  j["threads"] = sim.threads;
  j["bins"] = sim.bins;
  return j;
}

}  // namespace med
