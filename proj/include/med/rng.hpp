#pragma once

#include <cmath>
#include <cstdint>
#include <random>

namespace med {

// SplitMix64 finalizer; a bijection on 64-bit words.
constexpr std::uint64_t splitmix64(std::uint64_t x) noexcept {
  x += 0x9E3779B97F4A7C15ULL;
  x = (x ^ (x >> 30)) * 0xBF58476D1CE4E5B9ULL;
  x = (x ^ (x >> 27)) * 0x94D049BB133111EBULL;
  return x ^ (x >> 31);
}

// Seed for the substream owned by one trial. Depends only on
// (master_seed, trial_index), so a trial draws the same numbers no matter
// which thread runs it or in which order.
constexpr std::uint64_t substream_seed(std::uint64_t master_seed,
                                       std::uint64_t trial_index) noexcept {
  return splitmix64(master_seed ^ splitmix64(trial_index ^ 0xD1B54A32D192ED03ULL));
}

using TrialEngine = std::mt19937_64;

inline TrialEngine make_trial_engine(std::uint64_t master_seed,
                                     std::uint64_t trial_index) {
  return TrialEngine{substream_seed(master_seed, trial_index)};
}

// Uniform double in [0, 1) from the top 53 bits of one 64-bit draw.
// Written out instead of std::uniform_real_distribution so the stream is
// identical across standard library implementations.
template <class Engine>
double uniform01(Engine& eng) {
  static_assert(Engine::min() == 0 && Engine::max() == ~std::uint64_t{0},
                "uniform01 expects a full-range 64-bit engine");
  return static_cast<double>(eng() >> 11) * 0x1.0p-53;
}

template <class Engine>
bool bernoulli(Engine& eng, double success_prob) {
  if (success_prob >= 1.0) return true;
  return uniform01(eng) < success_prob;
}

// Number of independent Bernoulli(success_prob) attempts up to and including
// the first success. Sampled by inversion, which has the same law as drawing
// the attempts one at a time.
template <class Engine>
std::uint64_t attempts_until_success(Engine& eng, double success_prob) {
  if (success_prob >= 1.0) return 1;
  const double u = 1.0 - uniform01(eng);  // (0, 1]
  const double k = std::floor(std::log(u) / std::log1p(-success_prob));
  return static_cast<std::uint64_t>(k) + 1;
}

}  // namespace med
