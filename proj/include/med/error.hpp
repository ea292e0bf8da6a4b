#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace med {

// Rejected topology or run configuration (bad grid, bad user set, bad plan).
class ConfigError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Probability or device constant outside its domain.
class ParameterError : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Caller broke a precondition of a state-machine step.
class ContractViolation : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

// A single trial attempted more operations than the configured cap.
class OpCapExceeded : public std::runtime_error {
 public:
  OpCapExceeded(std::uint64_t trial, std::uint64_t cap)
      : std::runtime_error("trial " + std::to_string(trial) +
                           " exceeded the operation cap of " +
                           std::to_string(cap)),
        trial_(trial),
        cap_(cap) {}

  std::uint64_t trial() const noexcept { return trial_; }
  std::uint64_t cap() const noexcept { return cap_; }

 private:
  std::uint64_t trial_;
  std::uint64_t cap_;
};

}  // namespace med
