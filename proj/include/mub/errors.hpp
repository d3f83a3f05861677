#pragma once

#include <stdexcept>
#include <string>
#include <vector>

namespace mub {

// Bad experiment description (file, parameters, infeasible scenario). CLI exit 2.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Violated call contract at runtime (action out of range, reward outside [0,1],
// exhausted scripted tensor, ...). CLI exit 3.
class ContractViolation : public std::runtime_error {
 public:
  explicit ContractViolation(const std::string& what) : std::runtime_error(what) {}
};

// Estimation cannot be completed: some channels were never observed alone.
class EstimateIncomplete : public std::runtime_error {
 public:
  EstimateIncomplete(const std::string& what, std::vector<int> channels)
      : std::runtime_error(what), channels_(std::move(channels)) {}
  const std::vector<int>& channels() const { return channels_; }

 private:
  std::vector<int> channels_;
};

}  // namespace mub
