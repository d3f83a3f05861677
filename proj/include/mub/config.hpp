#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "mub/engine.hpp"

namespace mub {

// Experiment files are INI-style:
//
//   [environment]
//   kind = stochastic          # stochastic | adversarial
//   channels = 6
//   ...
//   means = 1 0.49 0.1 0.005 ; 0.98 0.42 0.13 0.002 ; ...
//
//   [algorithm]
//   t0 = 1000
//   ...
//
//   [run]
//   horizon = 60000
//   trials = 100
//   seed = 1
//
//   [schedule]                 # optional, switches to the dynamic scenario
//   initial = 4
//   growth_zeta = 0.3
//   growth_coeff = 0.5
//   events = join 100 4 ; leave 200 2
//
// '#' starts a comment. Unknown keys are errors, anchored to their line.

struct RunDefaults {
  long trials = 1;
  uint64_t seed = 1;
  int parallelism = 1;
  bool emit_trace = false;
};

struct LoadedExperiment {
  Experiment experiment;
  RunDefaults run;
  std::string config_text;  // canonical bytes the hash covers
};

LoadedExperiment load_experiment_file(const std::string& path);
LoadedExperiment parse_experiment(const std::string& text, const std::string& origin);

// Scripted adversary tensor from CSV rows t,k,m,reward (header optional).
AdversaryModel load_scripted_csv(const std::string& path, long horizon, int users,
                                 int channels);

// Report-only validation: hard errors, warnings, and the separability report.
struct ValidationReport {
  bool config_ok = false;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool has_separability = false;
  SeparabilityReport separability;
  std::string text() const;
};
ValidationReport validate_experiment(const LoadedExperiment& loaded);

// Reproducibility manifest (JSON): config path/hash/bytes, seed, trials,
// parallelism, artifact names, version.
std::string manifest_json(const LoadedExperiment& loaded, const std::string& config_path,
                          long trials, uint64_t seed, int parallelism,
                          const std::vector<std::string>& artifacts);

// Re-create the run arguments from a manifest produced by manifest_json.
struct ManifestRun {
  std::string config_text;
  long trials = 1;
  uint64_t seed = 1;
  int parallelism = 1;
};
ManifestRun load_manifest(const std::string& path);

uint64_t fnv1a64(const std::string& bytes);

// Minimal static line chart of an aggregate regret curve.
std::string regret_svg(const Batch& batch, const std::string& title);

}  // namespace mub
