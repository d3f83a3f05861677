#pragma once

#include <string>
#include <vector>

#include "mub/rng.hpp"

namespace mub {

enum class DistKind { Uniform, TruncatedGaussian };

// Mean reward on channel m as a function of how many users sit on it.
// means is M x (beta+1), row m, column n-1 holds mu(m, n) for occupancy
// n = 1..beta+1. Any occupancy beyond beta+1 pays exactly zero.
//
// Per-draw noise has common variance `variance`; draws are clamped to [0,1].
// Clamping shifts the realized mean when a support leaves [0,1] —
// effective_mean() gives the exact post-clamp expectation, and validate()
// warns when the two differ.
struct RewardTable {
  int channels = 0;                // M
  int beta = 1;                    // largest occupancy with meaningful reward is beta+1
  std::vector<double> means;       // row-major M x (beta+1)
  double variance = 0.0;           // sigma^2
  DistKind dist = DistKind::Uniform;

  double mean_at(int channel, int occupancy) const {
    if (occupancy < 1 || occupancy > beta + 1) return 0.0;
    return means[static_cast<size_t>(channel) * (beta + 1) + occupancy - 1];
  }

  // exact expectation of the clamped draw for (channel, occupancy)
  double effective_mean(int channel, int occupancy) const;

  // one clamped draw
  double draw(int channel, int occupancy, Rng& rng) const;

  // half-width of the uniform support, sqrt(3 sigma^2)
  double uniform_halfwidth() const;

  // hard invariants (throws ConfigError): every mean in [0,1], rows strictly
  // decreasing in occupancy, sane dimensions
  void validate() const;

  // soft issues: noise support leaving [0,1] (biased means), near-equal rows
  std::vector<std::string> warnings() const;
};

struct SeparabilityReport {
  bool satisfied = false;
  int worst_channel = -1;
  int worst_r = 0, worst_s = 0;  // occupancy pair attaining the worst gap
  double worst_gap = 0.0;
  double threshold = 0.0;
  double c = 0.0;
  double epsilon2 = 0.0;
};

// Gap test for mean estimability: every pair of occupancies r != s <= beta on
// the same channel must differ by at least
//   4 M c exp((K-1)/(M-1)) sqrt(sigma^2 + eps2).
SeparabilityReport check_separability(const RewardTable& table, int users, double c,
                                      double epsilon2);

}  // namespace mub
