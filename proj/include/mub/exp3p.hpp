#pragma once

#include <functional>
#include <vector>

#include "mub/rng.hpp"

namespace mub {

// Exp3.P over M arms with n decision epochs:
//   phi   = sqrt(ln M / (M n))          exploration bonus
//   eta   = 0.95 sqrt(ln M / (M n))     learning rate
//   gamma = 1.05 sqrt(M ln M / n)       uniform mixing, clamped to <= 1
//
// update(arm, g) with g in [0,1] adds (g 1{arm=i} + phi)/p(i) to every
// cumulative gain and recomputes
//   p(i) = (1-gamma) softmax(eta G)(i) + gamma/M
// with the max subtracted before exponentiation.
class Exp3P {
 public:
  Exp3P(int arms, long epochs);

  int arms() const { return arms_; }
  double phi() const { return phi_; }
  double eta() const { return eta_; }
  double gamma() const { return gamma_; }
  bool gamma_clamped() const { return gamma_clamped_; }
  const std::vector<double>& probabilities() const { return p_; }
  const std::vector<double>& gains() const { return gains_; }

  int sample(Rng& rng) const { return rng.sample_discrete(p_); }

  // throws ContractViolation unless 0 <= reward <= 1 and arm is valid
  void update(int arm, double reward);

  // test hook: overwrite cumulative gains and renormalize
  void set_gains(std::vector<double> gains);

 private:
  void recompute();

  int arms_;
  double phi_, eta_, gamma_;
  bool gamma_clamped_ = false;
  std::vector<double> p_, gains_;
};

// Minimum epoch count for which gamma stays below 1 without clamping,
// ceil(1.1025 M ln M).
long exp3p_min_epochs(int arms);

struct SingleUserTrace {
  std::vector<int> arm;        // chosen arm per decision epoch
  std::vector<double> g;       // normalized reward fed to the update
  double total_reward = 0.0;   // sum of raw per-round rewards
};

// Single-user driver of the modified algorithm: at decision time t_j an arm is
// sampled and held until t_{j+1}; the update uses the average reward over the
// held range. times must be strictly increasing and end with the horizon
// sentinel t_n < horizon. reward(t, arm) supplies the per-round payoff.
SingleUserTrace run_modified_exp3p(int arms, const std::vector<long>& times, long horizon,
                                   const std::function<double(long, int)>& reward,
                                   Rng& rng);

}  // namespace mub
