#pragma once

#include <string>
#include <vector>

#include "mub/reward_table.hpp"

namespace mub {

// Per-round instantaneous and cumulative system regret.
struct RegretSeries {
  std::vector<double> inst;
  std::vector<double> cum;
  std::string benchmark;  // which oracle the series is measured against
};

// Oracle side of the stochastic benchmark: the allocation and value are
// computed from the environment's exact post-clamp means, i.e. the rewards the
// table actually pays.
struct StochasticBenchmark {
  std::vector<int> f_star;
  double value = 0.0;  // sum_i f*(i) mu_eff(i, f*(i))
};
StochasticBenchmark stochastic_benchmark(const RewardTable& table, int users);

// Expected-reward instantaneous regret of one round: benchmark value minus
// sum_k mu_eff(a_k, f(a_k)). Draw noise never enters.
double stochastic_inst_regret(const RewardTable& table, const StochasticBenchmark& bench,
                              const std::vector<int>& actions);

// Whole-trace expected-reward regret series for a fixed user population.
RegretSeries stochastic_regret(const RewardTable& table,
                               const std::vector<std::vector<int>>& actions_per_round);

// Best fixed matching of users to distinct channels in hindsight:
// max over injective sigma of sum_k C[k][sigma(k)], where C[k][m] is the
// cumulative reward tensor summed over rounds. Requires users <= channels.
double adversarial_benchmark(const std::vector<std::vector<double>>& cumulative, int users);

// Cumulative adversarial regret from a full realized tensor g[t][k][m] and the
// played actions (realized reward is zero on collision rounds).
RegretSeries adversarial_regret(const std::vector<std::vector<std::vector<double>>>& tensor,
                                const std::vector<std::vector<int>>& actions_per_round);

// Estimation diagnostics against the table's effective means.
struct EstimationErrors {
  double k_error = 0.0;   // |k_hat - K|
  double mu_error = 0.0;  // max entrywise |mu_hat - mu_eff| over occupancies 1..beta
};
EstimationErrors estimation_errors(const RewardTable& table, int true_users, int k_hat,
                                   const std::vector<double>& mu_hat);

// Least-squares slope of log R against log t over positive checkpoints.
struct GrowthFit {
  double slope = 0.0;
  double r2 = 0.0;
  int points_used = 0;
  bool ok = false;  // at least 5 positive checkpoints
};
GrowthFit growth_exponent(const std::vector<double>& t, const std::vector<double>& r);

// Plain least-squares slope of y against x (flat-regret checks).
double linear_slope(const std::vector<double>& x, const std::vector<double>& y);

}  // namespace mub
