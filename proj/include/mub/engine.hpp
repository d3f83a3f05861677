#pragma once

#include <algorithm>
#include <cstdint>
#include <string>
#include <vector>

#include "mub/env.hpp"
#include "mub/estimation.hpp"
#include "mub/metrics.hpp"
#include "mub/reward_table.hpp"
#include "mub/schedule.hpp"

namespace mub {

enum class Scenario {
  Stochastic,           // fixed users, occupancy-dependent rewards
  Adversarial,          // fixed users, known horizon, epoch algorithm
  AdversarialDoubling,  // unknown horizon via doubling periods
  DynamicStochastic,    // growing epochs, users join/leave
  DynamicAdversarial,   // doubling, users join/leave
};

struct Experiment {
  Scenario scenario = Scenario::Stochastic;
  std::string name = "experiment";

  // environment
  RewardTable table;  // stochastic scenarios
  AdversaryModel adversary = AdversaryModel::iid_uniform_floor(0.2, 1.0);
  int channels = 0;  // adversarial channel count M
  int users = 0;     // static scenarios

  // algorithm
  StochConfig stoch;   // stochastic scenarios
  double adv_y = 0.5;  // epoch exponent
  long tau = 0;        // doubling initial period / dynamic-stochastic base epoch

  // run
  long horizon = 0;
  int checkpoints = 1000;     // target number of regret checkpoints
  bool record_rounds = false; // keep the full per-round trace in memory

  // dynamic scenarios
  UserSchedule schedule;

  long checkpoint_every() const {
    return std::max<long>(1, horizon / std::max(1, checkpoints));
  }
  int max_users() const;
  void validate() const;  // throws ConfigError
};

struct TraceRow {
  long t = 0;
  int user = 0;
  int action = 0;
  double reward = 0.0;
  uint8_t collided = 0;
  double cum_regret = 0.0;
};

struct EstimationRow {
  long t = 0;
  int user = 0;
  int k_hat = 0;
  double k_error = 0.0;
  double mu_error = 0.0;  // -1 when estimates were not computable yet
};

// final per-user beliefs at the end of the estimation window
struct EstimateSnapshot {
  int user = 0;
  int k_hat = 0;
  std::vector<double> mu_hat;  // channels x beta
  std::vector<int> f_star;
};

// Exp3.P state at an epoch boundary
struct Exp3Row {
  long period = 0;
  long epoch = 0;
  int user = 0;
  int arm = 0;
  double p = 0.0;
  double gain = 0.0;
};

struct Trial {
  long index = 0;
  uint64_t seed = 0;  // substream root for this trial

  std::vector<long> cp_t;
  std::vector<double> cp_cum_regret;           // primary regret
  std::vector<double> cp_cum_realized_regret;  // stochastic: draws instead of means

  std::vector<TraceRow> rounds;          // when record_rounds
  std::vector<EstimationRow> estimation; // stochastic scenarios
  std::vector<EstimateSnapshot> estimates;  // stochastic scenarios
  std::vector<Exp3Row> exp3_states;      // adversarial, when record_rounds

  // trial summaries at the end of the estimation window (stochastic):
  // means over active users
  double est_k_error_mean = -1.0;
  double est_mu_error_mean = -1.0;
  std::vector<int> k_hats;

  bool any_backfilled = false;
  bool any_unfixed_epoch = false;
  double final_cum_regret = 0.0;
};

// Epoch index of round t under growing epochs: epoch r spans
// [tau r(r+1)/2, tau (r+1)(r+2)/2), i.e. boundaries at 0, tau, 3 tau, 6 tau...
long dynamic_epoch_of(long t, long tau);

// Doubling period index of round t: period p spans
// [tau (2^p - 1), tau (2^{p+1} - 1)), lengths tau, 2 tau, 4 tau...
long doubling_period_of(long t, long tau);

Trial run_trial(const Experiment& exp, uint64_t root_seed, long trial_index);

struct Batch {
  std::vector<Trial> trials;
  std::vector<long> cp_t;
  std::vector<double> mean_cum_regret;
  std::vector<double> stderr_cum_regret;
};

// Trials are independent given the seed-splitting rule, so the batch layer
// fans them out with OpenMP. run_batch_serial is the reference loop; both
// produce identical results, which the tests and the bench tool check.
Batch run_batch(const Experiment& exp, long trials, uint64_t root_seed, int parallelism);
Batch run_batch_serial(const Experiment& exp, long trials, uint64_t root_seed);

// CSV emitters (UTF-8, header row, fixed column order)
std::string aggregate_csv(const Batch& batch);
std::string trace_csv(const Batch& batch);
std::string estimation_csv(const Batch& batch);
std::string estimates_csv(const Batch& batch);
std::string exp3_states_csv(const Batch& batch);

}  // namespace mub
