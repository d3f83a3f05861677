#pragma once

#include <vector>

#include "mub/rng.hpp"

namespace mub {

enum class MeanEstimator {
  WeightedSlices,  // occupancy-weight quantile slices with decisive-gap snapping
  Cluster,         // k-means on the collision pool, top centroids by rank
};

// Tunables of the stochastic per-user algorithm. One instance is shared by
// every user in an experiment, so phase boundaries line up across the system.
struct StochConfig {
  int channels = 0;  // M
  int beta = 1;
  long t0 = 1000;  // estimation rounds
  long tc = -1;    // extra exploration rounds while estimates are computed; -1 = t0
  long tx = 1000;  // max consecutive rounds on one channel
  int n0 = 2;      // permute epochs
  long tf_bound = 0;  // fixing window per epoch; 0 = derive from k_hat
  double epsilon = 0.5;
  double delta = 0.05;
  MeanEstimator estimator = MeanEstimator::WeightedSlices;
  int cluster_restarts = 10;
  int cluster_max_iters = 100;

  long clustering_rounds() const { return tc < 0 ? t0 : tc; }
  // sampling window feeding the estimates: agents keep exploring during the
  // clustering budget, so those rounds count too
  long estimation_rounds() const { return t0 + clustering_rounds(); }

  // high-probability inflation of the expected per-user fixing time,
  // ceil(M exp((K-1)/(M-1)) (1 + ln(K/delta)))
  long derive_tf_bound(int k_hat) const;
  long epoch_length(int k_hat) const {
    return (tf_bound > 0 ? tf_bound : derive_tf_bound(k_hat)) + tx;
  }

  void validate() const;  // throws ConfigError
};

// Per-user tallies over the estimation window.
struct EstimationState {
  int channels = 0;
  long rounds = 0;
  long collisions = 0;                    // eta_c
  std::vector<long> singleton_count;      // co[m]
  std::vector<double> singleton_sum;      // x1[m]
  std::vector<std::vector<double>> pool;  // x[m], rewards seen under collision

  explicit EstimationState(int m_count)
      : channels(m_count), singleton_count(m_count, 0), singleton_sum(m_count, 0.0),
        pool(m_count) {}

  void record(int channel, double reward, bool collided) {
    ++rounds;
    if (collided) {
      ++collisions;
      pool[channel].push_back(reward);
    } else {
      ++singleton_count[channel];
      singleton_sum[channel] += reward;
    }
  }
};

// Inverted collision-rate estimate of the number of users:
//   min{ 1 + round(ln((rounds - collisions)/rounds) / ln(1 - 1/M)), beta*M },
// clamped to beta*M when every round collided and to at least 1.
int estimate_k(long collisions, long rounds, int channels, int beta);

// What a user believes after the estimation window.
struct Estimates {
  int channels = 0;
  int beta = 1;
  int k_hat = 1;
  std::vector<double> mu_hat;  // row-major channels x beta, occupancies 1..beta
  std::vector<int> f_star;     // optimal occupancy per channel for k_hat users
  bool rotation_feasible = true;   // 2 max f* <= sum f*
  std::vector<int> backfilled;     // channels whose pooled entries were interpolated

  double mu(int channel, int occupancy) const {
    if (occupancy < 1 || occupancy > beta) return 0.0;
    return mu_hat[static_cast<size_t>(channel) * beta + occupancy - 1];
  }

  // nearest estimated mean over occupancies 1..beta+1 (beta+1 pinned at 0);
  // ties resolve to the smaller occupancy
  int classify_occupancy(int channel, double reward) const;
};

// Turn tallies into k_hat, mu_hat and f*. Throws EstimateIncomplete when some
// channel was never observed collision-free. Channels whose collision pool is
// too thin for the slice estimator get occupancies 2..beta interpolated
// between mu_hat(m,1) and zero at beta+1, and are listed in `backfilled`.
Estimates build_estimates(const EstimationState& est, const StochConfig& cfg, Rng& rng);

// Collision-pool occupancy mix: probability that a colliding user's channel
// holds j users total (j = 2..k), normalized. Index 0 of the result is j=2.
std::vector<double> collision_occupancy_weights(int k, int channels);

// Mean of descending slices of `samples`, slice widths given by `weights`
// (normalized internally over the full weight list); the first `slices` means
// are returned. Slice boundaries sit at expected counts unless a decisive
// value gap nearby marks the true component boundary.
std::vector<double> sliced_means(const std::vector<double>& samples,
                                 const std::vector<double>& weights, int slices);

}  // namespace mub
