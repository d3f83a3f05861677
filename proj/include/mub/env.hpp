#pragma once

#include <cstdint>
#include <memory>
#include <vector>

#include "mub/reward_table.hpp"
#include "mub/rng.hpp"

namespace mub {

// Feedback for one round. Vectors are indexed like the actions vector that
// produced them (one slot per acting user).
struct RoundFeedback {
  std::vector<double> reward;
  std::vector<uint8_t> collided;
  std::vector<int> occupancy;  // per channel
};

// Occupancy-dependent stochastic rewards. Immutable after construction; a
// round is a pure function of (actions, rng).
class StochasticEnv {
 public:
  explicit StochasticEnv(RewardTable table) : table_(std::move(table)) {}

  const RewardTable& table() const { return table_; }
  int channels() const { return table_.channels; }

  // One synchronous round: user i sits on actions[i]. A user on a channel
  // with occupancy f draws mean mu(m, f) noise (exact 0 beyond beta+1) and is
  // flagged collided whenever f > 1. Throws ContractViolation on a bad action.
  RoundFeedback step(const std::vector<int>& actions, Rng& rng) const;

 private:
  RewardTable table_;
};

enum class AdversaryKind { IidUniformFloor, Scripted };

// User-dependent adversarial rewards, zero on collision.
//
// IidUniformFloor redraws, for every (round, user, channel), a floor
// a ~ U[floor_lo, floor_hi] and then pays g ~ U[a, 1]. Values are derived
// by counter (seed, t, user, channel), so any entry of the implied reward
// tensor can be recomputed independently of query order.
//
// Scripted replays an externally supplied tensor g[t][k][m].
class AdversaryModel {
 public:
  static AdversaryModel iid_uniform_floor(double floor_lo, double floor_hi);
  static AdversaryModel scripted(long horizon, int users, int channels,
                                 std::vector<double> tensor);

  AdversaryKind kind() const { return kind_; }
  double floor_lo() const { return floor_lo_; }
  double floor_hi() const { return floor_hi_; }
  long scripted_horizon() const { return horizon_; }
  int scripted_users() const { return users_; }
  int scripted_channels() const { return channels_; }

  // g^k_t(m); seed identifies the tensor realization for this trial
  double reward(uint64_t seed, long t, int user, int channel) const;

  // One synchronous round over `channels` channels. users[i] acts with
  // actions[i]; a lone user on its channel is paid reward(), anyone sharing a
  // channel gets 0 and collided=true.
  RoundFeedback step(uint64_t seed, long t, int channels,
                     const std::vector<int>& users, const std::vector<int>& actions) const;

 private:
  AdversaryKind kind_ = AdversaryKind::IidUniformFloor;
  double floor_lo_ = 0.2, floor_hi_ = 1.0;
  long horizon_ = 0;
  int users_ = 0, channels_ = 0;
  std::shared_ptr<const std::vector<double>> tensor_;
};

}  // namespace mub
