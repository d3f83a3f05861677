#pragma once

#include <optional>
#include <vector>

#include "mub/agent.hpp"
#include "mub/estimation.hpp"
#include "mub/rng.hpp"

namespace mub {

// The stochastic-setting user.
//
// Lifecycle: uniform exploration for t0 + tc rounds while tallying collision
// counts and rewards, then estimates (k_hat, mu_hat, f*) are built and the
// agent enters the allocation phase:
//
//   k_hat > M   n0 fixing epochs of length tf_bound + tx. In each epoch the
//               agent probes its available set until a probe lands on a
//               channel whose inferred occupancy is within f*, then holds it.
//               Each epoch excludes the previous pick (and the final epoch
//               the first one, so the cycle wrap never repeats a channel).
//               Afterwards it cycles q forever, tx rounds per entry.
//   k_hat <= M  one fixing epoch over the k_hat best channels (capacity one
//               each), then all users rotate through that set in lockstep,
//               advancing every tx rounds.
//
// A channel is never chosen more than tx consecutive rounds: an agent whose
// hold exhausts tx before the epoch ends steps aside and samples other
// channels until the next boundary.
class StochAgent : public AgentBase {
 public:
  enum class Phase { Estimating, Permute, PermuteCycle, RotateFix, Rotate };

  StochAgent(const StochConfig& cfg, uint64_t seed);

  // start directly in the allocation phase with the given beliefs
  StochAgent(const StochConfig& cfg, Estimates estimates, uint64_t seed);

  int act() override;
  void observe(double reward, bool collided) override;

  Phase phase() const { return phase_; }
  const std::optional<Estimates>& estimates() const { return estimates_; }
  bool fixed() const { return fixed_channel_ >= 0; }
  // rounds into the current epoch when the agent fixed (1-based), 0 if not yet
  long fix_time() const { return fix_time_; }
  int epoch_index() const { return epoch_; }
  const std::vector<int>& permute_picks() const { return q_; }
  bool ever_unfixed_epoch() const { return ever_unfixed_epoch_; }

  struct Snapshot {
    int k_hat = 0;
    bool mu_ready = false;
    std::vector<double> mu_hat;  // channels x beta when ready
  };
  // estimates from the tallies gathered so far (valid during estimation too)
  Snapshot snapshot() const;

 private:
  void begin_allocation();
  void begin_epoch();
  int probe_choice(const std::vector<int>& allowed);
  int capacity(int channel) const;
  void note_action(int a);

  StochConfig cfg_;
  Rng rng_;
  Phase phase_ = Phase::Estimating;
  EstimationState tally_;
  std::optional<Estimates> estimates_;

  long local_t_ = 0;   // rounds since construction
  long epoch_t_ = 0;   // rounds into current epoch
  long epoch_len_ = 0;
  int epoch_ = 0;

  std::vector<int> available_;  // A_i
  std::vector<int> q_;          // fixed channel per epoch
  std::vector<int> best_set_;   // k_hat best channels (k_hat <= M branch)
  int rotate_slot_ = -1;

  int fixed_channel_ = -1;
  long fix_time_ = 0;
  int invasion_streak_ = 0;
  bool ever_unfixed_epoch_ = false;

  int pending_action_ = -1;  // action awaiting feedback
  int run_channel_ = -1;     // consecutive-use tracking
  long run_len_ = 0;
  long cycle_start_ = 0;  // local_t_ when cycling/rotation began
};

// Trivial agent: samples uniformly every round. Stands in for users that join
// a dynamic system mid-epoch until the next restart boundary.
class UniformAgent : public AgentBase {
 public:
  UniformAgent(int channels, uint64_t seed) : channels_(channels), rng_(seed) {}
  int act() override { return rng_.uniform_int(channels_); }
  void observe(double, bool) override {}

 private:
  int channels_;
  Rng rng_;
};

}  // namespace mub
