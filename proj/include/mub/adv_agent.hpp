#pragma once

#include <vector>

#include "mub/agent.hpp"
#include "mub/exp3p.hpp"
#include "mub/rng.hpp"

namespace mub {

// Epoch grid for the multi-user adversarial algorithm over horizon T with
// exponent y: ceil(T^(1-y))-long epochs, the last truncated to the horizon.
struct EpochGrid {
  long horizon = 0;
  long epoch_len = 0;   // ceil(T^(1-y))
  long epoch_count = 0; // ceil(T / epoch_len)

  static EpochGrid make(long horizon, double y);
  long epoch_of(long t) const { return t / epoch_len; }
  long epoch_start(long e) const { return e * epoch_len; }
  long epoch_end(long e) const {  // exclusive, truncated
    long end = (e + 1) * epoch_len;
    return end < horizon ? end : horizon;
  }
};

// The adversarial-setting user: per epoch, sample from the Exp3.P distribution
// until a collision-free round, hold that channel to the epoch boundary, then
// feed the average reward earned after settling into the Exp3.P update. An
// epoch that never settles (or settles on its last round) updates with reward
// zero. Rounds are indexed by the engine's clock; the agent may join mid-grid.
class AdvAgent : public AgentBase {
 public:
  AdvAgent(int channels, const EpochGrid& grid, uint64_t seed);

  int act() override;
  void observe(double reward, bool collided) override;

  // must be called once per round before act(), with the engine clock
  void sync(long t);

  bool settled() const { return settled_channel_ >= 0; }
  long settle_round() const { return settle_round_; }  // rounds into epoch, 1-based
  const Exp3P& learner() const { return exp3_; }

 private:
  void close_epoch();

  int channels_;
  EpochGrid grid_;
  Exp3P exp3_;
  Rng rng_;

  long t_ = -1;
  long epoch_ = -1;
  long rounds_in_epoch_ = 0;
  int settled_channel_ = -1;
  long settle_round_ = 0;
  int last_action_ = -1;
  double settled_sum_ = 0.0;
  long settled_rounds_ = 0;
};

}  // namespace mub
