#include "mub/adv_agent.hpp"

#include <cmath>

#include "mub/errors.hpp"

namespace mub {

EpochGrid EpochGrid::make(long horizon, double y) {
  if (horizon < 4) throw ConfigError("adversarial run: horizon must be >= 4");
  if (y <= 0.0 || y >= 1.0) throw ConfigError("adversarial run: y must be in (0,1)");
  EpochGrid g;
  g.horizon = horizon;
  g.epoch_len = static_cast<long>(std::ceil(std::pow(double(horizon), 1.0 - y)));
  g.epoch_count = (horizon + g.epoch_len - 1) / g.epoch_len;
  return g;
}

AdvAgent::AdvAgent(int channels, const EpochGrid& grid, uint64_t seed)
    : channels_(channels), grid_(grid), exp3_(channels, grid.epoch_count), rng_(seed) {}

void AdvAgent::sync(long t) {
  long e = grid_.epoch_of(t);
  if (e != epoch_) {
    if (epoch_ >= 0) close_epoch();
    epoch_ = e;
    rounds_in_epoch_ = 0;
    settled_channel_ = -1;
    settle_round_ = 0;
    settled_sum_ = 0.0;
    settled_rounds_ = 0;
  }
  t_ = t;
}

void AdvAgent::close_epoch() {
  // average reward earned while settled; zero when the agent never settled
  double g = settled_rounds_ > 0 ? settled_sum_ / settled_rounds_ : 0.0;
  int arm = settled_channel_ >= 0 ? settled_channel_ : (last_action_ >= 0 ? last_action_ : 0);
  exp3_.update(arm, g);
}

int AdvAgent::act() {
  last_action_ = settled_channel_ >= 0 ? settled_channel_ : exp3_.sample(rng_);
  return last_action_;
}

void AdvAgent::observe(double reward, bool collided) {
  ++rounds_in_epoch_;
  if (settled_channel_ >= 0) {
    settled_sum_ += reward;
    ++settled_rounds_;
  } else if (!collided) {
    settled_channel_ = last_action_;
    settle_round_ = rounds_in_epoch_;
    // the settling round itself is not part of the averaged window
  }
  if (t_ + 1 >= grid_.horizon) {
    close_epoch();
    epoch_ = -1;  // guards double close if sync() never runs again
  }
}

}  // namespace mub
