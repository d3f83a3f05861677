#include "mub/env.hpp"

#include <sstream>

#include "mub/errors.hpp"

namespace mub {

RoundFeedback StochasticEnv::step(const std::vector<int>& actions, Rng& rng) const {
  const int m_count = table_.channels;
  RoundFeedback fb;
  fb.occupancy.assign(m_count, 0);
  for (size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] < 0 || actions[i] >= m_count) {
      std::ostringstream os;
      os << "stochastic round: action " << actions[i] << " of user slot " << i
         << " outside [0," << m_count << ")";
      throw ContractViolation(os.str());
    }
    fb.occupancy[actions[i]]++;
  }
  fb.reward.resize(actions.size());
  fb.collided.resize(actions.size());
  for (size_t i = 0; i < actions.size(); ++i) {
    int f = fb.occupancy[actions[i]];
    fb.reward[i] = table_.draw(actions[i], f, rng);
    fb.collided[i] = f > 1;
  }
  return fb;
}

AdversaryModel AdversaryModel::iid_uniform_floor(double floor_lo, double floor_hi) {
  if (!(0.0 <= floor_lo && floor_lo <= floor_hi && floor_hi <= 1.0))
    throw ConfigError("adversary: floor range must satisfy 0 <= lo <= hi <= 1");
  AdversaryModel a;
  a.kind_ = AdversaryKind::IidUniformFloor;
  a.floor_lo_ = floor_lo;
  a.floor_hi_ = floor_hi;
  return a;
}

AdversaryModel AdversaryModel::scripted(long horizon, int users, int channels,
                                        std::vector<double> tensor) {
  if (tensor.size() != static_cast<size_t>(horizon) * users * channels)
    throw ConfigError("scripted adversary: tensor size must be horizon*users*channels");
  for (double g : tensor)
    if (g < 0.0 || g > 1.0)
      throw ConfigError("scripted adversary: rewards must lie in [0,1]");
  AdversaryModel a;
  a.kind_ = AdversaryKind::Scripted;
  a.horizon_ = horizon;
  a.users_ = users;
  a.channels_ = channels;
  a.tensor_ = std::make_shared<const std::vector<double>>(std::move(tensor));
  return a;
}

double AdversaryModel::reward(uint64_t seed, long t, int user, int channel) const {
  if (kind_ == AdversaryKind::Scripted) {
    if (t >= horizon_) {
      std::ostringstream os;
      os << "scripted adversary: round " << t << " past scripted horizon " << horizon_;
      throw ContractViolation(os.str());
    }
    if (user >= users_ || channel >= channels_)
      throw ContractViolation("scripted adversary: user/channel outside scripted tensor");
    return (*tensor_)[(static_cast<size_t>(t) * users_ + user) * channels_ + channel];
  }
  // two counter-derived uniforms: the floor, then the reward above it
  uint64_t base = mix(seed, (static_cast<uint64_t>(t) << 20) ^
                                (static_cast<uint64_t>(user) << 10) ^
                                static_cast<uint64_t>(channel));
  double u1 = (splitmix64(base) >> 11) * 0x1.0p-53;
  double u2 = (splitmix64(base + 0x632be59bd9b4e019ULL) >> 11) * 0x1.0p-53;
  double floor = floor_lo_ + (floor_hi_ - floor_lo_) * u1;
  return floor + (1.0 - floor) * u2;
}

RoundFeedback AdversaryModel::step(uint64_t seed, long t, int channels,
                                   const std::vector<int>& users,
                                   const std::vector<int>& actions) const {
  if (users.size() != actions.size())
    throw ContractViolation("adversarial round: users/actions size mismatch");
  if (static_cast<int>(users.size()) > channels)
    throw ContractViolation("adversarial round: more active users than channels");
  RoundFeedback fb;
  fb.occupancy.assign(channels, 0);
  for (size_t i = 0; i < actions.size(); ++i) {
    if (actions[i] < 0 || actions[i] >= channels) {
      std::ostringstream os;
      os << "adversarial round: action " << actions[i] << " outside [0," << channels << ")";
      throw ContractViolation(os.str());
    }
    fb.occupancy[actions[i]]++;
  }
  fb.reward.resize(actions.size());
  fb.collided.resize(actions.size());
  for (size_t i = 0; i < actions.size(); ++i) {
    if (fb.occupancy[actions[i]] > 1) {
      fb.reward[i] = 0.0;
      fb.collided[i] = 1;
    } else {
      fb.reward[i] = reward(seed, t, users[i], actions[i]);
      fb.collided[i] = 0;
    }
  }
  return fb;
}

}  // namespace mub
