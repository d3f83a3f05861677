#pragma once

namespace mub {

// One decentralized user. The engine drives all active agents synchronously:
// every agent picks a channel for round t, then every agent receives its own
// (reward, collided) feedback for round t. Agents never see anything else, and
// each owns its RNG substream, so they are isolated by construction.
class AgentBase {
 public:
  virtual ~AgentBase() = default;
  virtual int act() = 0;
  virtual void observe(double reward, bool collided) = 0;
};

}  // namespace mub
