#include "mub/stoch_agent.hpp"

#include <algorithm>
#include <numeric>

#include "mub/errors.hpp"

namespace mub {

StochAgent::StochAgent(const StochConfig& cfg, uint64_t seed)
    : cfg_(cfg), rng_(seed), tally_(cfg.channels) {}

StochAgent::StochAgent(const StochConfig& cfg, Estimates estimates, uint64_t seed)
    : cfg_(cfg), rng_(seed), tally_(cfg.channels) {
  estimates_ = std::move(estimates);
  begin_allocation();
}

int StochAgent::capacity(int channel) const {
  if (phase_ == Phase::RotateFix)
    return std::find(best_set_.begin(), best_set_.end(), channel) != best_set_.end() ? 1
                                                                                     : 0;
  return estimates_->f_star[channel];
}

void StochAgent::note_action(int a) {
  if (a == run_channel_)
    ++run_len_;
  else {
    run_channel_ = a;
    run_len_ = 1;
  }
  pending_action_ = a;
}

void StochAgent::begin_allocation() {
  const auto& est = *estimates_;
  fixed_channel_ = -1;
  fix_time_ = 0;
  epoch_ = 0;
  epoch_t_ = 0;
  epoch_len_ = cfg_.epoch_length(est.k_hat);
  if (est.k_hat > cfg_.channels) {
    phase_ = Phase::Permute;
    available_.resize(cfg_.channels);
    std::iota(available_.begin(), available_.end(), 0);
    q_.clear();
  } else {
    phase_ = Phase::RotateFix;
    // k_hat channels with the largest singleton means, best first
    std::vector<int> order(cfg_.channels);
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(),
                     [&](int a, int b) { return est.mu(a, 1) > est.mu(b, 1); });
    // a lone user still may not squat one channel past tx; rotate over two
    int take = std::max(2, std::min(est.k_hat, cfg_.channels));
    best_set_.assign(order.begin(), order.begin() + std::min(take, cfg_.channels));
    available_ = best_set_;
  }
}

void StochAgent::begin_epoch() {
  ++epoch_;
  epoch_t_ = 0;
  fixed_channel_ = -1;
  fix_time_ = 0;
}

int StochAgent::probe_choice(const std::vector<int>& allowed) {
  // respect the consecutive-use cap even while probing
  std::vector<int> ok;
  ok.reserve(allowed.size());
  for (int ch : allowed)
    if (!(ch == run_channel_ && run_len_ >= cfg_.tx)) ok.push_back(ch);
  if (ok.empty()) throw ContractViolation("allocation probe: no channel available");
  return ok[rng_.uniform_int(static_cast<int>(ok.size()))];
}

int StochAgent::act() {
  int action = -1;
  switch (phase_) {
    case Phase::Estimating:
      action = rng_.uniform_int(cfg_.channels);
      break;

    case Phase::Permute:
    case Phase::RotateFix: {
      if (fixed_channel_ >= 0 && run_len_ < cfg_.tx) {
        action = fixed_channel_;
      } else if (fixed_channel_ >= 0) {
        // hold exhausted tx; drift off the fixed channel until the boundary
        std::vector<int> rest;
        for (int ch = 0; ch < cfg_.channels; ++ch)
          if (ch != fixed_channel_) rest.push_back(ch);
        action = probe_choice(rest);
      } else {
        action = probe_choice(available_);
      }
      break;
    }

    case Phase::PermuteCycle: {
      long block = (local_t_ - cycle_start_) / cfg_.tx;
      action = q_[block % q_.size()];
      break;
    }

    case Phase::Rotate: {
      long block = (local_t_ - cycle_start_) / cfg_.tx;
      if (rotate_slot_ >= 0) {
        action = best_set_[(rotate_slot_ + block) % best_set_.size()];
      } else {
        // missed the fixing window: keep probing the best set for a free slot
        action = probe_choice(best_set_);
      }
      break;
    }
  }
  note_action(action);
  return action;
}

void StochAgent::observe(double reward, bool collided) {
  const int a = pending_action_;
  pending_action_ = -1;
  ++local_t_;

  switch (phase_) {
    case Phase::Estimating: {
      tally_.record(a, reward, collided);
      if (tally_.rounds >= cfg_.estimation_rounds()) {
        estimates_ = build_estimates(tally_, cfg_, rng_);
        begin_allocation();
      }
      return;
    }

    case Phase::Permute:
    case Phase::RotateFix: {
      ++epoch_t_;
      // the collision flag pins occupancy 1 exactly; past that, read the
      // occupancy off the nearest estimated mean
      int occ = collided ? std::max(2, estimates_->classify_occupancy(a, reward)) : 1;
      if (fixed_channel_ < 0) {
        if (occ <= capacity(a)) {
          fixed_channel_ = a;
          fix_time_ = epoch_t_;
          invasion_streak_ = 0;
        }
      } else if (a == fixed_channel_) {
        // Estimates differ across users, so a neighbor with an inflated
        // capacity view may settle into a slot this user knows is beyond the
        // channel's capacity. The holder sees the anomaly (occupancy above its
        // own f* entry) and yields the slot, re-probing for a free one; the
        // intruder stays, and the system still lands on a consistent
        // allocation. Probers brushing a full channel also raise the count for
        // a round or two, so detection waits out the early rush: it runs in
        // the second half of the probing window and needs a three-round run.
        long probe_window = epoch_len_ - cfg_.tx;
        bool detecting = epoch_t_ > probe_window / 2 && epoch_t_ <= probe_window;
        if (detecting && occ > capacity(a)) {
          if (++invasion_streak_ >= 3) {
            fixed_channel_ = -1;
            fix_time_ = 0;
            invasion_streak_ = 0;
          }
        } else {
          invasion_streak_ = 0;
        }
      }
      if (epoch_t_ >= epoch_len_) {
        if (fixed_channel_ < 0) ever_unfixed_epoch_ = true;
        int pick = fixed_channel_ >= 0 ? fixed_channel_ : a;
        if (phase_ == Phase::Permute) {
          q_.push_back(pick);
          if (epoch_ + 1 >= cfg_.n0) {
            phase_ = Phase::PermuteCycle;
            cycle_start_ = local_t_;
          } else {
            // next epoch excludes the channel just held, so consecutive picks
            // differ; the final epoch also excludes the first pick to keep the
            // cycle free of back-to-back repeats across the wrap
            std::vector<int> banned = {pick};
            if (epoch_ + 1 == cfg_.n0 - 1) banned.push_back(q_.front());
            available_.clear();
            for (int ch = 0; ch < cfg_.channels; ++ch)
              if (std::find(banned.begin(), banned.end(), ch) == banned.end())
                available_.push_back(ch);
            if (available_.empty()) {  // two channels only: drop the wrap guard
              for (int ch = 0; ch < cfg_.channels; ++ch)
                if (ch != pick) available_.push_back(ch);
            }
            if (available_.empty())
              throw ContractViolation("permute: available set exhausted");
            begin_epoch();
          }
        } else {
          // rotation begins one step past the fixed channel, so the hold from
          // the fixing epoch never stretches beyond tx consecutive rounds
          auto it = std::find(best_set_.begin(), best_set_.end(), pick);
          rotate_slot_ = fixed_channel_ >= 0 && it != best_set_.end()
                             ? static_cast<int>((it - best_set_.begin() + 1) %
                                                best_set_.size())
                             : -1;
          phase_ = Phase::Rotate;
          cycle_start_ = local_t_;
        }
      }
      return;
    }

    case Phase::PermuteCycle:
      return;

    case Phase::Rotate: {
      if (rotate_slot_ < 0 && !collided) {
        // adopt the slot that maps this free channel to the current block
        long block = (local_t_ - 1 - cycle_start_) / cfg_.tx;
        auto it = std::find(best_set_.begin(), best_set_.end(), a);
        if (it != best_set_.end()) {
          long idx = it - best_set_.begin();
          long k = static_cast<long>(best_set_.size());
          rotate_slot_ = static_cast<int>(((idx - block) % k + k) % k);
        }
      }
      return;
    }
  }
}

StochAgent::Snapshot StochAgent::snapshot() const {
  Snapshot s;
  if (estimates_) {
    s.k_hat = estimates_->k_hat;
    s.mu_ready = true;
    s.mu_hat = estimates_->mu_hat;
    return s;
  }
  s.k_hat = estimate_k(tally_.collisions, tally_.rounds, cfg_.channels, cfg_.beta);
  try {
    Rng scratch(mix(0x536e4150, tally_.rounds));
    Estimates est = build_estimates(tally_, cfg_, scratch);
    s.mu_ready = true;
    s.mu_hat = std::move(est.mu_hat);
    s.k_hat = est.k_hat;
  } catch (const EstimateIncomplete&) {
    s.mu_ready = false;
  }
  return s;
}

}  // namespace mub
