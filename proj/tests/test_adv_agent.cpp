#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "mub/adv_agent.hpp"
#include "mub/env.hpp"

using namespace mub;

namespace {

// drive K adversarial agents for `rounds` rounds against an adversary
struct AdvRun {
  std::vector<std::vector<int>> actions;
  std::vector<std::unique_ptr<AdvAgent>> agents;
};

AdvRun drive(int users, int channels, long horizon, const AdversaryModel& adv,
             uint64_t seed) {
  AdvRun run;
  EpochGrid grid = EpochGrid::make(horizon, 0.5);
  for (int u = 0; u < users; ++u)
    run.agents.push_back(std::make_unique<AdvAgent>(channels, grid, user_seed(seed, u)));
  std::vector<int> ids(users);
  for (int u = 0; u < users; ++u) ids[u] = u;
  for (long t = 0; t < horizon; ++t) {
    std::vector<int> actions(users);
    for (int u = 0; u < users; ++u) {
      run.agents[u]->sync(t);
      actions[u] = run.agents[u]->act();
    }
    auto fb = adv.step(env_seed(seed), t, channels, ids, actions);
    for (int u = 0; u < users; ++u) run.agents[u]->observe(fb.reward[u], fb.collided[u]);
    run.actions.push_back(actions);
  }
  return run;
}

}  // namespace

TEST_CASE("epoch grid: 160000 rounds split into 400 epochs of 400") {
  auto g = EpochGrid::make(160000, 0.5);
  CHECK(g.epoch_len == 400);
  CHECK(g.epoch_count == 400);
  CHECK(g.epoch_of(399) == 0);
  CHECK(g.epoch_of(400) == 1);
  CHECK(g.epoch_end(399) == 160000);
}

TEST_CASE("epoch grid truncates the last epoch") {
  auto g = EpochGrid::make(10, 0.5);  // epoch_len = 4, epochs cover 4,4,2
  CHECK(g.epoch_len == 4);
  CHECK(g.epoch_count == 3);
  CHECK(g.epoch_end(2) == 10);
}

TEST_CASE("single user settles on the first round of every epoch") {
  auto adv = AdversaryModel::iid_uniform_floor(0.2, 1.0);
  auto run = drive(1, 3, 64, adv, 5);
  CHECK(run.agents[0]->settle_round() == 1);
  // within each epoch the single user never switches after settling
  auto g = EpochGrid::make(64, 0.5);
  for (long e = 0; e < g.epoch_count; ++e) {
    int first = run.actions[g.epoch_start(e)][0];
    for (long t = g.epoch_start(e); t < g.epoch_end(e); ++t)
      CHECK(run.actions[t][0] == first);
  }
}

TEST_CASE("settled agents never switch within an epoch (multi-user)") {
  auto adv = AdversaryModel::iid_uniform_floor(0.2, 1.0);
  auto run = drive(3, 5, 400, adv, 11);
  auto g = EpochGrid::make(400, 0.5);
  // reconstruct settle rounds per epoch: after the first collision-free round
  // the action freezes until the boundary
  for (int u = 0; u < 3; ++u) {
    for (long e = 0; e < g.epoch_count; ++e) {
      long settled_at = -1;
      for (long t = g.epoch_start(e); t < g.epoch_end(e); ++t) {
        std::vector<int> occ(5, 0);
        for (int k = 0; k < 3; ++k) occ[run.actions[t][k]]++;
        if (occ[run.actions[t][u]] == 1) {
          settled_at = t;
          break;
        }
      }
      if (settled_at < 0) continue;
      for (long t = settled_at; t < g.epoch_end(e); ++t)
        CHECK(run.actions[t][u] == run.actions[settled_at][u]);
    }
  }
}

TEST_CASE("two users, two channels: both settle immediately half the time") {
  // exact enumeration: both sample uniform over 2 channels, 4 outcomes, 2 are
  // collision-free. Monte-Carlo frequency of round-1 joint settling ~ 1/2.
  auto adv = AdversaryModel::iid_uniform_floor(0.2, 1.0);
  int joint = 0;
  const int reps = 10000;
  for (int rep = 0; rep < reps; ++rep) {
    EpochGrid grid = EpochGrid::make(16, 0.5);
    AdvAgent a(2, grid, user_seed(rep, 0)), b(2, grid, user_seed(rep, 1));
    a.sync(0);
    b.sync(0);
    int aa = a.act(), bb = b.act();
    joint += aa != bb;
  }
  CHECK(std::fabs(joint / double(reps) - 0.5) < 0.02);
}

TEST_CASE("mean epoch settling time stays under the loose analytic bound") {
  // K=2, M=3: bound K M^K / gamma per epoch for the system, i.e. M^K/gamma
  // per user; the realized mean is far smaller
  auto adv = AdversaryModel::iid_uniform_floor(0.2, 1.0);
  long horizon = 3600;  // 60 epochs of 60
  auto g = EpochGrid::make(horizon, 0.5);
  double settle_sum = 0.0;
  long settle_count = 0;
  for (int rep = 0; rep < 10; ++rep) {
    auto run = drive(2, 3, horizon, adv, 100 + rep);
    for (int u = 0; u < 2; ++u) {
      for (long e = 0; e < g.epoch_count; ++e) {
        for (long t = g.epoch_start(e); t < g.epoch_end(e); ++t) {
          std::vector<int> occ(3, 0);
          for (int k = 0; k < 2; ++k) occ[run.actions[t][k]]++;
          if (occ[run.actions[t][u]] == 1) {
            settle_sum += double(t - g.epoch_start(e) + 1);
            ++settle_count;
            break;
          }
        }
      }
    }
  }
  double mean = settle_sum / settle_count;
  Exp3P probe(3, g.epoch_count);
  double bound = std::pow(3.0, 2.0) / probe.gamma();
  CHECK(mean >= 1.0);
  CHECK(mean <= bound);
}

TEST_CASE("never-settled epochs update with zero reward") {
  // two users forced to collide forever: scripted adversary irrelevant, both
  // agents keep sampling on 2 channels with the same seed stream is not
  // possible; instead drive one agent with collided=true every round
  EpochGrid grid = EpochGrid::make(16, 0.5);  // epochs of 4
  AdvAgent a(2, grid, 3);
  for (long t = 0; t < 4; ++t) {
    a.sync(t);
    a.act();
    a.observe(0.0, true);
  }
  a.sync(4);  // epoch boundary: closes epoch 0 with g = 0
  CHECK(!a.settled());
  const auto& gains = a.learner().gains();
  // only the exploration bonus flowed: both arms moved equally
  CHECK(gains[0] == doctest::Approx(gains[1]));
  CHECK(a.learner().probabilities()[0] == doctest::Approx(0.5));
}
