#include <doctest.h>

#include <cmath>
#include <memory>
#include <vector>

#include "mub/engine.hpp"
#include "mub/errors.hpp"
#include "mub/stoch_agent.hpp"

using namespace mub;

namespace {

Experiment small_stochastic() {
  Experiment exp;
  exp.scenario = Scenario::Stochastic;
  exp.table.channels = 3;
  exp.table.beta = 2;
  exp.table.variance = 0.002;
  exp.table.means = {0.9, 0.5, 0.2, 0.8, 0.45, 0.15, 0.7, 0.4, 0.1};
  exp.users = 4;
  exp.stoch.channels = 3;
  exp.stoch.beta = 2;
  exp.stoch.t0 = 200;
  exp.stoch.tc = 200;
  exp.stoch.tx = 50;
  exp.stoch.n0 = 2;
  exp.stoch.tf_bound = 60;
  exp.horizon = 1500;
  exp.checkpoints = 30;
  return exp;
}

Experiment small_adversarial() {
  Experiment exp;
  exp.scenario = Scenario::Adversarial;
  exp.channels = 4;
  exp.users = 3;
  exp.adversary = AdversaryModel::iid_uniform_floor(0.2, 1.0);
  exp.horizon = 2500;
  exp.checkpoints = 25;
  return exp;
}

}  // namespace

TEST_CASE("one user, one effective channel: no collisions, flat occupancy") {
  Experiment exp = small_stochastic();
  exp.users = 1;
  exp.record_rounds = true;
  exp.horizon = 40;
  auto trial = run_trial(exp, 1, 0);
  REQUIRE(trial.rounds.size() == 40);
  for (const auto& row : trial.rounds) CHECK(!row.collided);
}

TEST_CASE("same seed reproduces byte-identical CSV artifacts") {
  Experiment exp = small_stochastic();
  exp.record_rounds = true;
  auto a = run_batch_serial(exp, 3, 42);
  auto b = run_batch_serial(exp, 3, 42);
  CHECK(aggregate_csv(a) == aggregate_csv(b));
  CHECK(trace_csv(a) == trace_csv(b));
  CHECK(estimation_csv(a) == estimation_csv(b));
}

TEST_CASE("parallel and serial batches agree exactly") {
  Experiment exp = small_stochastic();
  auto serial = run_batch_serial(exp, 6, 9);
  auto parallel = run_batch(exp, 6, 9, 4);
  CHECK(serial.mean_cum_regret == parallel.mean_cum_regret);
  CHECK(serial.stderr_cum_regret == parallel.stderr_cum_regret);

  Experiment adv = small_adversarial();
  auto s2 = run_batch_serial(adv, 6, 10);
  auto p2 = run_batch(adv, 6, 10, 4);
  CHECK(s2.mean_cum_regret == p2.mean_cum_regret);
}

TEST_CASE("occupancy conservation: every recorded round has one action per user") {
  Experiment exp = small_stochastic();
  exp.record_rounds = true;
  exp.horizon = 600;
  auto trial = run_trial(exp, 5, 0);
  std::vector<int> per_round(600, 0);
  for (const auto& row : trial.rounds) {
    ++per_round[row.t];
    CHECK(row.action >= 0);
    CHECK(row.action < 3);
  }
  for (int c : per_round) CHECK(c == exp.users);
}

TEST_CASE("spy: other agents' decisions depend only on their own history") {
  // Replace agent 0 by a scripted replayer taking the same actions; every
  // other user's action stream must not move.
  Experiment exp = small_stochastic();
  exp.record_rounds = true;
  exp.horizon = 800;
  auto base = run_trial(exp, 77, 0);

  std::vector<std::vector<int>> base_actions(exp.horizon, std::vector<int>(exp.users));
  for (const auto& row : base.rounds) base_actions[row.t][row.user] = row.action;

  // rerun by hand with agent 0 scripted
  struct Replayer : AgentBase {
    const std::vector<std::vector<int>>* script;
    long t = 0;
    int garbage = 0;
    int act() override { return (*script)[t][0]; }
    void observe(double r, bool) override {
      ++t;
      garbage += int(r * 1e6);  // scribbles on its own state only
    }
  };

  StochasticEnv env(exp.table);
  uint64_t ts = trial_seed(77, 0);  // same derivation as the engine
  Rng env_rng(env_seed(ts));
  std::vector<std::unique_ptr<AgentBase>> agents;
  auto rep = std::make_unique<Replayer>();
  rep->script = &base_actions;
  agents.push_back(std::move(rep));
  for (int u = 1; u < exp.users; ++u)
    agents.push_back(std::make_unique<StochAgent>(exp.stoch, user_seed(ts, u)));

  for (long t = 0; t < exp.horizon; ++t) {
    std::vector<int> actions(exp.users);
    for (int u = 0; u < exp.users; ++u) actions[u] = agents[u]->act();
    for (int u = 1; u < exp.users; ++u) CHECK(actions[u] == base_actions[t][u]);
    auto fb = env.step(actions, env_rng);
    for (int u = 0; u < exp.users; ++u) agents[u]->observe(fb.reward[u], fb.collided[u]);
  }
}

TEST_CASE("estimate snapshots carry k_hat, mu_hat and f* per user") {
  Experiment exp = small_stochastic();
  auto trial = run_trial(exp, 3, 0);
  REQUIRE(static_cast<int>(trial.estimates.size()) == exp.users);
  for (const auto& snap : trial.estimates) {
    CHECK(snap.k_hat >= 1);
    CHECK(snap.mu_hat.size() == size_t(exp.table.channels * exp.table.beta));
    int total = 0;
    for (int v : snap.f_star) total += v;
    CHECK(total == snap.k_hat);
  }
  Batch b;
  b.trials.push_back(trial);
  auto csv = estimates_csv(b);
  CHECK(csv.find("trial,user,k_hat,channel,occupancy,mu_hat,f_star") == 0);
}

TEST_CASE("adversarial trace runs export per-epoch learner state") {
  Experiment exp = small_adversarial();
  exp.record_rounds = true;
  exp.horizon = 400;  // 20 epochs of 20
  auto trial = run_trial(exp, 5, 0);
  REQUIRE(!trial.exp3_states.empty());
  // one row per (epoch, user, arm)
  CHECK(trial.exp3_states.size() == size_t(20 * exp.users * exp.channels));
  // probabilities in every snapshot sum to one
  double sum = 0.0;
  for (size_t i = 0; i < size_t(exp.channels); ++i) sum += trial.exp3_states[i].p;
  CHECK(sum == doctest::Approx(1.0));
  Batch b;
  b.trials.push_back(trial);
  CHECK(exp3_states_csv(b).find("trial,period,epoch,user,arm,p,gain") == 0);
}

TEST_CASE("stochastic phase arithmetic: estimation rows stop at the window end") {
  Experiment exp = small_stochastic();
  auto trial = run_trial(exp, 3, 0);
  long est_end = exp.stoch.estimation_rounds();
  REQUIRE(!trial.estimation.empty());
  for (const auto& row : trial.estimation) CHECK(row.t <= est_end);
  CHECK(trial.estimation.back().t == est_end);
  CHECK(trial.est_k_error_mean >= 0.0);
  CHECK(static_cast<int>(trial.k_hats.size()) == exp.users);
}

TEST_CASE("growing epochs sit on triangular boundaries") {
  // tau=100: epochs start at 0, 100, 300, 600, 1000, ...
  CHECK(dynamic_epoch_of(0, 100) == 0);
  CHECK(dynamic_epoch_of(99, 100) == 0);
  CHECK(dynamic_epoch_of(100, 100) == 1);
  CHECK(dynamic_epoch_of(299, 100) == 1);
  CHECK(dynamic_epoch_of(300, 100) == 2);
  CHECK(dynamic_epoch_of(599, 100) == 2);
  CHECK(dynamic_epoch_of(600, 100) == 3);
  CHECK(dynamic_epoch_of(999, 100) == 3);
  CHECK(dynamic_epoch_of(1000, 100) == 4);
}

TEST_CASE("doubling periods sit on geometric boundaries") {
  // tau=100, horizon 700: periods [0,100), [100,300), [300,700)
  CHECK(doubling_period_of(0, 100) == 0);
  CHECK(doubling_period_of(99, 100) == 0);
  CHECK(doubling_period_of(100, 100) == 1);
  CHECK(doubling_period_of(299, 100) == 1);
  CHECK(doubling_period_of(300, 100) == 2);
  CHECK(doubling_period_of(699, 100) == 2);
  CHECK(doubling_period_of(700, 100) == 3);
}

TEST_CASE("dynamic adversarial: a mid-period join spikes collisions then decays") {
  // Epochs are 64 rounds; once everyone has settled, the middle of an epoch is
  // collision-free. A user joining mid-epoch has to resolve against settled
  // incumbents, so its arrival window shows collisions that later mid-epoch
  // windows do not.
  Experiment exp;
  exp.scenario = Scenario::DynamicAdversarial;
  exp.channels = 4;
  exp.adversary = AdversaryModel::iid_uniform_floor(0.2, 1.0);
  exp.horizon = 4096;
  exp.tau = 4096;  // single period so the join is the only disturbance
  exp.checkpoints = 64;
  exp.record_rounds = true;
  exp.schedule.initial_users = 2;
  exp.schedule.horizon = exp.horizon;
  exp.schedule.events = {{2080, true, 2}};  // 32 rounds into epoch 32

  double before = 0, at = 0, after = 0;
  const int trials = 20;
  for (int i = 0; i < trials; ++i) {
    auto trial = run_trial(exp, 31 + i, 0);
    for (const auto& row : trial.rounds) {
      if (row.t >= 1632 && row.t < 1664) before += row.collided;  // mid epoch 25
      if (row.t >= 2080 && row.t < 2112) at += row.collided;      // arrival window
      if (row.t >= 2656 && row.t < 2688) after += row.collided;   // mid epoch 41
    }
  }
  CHECK(at > before + trials * 0.5);
  CHECK(at > after + trials * 0.5);
}

TEST_CASE("dynamic stochastic: empty schedule behaves like repeated static runs") {
  Experiment exp = small_stochastic();
  exp.scenario = Scenario::DynamicStochastic;
  exp.schedule.initial_users = 4;
  exp.schedule.horizon = exp.horizon = 2000;
  exp.tau = 940;  // >= estimation + n0 * (tx + tf_bound)
  auto trial = run_trial(exp, 8, 0);
  CHECK(trial.cp_t.back() == 2000);
  CHECK(std::isfinite(trial.final_cum_regret));
}

TEST_CASE("dynamic stochastic: tau below the phase minimum is a config error") {
  Experiment exp = small_stochastic();
  exp.scenario = Scenario::DynamicStochastic;
  exp.schedule.initial_users = 4;
  exp.schedule.horizon = exp.horizon = 2000;
  exp.tau = 100;
  CHECK_THROWS_AS(exp.validate(), ConfigError);
}

TEST_CASE("adversarial engine: two trials same seed identical, different seed not") {
  Experiment exp = small_adversarial();
  auto a = run_trial(exp, 4, 0);
  auto b = run_trial(exp, 4, 0);
  auto c = run_trial(exp, 5, 0);
  CHECK(a.cp_cum_regret == b.cp_cum_regret);
  CHECK(a.cp_cum_regret != c.cp_cum_regret);
}

TEST_CASE("adversarial single user equals the modified single-user cadence") {
  // K=1: settles in round one every epoch, so the epoch rewards it learns
  // from are exactly the averaged windows of the modified algorithm
  Experiment exp = small_adversarial();
  exp.users = 1;
  exp.record_rounds = true;
  exp.horizon = 2500;  // 50 epochs of 50
  auto trial = run_trial(exp, 21, 0);
  // never a collision
  for (const auto& row : trial.rounds) CHECK(!row.collided);
  // action constant within every epoch
  for (long e = 0; e < 50; ++e) {
    int first = trial.rounds[e * 50].action;
    for (long t = e * 50; t < (e + 1) * 50; ++t) CHECK(trial.rounds[t].action == first);
  }
}

TEST_CASE("doubling periods: geometric boundaries truncated at the horizon") {
  Experiment exp = small_adversarial();
  exp.scenario = Scenario::AdversarialDoubling;
  exp.tau = 100;
  exp.horizon = 700;
  exp.users = 2;
  exp.channels = 3;
  exp.record_rounds = true;
  auto trial = run_trial(exp, 6, 0);
  CHECK(trial.rounds.size() == 700u * 2);
  CHECK(std::isfinite(trial.final_cum_regret));
}

TEST_CASE("K > M adversarial is rejected") {
  Experiment exp = small_adversarial();
  exp.users = 9;
  CHECK_THROWS_AS(exp.validate(), ConfigError);
}
