#include "mub/engine.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <memory>
#include <sstream>

#include "mub/adv_agent.hpp"
#include "mub/agent.hpp"
#include "mub/errors.hpp"
#include "mub/stoch_agent.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace mub {

int Experiment::max_users() const {
  bool stoch_kind =
      scenario == Scenario::Stochastic || scenario == Scenario::DynamicStochastic;
  if (stoch_kind) return table.beta * table.channels;
  return channels;
}

void Experiment::validate() const {
  if (horizon < 1) throw ConfigError("experiment: horizon must be >= 1");
  switch (scenario) {
    case Scenario::Stochastic:
      table.validate();
      stoch.validate();
      if (users < 1) throw ConfigError("experiment: users must be >= 1");
      if (users > table.beta * table.channels)
        throw ConfigError("experiment: users exceed beta * channels");
      break;
    case Scenario::DynamicStochastic: {
      table.validate();
      stoch.validate();
      schedule.validate(table.beta * table.channels);
      if (tau < 1) throw ConfigError("experiment: dynamic epochs need tau >= 1");
      long tf = stoch.tf_bound > 0
                    ? stoch.tf_bound
                    : stoch.derive_tf_bound(std::max(2, schedule.initial_users));
      long need = stoch.estimation_rounds() + stoch.n0 * (stoch.tx + tf);
      if (tau < need) {
        std::ostringstream os;
        os << "experiment: tau=" << tau << " below the phase minimum " << need;
        throw ConfigError(os.str());
      }
      break;
    }
    case Scenario::Adversarial:
    case Scenario::AdversarialDoubling:
      if (channels < 2) throw ConfigError("experiment: adversarial channels must be >= 2");
      if (users < 1 || users > channels)
        throw ConfigError("experiment: adversarial runs need 1 <= users <= channels");
      if (scenario == Scenario::Adversarial && horizon < 4)
        throw ConfigError("experiment: adversarial horizon must be >= 4");
      if (scenario == Scenario::AdversarialDoubling && tau < 4)
        throw ConfigError("experiment: doubling needs tau >= 4");
      break;
    case Scenario::DynamicAdversarial:
      if (channels < 2) throw ConfigError("experiment: adversarial channels must be >= 2");
      schedule.validate(channels);
      if (schedule.user_count() > channels)
        throw ConfigError(
            "experiment: dynamic adversarial benchmark needs all user ids <= channels");
      if (tau < 4) throw ConfigError("experiment: doubling needs tau >= 4");
      break;
  }
}

namespace {

// ---------------------------------------------------------------------------
// shared helpers

struct CheckpointSink {
  long every = 1;
  Trial* out = nullptr;
  void maybe(long t, double primary, double secondary) {
    if ((t + 1) % every == 0 || t + 1 == horizon) {
      out->cp_t.push_back(t + 1);
      out->cp_cum_regret.push_back(primary);
      out->cp_cum_realized_regret.push_back(secondary);
    }
  }
  long horizon = 0;
};

// ---------------------------------------------------------------------------
// stochastic scenarios

struct StochRoster {
  std::vector<std::unique_ptr<AgentBase>> agents;  // slot per user id
  std::vector<int> active;                         // ascending user ids
};

void record_estimation_rows(Trial& trial, const Experiment& exp, long t,
                            const std::vector<int>& active,
                            const std::vector<std::unique_ptr<AgentBase>>& agents) {
  for (int u : active) {
    auto* sa = dynamic_cast<StochAgent*>(agents[u].get());
    if (!sa) continue;
    auto snap = sa->snapshot();
    EstimationRow row;
    row.t = t;
    row.user = u;
    row.k_hat = snap.k_hat;
    row.k_error = std::fabs(double(snap.k_hat - exp.users));
    row.mu_error = -1.0;
    if (snap.mu_ready)
      row.mu_error = estimation_errors(exp.table, exp.users, snap.k_hat, snap.mu_hat).mu_error;
    trial.estimation.push_back(row);
  }
}

Trial run_stochastic(const Experiment& exp, uint64_t trial_seed, long trial_index) {
  Trial trial;
  trial.index = trial_index;
  trial.seed = trial_seed;

  const int K = exp.users;
  StochasticEnv env(exp.table);
  Rng env_rng(env_seed(trial_seed));
  auto bench = stochastic_benchmark(exp.table, K);

  std::vector<std::unique_ptr<AgentBase>> agents;
  for (int u = 0; u < K; ++u)
    agents.push_back(std::make_unique<StochAgent>(exp.stoch, user_seed(trial_seed, u)));
  std::vector<int> active(K);
  for (int u = 0; u < K; ++u) active[u] = u;

  CheckpointSink sink{exp.checkpoint_every(), &trial, exp.horizon};
  const long est_end = exp.stoch.estimation_rounds();
  double cum = 0.0, cum_realized = 0.0;
  std::vector<int> actions(K);

  for (long t = 0; t < exp.horizon; ++t) {
    for (int u = 0; u < K; ++u) actions[u] = agents[u]->act();
    auto fb = env.step(actions, env_rng);
    double inst = stochastic_inst_regret(exp.table, bench, actions);
    cum += inst;
    double got = 0.0;
    for (int u = 0; u < K; ++u) got += fb.reward[u];
    cum_realized += bench.value - got;
    for (int u = 0; u < K; ++u) agents[u]->observe(fb.reward[u], fb.collided[u]);

    if (t + 1 < est_end && (t + 1) % sink.every == 0)
      record_estimation_rows(trial, exp, t + 1, active, agents);
    if (t + 1 == est_end) {
      record_estimation_rows(trial, exp, t + 1, active, agents);
      double ke = 0.0, me = 0.0;
      for (int u = 0; u < K; ++u) {
        auto* sa = static_cast<StochAgent*>(agents[u].get());
        const auto& est = *sa->estimates();
        auto errs = estimation_errors(exp.table, K, est.k_hat, est.mu_hat);
        ke += errs.k_error;
        me += errs.mu_error;
        trial.k_hats.push_back(est.k_hat);
        trial.any_backfilled |= !est.backfilled.empty();
        trial.estimates.push_back({u, est.k_hat, est.mu_hat, est.f_star});
      }
      trial.est_k_error_mean = ke / K;
      trial.est_mu_error_mean = me / K;
    }
    if (exp.record_rounds)
      for (int u = 0; u < K; ++u)
        trial.rounds.push_back({t, u, actions[u], fb.reward[u], fb.collided[u], cum});
    sink.maybe(t, cum, cum_realized);
  }
  for (int u = 0; u < K; ++u) {
    auto* sa = static_cast<StochAgent*>(agents[u].get());
    trial.any_unfixed_epoch |= sa->ever_unfixed_epoch();
  }
  trial.final_cum_regret = cum;
  return trial;
}

Trial run_dynamic_stochastic(const Experiment& exp, uint64_t trial_seed, long trial_index) {
  Trial trial;
  trial.index = trial_index;
  trial.seed = trial_seed;

  StochasticEnv env(exp.table);
  Rng env_rng(env_seed(trial_seed));
  std::map<int, StochasticBenchmark> bench_by_k;

  const int slots = exp.schedule.user_count();
  std::vector<std::unique_ptr<AgentBase>> agents(slots);
  std::vector<char> is_active(slots, 0);
  for (int u = 0; u < exp.schedule.initial_users; ++u) is_active[u] = 1;
  size_t next_event = 0;

  // confidence is halved every epoch; the estimation window grows by the
  // log-factor dictated by the sample-complexity formula, with the unknown
  // user count replaced by its cap beta*M
  const double lam = 2.0 * exp.table.channels * exp.table.beta * (exp.table.beta + 1) *
                     (exp.table.beta * exp.table.channels);
  auto epoch_cfg = [&](long r) {
    StochConfig cfg = exp.stoch;
    double base = std::log(lam / exp.stoch.delta);
    double scaled = std::log(lam * std::pow(2.0, double(r + 1)) / exp.stoch.delta);
    double scale = scaled / base;
    cfg.t0 = static_cast<long>(std::ceil(exp.stoch.t0 * scale));
    cfg.tc = static_cast<long>(std::ceil(exp.stoch.clustering_rounds() * scale));
    cfg.delta = exp.stoch.delta / std::pow(2.0, double(r + 1));
    return cfg;
  };

  CheckpointSink sink{exp.checkpoint_every(), &trial, exp.horizon};
  double cum = 0.0, cum_realized = 0.0;
  long epoch_r = -1;

  for (long t = 0; t < exp.horizon; ++t) {
    long r = dynamic_epoch_of(t, exp.tau);
    if (r != epoch_r) {
      epoch_r = r;
      StochConfig cfg = epoch_cfg(r);
      for (int u = 0; u < slots; ++u)
        if (is_active[u])
          agents[u] = std::make_unique<StochAgent>(
              cfg, mix(user_seed(trial_seed, u), static_cast<uint64_t>(r)));
    }
    while (next_event < exp.schedule.events.size() &&
           exp.schedule.events[next_event].t <= t) {
      const auto& ev = exp.schedule.events[next_event++];
      is_active[ev.user] = ev.join;
      if (ev.join)
        agents[ev.user] = std::make_unique<UniformAgent>(
            exp.table.channels,
            mix(user_seed(trial_seed, ev.user), static_cast<uint64_t>(epoch_r)));
      else
        agents[ev.user].reset();
    }

    std::vector<int> ids, actions;
    for (int u = 0; u < slots; ++u)
      if (is_active[u]) {
        ids.push_back(u);
        actions.push_back(agents[u]->act());
      }
    auto fb = env.step(actions, env_rng);
    int kt = static_cast<int>(ids.size());
    auto it = bench_by_k.find(kt);
    if (it == bench_by_k.end())
      it = bench_by_k.emplace(kt, stochastic_benchmark(exp.table, kt)).first;
    double inst = stochastic_inst_regret(exp.table, it->second, actions);
    cum += inst;
    double got = 0.0;
    for (double rwd : fb.reward) got += rwd;
    cum_realized += it->second.value - got;
    for (size_t i = 0; i < ids.size(); ++i)
      agents[ids[i]]->observe(fb.reward[i], fb.collided[i]);
    if (exp.record_rounds)
      for (size_t i = 0; i < ids.size(); ++i)
        trial.rounds.push_back({t, ids[i], actions[i], fb.reward[i], fb.collided[i], cum});
    sink.maybe(t, cum, cum_realized);
  }
  trial.final_cum_regret = cum;
  return trial;
}

// ---------------------------------------------------------------------------
// adversarial scenarios

struct AdvRegretTracker {
  std::vector<std::vector<double>> cum_tensor;  // per user, per channel
  double realized = 0.0;
  int users = 0;

  AdvRegretTracker(int user_slots, int channels)
      : cum_tensor(user_slots, std::vector<double>(channels, 0.0)), users(user_slots) {}

  double benchmark_regret() const {
    return adversarial_benchmark(cum_tensor, users) - realized;
  }
};

// Shared driver: period structure + schedule. Static known-horizon runs are a
// single period spanning the horizon.
Trial run_adversarial_any(const Experiment& exp, uint64_t trial_seed, long trial_index) {
  Trial trial;
  trial.index = trial_index;
  trial.seed = trial_seed;

  const int M = exp.channels;
  const bool dynamic = exp.scenario == Scenario::DynamicAdversarial;
  const bool doubling =
      exp.scenario == Scenario::AdversarialDoubling || dynamic;
  const int slots = dynamic ? exp.schedule.user_count() : exp.users;

  uint64_t adv_seed = env_seed(trial_seed);
  std::vector<std::unique_ptr<AdvAgent>> agents(slots);
  std::vector<char> is_active(slots, 0);
  if (dynamic) {
    for (int u = 0; u < exp.schedule.initial_users; ++u) is_active[u] = 1;
  } else {
    for (int u = 0; u < slots; ++u) is_active[u] = 1;
  }
  size_t next_event = 0;

  AdvRegretTracker tracker(slots, M);
  CheckpointSink sink{exp.checkpoint_every(), &trial, exp.horizon};

  long period_start = 0, period_len = doubling ? exp.tau : exp.horizon;
  long period_index = 0;
  EpochGrid grid = EpochGrid::make(period_len, exp.adv_y);
  auto make_agent = [&](int u) {
    return std::make_unique<AdvAgent>(
        M, grid, mix(user_seed(trial_seed, u), static_cast<uint64_t>(period_index)));
  };
  for (int u = 0; u < slots; ++u)
    if (is_active[u]) agents[u] = make_agent(u);

  std::vector<int> ids, actions;
  for (long t = 0; t < exp.horizon; ++t) {
    if (doubling && doubling_period_of(t, exp.tau) != period_index) {
      period_start += period_len;
      period_len *= 2;
      ++period_index;
      grid = EpochGrid::make(period_len, exp.adv_y);
      for (int u = 0; u < slots; ++u)
        if (is_active[u]) agents[u] = make_agent(u);
    }
    if (dynamic) {
      while (next_event < exp.schedule.events.size() &&
             exp.schedule.events[next_event].t <= t) {
        const auto& ev = exp.schedule.events[next_event++];
        is_active[ev.user] = ev.join;
        if (ev.join)
          agents[ev.user] = make_agent(ev.user);  // fresh state, current period
        else
          agents[ev.user].reset();
      }
    }

    ids.clear();
    actions.clear();
    long local_t = t - period_start;
    for (int u = 0; u < slots; ++u)
      if (is_active[u]) {
        agents[u]->sync(local_t);
        ids.push_back(u);
      }
    if (exp.record_rounds && local_t % grid.epoch_len == 0) {
      long e = grid.epoch_of(local_t);
      for (int u : ids) {
        const auto& learner = agents[u]->learner();
        for (int m = 0; m < M; ++m)
          trial.exp3_states.push_back(
              {period_index, e, u, m, learner.probabilities()[m], learner.gains()[m]});
      }
    }
    for (int u : ids) actions.push_back(agents[u]->act());
    auto fb = exp.adversary.step(adv_seed, t, M, ids, actions);
    for (size_t i = 0; i < ids.size(); ++i) {
      for (int m = 0; m < M; ++m)
        tracker.cum_tensor[ids[i]][m] += exp.adversary.reward(adv_seed, t, ids[i], m);
      tracker.realized += fb.reward[i];
      agents[ids[i]]->observe(fb.reward[i], fb.collided[i]);
    }

    bool at_cp = (t + 1) % sink.every == 0 || t + 1 == exp.horizon;
    if (at_cp || exp.record_rounds) {
      double regret = tracker.benchmark_regret();
      if (exp.record_rounds)
        for (size_t i = 0; i < ids.size(); ++i)
          trial.rounds.push_back(
              {t, ids[i], actions[i], fb.reward[i], fb.collided[i], regret});
      if (at_cp) {
        trial.cp_t.push_back(t + 1);
        trial.cp_cum_regret.push_back(regret);
        trial.cp_cum_realized_regret.push_back(regret);
      }
    }
  }
  trial.final_cum_regret = trial.cp_cum_regret.empty() ? 0.0 : trial.cp_cum_regret.back();
  return trial;
}

}  // namespace

long dynamic_epoch_of(long t, long tau) {
  long r = 0;
  while (tau * (r + 1) * (r + 2) / 2 <= t) ++r;
  return r;
}

long doubling_period_of(long t, long tau) {
  long p = 0, start = 0, len = tau;
  while (start + len <= t) {
    start += len;
    len *= 2;
    ++p;
  }
  return p;
}

Trial run_trial(const Experiment& exp, uint64_t root_seed, long trial_index) {
  uint64_t ts = trial_seed(root_seed, trial_index);
  switch (exp.scenario) {
    case Scenario::Stochastic:
      return run_stochastic(exp, ts, trial_index);
    case Scenario::DynamicStochastic:
      return run_dynamic_stochastic(exp, ts, trial_index);
    case Scenario::Adversarial:
    case Scenario::AdversarialDoubling:
    case Scenario::DynamicAdversarial:
      return run_adversarial_any(exp, ts, trial_index);
  }
  throw ConfigError("unknown scenario");
}

namespace {

Batch aggregate(std::vector<Trial> trials) {
  Batch batch;
  batch.trials = std::move(trials);
  if (batch.trials.empty()) return batch;
  batch.cp_t = batch.trials.front().cp_t;
  const size_t cps = batch.cp_t.size();
  batch.mean_cum_regret.assign(cps, 0.0);
  batch.stderr_cum_regret.assign(cps, 0.0);
  const double n = double(batch.trials.size());
  for (const auto& tr : batch.trials)
    for (size_t i = 0; i < cps; ++i) batch.mean_cum_regret[i] += tr.cp_cum_regret[i];
  for (size_t i = 0; i < cps; ++i) batch.mean_cum_regret[i] /= n;
  if (batch.trials.size() > 1) {
    for (const auto& tr : batch.trials)
      for (size_t i = 0; i < cps; ++i) {
        double d = tr.cp_cum_regret[i] - batch.mean_cum_regret[i];
        batch.stderr_cum_regret[i] += d * d;
      }
    for (size_t i = 0; i < cps; ++i)
      batch.stderr_cum_regret[i] = std::sqrt(batch.stderr_cum_regret[i] / (n * (n - 1)));
  }
  return batch;
}

}  // namespace

Batch run_batch_serial(const Experiment& exp, long trials, uint64_t root_seed) {
  if (trials < 1) throw ConfigError("run_batch: trials must be >= 1");
  exp.validate();
  std::vector<Trial> results(trials);
  for (long i = 0; i < trials; ++i) results[i] = run_trial(exp, root_seed, i);
  return aggregate(std::move(results));
}

Batch run_batch(const Experiment& exp, long trials, uint64_t root_seed, int parallelism) {
  if (parallelism <= 1) return run_batch_serial(exp, trials, root_seed);
  if (trials < 1) throw ConfigError("run_batch: trials must be >= 1");
  exp.validate();
  std::vector<Trial> results(trials);
  std::string failure;
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic, 1) num_threads(parallelism)
  for (long i = 0; i < trials; ++i) {
    try {
      results[i] = run_trial(exp, root_seed, i);
    } catch (const std::exception& e) {
#pragma omp critical
      failure = e.what();
    }
  }
  if (!failure.empty()) throw ContractViolation(failure);
  return aggregate(std::move(results));
#else
  return run_batch_serial(exp, trials, root_seed);
#endif
}

// ---------------------------------------------------------------------------
// CSV

namespace {

void fmt(std::ostringstream& os, double v) {
  char buf[40];
  snprintf(buf, sizeof buf, "%.10g", v);
  os << buf;
}

}  // namespace

std::string aggregate_csv(const Batch& batch) {
  std::ostringstream os;
  os << "t,mean_cum_regret,stderr\n";
  for (size_t i = 0; i < batch.cp_t.size(); ++i) {
    os << batch.cp_t[i] << ',';
    fmt(os, batch.mean_cum_regret[i]);
    os << ',';
    fmt(os, batch.stderr_cum_regret[i]);
    os << '\n';
  }
  return os.str();
}

std::string trace_csv(const Batch& batch) {
  std::ostringstream os;
  os << "trial,t,user,action,reward,collided,cum_regret_system\n";
  for (const auto& tr : batch.trials)
    for (const auto& row : tr.rounds) {
      os << tr.index << ',' << row.t << ',' << row.user << ',' << row.action << ',';
      fmt(os, row.reward);
      os << ',' << int(row.collided) << ',';
      fmt(os, row.cum_regret);
      os << '\n';
    }
  return os.str();
}

std::string estimation_csv(const Batch& batch) {
  std::ostringstream os;
  os << "trial,t,user,k_hat,k_error,mu_error\n";
  for (const auto& tr : batch.trials)
    for (const auto& row : tr.estimation) {
      os << tr.index << ',' << row.t << ',' << row.user << ',' << row.k_hat << ',';
      fmt(os, row.k_error);
      os << ',';
      fmt(os, row.mu_error);
      os << '\n';
    }
  return os.str();
}

std::string estimates_csv(const Batch& batch) {
  std::ostringstream os;
  os << "trial,user,k_hat,channel,occupancy,mu_hat,f_star\n";
  for (const auto& tr : batch.trials)
    for (const auto& snap : tr.estimates) {
      const int channels = static_cast<int>(snap.f_star.size());
      const int beta = channels > 0 ? static_cast<int>(snap.mu_hat.size()) / channels : 0;
      for (int m = 0; m < channels; ++m)
        for (int n = 1; n <= beta; ++n) {
          os << tr.index << ',' << snap.user << ',' << snap.k_hat << ',' << m << ',' << n
             << ',';
          fmt(os, snap.mu_hat[static_cast<size_t>(m) * beta + n - 1]);
          os << ',' << snap.f_star[m] << '\n';
        }
    }
  return os.str();
}

std::string exp3_states_csv(const Batch& batch) {
  std::ostringstream os;
  os << "trial,period,epoch,user,arm,p,gain\n";
  for (const auto& tr : batch.trials)
    for (const auto& row : tr.exp3_states) {
      os << tr.index << ',' << row.period << ',' << row.epoch << ',' << row.user << ','
         << row.arm << ',';
      fmt(os, row.p);
      os << ',';
      fmt(os, row.gain);
      os << '\n';
    }
  return os.str();
}

}  // namespace mub
