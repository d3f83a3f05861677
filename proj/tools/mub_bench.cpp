// Compares the serial reference batch runner against the OpenMP one on a
// mid-size experiment and checks that they agree bit-for-bit.
#include <chrono>
#include <cstdio>

#include "mub/engine.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main() {
  mub::Experiment exp;
  exp.scenario = mub::Scenario::Adversarial;
  exp.channels = 7;
  exp.users = 4;
  exp.adversary = mub::AdversaryModel::iid_uniform_floor(0.2, 1.0);
  exp.horizon = 20000;
  exp.checkpoints = 100;

  const long trials = 24;
  const uint64_t seed = 7;

  auto t0 = Clock::now();
  auto serial = mub::run_batch_serial(exp, trials, seed);
  double ts = seconds_since(t0);

  int threads = 2;
#ifdef _OPENMP
  threads = omp_get_max_threads();
#endif
  t0 = Clock::now();
  auto parallel = mub::run_batch(exp, trials, seed, threads);
  double tp = seconds_since(t0);

  bool identical = serial.mean_cum_regret == parallel.mean_cum_regret &&
                   serial.stderr_cum_regret == parallel.stderr_cum_regret;
  printf("trials=%ld horizon=%ld users=%d channels=%d\n", trials, exp.horizon, exp.users,
         exp.channels);
  printf("serial:   %.3f s\n", ts);
  printf("parallel: %.3f s  (%d threads, speedup %.2fx)\n", tp, threads, ts / tp);
  printf("aggregates identical: %s\n", identical ? "yes" : "NO");
  return identical ? 0 : 1;
}
