#include <doctest.h>

#include <cmath>
#include <vector>

#include "mub/errors.hpp"
#include "mub/exp3p.hpp"

using namespace mub;

TEST_CASE("parameters follow the closed forms, including the experiment scale") {
  Exp3P e(7, 400);
  CHECK(e.phi() == doctest::Approx(0.026).epsilon(0.02));
  CHECK(e.eta() == doctest::Approx(0.025).epsilon(0.02));
  CHECK(e.gamma() == doctest::Approx(0.194).epsilon(0.01));
  CHECK(!e.gamma_clamped());
  // tiny epoch budgets push gamma past 1; it clamps
  Exp3P tiny(7, 4);
  CHECK(tiny.gamma() == 1.0);
  CHECK(tiny.gamma_clamped());
  CHECK(exp3p_min_epochs(7) == 16);  // ceil(1.1025 * 7 ln 7) = ceil(15.02)
}

TEST_CASE("fresh state samples uniformly") {
  Exp3P e(4, 100);
  Rng rng(5);
  std::vector<int> counts(4, 0);
  const int reps = 100000;
  for (int i = 0; i < reps; ++i) counts[e.sample(rng)]++;
  for (int c : counts) CHECK(std::fabs(c / double(reps) - 0.25) < 0.01);
}

TEST_CASE("degenerate probability vector always picks its arm") {
  Exp3P e(3, 100);
  // push one arm's gain far up: p concentrates to (1-gamma) + gamma/3 there
  e.set_gains({1000.0, 0.0, 0.0});
  Rng rng(6);
  int hits = 0;
  const int reps = 20000;
  for (int i = 0; i < reps; ++i) hits += e.sample(rng) == 0;
  double expect = (1.0 - e.gamma()) + e.gamma() / 3.0;
  CHECK(std::fabs(hits / double(reps) - expect) < 0.01);
}

TEST_CASE("zero reward still pays the exploration bonus evenly") {
  Exp3P e(4, 64);
  auto before = e.probabilities();
  e.update(2, 0.0);
  // every arm gained phi / (1/4) = 4 phi: p stays uniform
  for (int i = 0; i < 4; ++i) CHECK(e.probabilities()[i] == doctest::Approx(0.25));
  CHECK(before == std::vector<double>(4, 0.25));
  for (double g : e.gains()) CHECK(g == doctest::Approx(4.0 * e.phi()));
}

TEST_CASE("one-update regression value against an independent evaluation") {
  // M=2, n=4: phi = sqrt(ln2/8), eta = 0.95 phi, gamma = 1.05 sqrt(2 ln2 / 4).
  // After update(arm 0, g=1): G = ((1+phi)/0.5, phi/0.5) and
  // p(0) = (1-gamma) e^{eta G0} / (e^{eta G0} + e^{eta G1}) + gamma/2.
  Exp3P e(2, 4);
  const double phi = std::sqrt(std::log(2.0) / 8.0);
  const double eta = 0.95 * phi;
  const double gamma = 1.05 * std::sqrt(2.0 * std::log(2.0) / 4.0);
  CHECK(e.phi() == doctest::Approx(phi).epsilon(1e-12));
  CHECK(e.phi() == doctest::Approx(0.29435).epsilon(1e-4));
  CHECK(e.eta() == doctest::Approx(0.27964).epsilon(1e-4));
  CHECK(e.gamma() == doctest::Approx(gamma).epsilon(1e-12));

  e.update(0, 1.0);
  double g0 = (1.0 + phi) / 0.5, g1 = phi / 0.5;
  double z = std::exp(eta * g0) + std::exp(eta * g1);
  double expect_p0 = (1.0 - gamma) * std::exp(eta * g0) / z + gamma / 2.0;
  CHECK(e.gains()[0] == doctest::Approx(g0).epsilon(1e-12));
  CHECK(e.gains()[1] == doctest::Approx(g1).epsilon(1e-12));
  CHECK(e.probabilities()[0] == doctest::Approx(expect_p0).epsilon(1e-12));
  // frozen regression constant from the evaluation above
  CHECK(e.probabilities()[0] == doctest::Approx(0.5520412).epsilon(1e-6));
}

TEST_CASE("update contract: rewards outside [0,1] are violations") {
  Exp3P e(3, 100);
  CHECK_THROWS_AS(e.update(0, 1.5), ContractViolation);
  CHECK_THROWS_AS(e.update(0, -0.1), ContractViolation);
  CHECK_THROWS_AS(e.update(7, 0.5), ContractViolation);
}

TEST_CASE("invariants under fuzzed updates") {
  Exp3P e(5, 2000);
  Rng rng(99);
  for (int i = 0; i < 20000; ++i) {
    e.update(rng.uniform_int(5), rng.uniform01());
    const auto& p = e.probabilities();
    double sum = 0.0;
    for (double v : p) {
      sum += v;
      CHECK(v >= e.gamma() / 5.0 - 1e-12);
    }
    CHECK(std::fabs(sum - 1.0) <= 1e-9);
  }
}

TEST_CASE("softmax shift invariance is exact on exactly-representable gains") {
  Exp3P a(4, 100), b(4, 100);
  a.set_gains({3.0, 17.0, 5.0, 11.0});
  b.set_gains({3.0 + 64.0, 17.0 + 64.0, 5.0 + 64.0, 11.0 + 64.0});
  CHECK(a.probabilities() == b.probabilities());
  // equal gains give the exact uniform vector
  Exp3P c(4, 100);
  c.set_gains({9.0, 9.0, 9.0, 9.0});
  for (double p : c.probabilities()) CHECK(p == doctest::Approx(0.25).epsilon(1e-15));
}

TEST_CASE("modified driver: constant best arm dominates the final quartile") {
  // arm 0 pays 1, others 0; n = 2000 unit-gap decisions
  std::vector<long> times(2000);
  for (long j = 0; j < 2000; ++j) times[j] = j;
  Rng rng(7);
  auto trace = run_modified_exp3p(
      3, times, 2000, [](long, int arm) { return arm == 0 ? 1.0 : 0.0; }, rng);
  int hits = 0, total = 0;
  for (size_t j = trace.arm.size() * 3 / 4; j < trace.arm.size(); ++j) {
    hits += trace.arm[j] == 0;
    ++total;
  }
  CHECK(double(hits) / total > 0.8);
}

TEST_CASE("modified driver: held arms average their reward window") {
  // decisions at 0 and 10, horizon 20: second window averages rounds 10..19
  std::vector<long> times = {0, 10};
  Rng rng(8);
  auto trace = run_modified_exp3p(
      2, times, 20, [](long t, int) { return t < 10 ? 1.0 : 0.5; }, rng);
  CHECK(trace.g[0] == doctest::Approx(1.0));
  CHECK(trace.g[1] == doctest::Approx(0.5));
  CHECK(trace.total_reward == doctest::Approx(15.0));
}

TEST_CASE("modified driver rejects non-increasing decision times") {
  Rng rng(9);
  CHECK_THROWS_AS(
      run_modified_exp3p(2, {0, 5, 5}, 10, [](long, int) { return 0.0; }, rng),
      ContractViolation);
}
