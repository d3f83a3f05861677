#include "mub/metrics.hpp"

#include <algorithm>
#include <cmath>

#include "mub/allocation.hpp"
#include "mub/assignment.hpp"
#include "mub/errors.hpp"

namespace mub {

StochasticBenchmark stochastic_benchmark(const RewardTable& table, int users) {
  std::vector<std::vector<double>> mu_eff(table.channels);
  for (int m = 0; m < table.channels; ++m) {
    mu_eff[m].resize(table.beta + 1);
    for (int n = 1; n <= table.beta + 1; ++n) mu_eff[m][n - 1] = table.effective_mean(m, n);
  }
  StochasticBenchmark b;
  b.f_star = optimal_allocation(mu_eff, users);
  b.value = allocation_value(mu_eff, b.f_star);
  return b;
}

double stochastic_inst_regret(const RewardTable& table, const StochasticBenchmark& bench,
                              const std::vector<int>& actions) {
  std::vector<int> occ(table.channels, 0);
  for (int a : actions) occ[a]++;
  double got = 0.0;
  for (int a : actions) got += table.effective_mean(a, occ[a]);
  return bench.value - got;
}

RegretSeries stochastic_regret(const RewardTable& table,
                               const std::vector<std::vector<int>>& actions_per_round) {
  RegretSeries s;
  s.benchmark = "expected-reward optimal allocation";
  if (actions_per_round.empty()) return s;
  auto bench = stochastic_benchmark(table, static_cast<int>(actions_per_round[0].size()));
  double cum = 0.0;
  for (const auto& actions : actions_per_round) {
    double r = stochastic_inst_regret(table, bench, actions);
    cum += r;
    s.inst.push_back(r);
    s.cum.push_back(cum);
  }
  return s;
}

double adversarial_benchmark(const std::vector<std::vector<double>>& cumulative, int users) {
  if (static_cast<int>(cumulative.size()) < users)
    throw ContractViolation("adversarial benchmark: tensor rows < users");
  if (users > static_cast<int>(cumulative[0].size()))
    throw ContractViolation("adversarial benchmark: more users than channels");
  std::vector<std::vector<double>> rows(cumulative.begin(), cumulative.begin() + users);
  return max_assignment(rows).value;
}

RegretSeries adversarial_regret(const std::vector<std::vector<std::vector<double>>>& tensor,
                                const std::vector<std::vector<int>>& actions_per_round) {
  RegretSeries s;
  s.benchmark = "best fixed user-channel matching in hindsight";
  if (actions_per_round.empty()) return s;
  const int users = static_cast<int>(actions_per_round[0].size());
  const int channels = static_cast<int>(tensor[0][0].size());
  std::vector<std::vector<double>> cum_tensor(users, std::vector<double>(channels, 0.0));
  double realized = 0.0, prev_cum = 0.0;
  std::vector<int> occ(channels);
  for (size_t t = 0; t < actions_per_round.size(); ++t) {
    const auto& actions = actions_per_round[t];
    std::fill(occ.begin(), occ.end(), 0);
    for (int a : actions) occ[a]++;
    for (int k = 0; k < users; ++k) {
      for (int m = 0; m < channels; ++m) cum_tensor[k][m] += tensor[t][k][m];
      if (occ[actions[k]] == 1) realized += tensor[t][k][actions[k]];
    }
    double cum = adversarial_benchmark(cum_tensor, users) - realized;
    s.inst.push_back(cum - prev_cum);
    s.cum.push_back(cum);
    prev_cum = cum;
  }
  return s;
}

EstimationErrors estimation_errors(const RewardTable& table, int true_users, int k_hat,
                                   const std::vector<double>& mu_hat) {
  EstimationErrors e;
  e.k_error = std::fabs(double(k_hat - true_users));
  for (int m = 0; m < table.channels; ++m)
    for (int n = 1; n <= table.beta; ++n) {
      double est = mu_hat[static_cast<size_t>(m) * table.beta + n - 1];
      e.mu_error = std::max(e.mu_error, std::fabs(est - table.effective_mean(m, n)));
    }
  return e;
}

double linear_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const size_t n = x.size();
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  for (size_t i = 0; i < n; ++i) {
    sx += x[i];
    sy += y[i];
    sxx += x[i] * x[i];
    sxy += x[i] * y[i];
  }
  double denom = n * sxx - sx * sx;
  return denom != 0.0 ? (n * sxy - sx * sy) / denom : 0.0;
}

GrowthFit growth_exponent(const std::vector<double>& t, const std::vector<double>& r) {
  GrowthFit fit;
  std::vector<double> lx, ly;
  for (size_t i = 0; i < t.size(); ++i) {
    if (t[i] > 0.0 && r[i] > 0.0) {
      lx.push_back(std::log(t[i]));
      ly.push_back(std::log(r[i]));
    }
  }
  fit.points_used = static_cast<int>(lx.size());
  if (fit.points_used < 5) return fit;  // not enough signal, flag and skip
  fit.slope = linear_slope(lx, ly);
  double my = 0.0;
  for (double v : ly) my += v;
  my /= ly.size();
  double mx = 0.0;
  for (double v : lx) mx += v;
  mx /= lx.size();
  double ss_res = 0.0, ss_tot = 0.0, intercept = my - fit.slope * mx;
  for (size_t i = 0; i < lx.size(); ++i) {
    double pred = intercept + fit.slope * lx[i];
    ss_res += (ly[i] - pred) * (ly[i] - pred);
    ss_tot += (ly[i] - my) * (ly[i] - my);
  }
  fit.r2 = ss_tot > 0.0 ? 1.0 - ss_res / ss_tot : 1.0;
  fit.ok = true;
  return fit;
}

}  // namespace mub
