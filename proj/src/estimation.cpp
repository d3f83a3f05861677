#include "mub/estimation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mub/allocation.hpp"
#include "mub/errors.hpp"
#include "mub/kmeans.hpp"

namespace mub {

long StochConfig::derive_tf_bound(int k_hat) const {
  double expected = channels * std::exp(double(k_hat - 1) / double(channels - 1));
  return static_cast<long>(std::ceil(expected * (1.0 + std::log(k_hat / delta))));
}

void StochConfig::validate() const {
  if (channels < 2) throw ConfigError("stoch config: channels must be >= 2");
  if (beta < 1) throw ConfigError("stoch config: beta must be >= 1");
  if (t0 < 1) throw ConfigError("stoch config: t0 must be >= 1");
  if (tx < 1) throw ConfigError("stoch config: tx must be >= 1");
  if (n0 < 2) throw ConfigError("stoch config: n0 must be >= 2");
  if (delta <= 0.0 || delta >= 1.0) throw ConfigError("stoch config: delta must be in (0,1)");
  if (epsilon <= 0.0) throw ConfigError("stoch config: epsilon must be > 0");
}

int estimate_k(long collisions, long rounds, int channels, int beta) {
  if (collisions >= rounds) return beta * channels;
  if (collisions <= 0) return 1;
  double ratio = std::log(double(rounds - collisions) / double(rounds)) /
                 std::log(1.0 - 1.0 / channels);
  long k = 1 + std::lround(ratio);
  k = std::max<long>(k, 1);
  k = std::min<long>(k, static_cast<long>(beta) * channels);
  return static_cast<int>(k);
}

std::vector<double> collision_occupancy_weights(int k, int channels) {
  // P(occupancy = j | my channel collided) for a round where all k users
  // sample uniformly: Binomial(k-1, 1/M) over the other users, j >= 2
  std::vector<double> w;
  if (k < 2) return w;
  double p = 1.0 / channels;
  double total = 0.0;
  for (int j = 2; j <= k; ++j) {
    double logc = std::lgamma(k) - std::lgamma(j) - std::lgamma(k - j + 1);
    double term = std::exp(logc + (j - 1) * std::log(p) + (k - j) * std::log1p(-p));
    w.push_back(term);
    total += term;
  }
  for (double& v : w) v /= total;
  return w;
}

std::vector<double> sliced_means(const std::vector<double>& samples,
                                 const std::vector<double>& weights, int slices) {
  if (samples.empty()) throw ContractViolation("sliced_means: empty sample set");
  if (slices < 1 || slices > static_cast<int>(weights.size()))
    throw ContractViolation("sliced_means: bad slice count");
  double wtot = 0.0;
  for (double w : weights) wtot += w;

  std::vector<double> xs = samples;
  std::sort(xs.rbegin(), xs.rend());
  const int n = static_cast<int>(xs.size());

  std::vector<double> out;
  out.reserve(slices);
  int lo = 0;
  double cum = 0.0;
  for (int s = 0; s < slices; ++s) {
    cum += weights[s] / wtot;
    int b = std::min(n, static_cast<int>(std::lround(cum * n)));
    if (b <= lo) b = std::min(n, lo + 1);

    // Decisive-gap snap: the expected-count boundary is noisy, but when the
    // neighboring occupancy groups are separated the sorted values show one
    // dominant gap near it. Snap only when that gap clearly dominates the
    // local spacing; inside an unseparated blob the expected count stands.
    int halfwin =
        std::max(2, static_cast<int>(std::lround(3.0 * std::sqrt(n * cum * (1.0 - cum)))));
    int blo = std::max(lo + 1, b - halfwin);
    int bhi = std::min(n - 1, b + halfwin);
    if (bhi > blo) {
      int argmax = blo;
      double gmax = -1.0;
      for (int i = blo; i <= bhi; ++i) {
        double g = xs[i - 1] - xs[i];
        if (g > gmax) {
          gmax = g;
          argmax = i;
        }
      }
      double g2 = -1.0;
      std::vector<double> gaps;
      gaps.reserve(bhi - blo + 1);
      for (int i = blo; i <= bhi; ++i) {
        double g = xs[i - 1] - xs[i];
        gaps.push_back(g);
        if (i != argmax && g > g2) g2 = g;
      }
      std::nth_element(gaps.begin(), gaps.begin() + gaps.size() / 2, gaps.end());
      double med = gaps[gaps.size() / 2];
      double range = xs[blo - 1] - xs[bhi];
      bool decisive = gmax > 0.0 && (med <= 0.0 || gmax >= 8.0 * med) &&
                      (g2 <= 0.0 || gmax >= 3.0 * g2) &&
                      (range <= 0.0 || gmax >= 0.25 * range);
      if (decisive) b = argmax;
    }

    if (b > lo && xs[lo] == xs[b - 1]) {
      out.push_back(xs[lo]);  // constant slice: keep the value bit-exact
    } else {
      double sum = 0.0;
      for (int i = lo; i < b; ++i) sum += xs[i];
      out.push_back(b > lo ? sum / (b - lo) : xs[std::min(lo, n - 1)]);
    }
    lo = b;
  }
  return out;
}

int Estimates::classify_occupancy(int channel, double reward) const {
  int best_n = 1;
  double best_d = std::fabs(reward - mu(channel, 1));
  for (int n = 2; n <= beta + 1; ++n) {
    double target = n <= beta ? mu(channel, n) : 0.0;
    double d = std::fabs(reward - target);
    if (d < best_d) {
      best_d = d;
      best_n = n;
    }
  }
  return best_n;
}

Estimates build_estimates(const EstimationState& est, const StochConfig& cfg, Rng& rng) {
  const int m_count = est.channels;
  Estimates out;
  out.channels = m_count;
  out.beta = cfg.beta;
  out.mu_hat.assign(static_cast<size_t>(m_count) * cfg.beta, 0.0);

  std::vector<int> never_alone;
  for (int m = 0; m < m_count; ++m)
    if (est.singleton_count[m] == 0) never_alone.push_back(m);
  if (!never_alone.empty()) {
    std::ostringstream os;
    os << never_alone.size() << " channel(s) never observed collision-free";
    throw EstimateIncomplete(os.str(), never_alone);
  }

  out.k_hat = estimate_k(est.collisions, est.rounds, m_count, cfg.beta);

  for (int m = 0; m < m_count; ++m)
    out.mu_hat[static_cast<size_t>(m) * cfg.beta] =
        est.singleton_sum[m] / est.singleton_count[m];

  if (out.k_hat > m_count && cfg.beta >= 2) {
    auto weights = collision_occupancy_weights(out.k_hat, m_count);
    for (int m = 0; m < m_count; ++m) {
      const auto& pool = est.pool[m];
      if (static_cast<int>(pool.size()) < cfg.beta - 1) {
        // too thin to slice: interpolate between mu(m,1) and 0 at beta+1
        double mu1 = out.mu_hat[static_cast<size_t>(m) * cfg.beta];
        for (int n = 2; n <= cfg.beta; ++n)
          out.mu_hat[static_cast<size_t>(m) * cfg.beta + n - 1] =
              mu1 * double(cfg.beta + 1 - n) / double(cfg.beta);
        out.backfilled.push_back(m);
        continue;
      }
      std::vector<double> level;
      if (cfg.estimator == MeanEstimator::WeightedSlices) {
        level = sliced_means(pool, weights, cfg.beta - 1);
      } else {
        // k-means over all occupancy groups present in the pool (2..beta+1
        // plus the zero overflow); the top beta-1 centroids by rank are the
        // occupancy 2..beta means
        level = cluster(pool, cfg.beta, cfg.cluster_restarts, cfg.cluster_max_iters, rng);
        level.resize(cfg.beta - 1);
      }
      for (int n = 2; n <= cfg.beta; ++n)
        out.mu_hat[static_cast<size_t>(m) * cfg.beta + n - 1] = level[n - 2];
    }
    // decreasing means: enforce strict ordering where noise inverted neighbors
    for (int m = 0; m < m_count; ++m)
      for (int n = 2; n <= cfg.beta; ++n) {
        double& cur = out.mu_hat[static_cast<size_t>(m) * cfg.beta + n - 1];
        double prev = out.mu_hat[static_cast<size_t>(m) * cfg.beta + n - 2];
        if (cur > prev) cur = prev;
      }
  }

  std::vector<std::vector<double>> mu_rows(m_count);
  for (int m = 0; m < m_count; ++m) {
    mu_rows[m].resize(cfg.beta);
    for (int n = 1; n <= cfg.beta; ++n) mu_rows[m][n - 1] = out.mu(m, n);
  }
  out.f_star = optimal_allocation(mu_rows, out.k_hat);
  int fmax = 0, fsum = 0;
  for (int v : out.f_star) {
    fmax = std::max(fmax, v);
    fsum += v;
  }
  out.rotation_feasible = 2 * fmax <= fsum;
  return out;
}

}  // namespace mub
