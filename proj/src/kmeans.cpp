#include "mub/kmeans.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include "mub/errors.hpp"

namespace mub {

namespace {

// squared distance to the nearest centroid
double nearest_d2(double x, const std::vector<double>& c) {
  double best = std::numeric_limits<double>::max();
  for (double v : c) best = std::min(best, (x - v) * (x - v));
  return best;
}

}  // namespace

std::vector<double> cluster(const std::vector<double>& samples, int k, int restarts,
                            int max_iters, Rng& rng) {
  if (samples.empty()) throw ContractViolation("cluster: empty sample set");
  if (k < 1) throw ContractViolation("cluster: k must be >= 1");

  std::vector<double> xs = samples;
  std::sort(xs.begin(), xs.end());
  const int n = static_cast<int>(xs.size());

  std::vector<double> distinct = xs;
  distinct.erase(std::unique(distinct.begin(), distinct.end()), distinct.end());
  if (static_cast<int>(distinct.size()) <= k) {
    // every distinct value is its own centroid; pad with the smallest
    std::vector<double> out(distinct.rbegin(), distinct.rend());
    while (static_cast<int>(out.size()) < k) out.push_back(out.back());
    return out;
  }

  std::vector<double> best_c;
  double best_ss = std::numeric_limits<double>::max();
  std::vector<double> c, d2(n), sum(k), cnt(k);
  for (int r = 0; r < std::max(1, restarts); ++r) {
    // k-means++ seeding
    c.clear();
    c.push_back(xs[rng.uniform_int(n)]);
    while (static_cast<int>(c.size()) < k) {
      double tot = 0.0;
      for (int i = 0; i < n; ++i) {
        d2[i] = nearest_d2(xs[i], c);
        tot += d2[i];
      }
      if (tot <= 0.0) {
        c.push_back(xs[rng.uniform_int(n)]);
        continue;
      }
      double target = rng.uniform01() * tot, acc = 0.0;
      int pick = n - 1;
      for (int i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= target) {
          pick = i;
          break;
        }
      }
      c.push_back(xs[pick]);
    }
    std::sort(c.begin(), c.end());

    // Lloyd; in sorted 1-D the nearest-centroid partition is a set of
    // contiguous ranges, so a linear sweep assigns everything
    for (int it = 0; it < max_iters; ++it) {
      std::fill(sum.begin(), sum.end(), 0.0);
      std::fill(cnt.begin(), cnt.end(), 0.0);
      int j = 0;
      for (int i = 0; i < n; ++i) {
        while (j + 1 < k && std::fabs(xs[i] - c[j + 1]) <= std::fabs(xs[i] - c[j])) ++j;
        sum[j] += xs[i];
        cnt[j] += 1.0;
      }
      bool moved = false;
      for (int q = 0; q < k; ++q) {
        if (cnt[q] == 0.0) continue;  // empty cluster keeps its centroid
        double nc = sum[q] / cnt[q];
        if (nc != c[q]) moved = true;
        c[q] = nc;
      }
      std::sort(c.begin(), c.end());
      if (!moved) break;
    }

    double ss = 0.0;
    for (int i = 0; i < n; ++i) ss += nearest_d2(xs[i], c);
    if (ss < best_ss) {
      best_ss = ss;
      best_c = c;
    }
  }
  std::sort(best_c.rbegin(), best_c.rend());
  return best_c;
}

}  // namespace mub
