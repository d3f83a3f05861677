#include "mub/allocation.hpp"

#include <limits>

#include "mub/errors.hpp"

namespace mub {

namespace {

inline double occ_value(const std::vector<double>& row, int j) {
  if (j < 1) return 0.0;
  if (j > static_cast<int>(row.size())) return 0.0;
  return j * row[j - 1];
}

}  // namespace

double allocation_value(const std::vector<std::vector<double>>& mu,
                        const std::vector<int>& f) {
  // summed back to front so ties resolve identically to the DP
  double v = 0.0;
  for (int m = static_cast<int>(f.size()) - 1; m >= 0; --m)
    v = occ_value(mu[m], f[m]) + v;
  return v;
}

std::vector<int> optimal_allocation(const std::vector<std::vector<double>>& mu, int users) {
  const int m_count = static_cast<int>(mu.size());
  if (m_count < 1) throw ContractViolation("optimal_allocation: no channels");
  if (users < 1) throw ContractViolation("optimal_allocation: users must be >= 1");

  // suffix[m][k] = best value over channels m.. with exactly k users
  std::vector<std::vector<double>> suffix(m_count + 1,
                                          std::vector<double>(users + 1, 0.0));
  for (int k = 1; k <= users; ++k)
    suffix[m_count][k] = -std::numeric_limits<double>::infinity();
  for (int m = m_count - 1; m >= 0; --m) {
    for (int k = 0; k <= users; ++k) {
      double best = -std::numeric_limits<double>::infinity();
      for (int j = 0; j <= k; ++j) {
        double v = occ_value(mu[m], j) + suffix[m + 1][k - j];
        if (v > best) best = v;
      }
      suffix[m][k] = best;
    }
  }

  // walk forward taking the smallest per-channel count that stays optimal;
  // this yields the lexicographically smallest maximizer
  std::vector<int> f(m_count, 0);
  int remaining = users;
  for (int m = 0; m < m_count; ++m) {
    for (int j = 0; j <= remaining; ++j) {
      if (occ_value(mu[m], j) + suffix[m + 1][remaining - j] == suffix[m][remaining]) {
        f[m] = j;
        remaining -= j;
        break;
      }
    }
  }
  return f;
}

}  // namespace mub
