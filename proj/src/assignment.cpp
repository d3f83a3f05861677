#include "mub/assignment.hpp"

#include <limits>

#include "mub/errors.hpp"

namespace mub {

AssignmentResult max_assignment(const std::vector<std::vector<double>>& weight) {
  const int n = static_cast<int>(weight.size());
  if (n == 0) return {};
  const int m = static_cast<int>(weight[0].size());
  if (n > m) throw ContractViolation("max_assignment: more rows than columns");

  const double inf = std::numeric_limits<double>::infinity();
  // Hungarian on cost = -weight, 1-based with a virtual row/column 0
  std::vector<double> u(n + 1, 0.0), v(m + 1, 0.0), minv(m + 1);
  std::vector<int> match(m + 1, 0), way(m + 1, 0);
  for (int i = 1; i <= n; ++i) {
    match[0] = i;
    int j0 = 0;
    std::fill(minv.begin(), minv.end(), inf);
    std::vector<char> used(m + 1, 0);
    do {
      used[j0] = 1;
      int i0 = match[j0], j1 = -1;
      double delta = inf;
      for (int j = 1; j <= m; ++j) {
        if (used[j]) continue;
        double cur = -weight[i0 - 1][j - 1] - u[i0] - v[j];
        if (cur < minv[j]) {
          minv[j] = cur;
          way[j] = j0;
        }
        if (minv[j] < delta) {
          delta = minv[j];
          j1 = j;
        }
      }
      for (int j = 0; j <= m; ++j) {
        if (used[j]) {
          u[match[j]] += delta;
          v[j] -= delta;
        } else {
          minv[j] -= delta;
        }
      }
      j0 = j1;
    } while (match[j0] != 0);
    do {
      int j1 = way[j0];
      match[j0] = match[j1];
      j0 = j1;
    } while (j0 != 0);
  }

  AssignmentResult out;
  out.channel_of.assign(n, -1);
  for (int j = 1; j <= m; ++j) {
    if (match[j] != 0) {
      out.channel_of[match[j] - 1] = j - 1;
      out.value += weight[match[j] - 1][j - 1];
    }
  }
  return out;
}

}  // namespace mub
