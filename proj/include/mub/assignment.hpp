#pragma once

#include <vector>

namespace mub {

struct AssignmentResult {
  double value = 0.0;
  std::vector<int> channel_of;  // per user, assigned column
};

// Maximum-weight one-to-one assignment of rows (users) to columns (channels),
// rows <= columns required. Hungarian algorithm with potentials, O(rows^2 cols).
AssignmentResult max_assignment(const std::vector<std::vector<double>>& weight);

}  // namespace mub
