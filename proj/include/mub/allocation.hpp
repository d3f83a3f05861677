#pragma once

#include <vector>

namespace mub {

// Occupancy vector maximizing sum_m f(m) * mu(m, f(m)) subject to
// sum f(m) = users, f(m) >= 0 integers.
//
// mu is row-major channels x occupancies; mu[m][n-1] is the mean at occupancy
// n, and occupancies past the last column pay zero. Dynamic program over
// channels; among maximizers the lexicographically smallest vector is
// returned, so every caller working from the same estimates lands on the same
// allocation.
std::vector<int> optimal_allocation(const std::vector<std::vector<double>>& mu, int users);

// total expected system reward of an occupancy vector under mu
double allocation_value(const std::vector<std::vector<double>>& mu,
                        const std::vector<int>& f);

}  // namespace mub
