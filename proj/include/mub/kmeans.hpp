#pragma once

#include <vector>

#include "mub/rng.hpp"

namespace mub {

// 1-D k-means: k-means++ seeding, Lloyd iterations, `restarts` independent
// starts, best inertia wins. Samples are sorted internally, so the result does
// not depend on input order. Returns k centroids sorted descending.
//
// Fewer distinct values than k: the distinct values become centroids and the
// list is padded by repeating the smallest one.
//
// Throws ContractViolation on empty input or k < 1.
std::vector<double> cluster(const std::vector<double>& samples, int k, int restarts,
                            int max_iters, Rng& rng);

inline std::vector<double> cluster(const std::vector<double>& samples, int k, Rng& rng) {
  return cluster(samples, k, 10, 100, rng);
}

}  // namespace mub
