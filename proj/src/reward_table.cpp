#include "mub/reward_table.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mub/errors.hpp"

namespace mub {

double RewardTable::uniform_halfwidth() const { return std::sqrt(3.0 * variance); }

double RewardTable::draw(int channel, int occupancy, Rng& rng) const {
  if (occupancy > beta + 1) return 0.0;
  double mu = mean_at(channel, occupancy);
  double x;
  if (dist == DistKind::Uniform) {
    double hw = uniform_halfwidth();
    x = mu + (2.0 * rng.uniform01() - 1.0) * hw;
  } else {
    x = mu + std::sqrt(variance) * rng.normal01();
  }
  return std::min(1.0, std::max(0.0, x));
}

namespace {

double norm_pdf(double z) { return std::exp(-0.5 * z * z) / 2.5066282746310005024; }
double norm_cdf(double z) { return 0.5 * std::erfc(-z / 1.4142135623730950488); }

// E[min(1, max(0, X))] for X uniform on [mu-hw, mu+hw]
double clamped_uniform_mean(double mu, double hw) {
  if (hw <= 0.0) return std::min(1.0, std::max(0.0, mu));
  double m = mu;
  double lo = mu - hw, hi = mu + hw;
  if (lo < 0.0) m += lo * lo / (4.0 * hw);
  if (hi > 1.0) m -= (hi - 1.0) * (hi - 1.0) / (4.0 * hw);
  // fully outside support
  if (hi <= 0.0) return 0.0;
  if (lo >= 1.0) return 1.0;
  return m;
}

// E[min(1, max(0, X))] for X ~ N(mu, sigma^2), censored at both ends
double clamped_normal_mean(double mu, double sigma) {
  if (sigma <= 0.0) return std::min(1.0, std::max(0.0, mu));
  double a = (0.0 - mu) / sigma, b = (1.0 - mu) / sigma;
  double mid = mu * (norm_cdf(b) - norm_cdf(a)) - sigma * (norm_pdf(b) - norm_pdf(a));
  return mid + (1.0 - norm_cdf(b));
}

}  // namespace

double RewardTable::effective_mean(int channel, int occupancy) const {
  if (occupancy < 1 || occupancy > beta + 1) return 0.0;
  double mu = mean_at(channel, occupancy);
  if (dist == DistKind::Uniform) return clamped_uniform_mean(mu, uniform_halfwidth());
  return clamped_normal_mean(mu, std::sqrt(variance));
}

void RewardTable::validate() const {
  if (channels < 1) throw ConfigError("reward table: channels must be >= 1");
  if (beta < 1) throw ConfigError("reward table: beta must be >= 1");
  if (variance < 0.0) throw ConfigError("reward table: variance must be >= 0");
  if (means.size() != static_cast<size_t>(channels) * (beta + 1))
    throw ConfigError("reward table: means must be channels x (beta+1)");
  for (int m = 0; m < channels; ++m) {
    for (int n = 1; n <= beta + 1; ++n) {
      double mu = mean_at(m, n);
      if (mu < 0.0 || mu > 1.0) {
        std::ostringstream os;
        os << "reward table: mean(" << m << "," << n << ")=" << mu << " outside [0,1]";
        throw ConfigError(os.str());
      }
      if (n > 1 && mu >= mean_at(m, n - 1)) {
        std::ostringstream os;
        os << "reward table: means on channel " << m
           << " must strictly decrease in occupancy (occupancy " << n << ")";
        throw ConfigError(os.str());
      }
    }
  }
}

std::vector<std::string> RewardTable::warnings() const {
  std::vector<std::string> out;
  double hw = dist == DistKind::Uniform ? uniform_halfwidth() : 3.0 * std::sqrt(variance);
  for (int m = 0; m < channels; ++m) {
    for (int n = 1; n <= beta + 1; ++n) {
      double mu = mean_at(m, n);
      if (mu - hw < 0.0 || mu + hw > 1.0) {
        std::ostringstream os;
        os << "noise support of mean(" << m << "," << n << ")=" << mu
           << " leaves [0,1]; draws are clamped and the realized mean is "
           << effective_mean(m, n);
        out.push_back(os.str());
      }
    }
  }
  return out;
}

SeparabilityReport check_separability(const RewardTable& table, int users, double c,
                                      double epsilon2) {
  if (table.channels < 2) throw ConfigError("check_separability needs at least 2 channels");
  SeparabilityReport rep;
  rep.c = c;
  rep.epsilon2 = epsilon2;
  const int m_count = table.channels;
  rep.threshold = 4.0 * m_count * c *
                  std::exp(double(users - 1) / double(m_count - 1)) *
                  std::sqrt(table.variance + epsilon2);
  rep.worst_gap = 2.0;  // larger than any gap of [0,1] means
  for (int m = 0; m < m_count; ++m) {
    for (int r = 1; r <= table.beta; ++r) {
      for (int s = r + 1; s <= table.beta; ++s) {
        double gap = std::fabs(table.mean_at(m, r) - table.mean_at(m, s));
        if (gap < rep.worst_gap) {
          rep.worst_gap = gap;
          rep.worst_channel = m;
          rep.worst_r = r;
          rep.worst_s = s;
        }
      }
    }
  }
  if (rep.worst_channel < 0) {
    // beta == 1: no occupancy pair to separate, condition holds vacuously
    rep.satisfied = true;
    return rep;
  }
  rep.satisfied = rep.worst_gap >= rep.threshold;
  return rep;
}

}  // namespace mub
