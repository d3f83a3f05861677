#include "mub/exp3p.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "mub/errors.hpp"

namespace mub {

long exp3p_min_epochs(int arms) {
  return static_cast<long>(std::ceil(1.1025 * arms * std::log(double(arms))));
}

Exp3P::Exp3P(int arms, long epochs) : arms_(arms) {
  if (arms < 2) throw ConfigError("exp3p: need at least 2 arms");
  if (epochs < 1) throw ConfigError("exp3p: need at least 1 epoch");
  double ln_m = std::log(double(arms));
  phi_ = std::sqrt(ln_m / (arms * double(epochs)));
  eta_ = 0.95 * phi_;
  gamma_ = 1.05 * std::sqrt(arms * ln_m / double(epochs));
  if (gamma_ > 1.0) {
    gamma_ = 1.0;
    gamma_clamped_ = true;
  }
  p_.assign(arms, 1.0 / arms);
  gains_.assign(arms, 0.0);
}

void Exp3P::update(int arm, double reward) {
  if (arm < 0 || arm >= arms_)
    throw ContractViolation("exp3p update: arm index out of range");
  if (!(reward >= 0.0 && reward <= 1.0)) {
    std::ostringstream os;
    os << "exp3p update: normalized reward " << reward << " outside [0,1]";
    throw ContractViolation(os.str());
  }
  for (int i = 0; i < arms_; ++i)
    gains_[i] += ((i == arm ? reward : 0.0) + phi_) / p_[i];
  recompute();
}

void Exp3P::set_gains(std::vector<double> gains) {
  gains_ = std::move(gains);
  recompute();
}

void Exp3P::recompute() {
  double top = *std::max_element(gains_.begin(), gains_.end());
  double z = 0.0;
  for (int i = 0; i < arms_; ++i) z += std::exp(eta_ * (gains_[i] - top));
  for (int i = 0; i < arms_; ++i)
    p_[i] = (1.0 - gamma_) * std::exp(eta_ * (gains_[i] - top)) / z + gamma_ / arms_;
}

SingleUserTrace run_modified_exp3p(int arms, const std::vector<long>& times, long horizon,
                                   const std::function<double(long, int)>& reward,
                                   Rng& rng) {
  if (times.empty()) throw ContractViolation("modified exp3p: no decision times");
  for (size_t j = 1; j < times.size(); ++j)
    if (times[j] <= times[j - 1])
      throw ContractViolation("modified exp3p: decision times must increase");
  if (times.back() >= horizon)
    throw ContractViolation("modified exp3p: decision times must precede the horizon");

  Exp3P learner(arms, static_cast<long>(times.size()));
  SingleUserTrace trace;
  for (size_t j = 0; j < times.size(); ++j) {
    int a = learner.sample(rng);
    long until = j + 1 < times.size() ? times[j + 1] : horizon;
    double sum = 0.0;
    for (long t = times[j]; t < until; ++t) sum += reward(t, a);
    double g = sum / double(until - times[j]);
    learner.update(a, g);
    trace.arm.push_back(a);
    trace.g.push_back(g);
    trace.total_reward += sum;
  }
  return trace;
}

}  // namespace mub
