#pragma once

#include <cmath>
#include <stdexcept>

namespace stac {

/// Step-size schedules for the momentum trainer:
///   eta_k  = eta_scale  * (1+k)^{-1/2}   (actor)
///   beta_k = beta_scale * (1+k)^{-1/2}   (critic)
///   nu_k   = (1 + nu_rate * k)^{-1}      (momentum)
/// All three are nonincreasing and lie in (0, 1] for scales <= 1. nu_rate
/// may be zero, which pins nu at 1 and degenerates the momentum estimator
/// to the plain per-sample bootstrap error.
struct StepSchedules {
  double eta_scale = 1.0;
  double beta_scale = 1.0;
  double nu_rate = 0.001;

  double eta(long k) const { return eta_scale / std::sqrt(1.0 + double(k)); }
  double beta(long k) const { return beta_scale / std::sqrt(1.0 + double(k)); }
  double nu(long k) const { return 1.0 / (1.0 + nu_rate * double(k)); }

  void validate() const {
    if (!(eta_scale > 0.0) || !std::isfinite(eta_scale))
      throw std::invalid_argument("StepSchedules: eta_scale must be positive");
    if (!(beta_scale > 0.0) || !std::isfinite(beta_scale))
      throw std::invalid_argument("StepSchedules: beta_scale must be positive");
    if (!(nu_rate >= 0.0) || !std::isfinite(nu_rate))
      throw std::invalid_argument("StepSchedules: nu_rate must be nonnegative");
  }
};

}  // namespace stac
