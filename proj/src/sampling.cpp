#include "stac/sampling.hpp"

#include <cmath>
#include <stdexcept>

namespace stac {

namespace {

// Smallest index i with cumsum(row)_i > u; clamps to the last index so a
// row summing to slightly less than 1 cannot fall off the end.
template <typename Row>
int inverse_cdf(const Row& row, double u) {
  double cum = 0.0;
  const int n = static_cast<int>(row.size());
  for (int i = 0; i < n; ++i) {
    cum += row(i);
    if (u < cum) return i;
  }
  return n - 1;
}

long occupancy_step_cap(double gamma) {
  const double horizon = std::ceil(1.0 / (1.0 - gamma));
  return static_cast<long>(std::ceil(10.0 * horizon * std::log(1e12)));
}

}  // namespace

int sample_occupancy_state(const TabularMdp& mdp, const PolicyMatrix& policy,
                           RngStream& rng, bool* forced_stop) {
  int s = inverse_cdf(mdp.initial_dist, rng.uniform01());
  const long cap = occupancy_step_cap(mdp.gamma);
  for (long step = 0; step < cap; ++step) {
    if (rng.uniform01() >= mdp.gamma) return s;  // stop with probability 1-gamma
    const int a = sample_action(policy, s, rng);
    s = sample_next_state(mdp, s, a, rng);
  }
  if (forced_stop != nullptr) *forced_stop = true;
  return s;
}

int sample_action(const PolicyMatrix& policy, int s, RngStream& rng) {
  if (s < 0 || s >= policy.probs.rows())
    throw std::invalid_argument("sample_action: state index out of range");
  return inverse_cdf(policy.probs.row(s), rng.uniform01());
}

int sample_next_state(const TabularMdp& mdp, int s, int a, RngStream& rng) {
  if (s < 0 || s >= mdp.num_states || a < 0 || a >= mdp.num_actions)
    throw std::invalid_argument("sample_next_state: index out of range");
  return inverse_cdf(mdp.transition.row(mdp.row(s, a)), rng.uniform01());
}

}  // namespace stac
