#pragma once

#include "stac/mdp.hpp"
#include "stac/rng.hpp"

namespace stac {

struct Transition {
  int s = 0;
  int a = 0;
  int s_next = 0;
};

/// State drawn from the discounted occupancy measure d^pi: run the chain
/// from s0 ~ mu, stop with probability 1-gamma at each step, transition via
/// P^pi otherwise, and return the state at which the chain stopped. The
/// expected chain length is 1/(1-gamma). A hard cap of
/// 10 * ceil(1/(1-gamma)) * ln(1e12) steps forces a stop and, when
/// forced_stop is non-null, flags it; the cap is unreachable in practice for
/// gamma <= 0.99.
int sample_occupancy_state(const TabularMdp& mdp, const PolicyMatrix& policy,
                           RngStream& rng, bool* forced_stop = nullptr);

/// Action from pi(.|s) by inverse CDF on the row.
int sample_action(const PolicyMatrix& policy, int s, RngStream& rng);

/// Next state from P(.|s,a) by inverse CDF on the row.
int sample_next_state(const TabularMdp& mdp, int s, int a, RngStream& rng);

}  // namespace stac
