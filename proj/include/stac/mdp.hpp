#pragma once

#include <Eigen/Dense>
#include <cstdint>
#include <string>

#include "stac/rng.hpp"

namespace stac {

/// Finite discounted MDP with dense transition and reward tables.
///
/// The transition tensor is stored row-major over state-action pairs:
/// transition.row(s * num_actions + a) is the distribution P(.|s,a).
struct TabularMdp {
  int num_states = 0;
  int num_actions = 0;
  Eigen::MatrixXd transition;    // (S*A) x S, each row a probability vector
  Eigen::MatrixXd reward;        // S x A, sup-norm bounded by 1
  double gamma = 0.0;            // discount in [0, 1)
  Eigen::VectorXd initial_dist;  // S, strictly positive, sums to 1

  int row(int s, int a) const { return s * num_actions + a; }

  /// Throws std::invalid_argument if any structural invariant is broken.
  void validate() const;
};

/// Softmax logits, one per state-action pair.
struct PolicyParams {
  Eigen::MatrixXd logits;  // S x A
};

/// Row-stochastic action probabilities.
struct PolicyMatrix {
  Eigen::MatrixXd probs;  // S x A, rows sum to 1
};

/// Uniform-logit (all-zero) parameters for an S x A policy.
PolicyParams zero_params(int num_states, int num_actions);

/// Random MDP instance: flat-Dirichlet transition rows (normalized
/// independent exponentials, so every row has full support), i.i.d. uniform
/// rewards on [reward_min, reward_max], and a uniform initial distribution.
/// Deterministic function of the seed.
TabularMdp random_mdp(int num_states, int num_actions, double gamma,
                      std::uint64_t seed, double reward_min = 0.0,
                      double reward_max = 1.0);

/// pi(a|s) = exp(logits(s,a)) / sum_a' exp(logits(s,a')), computed with
/// per-row max subtraction so any finite logits are safe.
PolicyMatrix softmax_policy(const PolicyParams& params);

/// Induced state-to-state kernel P^pi(s'|s) = sum_a pi(a|s) P(s'|s,a).
Eigen::MatrixXd policy_kernel(const TabularMdp& mdp, const PolicyMatrix& policy);

/// Expected one-step reward R^pi(s) = sum_a pi(a|s) R(s,a).
Eigen::VectorXd expected_reward(const TabularMdp& mdp, const PolicyMatrix& policy);

/// Plain-text serialization: "S A gamma" line, then mu on one line, then R
/// row-major (S lines of A values), then P as S*A lines of S values, all
/// with 17 significant digits so a round trip is bit-exact.
void save_mdp(const TabularMdp& mdp, const std::string& path);
TabularMdp load_mdp(const std::string& path);

}  // namespace stac
