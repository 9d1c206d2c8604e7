#pragma once

#include <Eigen/Dense>
#include <vector>

#include "stac/mdp.hpp"

namespace stac {

/// Critic table over state-action pairs. Holds both exact Q^pi values and
/// algorithmic iterates Q_k.
struct QTable {
  Eigen::MatrixXd values;  // S x A
};

/// v^pi = (I - gamma P^pi)^{-1} R^pi via a direct dense solve.
Eigen::VectorXd value_function(const TabularMdp& mdp, const PolicyMatrix& policy);

/// Q^pi(s,a) = R(s,a) + gamma sum_s' P(s'|s,a) v^pi(s').
QTable q_function(const TabularMdp& mdp, const PolicyMatrix& policy);

/// Q table induced by an already-computed state value vector.
Eigen::MatrixXd q_from_values(const TabularMdp& mdp, const Eigen::VectorXd& values);

/// A^pi(s,a) = Q^pi(s,a) - v^pi(s).
Eigen::MatrixXd advantage(const TabularMdp& mdp, const PolicyMatrix& policy);

/// Discounted state occupancy d^pi = (1-gamma) mu^T (I - gamma P^pi)^{-1}.
Eigen::VectorXd occupancy(const TabularMdp& mdp, const PolicyMatrix& policy);

/// J^pi = mu^T v^pi.
double policy_return(const TabularMdp& mdp, const PolicyMatrix& policy);

/// Exact softmax policy gradient,
/// g(s,a) = d^pi(s) pi(a|s) A^pi(s,a) / (1-gamma).
Eigen::MatrixXd exact_gradient(const TabularMdp& mdp, const PolicyParams& params);

/// (T^pi Q)(s,a) = R(s,a) + gamma sum_{s',a'} P(s'|s,a) pi(a'|s') Q(s',a').
QTable bellman_operator(const TabularMdp& mdp, const PolicyMatrix& policy,
                        const QTable& q);

/// State-action transition kernel P_pi[(s,a),(s',a')] = P(s'|s,a) pi(a'|s'),
/// indexed with the same s*A+a flattening as TabularMdp::row.
Eigen::MatrixXd state_action_kernel(const TabularMdp& mdp, const PolicyMatrix& policy);

struct OptimalReturn {
  double j_star = 0.0;
  std::vector<int> greedy_actions;  // one per state, ties break to lowest index
};

/// Value iteration to sup-norm residual below 1e-12 (at most 1e6 sweeps),
/// then J* = mu^T v*.
OptimalReturn optimal_return(const TabularMdp& mdp);

/// Deterministic one-hot policy matrix from a per-state action choice.
PolicyMatrix one_hot_policy(const std::vector<int>& actions, int num_actions);

struct GradientDomination {
  double lhs = 0.0;  // ||grad J||_2
  double rhs = 0.0;  // min_s pi(a*(s)|s) / (sqrt(S) max_s d*(s)/d(s)) * (J* - J)
  bool holds = false;
};

/// Per-policy gradient domination inequality, evaluated exactly. The greedy
/// policy from optimal_return stands in for the optimal policy.
GradientDomination gradient_domination_check(const TabularMdp& mdp,
                                             const PolicyParams& params);

}  // namespace stac
