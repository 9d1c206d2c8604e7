#include "stac/oracles.hpp"

#include <cmath>
#include <limits>
#include <stdexcept>

namespace stac {

namespace {

constexpr double kSolveResidualGuard = 1e-8;
constexpr double kValueIterTol = 1e-12;
constexpr long kValueIterMaxSweeps = 1000000;

void check_policy(const TabularMdp& mdp, const PolicyMatrix& policy, const char* where) {
  if (policy.probs.rows() != mdp.num_states || policy.probs.cols() != mdp.num_actions)
    throw std::invalid_argument(std::string(where) + ": policy shape mismatch");
}

}  // namespace

Eigen::VectorXd value_function(const TabularMdp& mdp, const PolicyMatrix& policy) {
  check_policy(mdp, policy, "value_function");
  const Eigen::MatrixXd kernel = policy_kernel(mdp, policy);
  const Eigen::VectorXd r = expected_reward(mdp, policy);
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(mdp.num_states, mdp.num_states) - mdp.gamma * kernel;
  Eigen::VectorXd v = system.partialPivLu().solve(r);
  const double residual = (v - (r + mdp.gamma * (kernel * v))).cwiseAbs().maxCoeff();
  if (!v.allFinite() || residual > kSolveResidualGuard)
    throw std::domain_error("value_function: dense solve failed");
  return v;
}

Eigen::MatrixXd q_from_values(const TabularMdp& mdp, const Eigen::VectorXd& values) {
  Eigen::MatrixXd q(mdp.num_states, mdp.num_actions);
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a)
      q(s, a) = mdp.reward(s, a) + mdp.gamma * mdp.transition.row(mdp.row(s, a)).dot(values);
  return q;
}

QTable q_function(const TabularMdp& mdp, const PolicyMatrix& policy) {
  return {q_from_values(mdp, value_function(mdp, policy))};
}

Eigen::MatrixXd advantage(const TabularMdp& mdp, const PolicyMatrix& policy) {
  const Eigen::VectorXd v = value_function(mdp, policy);
  Eigen::MatrixXd adv = q_from_values(mdp, v);
  adv.colwise() -= v;
  return adv;
}

Eigen::VectorXd occupancy(const TabularMdp& mdp, const PolicyMatrix& policy) {
  check_policy(mdp, policy, "occupancy");
  const Eigen::MatrixXd kernel = policy_kernel(mdp, policy);
  const Eigen::MatrixXd system =
      Eigen::MatrixXd::Identity(mdp.num_states, mdp.num_states) -
      mdp.gamma * kernel.transpose();
  Eigen::VectorXd d = (1.0 - mdp.gamma) * system.partialPivLu().solve(mdp.initial_dist);
  if (!d.allFinite()) throw std::domain_error("occupancy: dense solve failed");
  return d;
}

double policy_return(const TabularMdp& mdp, const PolicyMatrix& policy) {
  return mdp.initial_dist.dot(value_function(mdp, policy));
}

Eigen::MatrixXd exact_gradient(const TabularMdp& mdp, const PolicyParams& params) {
  const PolicyMatrix policy = softmax_policy(params);
  const Eigen::VectorXd v = value_function(mdp, policy);
  const Eigen::VectorXd d = occupancy(mdp, policy);
  Eigen::MatrixXd grad = q_from_values(mdp, v);
  grad.colwise() -= v;  // advantage
  for (int s = 0; s < mdp.num_states; ++s)
    grad.row(s) = grad.row(s).cwiseProduct(policy.probs.row(s)) * (d(s) / (1.0 - mdp.gamma));
  return grad;
}

QTable bellman_operator(const TabularMdp& mdp, const PolicyMatrix& policy,
                        const QTable& q) {
  check_policy(mdp, policy, "bellman_operator");
  if (q.values.rows() != mdp.num_states || q.values.cols() != mdp.num_actions)
    throw std::invalid_argument("bellman_operator: Q table shape mismatch");
  // mixed(s') = sum_a' pi(a'|s') Q(s',a') collapses the double sum.
  Eigen::VectorXd mixed(mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s)
    mixed(s) = policy.probs.row(s).dot(q.values.row(s));
  return {q_from_values(mdp, mixed)};
}

Eigen::MatrixXd state_action_kernel(const TabularMdp& mdp, const PolicyMatrix& policy) {
  check_policy(mdp, policy, "state_action_kernel");
  const int n = mdp.num_states * mdp.num_actions;
  Eigen::MatrixXd kernel(n, n);
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a)
      for (int s2 = 0; s2 < mdp.num_states; ++s2)
        for (int a2 = 0; a2 < mdp.num_actions; ++a2)
          kernel(mdp.row(s, a), mdp.row(s2, a2)) =
              mdp.transition(mdp.row(s, a), s2) * policy.probs(s2, a2);
  return kernel;
}

OptimalReturn optimal_return(const TabularMdp& mdp) {
  mdp.validate();
  Eigen::VectorXd v = Eigen::VectorXd::Zero(mdp.num_states);
  Eigen::VectorXd next(mdp.num_states);
  std::vector<int> greedy(mdp.num_states, 0);
  for (long sweep = 0; sweep < kValueIterMaxSweeps; ++sweep) {
    for (int s = 0; s < mdp.num_states; ++s) {
      double best = -std::numeric_limits<double>::infinity();
      int best_action = 0;
      for (int a = 0; a < mdp.num_actions; ++a) {
        const double q = mdp.reward(s, a) + mdp.gamma * mdp.transition.row(mdp.row(s, a)).dot(v);
        if (q > best) {
          best = q;
          best_action = a;
        }
      }
      next(s) = best;
      greedy[s] = best_action;
    }
    const double residual = (next - v).cwiseAbs().maxCoeff();
    v = next;
    if (residual < kValueIterTol)
      return {mdp.initial_dist.dot(v), std::move(greedy)};
  }
  throw std::domain_error("optimal_return: value iteration did not converge");
}

PolicyMatrix one_hot_policy(const std::vector<int>& actions, int num_actions) {
  Eigen::MatrixXd probs =
      Eigen::MatrixXd::Zero(static_cast<int>(actions.size()), num_actions);
  for (int s = 0; s < static_cast<int>(actions.size()); ++s) {
    if (actions[s] < 0 || actions[s] >= num_actions)
      throw std::invalid_argument("one_hot_policy: action index out of range");
    probs(s, actions[s]) = 1.0;
  }
  return {std::move(probs)};
}

GradientDomination gradient_domination_check(const TabularMdp& mdp,
                                             const PolicyParams& params) {
  const PolicyMatrix policy = softmax_policy(params);
  const OptimalReturn opt = optimal_return(mdp);
  const PolicyMatrix greedy = one_hot_policy(opt.greedy_actions, mdp.num_actions);
  const Eigen::VectorXd d = occupancy(mdp, policy);
  const Eigen::VectorXd d_star = occupancy(mdp, greedy);

  double min_greedy_prob = 1.0;
  double mismatch = 0.0;
  for (int s = 0; s < mdp.num_states; ++s) {
    min_greedy_prob = std::min(min_greedy_prob, policy.probs(s, opt.greedy_actions[s]));
    mismatch = std::max(mismatch, d_star(s) / d(s));
  }

  GradientDomination result;
  result.lhs = exact_gradient(mdp, params).norm();
  result.rhs = min_greedy_prob / (std::sqrt(double(mdp.num_states)) * mismatch) *
               (opt.j_star - policy_return(mdp, policy));
  result.holds = result.lhs >= result.rhs - 1e-10;
  return result;
}

}  // namespace stac
