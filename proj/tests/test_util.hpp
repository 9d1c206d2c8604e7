#pragma once

#include <Eigen/Dense>
#include <functional>

#include "stac/mdp.hpp"
#include "stac/oracles.hpp"
#include "stac/rng.hpp"

namespace test_util {

/// MDP with caller-provided transition rows and rewards.
inline stac::TabularMdp custom_mdp(
    int num_states, int num_actions, double gamma,
    const std::function<Eigen::VectorXd(int, int)>& transition_row,
    const std::function<double(int, int)>& reward) {
  stac::TabularMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = num_actions;
  mdp.gamma = gamma;
  mdp.transition.resize(num_states * num_actions, num_states);
  mdp.reward.resize(num_states, num_actions);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      mdp.transition.row(mdp.row(s, a)) = transition_row(s, a).transpose();
      mdp.reward(s, a) = reward(s, a);
    }
  }
  mdp.initial_dist = Eigen::VectorXd::Constant(num_states, 1.0 / num_states);
  mdp.validate();
  return mdp;
}

/// Random transitions, every reward equal to value.
inline stac::TabularMdp constant_reward_mdp(int num_states, int num_actions,
                                            double gamma, double value,
                                            std::uint64_t seed) {
  stac::TabularMdp mdp = stac::random_mdp(num_states, num_actions, gamma, seed);
  mdp.reward.setConstant(value);
  return mdp;
}

/// Deterministic transitions s -> (s + a + 1) mod S.
inline stac::TabularMdp cycle_mdp(int num_states, int num_actions, double gamma,
                                  std::uint64_t reward_seed) {
  stac::RngStream rng(reward_seed, stac::stream_id::kVerification);
  return custom_mdp(
      num_states, num_actions, gamma,
      [&](int s, int a) {
        Eigen::VectorXd row = Eigen::VectorXd::Zero(num_states);
        row((s + a + 1) % num_states) = 1.0;
        return row;
      },
      [&](int, int) { return rng.uniform01(); });
}

inline stac::PolicyMatrix uniform_policy(int num_states, int num_actions) {
  return {Eigen::MatrixXd::Constant(num_states, num_actions, 1.0 / num_actions)};
}

inline stac::PolicyParams random_logits(int num_states, int num_actions,
                                        double range, stac::RngStream& rng) {
  Eigen::MatrixXd logits(num_states, num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) logits(s, a) = rng.uniform(-range, range);
  return {std::move(logits)};
}

inline stac::PolicyMatrix random_policy(int num_states, int num_actions,
                                        stac::RngStream& rng) {
  return stac::softmax_policy(random_logits(num_states, num_actions, 2.0, rng));
}

inline stac::QTable random_q(int num_states, int num_actions, double bound,
                             stac::RngStream& rng) {
  Eigen::MatrixXd q(num_states, num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) q(s, a) = rng.uniform(-bound, bound);
  return {std::move(q)};
}

}  // namespace test_util
