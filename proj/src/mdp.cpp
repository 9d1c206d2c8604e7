#include "stac/mdp.hpp"

#include <cmath>
#include <cstdio>
#include <fstream>
#include <locale>
#include <sstream>
#include <stdexcept>

namespace stac {

namespace {

constexpr double kSumTol = 1e-12;

std::string fmt17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

}  // namespace

void TabularMdp::validate() const {
  if (num_states < 1 || num_actions < 1)
    throw std::invalid_argument("TabularMdp: need at least one state and one action");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("TabularMdp: gamma must lie in [0, 1)");
  if (transition.rows() != num_states * num_actions || transition.cols() != num_states)
    throw std::invalid_argument("TabularMdp: transition shape mismatch");
  if (reward.rows() != num_states || reward.cols() != num_actions)
    throw std::invalid_argument("TabularMdp: reward shape mismatch");
  if (initial_dist.size() != num_states)
    throw std::invalid_argument("TabularMdp: initial distribution shape mismatch");
  if (!transition.allFinite() || !reward.allFinite() || !initial_dist.allFinite())
    throw std::invalid_argument("TabularMdp: non-finite entries");
  for (int i = 0; i < transition.rows(); ++i) {
    if (transition.row(i).minCoeff() < 0.0)
      throw std::invalid_argument("TabularMdp: negative transition probability");
    if (std::abs(transition.row(i).sum() - 1.0) > kSumTol)
      throw std::invalid_argument("TabularMdp: transition row does not sum to 1");
  }
  if (reward.cwiseAbs().maxCoeff() > 1.0 + kSumTol)
    throw std::invalid_argument("TabularMdp: rewards exceed unit sup-norm");
  if (std::abs(initial_dist.sum() - 1.0) > kSumTol)
    throw std::invalid_argument("TabularMdp: initial distribution does not sum to 1");
  if (initial_dist.minCoeff() <= 0.0)
    throw std::invalid_argument("TabularMdp: initial distribution must be strictly positive");
}

PolicyParams zero_params(int num_states, int num_actions) {
  return {Eigen::MatrixXd::Zero(num_states, num_actions)};
}

TabularMdp random_mdp(int num_states, int num_actions, double gamma,
                      std::uint64_t seed, double reward_min, double reward_max) {
  if (num_states < 1 || num_actions < 1)
    throw std::invalid_argument("random_mdp: need at least one state and one action");
  if (!(gamma >= 0.0 && gamma < 1.0) || !std::isfinite(gamma))
    throw std::invalid_argument("random_mdp: gamma must lie in [0, 1)");
  if (!(reward_min <= reward_max) || reward_min < -1.0 || reward_max > 1.0)
    throw std::invalid_argument("random_mdp: reward range must sit inside [-1, 1]");

  TabularMdp mdp;
  mdp.num_states = num_states;
  mdp.num_actions = num_actions;
  mdp.gamma = gamma;

  RngStream rng(seed, stream_id::kMdpGen);
  mdp.transition.resize(num_states * num_actions, num_states);
  for (int s = 0; s < num_states; ++s) {
    for (int a = 0; a < num_actions; ++a) {
      double total = 0.0;
      const int r = mdp.row(s, a);
      for (int s2 = 0; s2 < num_states; ++s2) {
        double e = rng.exponential();
        mdp.transition(r, s2) = e;
        total += e;
      }
      mdp.transition.row(r) /= total;
    }
  }
  mdp.reward.resize(num_states, num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a)
      mdp.reward(s, a) = rng.uniform(reward_min, reward_max);
  mdp.initial_dist = Eigen::VectorXd::Constant(num_states, 1.0 / num_states);

  mdp.validate();
  return mdp;
}

PolicyMatrix softmax_policy(const PolicyParams& params) {
  if (params.logits.size() == 0)
    throw std::invalid_argument("softmax_policy: empty logits");
  if (!params.logits.allFinite())
    throw std::domain_error("softmax_policy: non-finite logits");

  Eigen::MatrixXd probs(params.logits.rows(), params.logits.cols());
  for (int s = 0; s < params.logits.rows(); ++s) {
    const double shift = params.logits.row(s).maxCoeff();
    probs.row(s) = (params.logits.row(s).array() - shift).exp();
    probs.row(s) /= probs.row(s).sum();
  }
  return {std::move(probs)};
}

Eigen::MatrixXd policy_kernel(const TabularMdp& mdp, const PolicyMatrix& policy) {
  if (policy.probs.rows() != mdp.num_states || policy.probs.cols() != mdp.num_actions)
    throw std::invalid_argument("policy_kernel: policy shape mismatch");
  Eigen::MatrixXd kernel = Eigen::MatrixXd::Zero(mdp.num_states, mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a)
      kernel.row(s) += policy.probs(s, a) * mdp.transition.row(mdp.row(s, a));
  return kernel;
}

Eigen::VectorXd expected_reward(const TabularMdp& mdp, const PolicyMatrix& policy) {
  if (policy.probs.rows() != mdp.num_states || policy.probs.cols() != mdp.num_actions)
    throw std::invalid_argument("expected_reward: policy shape mismatch");
  Eigen::VectorXd out(mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s)
    out(s) = policy.probs.row(s).dot(mdp.reward.row(s));
  return out;
}

void save_mdp(const TabularMdp& mdp, const std::string& path) {
  mdp.validate();
  std::ostringstream out;
  out.imbue(std::locale::classic());
  out << mdp.num_states << ' ' << mdp.num_actions << ' ' << fmt17(mdp.gamma) << '\n';
  for (int s = 0; s < mdp.num_states; ++s)
    out << fmt17(mdp.initial_dist(s)) << (s + 1 < mdp.num_states ? ' ' : '\n');
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a)
      out << fmt17(mdp.reward(s, a)) << (a + 1 < mdp.num_actions ? ' ' : '\n');
  for (int r = 0; r < mdp.num_states * mdp.num_actions; ++r)
    for (int s2 = 0; s2 < mdp.num_states; ++s2)
      out << fmt17(mdp.transition(r, s2)) << (s2 + 1 < mdp.num_states ? ' ' : '\n');

  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("save_mdp: cannot open " + path);
  file << out.str();
  if (!file) throw std::runtime_error("save_mdp: write failed for " + path);
}

TabularMdp load_mdp(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("load_mdp: cannot open " + path);
  file.imbue(std::locale::classic());

  TabularMdp mdp;
  if (!(file >> mdp.num_states >> mdp.num_actions >> mdp.gamma))
    throw std::runtime_error("load_mdp: malformed header in " + path);
  if (mdp.num_states < 1 || mdp.num_actions < 1)
    throw std::runtime_error("load_mdp: invalid dimensions in " + path);

  mdp.initial_dist.resize(mdp.num_states);
  for (int s = 0; s < mdp.num_states; ++s)
    if (!(file >> mdp.initial_dist(s)))
      throw std::runtime_error("load_mdp: truncated initial distribution in " + path);
  mdp.reward.resize(mdp.num_states, mdp.num_actions);
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a)
      if (!(file >> mdp.reward(s, a)))
        throw std::runtime_error("load_mdp: truncated reward table in " + path);
  mdp.transition.resize(mdp.num_states * mdp.num_actions, mdp.num_states);
  for (int r = 0; r < mdp.num_states * mdp.num_actions; ++r)
    for (int s2 = 0; s2 < mdp.num_states; ++s2)
      if (!(file >> mdp.transition(r, s2)))
        throw std::runtime_error("load_mdp: truncated transition tensor in " + path);

  mdp.validate();
  return mdp;
}

}  // namespace stac
