#include "stac/verification.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>

namespace stac {

namespace {

Eigen::VectorXd flatten(const TabularMdp& mdp, const Eigen::MatrixXd& table) {
  Eigen::VectorXd out(mdp.num_states * mdp.num_actions);
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a) out(mdp.row(s, a)) = table(s, a);
  return out;
}

// lhs from mdp_lhs, exact Q and kernel of the rewritten side from mdp_rhs;
// the two coincide except under the corrupt-gamma negative control.
double bellman_rewrite_residual(const TabularMdp& mdp_lhs, const TabularMdp& mdp_rhs,
                                const PolicyMatrix& policy, const QTable& q) {
  const Eigen::MatrixXd kernel_lhs = state_action_kernel(mdp_lhs, policy);
  const Eigen::VectorXd q_flat = flatten(mdp_lhs, q.values);
  const Eigen::VectorXd lhs = flatten(mdp_lhs, mdp_lhs.reward) +
                              mdp_lhs.gamma * (kernel_lhs * q_flat) - q_flat;

  const Eigen::MatrixXd kernel_rhs = state_action_kernel(mdp_rhs, policy);
  const Eigen::VectorXd q_exact = flatten(mdp_rhs, q_function(mdp_rhs, policy).values);
  const Eigen::VectorXd diff = q_exact - q_flat;
  const Eigen::VectorXd rhs = diff - mdp_rhs.gamma * (kernel_rhs * diff);

  return (lhs - rhs).cwiseAbs().maxCoeff();
}

struct RandomInstance {
  TabularMdp mdp;
  PolicyMatrix policy;
  QTable q;
};

RandomInstance random_instance(RngStream& rng) {
  const int num_states = 2 + static_cast<int>(rng.uniform01() * 7.0);
  const int num_actions = 2 + static_cast<int>(rng.uniform01() * 4.0);
  const double gammas[] = {0.5, 0.9, 0.95};
  const double gamma = gammas[rng.next_u64() % 3];

  RandomInstance inst;
  inst.mdp = random_mdp(num_states, num_actions, gamma, rng.next_u64());
  Eigen::MatrixXd logits(num_states, num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) logits(s, a) = rng.uniform(-2.0, 2.0);
  inst.policy = softmax_policy({logits});
  const double bound = 1.0 / (1.0 - gamma);
  Eigen::MatrixXd q(num_states, num_actions);
  for (int s = 0; s < num_states; ++s)
    for (int a = 0; a < num_actions; ++a) q(s, a) = rng.uniform(-bound, bound);
  inst.q = {std::move(q)};
  return inst;
}

BufferDistribution simulated_buffer_distribution(const TabularMdp& mdp,
                                                 RngStream& rng) {
  const double fractions[] = {0.1, 0.5, 1.0};
  ReplayBuffer buffer(mdp.num_states, mdp.num_actions, fractions[rng.next_u64() % 3]);
  const long pushes = 1 + static_cast<long>(rng.uniform01() * 200.0);
  for (long i = 0; i < pushes; ++i) {
    Transition t;
    t.s = static_cast<int>(rng.next_u64() % std::uint64_t(mdp.num_states));
    t.a = static_cast<int>(rng.next_u64() % std::uint64_t(mdp.num_actions));
    t.s_next = static_cast<int>(rng.next_u64() % std::uint64_t(mdp.num_states));
    buffer.push(t);
  }
  return buffer.distribution();
}

}  // namespace

double check_bellman_rewrite(const TabularMdp& mdp, const PolicyMatrix& policy,
                             const QTable& q) {
  return bellman_rewrite_residual(mdp, mdp, policy, q);
}

double check_vk_identity(const TabularMdp& mdp, const PolicyMatrix& policy,
                         const QTable& q, const BufferDistribution& dist) {
  if (dist.probs.rows() != mdp.num_states || dist.probs.cols() != mdp.num_actions)
    throw std::invalid_argument("check_vk_identity: distribution shape mismatch");

  const Eigen::MatrixXd lhs =
      dist.probs.cwiseProduct(bellman_operator(mdp, policy, q).values - q.values);

  const Eigen::MatrixXd kernel = state_action_kernel(mdp, policy);
  const Eigen::VectorXd diff =
      flatten(mdp, q_function(mdp, policy).values) - flatten(mdp, q.values);
  const Eigen::VectorXd rewritten = diff - mdp.gamma * (kernel * diff);
  Eigen::MatrixXd rhs(mdp.num_states, mdp.num_actions);
  for (int s = 0; s < mdp.num_states; ++s)
    for (int a = 0; a < mdp.num_actions; ++a)
      rhs(s, a) = dist.probs(s, a) * rewritten(mdp.row(s, a));

  return (lhs - rhs).cwiseAbs().maxCoeff();
}

bool check_hadamard_norm(long trials, int dim, RngStream& rng) {
  if (trials < 1 || dim < 1)
    throw std::invalid_argument("check_hadamard_norm: trials and dim must be positive");
  for (long t = 0; t < trials; ++t) {
    Eigen::VectorXd a(dim), b(dim);
    for (int i = 0; i < dim; ++i) {
      a(i) = rng.uniform(-1.0, 1.0);
      b(i) = rng.uniform(-1.0, 1.0);
    }
    const double prod = a.cwiseProduct(b).norm();
    if (prod > a.norm() * b.cwiseAbs().maxCoeff() + 1e-12) return false;
    if (prod > a.cwiseAbs().sum() * b.norm() + 1e-12) return false;
  }
  return true;
}

double ode_domination_excess(double x0, double omega1, double omega2,
                             double eta0_sq, long steps) {
  if (!(omega1 < 1.0 && omega2 < omega1 && omega2 > 0.0))
    throw std::invalid_argument("ode_domination: need 1 > omega1 > omega2 > 0");
  if (!(eta0_sq >= 0.0) || eta0_sq > std::min(1.0 / (2.0 * omega1), x0))
    throw std::invalid_argument(
        "ode_domination: need eta0^2 <= min(1/(2 omega1), x0)");
  if (steps < 1) throw std::invalid_argument("ode_domination: steps must be positive");

  const double decay = omega1 - omega2;
  double x = x0;
  double worst = -std::numeric_limits<double>::infinity();
  for (long k = 0; k <= steps; ++k) {
    const double bound =
        eta0_sq == 0.0 ? 0.0 : 1.0 / (1.0 / eta0_sq + decay * double(k));
    worst = std::max(worst, x - bound);
    x += -omega1 * x * x + omega2 * bound * bound;
  }
  return worst;
}

bool check_ode_domination(double x0, double omega1, double omega2,
                          double eta0_sq, long steps) {
  return ode_domination_excess(x0, omega1, omega2, eta0_sq, steps) <= 1e-12;
}

double estimate_exploration_lambda(const TabularMdp& mdp, long trials,
                                   RngStream& rng) {
  if (trials < 1)
    throw std::invalid_argument("estimate_exploration_lambda: trials must be positive");
  const double value_bound = 1.0 / (1.0 - mdp.gamma);
  double lambda = std::numeric_limits<double>::quiet_NaN();
  for (long t = 0; t < trials; ++t) {
    Eigen::MatrixXd logits(mdp.num_states, mdp.num_actions);
    Eigen::MatrixXd q(mdp.num_states, mdp.num_actions);
    Eigen::MatrixXd weight(mdp.num_states, mdp.num_actions);
    double total = 0.0;
    for (int s = 0; s < mdp.num_states; ++s) {
      for (int a = 0; a < mdp.num_actions; ++a) {
        logits(s, a) = rng.uniform(-3.0, 3.0);
        q(s, a) = rng.uniform(-value_bound, value_bound);
        weight(s, a) = rng.exponential();
        total += weight(s, a);
      }
    }
    weight /= total;  // full-support diagonal with unit trace

    const PolicyMatrix policy = softmax_policy({logits});
    const QTable q_table{q};
    const Eigen::MatrixXd diff = q_function(mdp, policy).values - q;
    const double norm_sq = diff.squaredNorm();
    if (norm_sq < 1e-16) continue;
    const Eigen::MatrixXd bellman_err =
        bellman_operator(mdp, policy, q_table).values - q;
    const double inner = weight.cwiseProduct(diff).cwiseProduct(bellman_err).sum();
    const double ratio = inner / norm_sq;
    if (std::isnan(lambda) || ratio < lambda) lambda = ratio;
  }
  return lambda;
}

std::vector<CheckLine> run_verification_suite(long trials, std::uint64_t seed,
                                              double corrupt_gamma) {
  if (trials < 1)
    throw std::invalid_argument("run_verification_suite: trials must be positive");
  RngStream rng(seed, stream_id::kVerification);
  std::vector<CheckLine> lines;

  const long instances = std::max<long>(1, trials / 10);
  {
    double worst = 0.0;
    for (long i = 0; i < instances; ++i) {
      RandomInstance inst = random_instance(rng);
      if (corrupt_gamma != 0.0) {
        TabularMdp corrupted = inst.mdp;
        corrupted.gamma = std::min(0.999, corrupted.gamma + std::abs(corrupt_gamma));
        worst = std::max(worst, bellman_rewrite_residual(inst.mdp, corrupted,
                                                         inst.policy, inst.q));
      } else {
        worst = std::max(worst, check_bellman_rewrite(inst.mdp, inst.policy, inst.q));
      }
    }
    lines.push_back({"bellman_rewrite", worst < 1e-9, false, worst, "max_residual"});
  }
  {
    double worst = 0.0;
    for (long i = 0; i < instances; ++i) {
      RandomInstance inst = random_instance(rng);
      const BufferDistribution dist = simulated_buffer_distribution(inst.mdp, rng);
      worst = std::max(worst, check_vk_identity(inst.mdp, inst.policy, inst.q, dist));
    }
    lines.push_back({"vk_identity", worst < 1e-9, false, worst, "max_residual"});
  }
  {
    const bool ok = check_hadamard_norm(trials, 50, rng);
    lines.push_back({"hadamard_norm", ok, false, double(trials), "trials"});
  }
  {
    double worst = -std::numeric_limits<double>::infinity();
    for (double omega1 : {0.1, 0.3, 0.5, 0.7, 0.9})
      for (double ratio : {0.1, 0.3, 0.5, 0.7, 0.9})
        for (double shrink : {1.0, 0.1}) {
          const double start = shrink / (2.0 * omega1);
          worst = std::max(worst, ode_domination_excess(start, omega1,
                                                        ratio * omega1, start, 100000));
        }
    lines.push_back({"ode_domination", worst <= 1e-12, false, worst, "max_excess"});
  }
  {
    double worst = -std::numeric_limits<double>::infinity();
    for (double fraction : {0.1, 0.5, 1.0}) {
      ReplayBuffer buffer(4, 3, fraction);
      BufferDistribution prev;
      for (long i = 0; i < 10000; ++i) {
        Transition t;
        t.s = static_cast<int>(rng.next_u64() % 4);
        t.a = static_cast<int>(rng.next_u64() % 3);
        t.s_next = static_cast<int>(rng.next_u64() % 4);
        buffer.push(t);
        const BufferDistribution cur = buffer.distribution();
        if (i > 0)
          worst = std::max(worst, (cur.probs - prev.probs).norm() -
                                      2.0 / double(buffer.size()));
        prev = cur;
      }
    }
    lines.push_back({"buffer_drift", worst <= 1e-12, false, worst, "max_excess"});
  }
  {
    const TabularMdp mdp = random_mdp(10, 5, 0.9, seed);
    const double lambda =
        estimate_exploration_lambda(mdp, std::min<long>(trials, 10000), rng);
    lines.push_back({"lambda_estimate", true, true, lambda, "value"});
  }
  return lines;
}

}  // namespace stac
