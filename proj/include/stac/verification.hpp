#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stac/mdp.hpp"
#include "stac/oracles.hpp"
#include "stac/replay_buffer.hpp"
#include "stac/rng.hpp"

namespace stac {

/// Max absolute residual of the identity
///   R + gamma P_pi Q - Q = (I - gamma P_pi)(Q^pi - Q)
/// over the state-action kernel P_pi.
double check_bellman_rewrite(const TabularMdp& mdp, const PolicyMatrix& policy,
                             const QTable& q);

/// Max absolute residual between b . (T^pi Q - Q) and
/// b . (I - gamma P_pi)(Q^pi - Q).
double check_vk_identity(const TabularMdp& mdp, const PolicyMatrix& policy,
                         const QTable& q, const BufferDistribution& dist);

/// Random vector pairs must satisfy ||a.b||_2 <= ||a||_2 ||b||_inf and
/// ||a.b||_2 <= ||a||_1 ||b||_2, each up to 1e-12.
bool check_hadamard_norm(long trials, int dim, RngStream& rng);

/// Simulates the worst-case recursion x_{k+1} = x_k - omega1 x_k^2
/// + omega2 eta_k^4 against the dominating flow eta_k^2 = 1 / (1/eta0_sq
/// + (omega1 - omega2) k) and returns true iff x_k <= eta_k^2 + 1e-12 for
/// every k <= steps. Requires 1 > omega1 > omega2 > 0 and
/// eta0_sq <= min(1/(2 omega1), x0).
bool check_ode_domination(double x0, double omega1, double omega2,
                          double eta0_sq, long steps);

/// Worst excess x_k - eta_k^2 over the run (negative means the bound held
/// with margin everywhere).
double ode_domination_excess(double x0, double omega1, double omega2,
                             double eta0_sq, long steps);

/// Minimum over random (policy, Q, diagonal weight) triples of
///   <Q^pi - Q, T^pi Q - Q>_D / ||Q^pi - Q||^2,
/// a diagnostic estimate of the exploration constant lambda. Cases with
/// ||Q^pi - Q|| below 1e-8 are skipped; NaN if every trial was skipped.
double estimate_exploration_lambda(const TabularMdp& mdp, long trials,
                                   RngStream& rng);

struct CheckLine {
  std::string name;
  bool pass = true;
  bool informational = false;  // reported, never fails the suite
  double value = 0.0;
  std::string value_label;
};

/// The full deterministic check suite behind the `verify` CLI command.
/// corrupt_gamma, when nonzero, evaluates the Bellman rewrite with a
/// mismatched discount on one side; it exists as a negative control so
/// tests can confirm the suite actually fails on a broken identity.
std::vector<CheckLine> run_verification_suite(long trials, std::uint64_t seed,
                                              double corrupt_gamma = 0.0);

}  // namespace stac
