#pragma once

#include <Eigen/Dense>
#include <stdexcept>
#include <vector>

#include "stac/diagnostics.hpp"
#include "stac/mdp.hpp"
#include "stac/oracles.hpp"
#include "stac/replay_buffer.hpp"
#include "stac/rng.hpp"
#include "stac/sampling.hpp"
#include "stac/schedules.hpp"

namespace stac {

/// Momentum estimate of the buffer-weighted Bellman error, one entry per
/// state-action pair.
struct MomentumTable {
  Eigen::MatrixXd values;  // S x A
};

/// Previous-iterate parameters kept around for the momentum correction
/// term.
struct StormSnapshot {
  QTable q_prev;
  PolicyParams theta_prev;
};

/// Raised when a trainer iterate produces a non-finite logit, critic, or
/// momentum entry.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(long iteration)
      : std::runtime_error("trainer diverged at iteration " + std::to_string(iteration)),
        iteration_(iteration) {}
  long iteration() const { return iteration_; }

 private:
  long iteration_;
};

/// Full state of one training run. k counts completed iterations; the
/// schedule values used during an iteration are the ones at its starting k.
struct TrainerState {
  long k = 0;
  PolicyParams theta;
  QTable q;
  MomentumTable h;
  StormSnapshot snapshot;
  ReplayBuffer buffer;
  RngStream rng_actor;
  RngStream rng_critic;
  StepSchedules schedules;

  // Iteration-scoped bookkeeping.
  PolicyMatrix pi_current;        // policy at the entry of the last iteration
  Eigen::MatrixXd theta_entering; // logits at the entry of the last iteration
  double last_step_l1 = 0.0;      // eta_k * |A_k(s_k,a_k)| of the last actor step
  long forced_stops = 0;          // occupancy-sampler cap hits (never in practice)

  TrainerState(const TabularMdp& mdp, const StepSchedules& schedules,
               double buffer_fraction, std::uint64_t seed);
};

/// Q(s,a) - sum_a' pi(a'|s) Q(s,a'): the critic's advantage estimate.
double critic_advantage(const QTable& q, const PolicyMatrix& policy, int s, int a);

/// One policy update at step size eta_k: draw s_k from the occupancy
/// measure under the current policy, a_k from the policy, s'_k from the
/// transition kernel, then bump the single logit (s_k,a_k) by
/// eta_k * critic_advantage. Returns the sampled transition for buffering.
Transition actor_step(TrainerState& state, const TabularMdp& mdp, double eta_k);

/// Same, with eta_k taken from the state's own schedule at the current k.
Transition actor_step(TrainerState& state, const TabularMdp& mdp);

/// R(s,a) + gamma sum_a' pi(a'|s') Q(s',a') - Q(s,a) on one transition.
double bootstrap_error(const TabularMdp& mdp, const QTable& q,
                       const PolicyMatrix& policy, const Transition& t);

/// Momentum update on the buffer sample t_buf. With (s,a) = (t_buf.s,
/// t_buf.a), err from the current (Q_k, pi_k) and err_prev from the
/// snapshot (Q_{k-1}, pi_{k-1}):
///   h(s,a)   <- err + (1-nu_k) * (h_prev(s,a) - err_prev)
///   h(other) <- (1-nu_k) * h_prev(other)
/// The current policy is the one captured by this iteration's actor_step.
MomentumTable storm_step(const TrainerState& state, const TabularMdp& mdp,
                         const Transition& t_buf);

/// Q + beta_k * h, elementwise.
QTable critic_step(const QTable& q, const MomentumTable& h, double beta_k);

/// One full iteration of the momentum trainer: actor step, buffer push,
/// uniform buffer draw, momentum update, snapshot save, critic step.
/// Increments k and throws DivergenceError on any non-finite entry.
void train_iteration(TrainerState& state, const TabularMdp& mdp);

struct TrainOutcome {
  std::vector<DiagnosticsRecord> records;
  long diverged_at = -1;  // -1 when the run completed
};

/// Momentum trainer: theta_0 = 0, Q_0 = 0, h_0 = 0. Checkpoints at k = 0,
/// every log_every iterations, and the final k. Fully deterministic per
/// seed. Throws DivergenceError if an iterate goes non-finite.
std::vector<DiagnosticsRecord> train(const TabularMdp& mdp,
                                     const StepSchedules& schedules,
                                     double buffer_fraction, long iterations,
                                     std::uint64_t seed, long log_every);

/// Like train but reports divergence in the outcome instead of throwing;
/// checkpoints recorded before the divergence are retained.
TrainOutcome train_collect(const TabularMdp& mdp, const StepSchedules& schedules,
                           double buffer_fraction, long iterations,
                           std::uint64_t seed, long log_every);

/// No-momentum baseline with eta_k = beta_k = scale * (1+k)^{-2/3}: the
/// same actor step, and a critic that moves only the sampled coordinate by
/// beta_k times the bootstrap error of the actor's own transition. No
/// buffer, no momentum; the momentum error is logged as 0.
std::vector<DiagnosticsRecord> train_baseline(const TabularMdp& mdp,
                                              double eta_scale, double beta_scale,
                                              long iterations, std::uint64_t seed,
                                              long log_every);

TrainOutcome train_baseline_collect(const TabularMdp& mdp, double eta_scale,
                                    double beta_scale, long iterations,
                                    std::uint64_t seed, long log_every);

}  // namespace stac
