#pragma once

#include <Eigen/Dense>
#include <string>
#include <vector>

#include "stac/mdp.hpp"
#include "stac/oracles.hpp"
#include "stac/replay_buffer.hpp"
#include "stac/schedules.hpp"

namespace stac {

struct TrainerState;  // trainer.hpp

/// Per-checkpoint snapshot of the tracked quantities, all computed with the
/// exact dynamic-programming oracles:
///   discounted_return  J^{pi_k}
///   suboptimality      J* - J^{pi_k}
///   critic_error       ||Q_k - Q^{pi_k}||_2
///   grad_norm          ||grad J^{pi_k}||_2
///   momentum_error     ||h_k - b_k . (T^{pi_k} Q_k - Q_k)||_2
///   lyapunov           eta_k * suboptimality + eta_k * critic_error^2
///                      + momentum_error^2
struct DiagnosticsRecord {
  long k = 0;
  double discounted_return = 0.0;
  double suboptimality = 0.0;
  double critic_error = 0.0;
  double grad_norm = 0.0;
  double momentum_error = 0.0;
  double lyapunov = 0.0;
  bool gdl_ok = true;
  bool lip_ok = true;
  bool bounds_ok = true;
};

/// Record plus the occupancy it was computed from (the training loop uses
/// the occupancy to check the per-step Lipschitz bound between consecutive
/// checkpoints).
struct RecordDetail {
  DiagnosticsRecord record;
  Eigen::VectorXd state_occupancy;
};

/// Checkpoint evaluator with the per-MDP optimal-policy data (J*, greedy
/// actions, d^{pi*}) computed once up front.
class Snapshotter {
 public:
  explicit Snapshotter(const TabularMdp& mdp);

  /// momentum/buffer may be null (the no-momentum baseline): the momentum
  /// error is then reported as 0. An empty buffer contributes a zero
  /// reference distribution, so at initialization the momentum error is
  /// ||h_0|| = 0.
  RecordDetail record(long k, const PolicyParams& theta, const QTable& q,
                      double eta_k, const Eigen::MatrixXd* momentum,
                      const ReplayBuffer* buffer) const;

  const OptimalReturn& optimal() const { return optimal_; }
  const Eigen::VectorXd& optimal_occupancy() const { return d_star_; }

 private:
  const TabularMdp* mdp_;
  OptimalReturn optimal_;
  Eigen::VectorXd d_star_;
};

/// Spec-shaped convenience wrapper over Snapshotter for a live trainer
/// state; recomputes the per-MDP optimal data on every call.
DiagnosticsRecord snapshot(const TabularMdp& mdp, const TrainerState& state,
                           const StepSchedules& schedules);

double record_field(const DiagnosticsRecord& record, const std::string& field);

struct RateFit {
  double slope = 0.0;
  double intercept = 0.0;
};

/// Least-squares fit of log(value) against log(k) over the trailing
/// tail_fraction of the points. Throws std::domain_error if the window has
/// fewer than 10 points or any point with k < 1 or a nonpositive value.
RateFit fit_loglog(const std::vector<std::pair<long, double>>& points,
                   double tail_fraction);

/// fit_loglog over a named field of a record sequence.
RateFit fit_rate(const std::vector<DiagnosticsRecord>& records,
                 const std::string& field, double tail_fraction);

struct FieldStats {
  double mean = 0.0;
  double stddev = 0.0;  // population standard deviation
};

struct AggregateRecord {
  long k = 0;
  long n_seeds = 0;
  FieldStats discounted_return, suboptimality, critic_error, grad_norm,
      momentum_error, lyapunov;
};

/// Per-checkpoint mean and standard deviation across seeds. All sequences
/// must share the checkpoint grid.
std::vector<AggregateRecord> aggregate(
    const std::vector<std::vector<DiagnosticsRecord>>& per_seed);

}  // namespace stac
