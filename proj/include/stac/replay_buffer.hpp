#pragma once

#include <Eigen/Dense>
#include <deque>

#include "stac/rng.hpp"
#include "stac/sampling.hpp"

namespace stac {

/// Empirical state-action distribution of a buffer.
struct BufferDistribution {
  Eigen::MatrixXd probs;  // S x A, entries >= 0, sums to 1
};

/// Sliding window over the most recent transitions. After the k-th push the
/// window holds exactly the last max(1, ceil(c_b * k)) transitions, which
/// grows by zero or one entries per push.
class ReplayBuffer {
 public:
  ReplayBuffer(int num_states, int num_actions, double window_fraction);

  void push(const Transition& t);

  /// Uniform draw over the stored transitions; throws std::logic_error when
  /// the buffer is empty.
  Transition sample_uniform(RngStream& rng) const;

  /// b(s,a) = (# entries at (s,a)) / size; throws std::logic_error when the
  /// buffer is empty.
  BufferDistribution distribution() const;

  long pushes() const { return pushes_; }
  std::size_t size() const { return entries_.size(); }
  bool empty() const { return entries_.empty(); }
  double window_fraction() const { return window_fraction_; }
  const std::deque<Transition>& entries() const { return entries_; }

 private:
  int num_states_;
  int num_actions_;
  double window_fraction_;
  long pushes_ = 0;
  std::deque<Transition> entries_;
};

/// True iff ||after - before||_2 <= 2 / len_after + 1e-12 (the per-push
/// drift bound on the buffer distribution).
bool drift_bound_check(const BufferDistribution& before,
                       const BufferDistribution& after, long len_after);

}  // namespace stac
