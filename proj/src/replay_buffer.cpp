#include "stac/replay_buffer.hpp"

#include <cmath>
#include <stdexcept>

namespace stac {

ReplayBuffer::ReplayBuffer(int num_states, int num_actions, double window_fraction)
    : num_states_(num_states),
      num_actions_(num_actions),
      window_fraction_(window_fraction) {
  if (num_states < 1 || num_actions < 1)
    throw std::invalid_argument("ReplayBuffer: need at least one state and one action");
  if (!(window_fraction > 0.0 && window_fraction <= 1.0))
    throw std::invalid_argument("ReplayBuffer: window fraction must lie in (0, 1]");
}

void ReplayBuffer::push(const Transition& t) {
  if (t.s < 0 || t.s >= num_states_ || t.a < 0 || t.a >= num_actions_ ||
      t.s_next < 0 || t.s_next >= num_states_)
    throw std::invalid_argument("ReplayBuffer: transition index out of range");
  ++pushes_;
  entries_.push_back(t);
  const auto target = static_cast<std::size_t>(
      std::max<long>(1, static_cast<long>(std::ceil(window_fraction_ * double(pushes_)))));
  while (entries_.size() > target) entries_.pop_front();
}

Transition ReplayBuffer::sample_uniform(RngStream& rng) const {
  if (entries_.empty())
    throw std::logic_error("ReplayBuffer: cannot sample from an empty buffer");
  const auto idx = static_cast<std::size_t>(rng.uniform01() * double(entries_.size()));
  return entries_[std::min(idx, entries_.size() - 1)];
}

BufferDistribution ReplayBuffer::distribution() const {
  if (entries_.empty())
    throw std::logic_error("ReplayBuffer: distribution of an empty buffer");
  Eigen::MatrixXd probs = Eigen::MatrixXd::Zero(num_states_, num_actions_);
  for (const Transition& t : entries_) probs(t.s, t.a) += 1.0;
  probs /= double(entries_.size());
  return {std::move(probs)};
}

bool drift_bound_check(const BufferDistribution& before,
                       const BufferDistribution& after, long len_after) {
  if (before.probs.rows() != after.probs.rows() ||
      before.probs.cols() != after.probs.cols())
    throw std::invalid_argument("drift_bound_check: shape mismatch");
  if (len_after < 1)
    throw std::invalid_argument("drift_bound_check: length must be positive");
  return (after.probs - before.probs).norm() <= 2.0 / double(len_after) + 1e-12;
}

}  // namespace stac
