#include "stac/diagnostics.hpp"

#include <cmath>
#include <stdexcept>

#include "stac/trainer.hpp"

namespace stac {

namespace {

constexpr double kBoundTol = 1e-9;
constexpr double kGdlTol = 1e-10;

}  // namespace

Snapshotter::Snapshotter(const TabularMdp& mdp)
    : mdp_(&mdp), optimal_(optimal_return(mdp)) {
  d_star_ = occupancy(mdp, one_hot_policy(optimal_.greedy_actions, mdp.num_actions));
}

RecordDetail Snapshotter::record(long k, const PolicyParams& theta, const QTable& q,
                                 double eta_k, const Eigen::MatrixXd* momentum,
                                 const ReplayBuffer* buffer) const {
  const TabularMdp& mdp = *mdp_;
  const PolicyMatrix policy = softmax_policy(theta);
  const Eigen::VectorXd v = value_function(mdp, policy);
  const Eigen::VectorXd d = occupancy(mdp, policy);
  const Eigen::MatrixXd q_exact = q_from_values(mdp, v);

  DiagnosticsRecord rec;
  rec.k = k;
  rec.discounted_return = mdp.initial_dist.dot(v);
  rec.suboptimality = optimal_.j_star - rec.discounted_return;
  rec.critic_error = (q.values - q_exact).norm();

  Eigen::MatrixXd grad = q_exact;
  grad.colwise() -= v;
  double min_greedy_prob = 1.0;
  double mismatch = 0.0;
  for (int s = 0; s < mdp.num_states; ++s) {
    grad.row(s) = grad.row(s).cwiseProduct(policy.probs.row(s)) * (d(s) / (1.0 - mdp.gamma));
    min_greedy_prob = std::min(min_greedy_prob, policy.probs(s, optimal_.greedy_actions[s]));
    mismatch = std::max(mismatch, d_star_(s) / d(s));
  }
  rec.grad_norm = grad.norm();

  if (momentum != nullptr) {
    if (buffer != nullptr && !buffer->empty()) {
      const Eigen::MatrixXd reference =
          buffer->distribution().probs.cwiseProduct(
              bellman_operator(mdp, policy, q).values - q.values);
      rec.momentum_error = (*momentum - reference).norm();
    } else {
      rec.momentum_error = momentum->norm();
    }
  }

  rec.lyapunov = eta_k * rec.suboptimality + eta_k * rec.critic_error * rec.critic_error +
                 rec.momentum_error * rec.momentum_error;

  const double gdl_rhs = min_greedy_prob /
                         (std::sqrt(double(mdp.num_states)) * mismatch) *
                         rec.suboptimality;
  rec.gdl_ok = rec.grad_norm >= gdl_rhs - kGdlTol;

  const double scalar_bound = 2.0 / (1.0 - mdp.gamma);
  const double table_bound =
      2.0 * std::sqrt(double(mdp.num_states) * double(mdp.num_actions)) / (1.0 - mdp.gamma);
  rec.bounds_ok = rec.suboptimality <= scalar_bound + kBoundTol &&
                  rec.critic_error <= table_bound + kBoundTol &&
                  rec.grad_norm <= scalar_bound + kBoundTol &&
                  rec.momentum_error <= table_bound + kBoundTol;

  return {rec, d};
}

DiagnosticsRecord snapshot(const TabularMdp& mdp, const TrainerState& state,
                           const StepSchedules& schedules) {
  return Snapshotter(mdp)
      .record(state.k, state.theta, state.q, schedules.eta(state.k),
              &state.h.values, &state.buffer)
      .record;
}

double record_field(const DiagnosticsRecord& record, const std::string& field) {
  if (field == "J") return record.discounted_return;
  if (field == "a") return record.suboptimality;
  if (field == "z") return record.critic_error;
  if (field == "y") return record.grad_norm;
  if (field == "w") return record.momentum_error;
  if (field == "x") return record.lyapunov;
  throw std::invalid_argument("record_field: unknown field " + field);
}

RateFit fit_loglog(const std::vector<std::pair<long, double>>& points,
                   double tail_fraction) {
  if (!(tail_fraction > 0.0 && tail_fraction < 1.0))
    throw std::invalid_argument("fit_loglog: tail fraction must lie in (0, 1)");
  const auto n = points.size();
  const auto window = static_cast<std::size_t>(std::ceil(tail_fraction * double(n)));
  if (window < 10)
    throw std::domain_error("fit_loglog: need at least 10 points in the tail window");

  double mean_x = 0.0, mean_y = 0.0;
  std::vector<std::pair<double, double>> logs;
  logs.reserve(window);
  for (std::size_t i = n - window; i < n; ++i) {
    if (points[i].first < 1 || !(points[i].second > 0.0))
      throw std::domain_error("fit_loglog: tail window requires k >= 1 and positive values");
    logs.emplace_back(std::log(double(points[i].first)), std::log(points[i].second));
    mean_x += logs.back().first;
    mean_y += logs.back().second;
  }
  mean_x /= double(window);
  mean_y /= double(window);

  double sxx = 0.0, sxy = 0.0;
  for (const auto& [lx, ly] : logs) {
    sxx += (lx - mean_x) * (lx - mean_x);
    sxy += (lx - mean_x) * (ly - mean_y);
  }
  if (sxx == 0.0) throw std::domain_error("fit_loglog: degenerate abscissa");
  RateFit fit;
  fit.slope = sxy / sxx;
  fit.intercept = mean_y - fit.slope * mean_x;
  return fit;
}

RateFit fit_rate(const std::vector<DiagnosticsRecord>& records,
                 const std::string& field, double tail_fraction) {
  std::vector<std::pair<long, double>> points;
  points.reserve(records.size());
  for (const DiagnosticsRecord& rec : records)
    points.emplace_back(rec.k, record_field(rec, field));
  return fit_loglog(points, tail_fraction);
}

std::vector<AggregateRecord> aggregate(
    const std::vector<std::vector<DiagnosticsRecord>>& per_seed) {
  if (per_seed.empty()) return {};
  const std::size_t grid = per_seed.front().size();
  for (const auto& seq : per_seed) {
    if (seq.size() != grid)
      throw std::invalid_argument("aggregate: checkpoint grids differ in length");
    for (std::size_t i = 0; i < grid; ++i)
      if (seq[i].k != per_seed.front()[i].k)
        throw std::invalid_argument("aggregate: checkpoint grids differ");
  }

  const double n = double(per_seed.size());
  std::vector<AggregateRecord> out(grid);
  for (std::size_t i = 0; i < grid; ++i) {
    out[i].k = per_seed.front()[i].k;
    out[i].n_seeds = static_cast<long>(per_seed.size());
    auto stats = [&](double (*get)(const DiagnosticsRecord&)) {
      FieldStats fs;
      for (const auto& seq : per_seed) fs.mean += get(seq[i]);
      fs.mean /= n;
      double var = 0.0;
      for (const auto& seq : per_seed) {
        const double delta = get(seq[i]) - fs.mean;
        var += delta * delta;
      }
      fs.stddev = std::sqrt(var / n);
      return fs;
    };
    out[i].discounted_return = stats([](const DiagnosticsRecord& r) { return r.discounted_return; });
    out[i].suboptimality = stats([](const DiagnosticsRecord& r) { return r.suboptimality; });
    out[i].critic_error = stats([](const DiagnosticsRecord& r) { return r.critic_error; });
    out[i].grad_norm = stats([](const DiagnosticsRecord& r) { return r.grad_norm; });
    out[i].momentum_error = stats([](const DiagnosticsRecord& r) { return r.momentum_error; });
    out[i].lyapunov = stats([](const DiagnosticsRecord& r) { return r.lyapunov; });
  }
  return out;
}

}  // namespace stac
