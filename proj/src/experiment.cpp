#include "stac/experiment.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>
#include <stdexcept>
#include <thread>

namespace stac {

namespace {

constexpr const char* kResultsHeader =
    "algo,seed,k,J,a,z,y,w,x,gdl_ok,bounds_ok,diverged_at";

std::string join_row(const SeedRun& run, const DiagnosticsRecord& rec) {
  std::ostringstream row;
  row << run.algo << ',' << run.seed << ',' << rec.k << ','
      << format_csv_value(rec.discounted_return) << ','
      << format_csv_value(rec.suboptimality) << ','
      << format_csv_value(rec.critic_error) << ','
      << format_csv_value(rec.grad_norm) << ','
      << format_csv_value(rec.momentum_error) << ','
      << format_csv_value(rec.lyapunov) << ','
      << (rec.gdl_ok ? 1 : 0) << ',' << (rec.bounds_ok ? 1 : 0) << ','
      << run.diverged_at;
  return row.str();
}

std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> cells;
  std::string cell;
  std::istringstream in(line);
  while (std::getline(in, cell, ',')) cells.push_back(cell);
  if (!line.empty() && line.back() == ',') cells.emplace_back();
  return cells;
}

}  // namespace

Algo parse_algo(const std::string& name) {
  if (name == "storm") return Algo::kStorm;
  if (name == "baseline") return Algo::kBaseline;
  if (name == "both") return Algo::kBoth;
  throw std::invalid_argument("unknown algorithm: " + name);
}

std::string algo_name(Algo algo) {
  switch (algo) {
    case Algo::kStorm: return "storm";
    case Algo::kBaseline: return "baseline";
    case Algo::kBoth: return "both";
  }
  return "both";
}

void ExperimentConfig::validate() const {
  if (num_states < 1 || num_actions < 1)
    throw std::invalid_argument("config: need at least one state and one action");
  if (!(gamma >= 0.0 && gamma < 1.0))
    throw std::invalid_argument("config: gamma must lie in [0, 1)");
  if (iterations < 1) throw std::invalid_argument("config: iterations must be positive");
  if (seeds < 1) throw std::invalid_argument("config: seeds must be positive");
  if (!(buffer_fraction > 0.0 && buffer_fraction <= 1.0))
    throw std::invalid_argument("config: buffer fraction must lie in (0, 1]");
  if (!(eta_scale > 0.0) || !(beta_scale > 0.0) || !(nu_rate >= 0.0))
    throw std::invalid_argument("config: invalid step-size scales");
  if (log_every < 1) throw std::invalid_argument("config: log_every must be positive");
  if (jobs < 0) throw std::invalid_argument("config: jobs must be nonnegative");
  if (output_path.empty()) throw std::invalid_argument("config: empty output path");
}

std::string aggregate_path_for(const std::string& results_path) {
  const auto slash = results_path.find_last_of('/');
  const auto dot = results_path.find_last_of('.');
  if (dot == std::string::npos || (slash != std::string::npos && dot < slash))
    return results_path + "_agg";
  return results_path.substr(0, dot) + "_agg" + results_path.substr(dot);
}

std::string format_csv_value(double value) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.12g", value);
  return buf;
}

ExperimentResult run_experiment(const ExperimentConfig& config) {
  config.validate();
  const TabularMdp mdp =
      random_mdp(config.num_states, config.num_actions, config.gamma,
                 static_cast<std::uint64_t>(config.mdp_seed));

  std::vector<std::string> algos;
  if (config.algo == Algo::kStorm || config.algo == Algo::kBoth)
    algos.push_back("storm");
  if (config.algo == Algo::kBaseline || config.algo == Algo::kBoth)
    algos.push_back("baseline");

  struct Task {
    std::string algo;
    long seed;
  };
  std::vector<Task> tasks;
  for (const std::string& algo : algos)
    for (int i = 0; i < config.seeds; ++i)
      tasks.push_back({algo, config.seed_base + i});

  ExperimentResult result;
  result.runs.resize(tasks.size());

  const unsigned hardware = std::max(1u, std::thread::hardware_concurrency());
  const unsigned workers = std::min<unsigned>(
      config.jobs > 0 ? unsigned(config.jobs) : hardware, unsigned(tasks.size()));

  std::atomic<std::size_t> next{0};
  auto work = [&]() {
    for (std::size_t i = next.fetch_add(1); i < tasks.size(); i = next.fetch_add(1)) {
      const Task& task = tasks[i];
      SeedRun run;
      run.algo = task.algo;
      run.seed = task.seed;
      TrainOutcome outcome;
      if (task.algo == "storm") {
        StepSchedules schedules{config.eta_scale, config.beta_scale, config.nu_rate};
        outcome = train_collect(mdp, schedules, config.buffer_fraction,
                                config.iterations,
                                static_cast<std::uint64_t>(task.seed),
                                config.log_every);
      } else {
        outcome = train_baseline_collect(mdp, config.eta_scale, config.beta_scale,
                                         config.iterations,
                                         static_cast<std::uint64_t>(task.seed),
                                         config.log_every);
      }
      run.records = std::move(outcome.records);
      run.diverged_at = outcome.diverged_at;
      result.runs[i] = std::move(run);
    }
  };

  if (workers <= 1) {
    work();
  } else {
    std::vector<std::thread> pool;
    for (unsigned i = 0; i < workers; ++i) pool.emplace_back(work);
    for (std::thread& t : pool) t.join();
  }

  // Aggregate over completed seeds only; divergent seeds are counted.
  std::size_t completed = 0;
  for (const std::string& algo : algos) {
    AlgoAggregate agg;
    agg.algo = algo;
    std::vector<std::vector<DiagnosticsRecord>> per_seed;
    for (const SeedRun& run : result.runs) {
      if (run.algo != algo) continue;
      if (run.diverged_at >= 0) {
        ++agg.n_diverged;
      } else {
        per_seed.push_back(run.records);
        ++completed;
      }
    }
    agg.rows = aggregate(per_seed);
    result.aggregates.push_back(std::move(agg));
  }
  result.all_diverged = completed == 0;

  result.results_path = config.output_path;
  result.aggregate_path = aggregate_path_for(config.output_path);
  write_results_csv(result.results_path, result.runs);
  write_aggregate_csv(result.aggregate_path, result.aggregates);
  return result;
}

void write_results_csv(const std::string& path, const std::vector<SeedRun>& runs) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << kResultsHeader << '\n';
  for (const SeedRun& run : runs)
    for (const DiagnosticsRecord& rec : run.records) file << join_row(run, rec) << '\n';
  if (!file) throw std::runtime_error("write failed for " + path);
}

void write_aggregate_csv(const std::string& path,
                         const std::vector<AlgoAggregate>& aggregates) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw std::runtime_error("cannot open " + path + " for writing");
  file << "algo,k,n_seeds,n_diverged,J_mean,J_std,a_mean,a_std,z_mean,z_std,"
          "y_mean,y_std,w_mean,w_std,x_mean,x_std\n";
  for (const AlgoAggregate& agg : aggregates) {
    for (const AggregateRecord& row : agg.rows) {
      file << agg.algo << ',' << row.k << ',' << row.n_seeds << ',' << agg.n_diverged;
      for (const FieldStats* fs :
           {&row.discounted_return, &row.suboptimality, &row.critic_error,
            &row.grad_norm, &row.momentum_error, &row.lyapunov})
        file << ',' << format_csv_value(fs->mean) << ',' << format_csv_value(fs->stddev);
      file << '\n';
    }
  }
  if (!file) throw std::runtime_error("write failed for " + path);
}

std::vector<SeedRun> read_results_csv(const std::string& path) {
  std::ifstream file(path);
  if (!file) throw std::runtime_error("cannot open " + path);
  std::string line;
  if (!std::getline(file, line)) throw std::runtime_error("empty CSV " + path);

  const std::vector<std::string> header = split_csv_line(line);
  std::map<std::string, std::size_t> col;
  for (std::size_t i = 0; i < header.size(); ++i) col[header[i]] = i;
  for (const char* required :
       {"algo", "seed", "k", "J", "a", "z", "y", "w", "x", "diverged_at"})
    if (col.find(required) == col.end())
      throw std::invalid_argument(std::string("missing column ") + required + " in " + path);

  std::map<std::pair<std::string, long>, SeedRun> by_key;
  while (std::getline(file, line)) {
    if (line.empty()) continue;
    const std::vector<std::string> cells = split_csv_line(line);
    if (cells.size() < header.size())
      throw std::runtime_error("short row in " + path);
    SeedRun& run = by_key[{cells[col["algo"]], std::stol(cells[col["seed"]])}];
    run.algo = cells[col["algo"]];
    run.seed = std::stol(cells[col["seed"]]);
    run.diverged_at = std::stol(cells[col["diverged_at"]]);
    DiagnosticsRecord rec;
    rec.k = std::stol(cells[col["k"]]);
    rec.discounted_return = std::stod(cells[col["J"]]);
    rec.suboptimality = std::stod(cells[col["a"]]);
    rec.critic_error = std::stod(cells[col["z"]]);
    rec.grad_norm = std::stod(cells[col["y"]]);
    rec.momentum_error = std::stod(cells[col["w"]]);
    rec.lyapunov = std::stod(cells[col["x"]]);
    run.records.push_back(rec);
  }

  std::vector<SeedRun> runs;
  runs.reserve(by_key.size());
  for (auto& [key, run] : by_key) runs.push_back(std::move(run));
  return runs;
}

std::vector<AlgoRate> rate_from_csv(const std::string& path, const std::string& field,
                                    double tail_fraction) {
  const std::vector<SeedRun> runs = read_results_csv(path);

  std::vector<std::string> algos;
  for (const SeedRun& run : runs)
    if (std::find(algos.begin(), algos.end(), run.algo) == algos.end())
      algos.push_back(run.algo);

  std::vector<AlgoRate> rates;
  for (const std::string& algo : algos) {
    std::vector<std::vector<DiagnosticsRecord>> per_seed;
    for (const SeedRun& run : runs)
      if (run.algo == algo && run.diverged_at < 0) per_seed.push_back(run.records);
    if (per_seed.empty())
      throw std::domain_error("rate: every seed of " + algo + " diverged");

    std::vector<std::pair<long, double>> mean_series;
    for (const AggregateRecord& row : aggregate(per_seed)) {
      double value = 0.0;
      if (field == "J") value = row.discounted_return.mean;
      else if (field == "a") value = row.suboptimality.mean;
      else if (field == "z") value = row.critic_error.mean;
      else if (field == "y") value = row.grad_norm.mean;
      else if (field == "w") value = row.momentum_error.mean;
      else if (field == "x") value = row.lyapunov.mean;
      else throw std::invalid_argument("rate: unknown field " + field);
      mean_series.emplace_back(row.k, value);
    }
    rates.push_back({algo, fit_loglog(mean_series, tail_fraction)});
  }
  return rates;
}

}  // namespace stac
