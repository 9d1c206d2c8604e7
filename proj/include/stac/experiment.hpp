#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "stac/diagnostics.hpp"
#include "stac/mdp.hpp"
#include "stac/trainer.hpp"

namespace stac {

enum class Algo { kStorm, kBaseline, kBoth };

Algo parse_algo(const std::string& name);
std::string algo_name(Algo algo);

/// Full experiment specification; the defaults reproduce the reference
/// comparison (S=10, A=5, gamma=0.9, 20 seeds, 20000 iterations, both
/// algorithms).
struct ExperimentConfig {
  int num_states = 10;
  int num_actions = 5;
  double gamma = 0.9;
  long mdp_seed = 0;
  Algo algo = Algo::kBoth;
  long iterations = 20000;
  int seeds = 20;
  long seed_base = 0;
  double buffer_fraction = 0.1;
  double eta_scale = 1.0;
  double beta_scale = 1.0;
  double nu_rate = 0.001;
  long log_every = 100;
  std::string output_path = "results.csv";
  int jobs = 0;  // 0 = hardware concurrency

  void validate() const;
};

struct SeedRun {
  std::string algo;
  long seed = 0;
  std::vector<DiagnosticsRecord> records;
  long diverged_at = -1;
};

struct AlgoAggregate {
  std::string algo;
  long n_diverged = 0;
  std::vector<AggregateRecord> rows;
};

struct ExperimentResult {
  std::vector<SeedRun> runs;           // ordered by (algo, seed)
  std::vector<AlgoAggregate> aggregates;
  std::string results_path;
  std::string aggregate_path;
  bool all_diverged = false;
};

/// "<stem>_agg<ext>" next to the results file.
std::string aggregate_path_for(const std::string& results_path);

/// Runs the configured algorithms across seeds (seed_base + i), possibly on
/// several worker threads, and writes the per-seed and aggregate CSVs. The
/// output bytes depend only on the config, never on the worker layout.
ExperimentResult run_experiment(const ExperimentConfig& config);

void write_results_csv(const std::string& path, const std::vector<SeedRun>& runs);
void write_aggregate_csv(const std::string& path,
                         const std::vector<AlgoAggregate>& aggregates);

/// Reads a per-seed results CSV back; throws std::invalid_argument when a
/// required column is missing and std::runtime_error on I/O failure.
std::vector<SeedRun> read_results_csv(const std::string& path);

struct AlgoRate {
  std::string algo;
  RateFit fit;
};

/// Log-log rate fit of the cross-seed mean of a field, one entry per
/// algorithm present in the CSV. Diverged seeds are excluded.
std::vector<AlgoRate> rate_from_csv(const std::string& path, const std::string& field,
                                    double tail_fraction);

/// Shortest-width formatting with 12 significant digits, used for every
/// floating-point CSV cell.
std::string format_csv_value(double value);

}  // namespace stac
