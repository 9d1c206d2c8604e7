// Command-line front end: random MDP generation, multi-seed training runs
// with CSV output, deterministic identity checks, and rate fitting.

#include <CLI11.hpp>
#include <cstdio>
#include <exception>
#include <string>

#include "stac/experiment.hpp"
#include "stac/mdp.hpp"
#include "stac/oracles.hpp"
#include "stac/verification.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitUsage = 1;
constexpr int kExitIo = 2;
constexpr int kExitVerifyFailed = 3;
constexpr int kExitAllDiverged = 4;

struct CliOptions {
  stac::ExperimentConfig config;
  std::string algo = "both";
  std::string mdp_path = "mdp.txt";
  long verify_trials = 1000;
  long verify_seed = 0;
  double corrupt_gamma = 0.0;
  std::string rate_csv;
  std::string rate_field = "a";
  double tail_fraction = 0.5;
};

void add_mdp_flags(CLI::App* cmd, CliOptions& opt) {
  cmd->add_option("--S", opt.config.num_states, "Number of states");
  cmd->add_option("--A", opt.config.num_actions, "Number of actions");
  cmd->add_option("--gamma", opt.config.gamma, "Discount factor in [0,1)");
  cmd->add_option("--mdp-seed", opt.config.mdp_seed, "Seed of the generated MDP");
  cmd->set_config("--config", "", "Read options from a key = value file");
}

int cmd_gen_mdp(const CliOptions& opt) {
  const stac::TabularMdp mdp = stac::random_mdp(
      opt.config.num_states, opt.config.num_actions, opt.config.gamma,
      static_cast<std::uint64_t>(opt.config.mdp_seed));
  stac::save_mdp(mdp, opt.mdp_path);
  const stac::OptimalReturn opt_return = stac::optimal_return(mdp);
  stac::RngStream rng(static_cast<std::uint64_t>(opt.config.mdp_seed),
                      stac::stream_id::kVerification);
  const double lambda = stac::estimate_exploration_lambda(mdp, 2000, rng);
  std::printf("wrote %s\n", opt.mdp_path.c_str());
  std::printf("J_star = %s\n", stac::format_csv_value(opt_return.j_star).c_str());
  std::printf("lambda_estimate = %s\n", stac::format_csv_value(lambda).c_str());
  return kExitOk;
}

int cmd_run(CliOptions& opt) {
  opt.config.algo = stac::parse_algo(opt.algo);
  const stac::ExperimentResult result = stac::run_experiment(opt.config);
  long diverged = 0;
  for (const stac::AlgoAggregate& agg : result.aggregates) diverged += agg.n_diverged;
  std::printf("wrote %s and %s (S=%d A=%d gamma=%s iterations=%ld seeds=%d diverged=%ld)\n",
              result.results_path.c_str(), result.aggregate_path.c_str(),
              opt.config.num_states, opt.config.num_actions,
              stac::format_csv_value(opt.config.gamma).c_str(), opt.config.iterations,
              opt.config.seeds, diverged);
  return result.all_diverged ? kExitAllDiverged : kExitOk;
}

int cmd_verify(const CliOptions& opt) {
  const auto lines = stac::run_verification_suite(
      opt.verify_trials, static_cast<std::uint64_t>(opt.verify_seed),
      opt.corrupt_gamma);
  bool all_pass = true;
  for (const stac::CheckLine& line : lines) {
    const char* status = line.informational ? "INFO" : (line.pass ? "PASS" : "FAIL");
    std::printf("%-18s %-4s %s=%s\n", line.name.c_str(), status,
                line.value_label.c_str(), stac::format_csv_value(line.value).c_str());
    if (!line.informational) all_pass = all_pass && line.pass;
  }
  std::printf("overall: %s\n", all_pass ? "PASS" : "FAIL");
  return all_pass ? kExitOk : kExitVerifyFailed;
}

int cmd_rate(const CliOptions& opt) {
  const auto rates = stac::rate_from_csv(opt.rate_csv, opt.rate_field, opt.tail_fraction);
  for (const stac::AlgoRate& rate : rates)
    std::printf("%s %s slope=%s intercept=%s\n", rate.algo.c_str(),
                opt.rate_field.c_str(), stac::format_csv_value(rate.fit.slope).c_str(),
                stac::format_csv_value(rate.fit.intercept).c_str());
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Tabular single-timescale actor-critic laboratory"};
  app.require_subcommand(1);
  CliOptions opt;

  CLI::App* gen = app.add_subcommand("gen-mdp", "Generate a random MDP file");
  add_mdp_flags(gen, opt);
  gen->add_option("--out", opt.mdp_path, "Output path for the MDP file");

  CLI::App* run = app.add_subcommand("run", "Run training across seeds and write CSVs");
  add_mdp_flags(run, opt);
  run->add_option("--algo", opt.algo, "storm | baseline | both")
      ->check(CLI::IsMember({"storm", "baseline", "both"}));
  run->add_option("--iterations", opt.config.iterations, "Iterations per seed");
  run->add_option("--seeds", opt.config.seeds, "Number of seeds");
  run->add_option("--seed-base", opt.config.seed_base, "First seed value");
  run->add_option("--cb", opt.config.buffer_fraction, "Buffer window fraction in (0,1]");
  run->add_option("--eta-scale", opt.config.eta_scale, "Actor step-size scale");
  run->add_option("--beta-scale", opt.config.beta_scale, "Critic step-size scale");
  run->add_option("--nu-rate", opt.config.nu_rate, "Momentum decay rate");
  run->add_option("--log-every", opt.config.log_every, "Checkpoint period");
  run->add_option("--out", opt.config.output_path, "Results CSV path");
  run->add_option("--jobs", opt.config.jobs, "Worker threads (0 = hardware)");

  CLI::App* verify = app.add_subcommand("verify", "Run the deterministic check suite");
  verify->add_option("--trials", opt.verify_trials, "Trial count for randomized checks");
  verify->add_option("--seed", opt.verify_seed, "Seed of the check suite");
  verify->add_option("--corrupt-gamma", opt.corrupt_gamma,
                     "Negative control: discount mismatch injected into one identity")
      ->group("");  // hidden

  CLI::App* rate = app.add_subcommand("rate", "Fit a log-log decay rate from a results CSV");
  rate->add_option("csv", opt.rate_csv, "Results CSV produced by `run`")->required();
  rate->add_option("--field", opt.rate_field, "Column to fit: J, a, z, y, w, x");
  rate->add_option("--tail-fraction", opt.tail_fraction, "Trailing fraction of checkpoints");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (gen->parsed()) return cmd_gen_mdp(opt);
    if (run->parsed()) return cmd_run(opt);
    if (verify->parsed()) return cmd_verify(opt);
    if (rate->parsed()) return cmd_rate(opt);
  } catch (const std::invalid_argument& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::domain_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitUsage;
  } catch (const std::runtime_error& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  } catch (const std::exception& e) {
    std::fprintf(stderr, "error: %s\n", e.what());
    return kExitIo;
  }
  return kExitUsage;
}
