#include <cstdint>
#include <filesystem>
#include <iostream>
#include <string>

#include "CLI11.hpp"
#include "omnivlc/csv.hpp"
#include "omnivlc/errors.hpp"
#include "omnivlc/experiments.hpp"

namespace {

namespace fs = std::filesystem;

struct Args {
  std::string config_path;
  std::string out_path;
  std::uint64_t seed = 0;
  bool seed_set = false;
};

fs::path resolve_out(const omnivlc::ExperimentConfig& config,
                     const Args& args) {
  if (!args.out_path.empty()) return args.out_path;
  if (!config.output.empty()) return config.output;
  return omnivlc::to_string(config.kind) + ".csv";
}

// out.csv -> out_precoder.csv, out_users.csv, ...
fs::path with_suffix(const fs::path& base, const std::string& suffix) {
  fs::path derived = base;
  const fs::path ext =
      base.has_extension() ? base.extension() : fs::path(".csv");
  derived.replace_extension();
  derived += suffix;
  derived += ext;
  return derived;
}

omnivlc::ExperimentConfig load(const Args& args) {
  omnivlc::ExperimentConfig config = omnivlc::load_config(args.config_path);
  if (args.seed_set) {
    config.optimizer.seed = args.seed;
    config.ber.seed = args.seed;
  }
  return config;
}

int run_convergence(const Args& args) {
  const omnivlc::ExperimentConfig config = load(args);
  const omnivlc::ConvergenceRun run = omnivlc::run_convergence(config);
  const fs::path out = resolve_out(config, args);
  const fs::path precoder_out = with_suffix(out, "_precoder");
  {
    std::ofstream stream = omnivlc::open_output(out);
    omnivlc::write_convergence_csv(stream, run, config);
  }
  {
    std::ofstream stream = omnivlc::open_output(precoder_out);
    omnivlc::write_precoder_csv(stream, run.precoder);
  }
  if (run.trace.converged)
    std::cout << "converged after " << run.trace.iterations_run
              << " iterations, objective "
              << omnivlc::csv_double(run.trace.objective_history.back())
              << '\n';
  else
    std::cout << "stopped at max_iterations (" << run.trace.iterations_run
              << "), objective "
              << omnivlc::csv_double(run.trace.objective_history.back())
              << '\n';
  std::cout << "wrote " << out.string() << " and " << precoder_out.string()
            << '\n';
  return 0;
}

int run_sweep(const Args& args) {
  const omnivlc::ExperimentConfig config = load(args);
  const omnivlc::SweepRun run = omnivlc::run_sweep(config);
  const fs::path out = resolve_out(config, args);
  std::ofstream stream = omnivlc::open_output(out);
  omnivlc::write_sweep_csv(stream, run, config);
  std::cout << "swept " << run.values.size() << ' ' << run.parameter
            << " values\nwrote " << out.string() << '\n';
  return 0;
}

int run_ber(const Args& args) {
  const omnivlc::ExperimentConfig config = load(args);
  const omnivlc::BerResult result = omnivlc::run_ber(config);
  const fs::path out = resolve_out(config, args);
  const fs::path users_out = with_suffix(out, "_users");
  {
    std::ofstream stream = omnivlc::open_output(out);
    omnivlc::write_ber_results_csv(stream, result, config);
  }
  {
    std::ofstream stream = omnivlc::open_output(users_out);
    omnivlc::write_ber_user_results_csv(stream, result, config);
  }
  std::cout << "simulated " << config.ber.n_users << " users at "
            << result.noise_sweep.size() << " noise levels\n";
  if (!result.uncoverable_users.empty())
    std::cout << result.uncoverable_users.size()
              << " user(s) outside coverage, excluded from means\n";
  std::cout << "wrote " << out.string() << " and " << users_out.string()
            << '\n';
  return 0;
}

int run_power_map(const Args& args) {
  const omnivlc::ExperimentConfig config = load(args);
  const omnivlc::PowerMapRun run = omnivlc::run_power_map(config);
  const fs::path out = resolve_out(config, args);
  std::ofstream stream = omnivlc::open_output(out);
  omnivlc::write_power_map_results_csv(stream, run, config);
  std::cout << "mapped " << run.map.values.size() << " points, armp "
            << omnivlc::csv_double(run.map.armp) << "\nwrote " << out.string()
            << '\n';
  return 0;
}

void add_common(CLI::App* sub, Args& args, CLI::Option*& seed_opt) {
  sub->add_option("--config", args.config_path, "Experiment config (JSON)")
      ->required();
  sub->add_option("--out", args.out_path,
                  "Output CSV path (default: config 'output' field)");
  seed_opt = sub->add_option("--seed", args.seed,
                             "Override the RNG seed from the config");
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LED-array precoding experiments"};
  app.require_subcommand(1);

  Args args;
  CLI::Option* seed_opts[4] = {};
  CLI::App* convergence =
      app.add_subcommand("convergence", "Optimize one scenario and trace the objective");
  CLI::App* sweep =
      app.add_subcommand("sweep", "Optimized vs baseline power across a parameter sweep");
  CLI::App* ber = app.add_subcommand("ber", "On-off keying error rates for random users");
  CLI::App* power_map =
      app.add_subcommand("power-map", "Received power at every sample point");
  add_common(convergence, args, seed_opts[0]);
  add_common(sweep, args, seed_opts[1]);
  add_common(ber, args, seed_opts[2]);
  add_common(power_map, args, seed_opts[3]);

  CLI11_PARSE(app, argc, argv);

  for (const CLI::Option* opt : seed_opts)
    if (opt && opt->count() > 0) args.seed_set = true;

  try {
    if (convergence->parsed()) return run_convergence(args);
    if (sweep->parsed()) return run_sweep(args);
    if (ber->parsed()) return run_ber(args);
    return run_power_map(args);
  } catch (const omnivlc::ConfigParseError& e) {
    std::cerr << "error: parse: " << e.what() << '\n';
    return 2;
  } catch (const omnivlc::ConfigValidationError& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: config: " << e.what() << '\n';
    return 3;
  } catch (const omnivlc::NoSignalError& e) {
    std::cerr << "error: domain: " << e.what() << '\n';
    return 4;
  } catch (const omnivlc::DegenerateRowError& e) {
    std::cerr << "error: domain: " << e.what() << '\n';
    return 4;
  } catch (const omnivlc::UncoverableUserError& e) {
    std::cerr << "error: domain: " << e.what() << '\n';
    return 4;
  } catch (const omnivlc::IoError& e) {
    std::cerr << "error: io: " << e.what() << '\n';
    return 5;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
}
