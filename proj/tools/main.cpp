#include <CLI11.hpp>
#include <iostream>
#include <json.hpp>
#include <optional>
#include <string>

#include "cli_config.hpp"
#include "commands.hpp"
#include "snkb/errors.hpp"
#include "snkb/parallel.hpp"

namespace {

struct CommonFlags {
  std::string config_path;
  std::string out_dir;
  std::optional<std::uint64_t> seed;
  int threads = 0;
};

void add_common(CLI::App* sub, CommonFlags& flags) {
  sub->add_option("--config", flags.config_path, "experiment config (JSON)")
      ->required()
      ->check(CLI::ExistingFile);
  sub->add_option("--out", flags.out_dir, "output directory (overrides the config)");
  sub->add_option("--seed", flags.seed, "master seed (overrides the config)");
  sub->add_option("--threads", flags.threads,
                  "worker threads (default: SNKB_THREADS, then hardware)");
}

int run(snkb::cli::Command command, const CommonFlags& flags) {
  using namespace snkb::cli;
  AnyConfig config = load_config(flags.config_path, command);

  if (flags.seed) {
    if (command == Command::coverage) config.coverage.core.master_seed = *flags.seed;
    if (command == Command::bandit) config.bandit.master_seed = *flags.seed;
  }

  CommandIO io;
  io.threads = snkb::resolve_threads(flags.threads);
  std::optional<std::string> config_out;
  switch (command) {
    case Command::bounds: config_out = config.bounds.out; break;
    case Command::coverage: config_out = config.coverage.out; break;
    case Command::bandit: config_out = config.bandit.out; break;
    case Command::regression: config_out = config.regression.out; break;
  }
  if (!flags.out_dir.empty()) {
    io.out_dir = flags.out_dir;
  } else if (config_out) {
    io.out_dir = *config_out;
  } else {
    io.out_dir = "snkb-out";
  }

  run_command(config, io);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"self-normalised concentration bounds, kernel logistic confidence "
               "sequences and logistic UCB bandit experiments"};
  app.require_subcommand(1);

  CommonFlags bounds_flags, coverage_flags, bandit_flags, regression_flags;
  add_common(app.add_subcommand("bounds", "tabulate radii and widths over a grid"), bounds_flags);
  add_common(app.add_subcommand("coverage", "Monte Carlo coverage of a concentration bound"),
             coverage_flags);
  add_common(app.add_subcommand("bandit", "run logistic UCB over seeded replications"),
             bandit_flags);
  add_common(app.add_subcommand("regression", "fit a dataset and emit pointwise bands"),
             regression_flags);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    if (e.get_exit_code() == 0) return app.exit(e);  // --help
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  }

  try {
    if (app.got_subcommand("bounds")) return run(snkb::cli::Command::bounds, bounds_flags);
    if (app.got_subcommand("coverage")) return run(snkb::cli::Command::coverage, coverage_flags);
    if (app.got_subcommand("bandit")) return run(snkb::cli::Command::bandit, bandit_flags);
    if (app.got_subcommand("regression")) {
      return run(snkb::cli::Command::regression, regression_flags);
    }
    std::cerr << "error: no subcommand\n";
    return 1;
  } catch (const snkb::CheckFailure& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 3;
  } catch (const std::invalid_argument& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const nlohmann::json::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 1;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 2;
  }
}
