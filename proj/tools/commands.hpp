#pragma once

#include <filesystem>

#include "cli_config.hpp"

namespace snkb::cli {

struct CommandIO {
  std::filesystem::path out_dir;
  int threads = 1;
  bool quiet = false;  // suppress the console report (tests)
};

/// Each command writes its CSV outputs plus a canonical `config.json` echo
/// under out_dir. Output files carry no timing or host information, so a
/// rerun with the same config and seed is byte-identical; runtime goes to
/// the console report only.
void cmd_bounds(const BoundsConfig& config, const CommandIO& io);
void cmd_coverage(const CoverageConfig& config, const CommandIO& io);
void cmd_bandit(const BanditConfig& config, const CommandIO& io);
void cmd_regression(const RegressionConfig& config, const CommandIO& io);

void run_command(const AnyConfig& config, const CommandIO& io);

}  // namespace snkb::cli
