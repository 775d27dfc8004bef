#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <filesystem>
#include <json.hpp>
#include <optional>
#include <string>
#include <vector>

#include "snkb/bandit.hpp"
#include "snkb/kernel.hpp"
#include "snkb/validation.hpp"

namespace snkb::cli {

using nlohmann::json;

/// Parsed, fully validated experiment configurations. Every loader rejects
/// unknown keys and re-serialises to a canonical JSON document (defaults
/// materialised, keys sorted) so that configs round-trip exactly.

struct BoundsConfig {
  double b = 1.0;
  std::vector<std::int64_t> n;
  std::vector<double> rho;
  std::vector<double> y;
  std::vector<double> gamma;
  std::optional<std::string> out;

  static BoundsConfig from_json(const json& doc);
  json to_json() const;
};

struct CoverageConfig {
  validation::CoverageConfig core{};
  std::string theorem_name;
  bool assert_budget = false;
  std::optional<std::string> out;

  static CoverageConfig from_json(const json& doc);
  json to_json() const;
};

struct BanditConfig {
  bandit::BanditConfig run{};
  int seeds = 1;                 // number of independent runs
  std::uint64_t master_seed = 1; // run i draws from stream (master, i)
  std::optional<std::string> out;

  static BanditConfig from_json(const json& doc);
  json to_json() const;
};

struct RegressionConfig {
  KernelSpec kernel{};
  double rho = 1.0;
  double y = 3.0;
  double b = 1.0;
  std::string dataset;  // resolved against the config file's directory
  std::vector<Eigen::VectorXd> test_points;
  std::optional<std::string> out;

  static RegressionConfig from_json(const json& doc);
  json to_json() const;
};

enum class Command { bounds, coverage, bandit, regression };

struct AnyConfig {
  Command command = Command::bounds;
  BoundsConfig bounds{};
  CoverageConfig coverage{};
  BanditConfig bandit{};
  RegressionConfig regression{};

  json to_json() const;
};

/// Reads and validates a config file. The document's "command" key must
/// match `expected` when given. Throws std::invalid_argument on any
/// schema violation (unknown key, missing key, wrong type, bad value).
AnyConfig load_config(const std::filesystem::path& path,
                      std::optional<Command> expected = std::nullopt);
AnyConfig parse_config(const json& doc);

/// Dataset rows for the regression command: input_dim columns plus a
/// response in [0, 1], comma separated, no header. Malformed rows are
/// reported with their 1-based line number.
struct Dataset {
  std::vector<Eigen::VectorXd> inputs;
  Eigen::VectorXd responses;
};
Dataset load_dataset(const std::filesystem::path& path, int input_dim);

std::string command_name(Command command);

}  // namespace snkb::cli
