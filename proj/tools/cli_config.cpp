#include "cli_config.hpp"

#include <charconv>
#include <fstream>
#include <set>
#include <stdexcept>

namespace snkb::cli {

namespace {

[[noreturn]] void fail(const std::string& message) { throw std::invalid_argument(message); }

void check_keys(const json& obj, const std::string& where, const std::set<std::string>& allowed) {
  if (!obj.is_object()) fail(where + ": expected an object");
  for (const auto& item : obj.items()) {
    if (!allowed.count(item.key())) fail(where + ": unknown key '" + item.key() + "'");
  }
}

const json& require(const json& obj, const std::string& where, const std::string& key) {
  const auto it = obj.find(key);
  if (it == obj.end()) fail(where + ": missing key '" + key + "'");
  return *it;
}

double get_double(const json& obj, const std::string& where, const std::string& key) {
  const json& v = require(obj, where, key);
  if (!v.is_number()) fail(where + ": '" + key + "' must be a number");
  return v.get<double>();
}

double get_double_or(const json& obj, const std::string& where, const std::string& key,
                     double fallback) {
  if (!obj.contains(key)) return fallback;
  return get_double(obj, where, key);
}

std::int64_t get_int(const json& obj, const std::string& where, const std::string& key) {
  const json& v = require(obj, where, key);
  if (!v.is_number_integer()) fail(where + ": '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

std::int64_t get_int_or(const json& obj, const std::string& where, const std::string& key,
                        std::int64_t fallback) {
  if (!obj.contains(key)) return fallback;
  return get_int(obj, where, key);
}

std::string get_string(const json& obj, const std::string& where, const std::string& key) {
  const json& v = require(obj, where, key);
  if (!v.is_string()) fail(where + ": '" + key + "' must be a string");
  return v.get<std::string>();
}

std::string get_string_or(const json& obj, const std::string& where, const std::string& key,
                          const std::string& fallback) {
  if (!obj.contains(key)) return fallback;
  return get_string(obj, where, key);
}

bool get_bool_or(const json& obj, const std::string& where, const std::string& key,
                 bool fallback) {
  if (!obj.contains(key)) return fallback;
  const json& v = obj.at(key);
  if (!v.is_boolean()) fail(where + ": '" + key + "' must be a boolean");
  return v.get<bool>();
}

Eigen::VectorXd get_vector(const json& v, const std::string& where) {
  if (!v.is_array() || v.empty()) fail(where + ": expected a nonempty numeric array");
  Eigen::VectorXd out(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    if (!v[i].is_number()) fail(where + ": expected a numeric array");
    out[static_cast<Eigen::Index>(i)] = v[i].get<double>();
  }
  return out;
}

std::vector<Eigen::VectorXd> get_points(const json& v, const std::string& where, int dim) {
  if (!v.is_array()) fail(where + ": expected an array of points");
  std::vector<Eigen::VectorXd> points;
  points.reserve(v.size());
  for (std::size_t i = 0; i < v.size(); ++i) {
    Eigen::VectorXd p = get_vector(v[i], where);
    if (p.size() != dim) fail(where + ": point " + std::to_string(i) + " has wrong dimension");
    points.push_back(std::move(p));
  }
  return points;
}

json vector_to_json(const Eigen::VectorXd& v) {
  json arr = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) arr.push_back(v[i]);
  return arr;
}

KernelSpec parse_kernel(const json& obj) {
  check_keys(obj, "kernel", {"family", "lengthscale", "input_dim"});
  KernelSpec spec;
  const std::string family = get_string(obj, "kernel", "family");
  if (family == "linear") {
    spec.family = KernelFamily::linear;
  } else if (family == "gaussian-rbf") {
    spec.family = KernelFamily::gaussian_rbf;
  } else if (family == "matern-5/2") {
    spec.family = KernelFamily::matern52;
  } else {
    fail("kernel: unknown family '" + family + "'");
  }
  spec.input_dim = static_cast<int>(get_int(obj, "kernel", "input_dim"));
  spec.lengthscale = get_double_or(obj, "kernel", "lengthscale", 1.0);
  spec.validate();
  return spec;
}

json kernel_to_json(const KernelSpec& spec) {
  const char* family = spec.family == KernelFamily::linear        ? "linear"
                       : spec.family == KernelFamily::gaussian_rbf ? "gaussian-rbf"
                                                                    : "matern-5/2";
  return json{{"family", family},
              {"lengthscale", spec.lengthscale},
              {"input_dim", spec.input_dim}};
}

validation::NoiseModel parse_noise(const json& obj) {
  check_keys(obj, "noise", {"kind", "scale"});
  validation::NoiseModel noise;
  const std::string kind = get_string(obj, "noise", "kind");
  if (kind == "rademacher-scaled") {
    noise.kind = validation::NoiseKind::rademacher_scaled;
  } else if (kind == "centered-bernoulli") {
    noise.kind = validation::NoiseKind::centered_bernoulli;
  } else if (kind == "truncated-continuous") {
    noise.kind = validation::NoiseKind::truncated_continuous;
  } else {
    fail("noise: unknown kind '" + kind + "'");
  }
  noise.scale = get_double_or(obj, "noise", "scale", 1.0);
  noise.validate();
  return noise;
}

json noise_to_json(const validation::NoiseModel& noise) {
  const char* kind = noise.kind == validation::NoiseKind::rademacher_scaled ? "rademacher-scaled"
                     : noise.kind == validation::NoiseKind::centered_bernoulli
                         ? "centered-bernoulli"
                         : "truncated-continuous";
  return json{{"kind", kind}, {"scale", noise.scale}};
}

validation::CovariateRule parse_covariates(const std::string& name) {
  if (name == "round-robin") return validation::CovariateRule::round_robin;
  if (name == "adversarial") return validation::CovariateRule::adversarial_align;
  if (name == "sphere-iid") return validation::CovariateRule::sphere_iid;
  fail("coverage: unknown covariate rule '" + name + "'");
}

std::string covariates_name(validation::CovariateRule rule) {
  switch (rule) {
    case validation::CovariateRule::round_robin: return "round-robin";
    case validation::CovariateRule::adversarial_align: return "adversarial";
    case validation::CovariateRule::sphere_iid: return "sphere-iid";
  }
  return "round-robin";
}

}  // namespace

std::string command_name(Command command) {
  switch (command) {
    case Command::bounds: return "bounds";
    case Command::coverage: return "coverage";
    case Command::bandit: return "bandit";
    case Command::regression: return "regression";
  }
  return "bounds";
}

BoundsConfig BoundsConfig::from_json(const json& doc) {
  check_keys(doc, "bounds", {"command", "b", "grid", "out"});
  BoundsConfig config;
  config.b = get_double_or(doc, "bounds", "b", 1.0);
  if (!(config.b > 0.0)) fail("bounds: 'b' must be positive");
  const json& grid = require(doc, "bounds", "grid");
  check_keys(grid, "bounds.grid", {"n", "rho", "y", "gamma"});
  for (const json& v : require(grid, "bounds.grid", "n")) {
    if (!v.is_number_integer() || v.get<std::int64_t>() < 1) fail("bounds.grid: n must be >= 1");
    config.n.push_back(v.get<std::int64_t>());
  }
  for (const json& v : require(grid, "bounds.grid", "rho")) {
    if (!v.is_number() || !(v.get<double>() > 0.0)) fail("bounds.grid: rho must be positive");
    config.rho.push_back(v.get<double>());
  }
  for (const json& v : require(grid, "bounds.grid", "y")) {
    if (!v.is_number() || !(v.get<double>() > 0.0)) fail("bounds.grid: y must be positive");
    config.y.push_back(v.get<double>());
  }
  for (const json& v : require(grid, "bounds.grid", "gamma")) {
    if (!v.is_number() || v.get<double>() < 0.0) fail("bounds.grid: gamma must be nonnegative");
    config.gamma.push_back(v.get<double>());
  }
  if (doc.contains("out")) config.out = get_string(doc, "bounds", "out");
  return config;
}

json BoundsConfig::to_json() const {
  json grid{{"n", n}, {"rho", rho}, {"y", y}, {"gamma", gamma}};
  return json{{"command", "bounds"}, {"b", b}, {"grid", grid}};
}

CoverageConfig CoverageConfig::from_json(const json& doc) {
  check_keys(doc, "coverage",
             {"command", "theorem", "rho", "y", "dimension", "horizon", "replications",
              "covariates", "noise", "seed", "assert_budget", "out"});
  CoverageConfig config;
  config.theorem_name = get_string(doc, "coverage", "theorem");
  if (config.theorem_name == "thm3-fixed-rho") {
    config.core.theorem = validation::CoverageTheorem::thm_bernstein_fixed;
  } else if (config.theorem_name == "thm4-fixed-rho") {
    config.core.theorem = validation::CoverageTheorem::thm_hoeffding_fixed;
  } else if (config.theorem_name == "thm1-stitched") {
    config.core.theorem = validation::CoverageTheorem::thm_stitched;
  } else {
    fail("coverage: unknown theorem '" + config.theorem_name + "'");
  }
  if (config.core.theorem == validation::CoverageTheorem::thm_stitched) {
    if (doc.contains("rho")) fail("coverage: 'rho' does not apply to thm1-stitched");
  } else {
    config.core.rho = get_double(doc, "coverage", "rho");
  }
  config.core.y = get_double(doc, "coverage", "y");
  config.core.trace.dimension = static_cast<int>(get_int(doc, "coverage", "dimension"));
  config.core.trace.horizon = static_cast<int>(get_int(doc, "coverage", "horizon"));
  config.core.replications = static_cast<int>(get_int(doc, "coverage", "replications"));
  config.core.trace.covariates =
      parse_covariates(get_string_or(doc, "coverage", "covariates", "round-robin"));
  if (doc.contains("noise")) {
    config.core.trace.noise = parse_noise(doc.at("noise"));
  }
  config.core.master_seed = static_cast<std::uint64_t>(get_int_or(doc, "coverage", "seed", 1));
  config.assert_budget = get_bool_or(doc, "coverage", "assert_budget", false);
  if (doc.contains("out")) config.out = get_string(doc, "coverage", "out");
  config.core.validate();
  return config;
}

json CoverageConfig::to_json() const {
  json doc{{"command", "coverage"},
           {"theorem", theorem_name},
           {"y", core.y},
           {"dimension", core.trace.dimension},
           {"horizon", core.trace.horizon},
           {"replications", core.replications},
           {"covariates", covariates_name(core.trace.covariates)},
           {"noise", noise_to_json(core.trace.noise)},
           {"seed", core.master_seed},
           {"assert_budget", assert_budget}};
  if (core.theorem != validation::CoverageTheorem::thm_stitched) doc["rho"] = core.rho;
  return doc;
}

BanditConfig BanditConfig::from_json(const json& doc) {
  check_keys(doc, "bandit",
             {"command", "kernel", "arms", "f_star", "rho", "y", "b", "horizon", "seeds", "seed",
              "rewards", "policy", "forced_arm", "refit_every", "width_gamma", "out"});
  BanditConfig config;
  config.run.arms.kernel = parse_kernel(require(doc, "bandit", "kernel"));
  config.run.arms.arms =
      get_points(require(doc, "bandit", "arms"), "bandit.arms", config.run.arms.kernel.input_dim);

  const json& fs = require(doc, "bandit", "f_star");
  check_keys(fs, "bandit.f_star", {"kind", "vector", "anchors", "coefficients"});
  const std::string kind = get_string(fs, "bandit.f_star", "kind");
  if (kind == "linear") {
    config.run.f_star = bandit::FStar::linear(
        get_vector(require(fs, "bandit.f_star", "vector"), "bandit.f_star.vector"));
  } else if (kind == "dual") {
    auto anchors = get_points(require(fs, "bandit.f_star", "anchors"), "bandit.f_star.anchors",
                              config.run.arms.kernel.input_dim);
    auto coefficients = get_vector(require(fs, "bandit.f_star", "coefficients"),
                                   "bandit.f_star.coefficients");
    config.run.f_star = bandit::FStar::dual(std::move(anchors), std::move(coefficients));
  } else {
    fail("bandit.f_star: unknown kind '" + kind + "'");
  }

  config.run.rho = get_double(doc, "bandit", "rho");
  config.run.y = get_double(doc, "bandit", "y");
  config.run.b = get_double(doc, "bandit", "b");
  config.run.horizon = static_cast<int>(get_int(doc, "bandit", "horizon"));
  config.seeds = static_cast<int>(get_int_or(doc, "bandit", "seeds", 1));
  if (config.seeds < 1) fail("bandit: 'seeds' must be >= 1");
  config.master_seed = static_cast<std::uint64_t>(get_int_or(doc, "bandit", "seed", 1));

  const std::string rewards = get_string_or(doc, "bandit", "rewards", "bernoulli");
  if (rewards == "bernoulli") {
    config.run.rewards = bandit::RewardKind::bernoulli;
  } else if (rewards == "continuous") {
    config.run.rewards = bandit::RewardKind::continuous;
  } else {
    fail("bandit: unknown rewards kind '" + rewards + "'");
  }
  const std::string policy = get_string_or(doc, "bandit", "policy", "ucb");
  if (policy == "ucb") {
    config.run.policy = bandit::BanditPolicy::ucb;
  } else if (policy == "forced") {
    config.run.policy = bandit::BanditPolicy::forced;
  } else {
    fail("bandit: unknown policy '" + policy + "'");
  }
  config.run.forced_arm = static_cast<int>(get_int_or(doc, "bandit", "forced_arm", 0));
  config.run.refit_every = static_cast<int>(get_int_or(doc, "bandit", "refit_every", 1));
  const std::string width_gamma = get_string_or(doc, "bandit", "width_gamma", "round");
  if (width_gamma == "round") {
    config.run.width_gamma = bandit::WidthGammaMode::per_round;
  } else if (width_gamma == "zero") {
    config.run.width_gamma = bandit::WidthGammaMode::fixed_zero;
  } else {
    fail("bandit: unknown width_gamma mode '" + width_gamma + "'");
  }
  if (doc.contains("out")) config.out = get_string(doc, "bandit", "out");
  config.run.seed = config.master_seed;  // per-run seeds derive from this
  config.run.validate();
  return config;
}

json BanditConfig::to_json() const {
  json arms = json::array();
  for (const auto& arm : run.arms.arms) arms.push_back(vector_to_json(arm));
  json f_star;
  if (run.f_star.is_linear()) {
    f_star = json{{"kind", "linear"}, {"vector", vector_to_json(run.f_star.vector())}};
  } else {
    json anchors = json::array();
    for (const auto& anchor : run.f_star.anchors()) anchors.push_back(vector_to_json(anchor));
    f_star = json{{"kind", "dual"},
                  {"anchors", anchors},
                  {"coefficients", vector_to_json(run.f_star.coefficients())}};
  }
  return json{{"command", "bandit"},
              {"kernel", kernel_to_json(run.arms.kernel)},
              {"arms", arms},
              {"f_star", f_star},
              {"rho", run.rho},
              {"y", run.y},
              {"b", run.b},
              {"horizon", run.horizon},
              {"seeds", seeds},
              {"seed", master_seed},
              {"rewards", run.rewards == bandit::RewardKind::bernoulli ? "bernoulli" : "continuous"},
              {"policy", run.policy == bandit::BanditPolicy::ucb ? "ucb" : "forced"},
              {"forced_arm", run.forced_arm},
              {"refit_every", run.refit_every},
              {"width_gamma",
               run.width_gamma == bandit::WidthGammaMode::per_round ? "round" : "zero"}};
}

RegressionConfig RegressionConfig::from_json(const json& doc) {
  check_keys(doc, "regression",
             {"command", "kernel", "rho", "y", "b", "dataset", "test_points", "test_grid", "out"});
  RegressionConfig config;
  config.kernel = parse_kernel(require(doc, "regression", "kernel"));
  config.rho = get_double(doc, "regression", "rho");
  config.y = get_double(doc, "regression", "y");
  config.b = get_double(doc, "regression", "b");
  if (!(config.rho > 0.0) || !(config.y > 0.0) || !(config.b > 0.0)) {
    fail("regression: rho, y and b must be positive");
  }
  config.dataset = get_string(doc, "regression", "dataset");
  if (doc.contains("test_points") == doc.contains("test_grid")) {
    fail("regression: provide exactly one of 'test_points' or 'test_grid'");
  }
  if (doc.contains("test_points")) {
    config.test_points =
        get_points(doc.at("test_points"), "regression.test_points", config.kernel.input_dim);
  } else {
    const json& grid = doc.at("test_grid");
    check_keys(grid, "regression.test_grid", {"from", "to", "count"});
    if (config.kernel.input_dim != 1) fail("regression.test_grid: only valid for input_dim 1");
    const double from = get_double(grid, "regression.test_grid", "from");
    const double to = get_double(grid, "regression.test_grid", "to");
    const std::int64_t count = get_int(grid, "regression.test_grid", "count");
    if (count < 1 || to < from) fail("regression.test_grid: need count >= 1 and to >= from");
    for (std::int64_t i = 0; i < count; ++i) {
      Eigen::VectorXd p(1);
      p << (count == 1 ? from : from + (to - from) * static_cast<double>(i) / (count - 1));
      config.test_points.push_back(p);
    }
  }
  if (config.test_points.empty()) fail("regression: empty test grid");
  if (doc.contains("out")) config.out = get_string(doc, "regression", "out");
  return config;
}

json RegressionConfig::to_json() const {
  json points = json::array();
  for (const auto& p : test_points) points.push_back(vector_to_json(p));
  return json{{"command", "regression"}, {"kernel", kernel_to_json(kernel)},
              {"rho", rho},              {"y", y},
              {"b", b},                  {"dataset", dataset},
              {"test_points", points}};
}

json AnyConfig::to_json() const {
  switch (command) {
    case Command::bounds: return bounds.to_json();
    case Command::coverage: return coverage.to_json();
    case Command::bandit: return bandit.to_json();
    case Command::regression: return regression.to_json();
  }
  return {};
}

AnyConfig parse_config(const json& doc) {
  if (!doc.is_object()) fail("config: expected a JSON object");
  const std::string command = get_string(doc, "config", "command");
  AnyConfig config;
  if (command == "bounds") {
    config.command = Command::bounds;
    config.bounds = BoundsConfig::from_json(doc);
  } else if (command == "coverage") {
    config.command = Command::coverage;
    config.coverage = CoverageConfig::from_json(doc);
  } else if (command == "bandit") {
    config.command = Command::bandit;
    config.bandit = BanditConfig::from_json(doc);
  } else if (command == "regression") {
    config.command = Command::regression;
    config.regression = RegressionConfig::from_json(doc);
  } else {
    fail("config: unknown command '" + command + "'");
  }
  return config;
}

AnyConfig load_config(const std::filesystem::path& path, std::optional<Command> expected) {
  std::ifstream in(path);
  if (!in) fail("config: cannot open " + path.string());
  json doc;
  try {
    doc = json::parse(in);
  } catch (const json::parse_error& e) {
    fail("config: " + std::string(e.what()));
  }
  AnyConfig config = parse_config(doc);
  if (expected && config.command != *expected) {
    fail("config: file is for command '" + command_name(config.command) + "', expected '" +
         command_name(*expected) + "'");
  }
  // Resolve the dataset path against the config file location.
  if (config.command == Command::regression) {
    const std::filesystem::path dataset(config.regression.dataset);
    if (dataset.is_relative()) {
      config.regression.dataset = (path.parent_path() / dataset).string();
    }
  }
  return config;
}

Dataset load_dataset(const std::filesystem::path& path, int input_dim) {
  std::ifstream in(path);
  if (!in) fail("dataset: cannot open " + path.string());
  Dataset data;
  std::vector<double> responses;
  std::string line;
  int line_number = 0;
  while (std::getline(in, line)) {
    ++line_number;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    std::vector<double> fields;
    const char* ptr = line.data();
    const char* end = line.data() + line.size();
    while (ptr < end) {
      double value = 0.0;
      const auto res = std::from_chars(ptr, end, value);
      if (res.ec != std::errc()) {
        fail("dataset line " + std::to_string(line_number) + ": malformed number");
      }
      fields.push_back(value);
      ptr = res.ptr;
      if (ptr < end) {
        if (*ptr != ',') {
          fail("dataset line " + std::to_string(line_number) + ": expected ',' separator");
        }
        ++ptr;
      }
    }
    if (static_cast<int>(fields.size()) != input_dim + 1) {
      fail("dataset line " + std::to_string(line_number) + ": expected " +
           std::to_string(input_dim + 1) + " fields, got " + std::to_string(fields.size()));
    }
    Eigen::VectorXd x(input_dim);
    for (int i = 0; i < input_dim; ++i) x[i] = fields[static_cast<std::size_t>(i)];
    const double response = fields.back();
    if (!(response >= 0.0 && response <= 1.0)) {
      fail("dataset line " + std::to_string(line_number) + ": response outside [0, 1]");
    }
    data.inputs.push_back(std::move(x));
    responses.push_back(response);
  }
  data.responses = Eigen::Map<Eigen::VectorXd>(responses.data(),
                                               static_cast<Eigen::Index>(responses.size()));
  return data;
}

}  // namespace snkb::cli
