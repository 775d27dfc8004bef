#include "commands.hpp"

#include <chrono>
#include <fstream>
#include <iostream>

#include "snkb/bounds.hpp"
#include "snkb/csv.hpp"
#include "snkb/errors.hpp"
#include "snkb/gram.hpp"
#include "snkb/logistic.hpp"
#include "snkb/parallel.hpp"

namespace snkb::cli {

namespace {

class Stopwatch {
 public:
  double seconds() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }

 private:
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();
};

void write_config_echo(const json& canonical, const std::filesystem::path& out_dir) {
  std::ofstream out(out_dir / "config.json", std::ios::binary);
  if (!out) throw std::runtime_error("cannot write " + (out_dir / "config.json").string());
  out << canonical.dump(2) << '\n';
}

void prepare(const json& canonical, const CommandIO& io) {
  std::filesystem::create_directories(io.out_dir);
  write_config_echo(canonical, io.out_dir);
}

std::string d2s(double v) { return format_double(v); }
std::string i2s(std::int64_t v) { return format_int(v); }

}  // namespace

void cmd_bounds(const BoundsConfig& config, const CommandIO& io) {
  const Stopwatch timer;
  prepare(config.to_json(), io);
  CsvWriter csv(io.out_dir / "bounds.csv");
  csv.header({"n", "rho", "y", "gamma", "beta", "hoeffding", "omega", "budget"});
  std::int64_t rows = 0;
  for (std::int64_t n : config.n) {
    for (double rho : config.rho) {
      for (double y : config.y) {
        for (double gamma : config.gamma) {
          csv.row({i2s(n), d2s(rho), d2s(y), d2s(gamma), d2s(bounds::beta_fixed(rho, y, gamma)),
                   d2s(bounds::hoeffding_radius(rho, y, gamma)),
                   d2s(bounds::omega(rho, y, gamma, config.b)),
                   d2s(bounds::bernstein_budget(y))});
          ++rows;
        }
      }
    }
  }
  if (!io.quiet) {
    std::cout << "bounds: wrote " << rows << " rows (budget column is the Bernstein/width "
              << "failure mass 2e^-y; the Hoeffding radius alone carries e^-y) in "
              << timer.seconds() << " s\n";
  }
}

void cmd_coverage(const CoverageConfig& config, const CommandIO& io) {
  const Stopwatch timer;
  prepare(config.to_json(), io);
  validation::CoverageConfig core = config.core;
  core.threads = io.threads;
  const validation::CoverageResult result = validation::coverage_experiment(core);

  CsvWriter reps(io.out_dir / "replications.csv");
  reps.header({"rep", "violated", "first_violation_n", "max_ratio"});
  for (const auto& out : result.outcomes) {
    reps.row({i2s(static_cast<std::int64_t>(out.index)), i2s(out.violated ? 1 : 0),
              i2s(out.first_violation), d2s(out.max_ratio)});
  }

  CsvWriter summary(io.out_dir / "summary.csv");
  summary.header({"theorem", "budget", "replications", "violations", "rate", "wilson_lower",
                  "wilson_upper", "wilson_halfwidth"});
  summary.row({config.theorem_name, d2s(result.budget), i2s(result.replications),
               i2s(result.violations), d2s(result.rate), d2s(result.wilson.lower),
               d2s(result.wilson.upper), d2s(result.wilson.halfwidth)});

  if (!io.quiet) {
    std::cout << "coverage[" << config.theorem_name << "]: rate " << result.rate << " (budget "
              << result.budget << ", wilson +-" << result.wilson.halfwidth << ", "
              << result.replications << " replications) in " << timer.seconds() << " s\n";
  }
  if (config.assert_budget && result.rate > result.budget + result.wilson.halfwidth) {
    throw CheckFailure("coverage: violation rate " + std::to_string(result.rate) +
                       " exceeds budget " + std::to_string(result.budget) +
                       " plus Wilson half-width");
  }
}

void cmd_bandit(const BanditConfig& config, const CommandIO& io) {
  const Stopwatch timer;
  prepare(config.to_json(), io);

  const int seeds = config.seeds;
  std::vector<bandit::BanditTrace> traces(static_cast<std::size_t>(seeds));
  parallel_for(static_cast<std::size_t>(seeds), io.threads, [&](std::size_t i) {
    bandit::BanditConfig run = config.run;
    run.seed = stream_seed(config.master_seed, i);
    traces[i] = bandit::run_bandit(run);
  });

  char name[32];
  for (int i = 0; i < seeds; ++i) {
    std::snprintf(name, sizeof(name), "trace_%03d.csv", i);
    CsvWriter csv(io.out_dir / name);
    csv.header({"round", "arm", "reward", "regret", "cum_regret", "radius"});
    const auto& trace = traces[static_cast<std::size_t>(i)];
    for (std::size_t j = 0; j < trace.arm.size(); ++j) {
      csv.row({i2s(static_cast<std::int64_t>(j + 1)), i2s(trace.arm[j]), d2s(trace.reward[j]),
               d2s(trace.regret[j]), d2s(trace.cum_regret[j]), d2s(trace.radius[j])});
    }
  }

  const bandit::InstanceConstants constants =
      bandit::instance_constants(config.run.f_star, config.run.arms);
  CsvWriter aggregate(io.out_dir / "aggregate.csv");
  aggregate.header({"round", "mean_cum_regret", "bound_curve"});
  for (int j = 0; j < config.run.horizon; ++j) {
    double mean = 0.0;
    double curve = 0.0;
    for (int i = 0; i < seeds; ++i) {
      const auto& trace = traces[static_cast<std::size_t>(i)];
      mean += trace.cum_regret[static_cast<std::size_t>(j)];
      const double gain = trace.gain[static_cast<std::size_t>(j)];
      curve += gain > 0.0 ? bounds::regret_bound_curve(static_cast<std::uint64_t>(j + 1),
                                                       constants.v_star, constants.kappa_star,
                                                       trace.radius[static_cast<std::size_t>(j)],
                                                       gain)
                          : 0.0;
    }
    aggregate.row({i2s(j + 1), d2s(mean / seeds), d2s(curve / seeds)});
  }

  if (!io.quiet) {
    double mean_final = 0.0;
    if (config.run.horizon > 0) {
      for (const auto& t : traces) mean_final += t.cum_regret.back();
      mean_final /= seeds;
    }
    std::cout << "bandit: " << seeds << " runs of " << config.run.horizon
              << " rounds; mean final regret " << mean_final << "; v*=" << constants.v_star
              << " kappa*=" << constants.kappa_star
              << " (bound curve is modulo a universal constant; confidence events carry "
              << "budget 2e^-y = " << bounds::bernstein_budget(config.run.y) << ") in "
              << timer.seconds() << " s\n";
  }
}

void cmd_regression(const RegressionConfig& config, const CommandIO& io) {
  const Stopwatch timer;
  prepare(config.to_json(), io);
  const Dataset data = load_dataset(config.dataset, config.kernel.input_dim);

  const GramState gram = GramState::batch(config.kernel, data.inputs);
  const logistic::DualLogisticModel model = logistic::fit(gram, data.responses, config.rho);
  const double gain = gram.size() == 0 ? 0.0 : gram.info_gain(config.rho);
  const double width = bounds::omega(config.rho, config.y, gain, config.b);

  CsvWriter csv(io.out_dir / "bands.csv");
  std::vector<std::string> header;
  for (int i = 0; i < config.kernel.input_dim; ++i) header.push_back("x" + std::to_string(i));
  header.insert(header.end(), {"mean", "sigma", "lower", "upper"});
  csv.header(header);
  for (const auto& point : config.test_points) {
    const double mean = model.predict_mean(point);
    const double sigma = std::sqrt(model.predictive_variance(point));
    const auto [lower, upper] = model.confidence_band(point, width);
    std::vector<std::string> row;
    for (int i = 0; i < config.kernel.input_dim; ++i) row.push_back(d2s(point[i]));
    row.insert(row.end(), {d2s(mean), d2s(sigma), d2s(lower), d2s(upper)});
    csv.row(row);
  }

  if (!io.quiet) {
    std::cout << "regression: " << gram.size() << " observations, " << config.test_points.size()
              << " test points, width omega = " << width << " (failure budget 2e^-y = "
              << bounds::bernstein_budget(config.y) << ") in " << timer.seconds() << " s\n";
  }
}

void run_command(const AnyConfig& config, const CommandIO& io) {
  switch (config.command) {
    case Command::bounds: cmd_bounds(config.bounds, io); return;
    case Command::coverage: cmd_coverage(config.coverage, io); return;
    case Command::bandit: cmd_bandit(config.bandit, io); return;
    case Command::regression: cmd_regression(config.regression, io); return;
  }
}

}  // namespace snkb::cli
