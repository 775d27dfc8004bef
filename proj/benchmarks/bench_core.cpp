#include <benchmark/benchmark.h>

#include <Eigen/Dense>

#include "snkb/bandit.hpp"
#include "snkb/bounds.hpp"
#include "snkb/gram.hpp"
#include "snkb/logistic.hpp"
#include "snkb/martingale.hpp"
#include "snkb/rng.hpp"

using namespace snkb;

namespace {

GramState random_rbf_gram(int n) {
  Rng rng(n);
  const KernelSpec spec{KernelFamily::gaussian_rbf, 1.0, 4};
  std::vector<Eigen::VectorXd> points;
  points.reserve(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) points.push_back(0.9 * rng.u01() * rng.sphere(4));
  return GramState::batch(spec, points);
}

}  // namespace

static void BM_info_gain(benchmark::State& state) {
  const GramState gram = random_rbf_gram(static_cast<int>(state.range(0)));
  const Eigen::MatrixXd k = gram.matrix();
  for (auto _ : state) {
    // spectrum recomputed each pass, as after a cache invalidation
    const double gain = info_gain_from_eigs(psd_eigenvalues(k), 1.0);
    benchmark::DoNotOptimize(gain);
  }
}
BENCHMARK(BM_info_gain)->Arg(64)->Arg(256)->Arg(1024);

static void BM_rho_star(benchmark::State& state) {
  const GramState gram = random_rbf_gram(static_cast<int>(state.range(0)));
  const Eigen::VectorXd eigs = 40.0 * gram.eigenvalues();
  for (auto _ : state) {
    const double star = rho_star_from_eigs(eigs);
    benchmark::DoNotOptimize(star);
  }
}
BENCHMARK(BM_rho_star)->Arg(64)->Arg(256);

static void BM_logistic_fit(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GramState gram = random_rbf_gram(n);
  Rng rng(7);
  Eigen::VectorXd responses(n);
  for (int i = 0; i < n; ++i) responses[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
  for (auto _ : state) {
    const auto model = logistic::fit(gram, responses, 1.0);
    benchmark::DoNotOptimize(model.alpha().sum());
  }
}
BENCHMARK(BM_logistic_fit)->Arg(50)->Arg(200);

static void BM_predictive_variance(benchmark::State& state) {
  const int n = static_cast<int>(state.range(0));
  const GramState gram = random_rbf_gram(n);
  Rng rng(9);
  Eigen::VectorXd responses(n);
  for (int i = 0; i < n; ++i) responses[i] = rng.bernoulli(0.5) ? 1.0 : 0.0;
  const auto model = logistic::fit(gram, responses, 1.0);
  const Eigen::VectorXd a = 0.5 * rng.sphere(4);
  for (auto _ : state) {
    benchmark::DoNotOptimize(model.predictive_variance(a));
  }
}
BENCHMARK(BM_predictive_variance)->Arg(50)->Arg(200);

static void BM_coverage_replication(benchmark::State& state) {
  validation::TraceConfig config;
  config.dimension = 5;
  config.horizon = static_cast<int>(state.range(0));
  config.covariates = validation::CovariateRule::adversarial_align;
  std::uint64_t seed = 0;
  for (auto _ : state) {
    const validation::MartingaleTrace trace = validation::simulate_trace(config, ++seed);
    double acc = 0.0;
    for (int n = 1; n <= config.horizon; n += 25) {
      acc += validation::self_norm_stat(trace, n, 1.0, validation::StatMode::bernstein);
    }
    benchmark::DoNotOptimize(acc);
  }
}
BENCHMARK(BM_coverage_replication)->Arg(200)->Arg(500);

static void BM_bandit_run(benchmark::State& state) {
  bandit::BanditConfig config;
  config.arms.kernel = KernelSpec{KernelFamily::gaussian_rbf, 0.5, 1};
  std::vector<Eigen::VectorXd> arms;
  for (int i = 0; i < 5; ++i) {
    Eigen::VectorXd arm(1);
    arm << 2.0 * i;
    arms.push_back(arm);
  }
  config.arms.arms = arms;
  Eigen::VectorXd coeffs = Eigen::VectorXd::Zero(5);
  coeffs[4] = 2.2;
  config.f_star = bandit::FStar::dual(arms, coeffs);
  config.b = 2.25;
  config.horizon = static_cast<int>(state.range(0));
  std::uint64_t seed = 0;
  for (auto _ : state) {
    config.seed = ++seed;
    const bandit::BanditTrace trace = bandit::run_bandit(config);
    benchmark::DoNotOptimize(trace.cum_regret.back());
  }
}
BENCHMARK(BM_bandit_run)->Arg(200)->Arg(2000);

BENCHMARK_MAIN();
