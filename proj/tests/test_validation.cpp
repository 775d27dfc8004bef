#include <doctest.h>

#include <Eigen/Dense>
#include <cmath>

#include "snkb/bounds.hpp"
#include "snkb/errors.hpp"
#include "snkb/validation.hpp"
#include "test_util.hpp"

using namespace snkb;
using namespace snkb::validation;

namespace {

TraceConfig scalar_config(int horizon, NoiseModel noise) {
  TraceConfig config;
  config.dimension = 1;
  config.horizon = horizon;
  config.covariates = CovariateRule::round_robin;
  config.noise = noise;
  return config;
}

}  // namespace

TEST_CASE("simulate_trace: invariants hold for every rule and noise kind") {
  for (auto rule :
       {CovariateRule::round_robin, CovariateRule::adversarial_align, CovariateRule::sphere_iid}) {
    for (auto kind : {NoiseKind::rademacher_scaled, NoiseKind::centered_bernoulli,
                      NoiseKind::truncated_continuous}) {
      TraceConfig config;
      config.dimension = 4;
      config.horizon = 80;
      config.covariates = rule;
      config.noise = NoiseModel{kind, 0.8};
      const MartingaleTrace trace = simulate_trace(config, 99);
      for (int j = 0; j < trace.horizon; ++j) {
        CHECK(trace.covariates.col(j).norm() <= 1.0 + 1e-12);
        CHECK(std::abs(trace.noise[j]) <= 1.0);
        CHECK(trace.second_moments[j] <= 1.0);
        CHECK(trace.second_moments[j] >= 0.0);
      }
      // predictable <= worst-case quadratic variation in operator order
      Eigen::MatrixXd gap = Eigen::MatrixXd::Zero(4, 4);
      for (int j = 0; j < trace.horizon; ++j) {
        const auto x = trace.covariates.col(j);
        gap += (1.0 - trace.second_moments[j]) * (x * x.transpose());
      }
      Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(gap, Eigen::EigenvaluesOnly);
      CHECK(eig.eigenvalues().minCoeff() >= -1e-10);
    }
  }
}

TEST_CASE("simulate_trace: noiseless paths have zero signal") {
  const MartingaleTrace trace =
      simulate_trace(scalar_config(50, NoiseModel{NoiseKind::rademacher_scaled, 0.0}), 5);
  for (int j = 0; j < 50; ++j) {
    CHECK(trace.noise[j] == 0.0);
    CHECK(trace.second_moments[j] == 0.0);
  }
  CHECK(self_norm_stat(trace, 50, 1.0, StatMode::bernstein) == 0.0);
}

TEST_CASE("simulate_trace: deterministic replay") {
  TraceConfig config;
  config.dimension = 3;
  config.horizon = 40;
  config.covariates = CovariateRule::sphere_iid;
  const MartingaleTrace a = simulate_trace(config, 1234);
  const MartingaleTrace b = simulate_trace(config, 1234);
  CHECK(a.covariates == b.covariates);
  CHECK(a.noise == b.noise);
}

TEST_CASE("self_norm_stat: scalar closed form with unit covariates") {
  const MartingaleTrace trace =
      simulate_trace(scalar_config(64, NoiseModel{NoiseKind::rademacher_scaled, 1.0}), 7);
  double s = 0.0;
  for (int n = 1; n <= 64; ++n) {
    s += trace.noise[n - 1];
    const double expected = std::abs(s) / std::sqrt(n + 0.5);
    CHECK(std::abs(self_norm_stat(trace, n, 0.5, StatMode::bernstein) - expected) <= 1e-12);
    CHECK(std::abs(self_norm_stat(trace, n, 0.5, StatMode::hoeffding) - expected) <= 1e-12);
    CHECK(trace.second_moments[n - 1] == 1.0);
  }
}

TEST_CASE("self_norm_stat: scaled noise contracts the predictable variation") {
  TraceConfig config;
  config.dimension = 3;
  config.horizon = 60;
  config.covariates = CovariateRule::sphere_iid;
  config.noise = NoiseModel{NoiseKind::rademacher_scaled, 0.1};
  const MartingaleTrace trace = simulate_trace(config, 21);
  Eigen::MatrixXd predictable = Eigen::MatrixXd::Zero(3, 3);
  Eigen::MatrixXd worst = Eigen::MatrixXd::Zero(3, 3);
  for (int j = 0; j < 60; ++j) {
    const auto x = trace.covariates.col(j);
    predictable += trace.second_moments[j] * (x * x.transpose());
    worst += x * x.transpose();
  }
  CHECK(predictable.isApprox(0.01 * worst, 1e-13));
}

TEST_CASE("self_norm_stat: hoeffding statistic never exceeds bernstein") {
  Rng rng(77);
  for (auto kind : {NoiseKind::rademacher_scaled, NoiseKind::centered_bernoulli,
                    NoiseKind::truncated_continuous}) {
    TraceConfig config;
    config.dimension = 4;
    config.horizon = 50;
    config.covariates = CovariateRule::sphere_iid;
    config.noise = NoiseModel{kind, 0.6};
    const MartingaleTrace trace = simulate_trace(config, rng.next());
    for (int n = 1; n <= 50; n += 7) {
      const double rho = 0.3 + rng.u01();
      CHECK(self_norm_stat(trace, n, rho, StatMode::hoeffding) <=
            self_norm_stat(trace, n, rho, StatMode::bernstein) + 1e-12);
    }
  }
}

TEST_CASE("self_norm_stat: input validation") {
  const MartingaleTrace trace = simulate_trace(scalar_config(10, NoiseModel{}), 1);
  CHECK_THROWS_AS(self_norm_stat(trace, 0, 1.0, StatMode::bernstein), std::invalid_argument);
  CHECK_THROWS_AS(self_norm_stat(trace, 11, 1.0, StatMode::bernstein), std::invalid_argument);
  CHECK_THROWS_AS(self_norm_stat(trace, 5, 0.0, StatMode::bernstein), std::invalid_argument);
}

TEST_CASE("wilson_interval: basic shape") {
  const WilsonInterval none = wilson_interval(0, 100);
  CHECK(none.lower <= 1e-12);  // center and half-width coincide at k = 0
  CHECK(none.upper > 0.0);
  const WilsonInterval half = wilson_interval(50, 100);
  CHECK(half.lower < 0.5);
  CHECK(half.upper > 0.5);
  CHECK_THROWS_AS(wilson_interval(5, 0), std::invalid_argument);
}

TEST_CASE("coverage_experiment: budgets per theorem") {
  CoverageConfig config;
  config.trace = scalar_config(20, NoiseModel{NoiseKind::rademacher_scaled, 0.0});
  config.y = 3.0;
  config.replications = 100;
  config.theorem = CoverageTheorem::thm_bernstein_fixed;
  CHECK(coverage_experiment(config).budget == doctest::Approx(2.0 * std::exp(-3.0)));
  config.theorem = CoverageTheorem::thm_hoeffding_fixed;
  CHECK(coverage_experiment(config).budget == doctest::Approx(std::exp(-3.0)));
  config.theorem = CoverageTheorem::thm_stitched;
  CHECK(coverage_experiment(config).budget == doctest::Approx(1.644934066848226 * std::exp(-3.0)));
}

TEST_CASE("coverage_experiment: noiseless paths never violate") {
  CoverageConfig config;
  config.trace = scalar_config(30, NoiseModel{NoiseKind::rademacher_scaled, 0.0});
  config.y = 0.5;
  config.replications = 100;
  config.theorem = CoverageTheorem::thm_bernstein_fixed;
  const CoverageResult result = coverage_experiment(config);
  CHECK(result.violations == 0);
  CHECK(result.rate == 0.0);
}

TEST_CASE("coverage_experiment: rate within budget and reproducible across threads") {
  CoverageConfig config;
  config.trace.dimension = 3;
  config.trace.horizon = 120;
  config.trace.covariates = CovariateRule::adversarial_align;
  config.trace.noise = NoiseModel{NoiseKind::rademacher_scaled, 1.0};
  config.theorem = CoverageTheorem::thm_hoeffding_fixed;
  config.rho = 1.0;
  config.y = 3.0;
  config.replications = 300;
  config.master_seed = 4242;
  config.threads = 1;
  const CoverageResult single = coverage_experiment(config);
  CHECK(single.rate <= single.budget + 3.0 * single.wilson.halfwidth);

  config.threads = 4;
  const CoverageResult multi = coverage_experiment(config);
  REQUIRE(multi.outcomes.size() == single.outcomes.size());
  for (std::size_t i = 0; i < multi.outcomes.size(); ++i) {
    CHECK(multi.outcomes[i].violated == single.outcomes[i].violated);
    CHECK(multi.outcomes[i].max_ratio == single.outcomes[i].max_ratio);
  }
}

TEST_CASE("coverage_experiment: low-variance noise keeps both bounds valid at once") {
  // sigma = 0.1 is the regime where the predictable variation is far below
  // the worst case; both radii must still cover their statistics.
  CoverageConfig config;
  config.trace.dimension = 3;
  config.trace.horizon = 100;
  config.trace.covariates = CovariateRule::sphere_iid;
  config.trace.noise = NoiseModel{NoiseKind::rademacher_scaled, 0.1};
  config.rho = 1.0;
  config.y = 3.0;
  config.replications = 150;
  config.master_seed = 909;
  for (auto theorem :
       {CoverageTheorem::thm_bernstein_fixed, CoverageTheorem::thm_hoeffding_fixed}) {
    config.theorem = theorem;
    const CoverageResult result = coverage_experiment(config);
    CHECK(result.rate <= result.budget + 3.0 * result.wilson.halfwidth);
  }
}

TEST_CASE("supermartingale_check: degenerate direction and noiseless path give exactly one") {
  SupermartingaleConfig config;
  config.trace = scalar_config(30, NoiseModel{NoiseKind::rademacher_scaled, 1.0});
  config.directions = {Eigen::VectorXd::Zero(1)};
  config.checkpoints = {10, 30};
  config.replications = 50;
  for (const auto& checkpoint : supermartingale_check(config)) {
    CHECK(checkpoint.mean == 1.0);
    CHECK(checkpoint.std_error == 0.0);
    CHECK(checkpoint.within_bound);
  }

  config.trace.noise.scale = 0.0;
  Eigen::VectorXd e1(1);
  e1 << 1.0;
  config.directions = {e1};
  for (const auto& checkpoint : supermartingale_check(config)) {
    CHECK(checkpoint.mean == 1.0);
    CHECK(checkpoint.within_bound);
  }
}

TEST_CASE("supermartingale_check: empirical mean stays below one plus slack") {
  SupermartingaleConfig config;
  config.trace.dimension = 2;
  config.trace.horizon = 100;
  config.trace.covariates = CovariateRule::round_robin;
  config.trace.noise = NoiseModel{NoiseKind::rademacher_scaled, 1.0};
  Eigen::VectorXd x(2);
  x << std::sqrt(0.5), std::sqrt(0.5);
  config.directions = {x};
  config.checkpoints = {10, 100};
  config.replications = 2000;
  config.master_seed = 88;
  for (const auto& checkpoint : supermartingale_check(config)) {
    CHECK(checkpoint.mean > 0.0);
    CHECK(checkpoint.within_bound);
  }
}

TEST_CASE("stitched level along a trace stays within the doubling bound") {
  // for unit-ball covariates, the selected level h obeys
  // 2 log h <= iota'(n), i.e. the inflated tail y_h <= y + iota'(n)
  TraceConfig config;
  config.dimension = 4;
  config.horizon = 120;
  config.covariates = CovariateRule::sphere_iid;
  config.noise = NoiseModel{NoiseKind::rademacher_scaled, 1.0};
  const MartingaleTrace trace = simulate_trace(config, 5150);
  Eigen::MatrixXd v = Eigen::MatrixXd::Zero(4, 4);
  const double y = 1.0;
  for (int n = 1; n <= config.horizon; ++n) {
    const auto x = trace.covariates.col(n - 1);
    v += x * x.transpose();
    const bounds::StitchedRadius r =
        bounds::stitched_radius_from_eigs(psd_eigenvalues(v), y);
    const double slack = bounds::iota_prime(static_cast<std::uint64_t>(n));
    CHECK(2.0 * std::log(static_cast<double>(r.schedule.level)) <= slack + 1e-12);
    CHECK(r.schedule.y_h <= y + slack + 1e-12);
  }
}

TEST_CASE("truncation_check: large rho keeps the head subspace empty") {
  TraceConfig config;
  config.dimension = 4;
  config.horizon = 60;
  config.covariates = CovariateRule::sphere_iid;
  config.noise = NoiseModel{NoiseKind::rademacher_scaled, 1.0};
  const MartingaleTrace trace = simulate_trace(config, 11);
  const auto steps = truncation_check(trace, 100.0);  // rho > horizon
  for (const auto& step : steps) {
    CHECK(step.dimension == 0);
    CHECK(step.tail_norm <= step.n);
  }
}

TEST_CASE("truncation_check: scalar recursion") {
  const MartingaleTrace trace =
      simulate_trace(scalar_config(12, NoiseModel{NoiseKind::rademacher_scaled, 1.0}), 3);
  const double rho = 3.5;
  const auto steps = truncation_check(trace, rho);
  REQUIRE(steps.size() == 12);
  for (const auto& step : steps) {
    // V^- accumulates 1 per step until it reaches rho, is absorbed, then freezes
    const double expected_tail = std::min<double>(step.n, 4.0);
    CHECK(step.tail_norm == doctest::Approx(expected_tail).epsilon(1e-12));
    CHECK(step.dimension == (step.n >= 4 ? 1 : 0));
    CHECK(step.tail_norm < rho + 1.0 + 1e-9);
  }
}

TEST_CASE("truncation_check: claims hold along random traces") {
  Rng rng(123);
  for (int rep = 0; rep < 18; ++rep) {
    TraceConfig config;
    config.dimension = 1 + static_cast<int>(rng.next() % 8);
    config.horizon = 40 + static_cast<int>(rng.next() % 80);
    config.covariates = rep % 3 == 0   ? CovariateRule::round_robin
                        : rep % 3 == 1 ? CovariateRule::adversarial_align
                                       : CovariateRule::sphere_iid;
    config.noise = NoiseModel{NoiseKind::rademacher_scaled, 1.0};
    const MartingaleTrace trace = simulate_trace(config, rng.next());
    const double rho = rep % 3 == 0 ? 0.5 : (rep % 3 == 1 ? 1.0 : 4.0);
    int previous_dim = 0;
    for (const auto& step : truncation_check(trace, rho)) {  // throws on violation
      CHECK(step.dimension >= previous_dim);                 // nested subspaces
      previous_dim = step.dimension;
      CHECK(step.dimension <= 4.0 * step.gain + 1e-9);
      CHECK(step.tail_norm < rho + 1.0 + 1e-9);
    }
  }
}
