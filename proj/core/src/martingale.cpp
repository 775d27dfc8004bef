#include "snkb/martingale.hpp"

#include <Eigen/Cholesky>
#include <algorithm>
#include <cmath>
#include <stdexcept>

namespace snkb::validation {

void NoiseModel::validate() const {
  // scale = 0 is the degenerate noiseless process, useful as a fixture
  if (kind != NoiseKind::centered_bernoulli && !(scale >= 0.0 && scale <= 1.0)) {
    throw std::invalid_argument("NoiseModel: scale must lie in [0, 1]");
  }
}

void TraceConfig::validate() const {
  if (dimension < 1) throw std::invalid_argument("TraceConfig: dimension must be >= 1");
  if (horizon < 0) throw std::invalid_argument("TraceConfig: horizon must be nonnegative");
  noise.validate();
}

namespace {

// Predictable Bernoulli parameter: a saturating function of the running
// noise mean, so the rule adapts to the realised path.
double bernoulli_p(double noise_sum, int steps_done) {
  const double mean = steps_done > 0 ? noise_sum / steps_done : 0.0;
  return std::clamp(0.5 + 0.3 * mean, 0.05, 0.95);
}

}  // namespace

MartingaleTrace simulate_trace(const TraceConfig& config, std::uint64_t seed) {
  config.validate();
  const int d = config.dimension;
  const int horizon = config.horizon;

  MartingaleTrace trace;
  trace.dimension = d;
  trace.horizon = horizon;
  trace.covariates.resize(d, horizon);
  trace.noise.resize(horizon);
  trace.second_moments.resize(horizon);
  trace.seed = seed;

  Rng noise_rng = Rng::stream(seed, 1);
  Rng covariate_rng = Rng::stream(seed, 2);

  Eigen::VectorXd running_sum = Eigen::VectorXd::Zero(d);  // S_{j-1}
  double noise_sum = 0.0;

  for (int j = 0; j < horizon; ++j) {
    // Covariate first: it may only touch the past.
    Eigen::VectorXd x(d);
    switch (config.covariates) {
      case CovariateRule::round_robin:
        x.setZero();
        x[j % d] = 1.0;
        break;
      case CovariateRule::adversarial_align: {
        const double norm = running_sum.norm();
        if (norm > 0.0) {
          x = running_sum / norm;
        } else {
          x.setZero();
          x[0] = 1.0;
        }
        break;
      }
      case CovariateRule::sphere_iid:
        x = 0.9 * covariate_rng.sphere(d);
        break;
    }
    if (x.norm() > 1.0 + 1e-12) {
      throw std::runtime_error("simulate_trace: covariate rule left the unit ball");
    }

    double y = 0.0;
    double s2 = 0.0;
    switch (config.noise.kind) {
      case NoiseKind::rademacher_scaled:
        y = config.noise.scale * noise_rng.rademacher();
        s2 = config.noise.scale * config.noise.scale;
        break;
      case NoiseKind::centered_bernoulli: {
        const double p = bernoulli_p(noise_sum, j);
        y = (noise_rng.bernoulli(p) ? 1.0 : 0.0) - p;
        s2 = p * (1.0 - p);
        break;
      }
      case NoiseKind::truncated_continuous:
        y = config.noise.scale * (2.0 * noise_rng.u01() - 1.0);
        s2 = config.noise.scale * config.noise.scale / 3.0;
        break;
    }

    trace.covariates.col(j) = x;
    trace.noise[j] = y;
    trace.second_moments[j] = s2;
    running_sum += y * x;
    noise_sum += y;
  }
  return trace;
}

double self_norm_stat(const MartingaleTrace& trace, int n, double rho, StatMode mode) {
  if (n < 1 || n > trace.horizon) throw std::invalid_argument("self_norm_stat: n out of range");
  if (!(rho > 0.0)) throw std::invalid_argument("self_norm_stat: rho must be positive");
  const int d = trace.dimension;
  Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
  Eigen::MatrixXd a = Eigen::MatrixXd::Zero(d, d);
  for (int j = 0; j < n; ++j) {
    const auto x = trace.covariates.col(j);
    s += trace.noise[j] * x;
    const double weight = mode == StatMode::bernstein ? trace.second_moments[j] : 1.0;
    a += weight * (x * x.transpose());
  }
  a.diagonal().array() += rho;
  Eigen::LLT<Eigen::MatrixXd> llt(a);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("self_norm_stat: factorization failed");
  }
  return std::sqrt(std::max(0.0, s.dot(llt.solve(s))));
}

}  // namespace snkb::validation
