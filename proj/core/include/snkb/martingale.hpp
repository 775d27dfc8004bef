#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "snkb/rng.hpp"

namespace snkb::validation {

/// Bounded, conditionally centred noise with a closed-form conditional
/// second moment, so the predictable quadratic variation is exact rather
/// than estimated.
enum class NoiseKind {
  rademacher_scaled,    // Y = +-scale,         s^2 = scale^2
  centered_bernoulli,   // Y = B - p_j, B ~ Bernoulli(p_j) with a
                        // predictable rule for p_j; s^2 = p_j (1 - p_j)
  truncated_continuous  // Y uniform on [-scale, scale], s^2 = scale^2 / 3
};

struct NoiseModel {
  NoiseKind kind = NoiseKind::rademacher_scaled;
  double scale = 1.0;  // must lie in [0, 1]; ignored by centered_bernoulli

  void validate() const;
};

/// Covariate designs. All are predictable: X_j depends only on the realised
/// past (and, for the random design, on a covariate stream independent of
/// the noise).
enum class CovariateRule {
  round_robin,       // unit vectors e_1, e_2, ..., cycling
  adversarial_align, // S_{j-1} / ||S_{j-1}||, e_1 before any signal exists
  sphere_iid         // 0.9 * uniform direction on the sphere
};

struct TraceConfig {
  int dimension = 5;
  int horizon = 500;
  CovariateRule covariates = CovariateRule::round_robin;
  NoiseModel noise{};

  void validate() const;
};

/// One simulated path of the covariate/noise process, with the per-step
/// conditional second moments recorded alongside.
struct MartingaleTrace {
  int dimension = 0;
  int horizon = 0;
  Eigen::MatrixXd covariates;      // dimension x horizon, column j is X_{j+1}
  Eigen::VectorXd noise;           // Y_j
  Eigen::VectorXd second_moments;  // s_j^2 = E[Y_j^2 | past]
  std::uint64_t seed = 0;
};

MartingaleTrace simulate_trace(const TraceConfig& config, std::uint64_t seed);

enum class StatMode { bernstein, hoeffding };

/// ||(A_n + rho I)^{-1/2} S_n|| where A_n is the predictable quadratic
/// variation (bernstein) or the worst-case one (hoeffding), computed via a
/// Cholesky solve. Requires 1 <= n <= horizon and rho > 0.
double self_norm_stat(const MartingaleTrace& trace, int n, double rho, StatMode mode);

}  // namespace snkb::validation
