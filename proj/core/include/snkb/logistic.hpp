#pragma once

#include <Eigen/Core>
#include <optional>
#include <utility>

#include "snkb/gram.hpp"

namespace snkb::logistic {

/// Logistic link mu(u) = 1 / (1 + e^{-u}), stable over |u| <= 700.
double link_mu(double u);

/// Bernoulli variance V(u) = mu(u)(1 - mu(u)), floored at 1e-300 so that
/// rho / V stays finite for saturated points (whose contribution to the
/// predictive-variance correction then vanishes, as it should).
double variance_fn(double u);

/// ell(u, y) = -y log mu(u) - (1 - y) log(1 - mu(u)) for y in [0, 1],
/// computed in the overflow-safe form softplus(-u) + (1 - y) u.
double logistic_loss(double u, double y);

struct FitOptions {
  int max_iterations = 100;
  /// Restart Newton from a previous solution (e.g. the last round's
  /// coefficients when refitting online).
  std::optional<Eigen::VectorXd> warm_alpha;
  /// Observation multiplicities per Gram point. When set, `responses`
  /// passed to fit() are per-point means and each point's loss term is
  /// weighted by its count; counts of zero detach a point from the data
  /// (it still participates in the regulariser). Defaults to all ones.
  std::optional<Eigen::VectorXd> counts;
};

/// Ridge-regularised kernel logistic regression in representer form:
/// minimises sum_i c_i ell((K alpha)_i, y_i) + rho alpha' K alpha.
class DualLogisticModel {
 public:
  /// Predictive mean of the latent function, f_hat(a) = k_n(a)' alpha.
  double predict_mean(const Eigen::VectorXd& a) const;

  /// sigma_n^2(a) = k(a,a) - k_n(a)' (rho W^{-1} + K)^{-1} k_n(a) with
  /// W = diag(c_i V(f_hat(A_i))), via Cholesky with relative jitter
  /// 1e-12 * max diagonal. Clamped below at 0.
  double predictive_variance(const Eigen::VectorXd& a) const;

  /// f_hat(a) -+ width * sigma_n(a) / sqrt(rho); the half-width is
  /// width * ||H_hat^{-1/2} phi(a)||, the ellipsoid width at a.
  std::pair<double, double> confidence_band(const Eigen::VectorXd& a, double width) const;

  const GramState& gram() const { return gram_; }
  const Eigen::VectorXd& responses() const { return responses_; }
  const Eigen::VectorXd& counts() const { return counts_; }
  const Eigen::VectorXd& alpha() const { return alpha_; }
  const Eigen::VectorXd& fitted_means() const { return fitted_means_; }
  const Eigen::VectorXd& weights() const { return weights_; }
  double rho() const { return rho_; }
  bool converged() const { return converged_; }
  double gradient_norm() const { return gradient_norm_; }
  int iterations() const { return iterations_; }

 private:
  friend DualLogisticModel fit(GramState gram, const Eigen::VectorXd& responses, double rho,
                               const FitOptions& options);

  GramState gram_{KernelSpec{}};
  Eigen::VectorXd responses_;
  Eigen::VectorXd counts_;
  Eigen::VectorXd alpha_;
  Eigen::VectorXd fitted_means_;
  Eigen::VectorXd weights_;
  double rho_ = 1.0;
  bool converged_ = false;
  double gradient_norm_ = 0.0;
  int iterations_ = 0;
};

/// Newton with Armijo backtracking on the dual objective, run until the
/// dual gradient norm drops below 1e-10 * max(1, total observation count).
/// Throws std::runtime_error on non-convergence (with the final gradient
/// norm) or a NaN objective.
DualLogisticModel fit(GramState gram, const Eigen::VectorXd& responses, double rho,
                      const FitOptions& options = {});

/// Finite-dimensional oracle for cross-checks: explicit weight vector,
/// explicit Hessians, and ellipsoid norms in both of them. Oracle scale
/// only (d <= 50, n <= 500).
class PrimalReferenceModel {
 public:
  const Eigen::VectorXd& weights() const { return weights_; }
  int dimension() const { return static_cast<int>(weights_.size()); }

  double predict(const Eigen::VectorXd& x) const { return weights_.dot(x); }

  /// H_hat = sum_i V(<f_hat, x_i>) x_i x_i' + rho I.
  const Eigen::MatrixXd& h_hat() const { return h_hat_; }
  /// H_star = sum_i V(<f_star, x_i>) x_i x_i' + rho I (requires f_star).
  const Eigen::MatrixXd& h_star() const;

  /// Ellipsoid norms ||v||_H = sqrt(v' H v) ...
  double ellipsoid_norm_h_hat(const Eigen::VectorXd& v) const;
  double ellipsoid_norm_h_star(const Eigen::VectorXd& v) const;
  /// ... and inverse-weighted widths ||H^{-1/2} v|| = sqrt(v' H^{-1} v).
  double inv_half_norm_h_hat(const Eigen::VectorXd& v) const;
  double inv_half_norm_h_star(const Eigen::VectorXd& v) const;

  bool converged() const { return converged_; }
  double gradient_norm() const { return gradient_norm_; }

 private:
  friend PrimalReferenceModel primal_reference_fit(const Eigen::MatrixXd& features,
                                                   const Eigen::VectorXd& responses, double rho,
                                                   const std::optional<Eigen::VectorXd>& f_star,
                                                   const std::optional<Eigen::VectorXd>& warm);

  Eigen::VectorXd weights_;
  Eigen::MatrixXd h_hat_;
  std::optional<Eigen::MatrixXd> h_star_;
  bool converged_ = false;
  double gradient_norm_ = 0.0;
};

/// Full-Newton minimiser of sum_i ell(<f, x_i>, y_i) + rho ||f||^2 over
/// R^d to gradient norm 1e-10. `features` holds covariates as columns,
/// each required to have norm <= 1.
PrimalReferenceModel primal_reference_fit(const Eigen::MatrixXd& features,
                                          const Eigen::VectorXd& responses, double rho,
                                          const std::optional<Eigen::VectorXd>& f_star = {},
                                          const std::optional<Eigen::VectorXd>& warm = {});

}  // namespace snkb::logistic
