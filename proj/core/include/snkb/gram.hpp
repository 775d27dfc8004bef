#pragma once

#include <Eigen/Core>
#include <optional>
#include <vector>

#include "snkb/kernel.hpp"

namespace snkb {

/// Eigenvalues of a symmetric PSD matrix, sorted nonincreasing. Small
/// negative values in [-1e-8 * max(1, lambda_max), 0) are clipped to zero
/// (floating-point drift); anything more negative is a hard error since it
/// signals a genuinely indefinite input.
Eigen::VectorXd psd_eigenvalues(const Eigen::MatrixXd& sym);

/// Information gain of a PSD spectrum at regularisation level rho:
/// gamma = 0.5 * sum_i log(1 + lambda_i / rho). Requires rho > 0.
double info_gain_from_eigs(const Eigen::VectorXd& eigs, double rho);

/// The fixed point inf{rho >= 1 : rho >= gamma(rho^{-1} V)}. Returns 1
/// exactly when the gain at rho = 1 is <= 1; otherwise solves
/// rho = gamma(rho^{-1} V) by bisection (the map rho -> rho - gamma is
/// strictly increasing) to absolute tolerance 1e-9.
double rho_star_from_eigs(const Eigen::VectorXd& eigs);

/// Incrementally grown Gram matrix over observed covariates, with a lazily
/// refreshed eigenvalue cache. A GramState is a plain value: copying it
/// shares nothing, and all operations are deterministic in their inputs.
class GramState {
 public:
  explicit GramState(KernelSpec spec);

  /// Batch construction; elementwise identical to sequential appends.
  static GramState batch(KernelSpec spec, const std::vector<Eigen::VectorXd>& points);

  /// Spectrum-only state wrapping an externally formed symmetric PSD
  /// matrix (simulated quadratic variations, test fixtures). Point-based
  /// operations (append, cross_kernel) are unavailable on such states.
  static GramState from_matrix(Eigen::MatrixXd sym);

  void append(const Eigen::VectorXd& point);

  int size() const { return static_cast<int>(K_.rows()); }
  bool has_points() const { return has_points_; }
  const KernelSpec& spec() const { return spec_; }
  const std::vector<Eigen::VectorXd>& points() const { return points_; }
  const Eigen::MatrixXd& matrix() const { return K_; }
  double jitter() const { return jitter_; }
  void set_jitter(double jitter);

  /// Nonincreasing eigenvalues of K (+ jitter * I), clipped per
  /// psd_eigenvalues. Cached until the next append.
  const Eigen::VectorXd& eigenvalues() const;

  /// Column vector [k(a, points[j])]_j.
  Eigen::VectorXd cross_kernel(const Eigen::VectorXd& a) const;

  double info_gain(double rho) const;
  double rho_star() const;

 private:
  KernelSpec spec_;
  bool has_points_ = true;
  std::vector<Eigen::VectorXd> points_;
  Eigen::MatrixXd K_;
  double jitter_ = 0.0;
  mutable std::optional<Eigen::VectorXd> eig_cache_;
};

}  // namespace snkb
