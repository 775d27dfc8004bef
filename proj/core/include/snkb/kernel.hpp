#pragma once

#include <Eigen/Core>

namespace snkb {

enum class KernelFamily { linear, gaussian_rbf, matern52 };

/// A positive-definite kernel family, normalised so that k(a,a) <= 1.
/// For rbf and Matern-5/2 the diagonal is 1 by construction; the linear
/// kernel instead requires its inputs to lie in the closed unit ball.
struct KernelSpec {
  KernelFamily family = KernelFamily::gaussian_rbf;
  double lengthscale = 1.0;  // ignored by the linear family
  int input_dim = 1;

  void validate() const;
};

/// k(a, b). Throws std::invalid_argument on dimension mismatch or, for the
/// linear family, inputs with norm > 1 + 1e-12.
double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& a, const Eigen::VectorXd& b);

}  // namespace snkb
