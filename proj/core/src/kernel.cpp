#include "snkb/kernel.hpp"

#include <cmath>
#include <stdexcept>

namespace snkb {

void KernelSpec::validate() const {
  if (input_dim <= 0) throw std::invalid_argument("KernelSpec: input_dim must be positive");
  if (family != KernelFamily::linear && !(lengthscale > 0.0)) {
    throw std::invalid_argument("KernelSpec: lengthscale must be positive");
  }
}

namespace {

constexpr double kUnitBallSlack = 1e-12;

void check_dim(const KernelSpec& spec, const Eigen::VectorXd& v) {
  if (v.size() != spec.input_dim) {
    throw std::invalid_argument("kernel_eval: input dimension mismatch");
  }
}

void check_unit_ball(const Eigen::VectorXd& v) {
  if (v.norm() > 1.0 + kUnitBallSlack) {
    throw std::invalid_argument("kernel_eval: linear-family input has norm > 1");
  }
}

}  // namespace

double kernel_eval(const KernelSpec& spec, const Eigen::VectorXd& a, const Eigen::VectorXd& b) {
  check_dim(spec, a);
  check_dim(spec, b);
  switch (spec.family) {
    case KernelFamily::linear:
      check_unit_ball(a);
      check_unit_ball(b);
      return a.dot(b);
    case KernelFamily::gaussian_rbf: {
      const double d2 = (a - b).squaredNorm();
      return std::exp(-d2 / (2.0 * spec.lengthscale * spec.lengthscale));
    }
    case KernelFamily::matern52: {
      // k(r) = (1 + s + s^2/3) exp(-s) with s = sqrt(5) r / lengthscale
      const double s = std::sqrt(5.0) * (a - b).norm() / spec.lengthscale;
      return (1.0 + s + s * s / 3.0) * std::exp(-s);
    }
  }
  throw std::logic_error("kernel_eval: unhandled kernel family");
}

}  // namespace snkb
