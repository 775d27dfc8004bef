#include "snkb/bounds.hpp"

#include <cmath>
#include <numbers>
#include <stdexcept>

namespace snkb::bounds {

void ConfidenceConfig::validate() const {
  if (!(rho > 0.0)) throw std::invalid_argument("ConfidenceConfig: rho must be positive");
  if (!(y > 0.0)) throw std::invalid_argument("ConfidenceConfig: y must be positive");
  if (!(b > 0.0)) throw std::invalid_argument("ConfidenceConfig: b must be positive");
}

double beta_fixed(double rho, double y, double gamma) {
  if (!(rho > 0.0)) throw std::invalid_argument("beta_fixed: rho must be positive");
  if (y < 0.0 || gamma < 0.0) throw std::invalid_argument("beta_fixed: negative input");
  const double sqrt_rho = std::sqrt(rho);
  return std::sqrt(3.0 * rho) / 2.0 + (2.0 * std::sqrt(3.0) / sqrt_rho) * (9.0 * gamma + y) +
         std::sqrt(6.0 * (gamma + y));
}

double hoeffding_radius(double rho, double y, double gamma) {
  if (!(rho > 0.0)) throw std::invalid_argument("hoeffding_radius: rho must be positive");
  if (y < 0.0 || gamma < 0.0) throw std::invalid_argument("hoeffding_radius: negative input");
  return std::sqrt(2.0 * (gamma + y));
}

double iota(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("iota: n must be >= 1");
  if (n == 1) return 1.0;  // log log 1 is undefined; the max(1, .) clamp decides
  return std::max(1.0, std::log(std::log(static_cast<double>(n))));
}

double iota_prime(std::uint64_t n) {
  if (n == 0) throw std::invalid_argument("iota_prime: n must be >= 1");
  const double ratio = std::log(2.0 * static_cast<double>(n) * std::numbers::ln2) / std::numbers::ln2;
  return 2.0 * std::log(std::max(1.0, ratio));
}

double omega(double rho, double y, double gamma, double b) {
  if (!(rho > 0.0) || !(y > 0.0) || !(b > 0.0)) {
    throw std::invalid_argument("omega: rho, y and b must be positive");
  }
  if (gamma < 0.0) throw std::invalid_argument("omega: gamma must be nonnegative");
  const double u = beta_fixed(rho, y, gamma) + b * std::sqrt(rho);
  const double ratio = u / std::sqrt(rho);
  return u * (5.0 + 2.0 * ratio * ratio * ratio);
}

double regret_bound_curve(std::uint64_t n, double v_star, double kappa_star, double omega_n,
                          double gamma_n) {
  if (!(v_star > 0.0) || v_star > 0.25) {
    throw std::invalid_argument("regret_bound_curve: v_star must lie in (0, 1/4]");
  }
  if (kappa_star < 4.0) throw std::invalid_argument("regret_bound_curve: kappa_star must be >= 4");
  if (!(omega_n > 0.0) || gamma_n < 0.0) {
    throw std::invalid_argument("regret_bound_curve: invalid omega or gamma");
  }
  return std::sqrt(v_star * static_cast<double>(n) * omega_n * gamma_n) +
         (1.0 + kappa_star) * omega_n * gamma_n;
}

StitchedRadius stitched_radius_from_eigs(const Eigen::VectorXd& eigs, double y) {
  if (!(y > 0.0)) throw std::invalid_argument("stitched_radius: y must be positive");
  int level = 1;
  double rho_h = 1.0;
  double gain = info_gain_from_eigs(eigs, rho_h);
  while (rho_h < gain) {
    ++level;
    rho_h *= 2.0;
    gain = info_gain_from_eigs(eigs, rho_h);
    if (level > 1100) throw std::logic_error("stitched_radius: level runaway");  // unreachable
  }
  const double y_h = y + 2.0 * std::log(static_cast<double>(level));
  return StitchedRadius{beta_fixed(rho_h, y_h, gain), StitchSchedule{level, rho_h, y_h}, gain};
}

StitchedRadius stitched_radius(const GramState& state, double y) {
  return stitched_radius_from_eigs(state.eigenvalues(), y);
}

double bernstein_budget(double y) { return 2.0 * std::exp(-y); }
double hoeffding_budget(double y) { return std::exp(-y); }
double stitched_budget(double y) {
  return std::numbers::pi * std::numbers::pi / 6.0 * std::exp(-y);
}

}  // namespace snkb::bounds
