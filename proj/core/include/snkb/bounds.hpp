#pragma once

#include <Eigen/Core>
#include <cstdint>

#include "snkb/gram.hpp"

namespace snkb::bounds {

/// (rho, y, b): regularisation level, tail parameter and the assumed bound
/// on the RKHS norm of the target. Failure budgets are e^{-y}-scale; which
/// multiple applies depends on the radius (see the *_budget helpers).
struct ConfidenceConfig {
  double rho = 1.0;
  double y = 1.0;
  double b = 1.0;

  void validate() const;
};

/// One level of the doubling schedule: rho_h = 2^{h-1}, y_h = y + 2 log h.
struct StitchSchedule {
  int level = 1;
  double rho_h = 1.0;
  double y_h = 0.0;
};

struct StitchedRadius {
  double radius = 0.0;
  StitchSchedule schedule;
  double gain = 0.0;  // information gain at rho_h used inside the radius
};

/// Bernstein-type fixed-level radius
///   sqrt(3 rho)/2 + (2 sqrt(3)/sqrt(rho)) (9 gamma + y) + sqrt(6 (gamma + y)).
/// Strictly increasing in y and in gamma. Failure budget 2 e^{-y}.
double beta_fixed(double rho, double y, double gamma);

/// Hoeffding-type radius sqrt(2 (gamma + y)). Failure budget e^{-y}.
double hoeffding_radius(double rho, double y, double gamma);

/// iota(n) = max(1, log log n); the max makes n = 1 well defined.
double iota(std::uint64_t n);

/// iota'(n) = 2 log(max(1, log(2 n log 2) / log 2)).
double iota_prime(std::uint64_t n);

/// Confidence-sequence width for the regularised logistic estimator:
/// omega = u (5 + 2 (u / sqrt(rho))^3) with u = beta_fixed(rho, y, gamma) + b sqrt(rho).
/// Failure budget 2 e^{-y}.
double omega(double rho, double y, double gamma, double b);

/// Regret-bound curve sqrt(v* n omega gamma) + (1 + kappa*) omega gamma,
/// with leading constant fixed to 1 (the analysis only pins the shape, so
/// the curve is comparable across instances modulo a universal constant).
/// Requires v* in (0, 1/4] and kappa* >= 4.
double regret_bound_curve(std::uint64_t n, double v_star, double kappa_star, double omega_n,
                          double gamma_n);

/// Minimal doubling level h with rho_h >= gamma(rho_h^{-1} V) and the
/// Bernstein radius beta(rho_h, y + 2 log h, gamma(rho_h^{-1} V)) at that
/// level. Anytime over n, the union of these per-level events has failure
/// budget (pi^2/6) e^{-y}.
StitchedRadius stitched_radius_from_eigs(const Eigen::VectorXd& eigs, double y);
StitchedRadius stitched_radius(const GramState& state, double y);

/// Failure budgets reported next to each radius family.
double bernstein_budget(double y);   // 2 e^{-y}
double hoeffding_budget(double y);   // e^{-y}
double stitched_budget(double y);    // (pi^2 / 6) e^{-y}

}  // namespace snkb::bounds
