#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "snkb/kernel.hpp"
#include "snkb/logistic.hpp"
#include "snkb/rng.hpp"

namespace snkb::bandit {

/// Finite arm set over a common kernel; every arm must satisfy
/// k(a, a) <= 1 (and, for the linear family, live in the unit ball).
struct ArmSet {
  KernelSpec kernel{};
  std::vector<Eigen::VectorXd> arms;

  void validate() const;
};

/// Ground truth for simulations: either an explicit parameter vector
/// (linear kernel) or representer coefficients over anchor points, with
/// the RKHS norm computable from the anchor Gram matrix.
class FStar {
 public:
  static FStar linear(Eigen::VectorXd vector);
  static FStar dual(std::vector<Eigen::VectorXd> anchors, Eigen::VectorXd coefficients);

  /// <f*, phi(x)>.
  double value_at(const KernelSpec& spec, const Eigen::VectorXd& x) const;
  double rkhs_norm(const KernelSpec& spec) const;
  bool is_linear() const { return linear_; }
  const Eigen::VectorXd& vector() const;                 // linear representation
  const std::vector<Eigen::VectorXd>& anchors() const;   // dual representation
  const Eigen::VectorXd& coefficients() const;

 private:
  FStar() = default;
  bool linear_ = true;
  Eigen::VectorXd vector_;
  std::vector<Eigen::VectorXd> anchors_;
  Eigen::VectorXd coefficients_;
};

struct InstanceConstants {
  double v_star = 0.0;      // V(<f*, x*>), the optimal arm's variance
  double kappa_star = 0.0;  // max_x 1 / V(<f*, x>)
  int best_arm = 0;         // argmax <f*, x>, lowest index on ties
};

InstanceConstants instance_constants(const FStar& f_star, const ArmSet& arms);

/// Optimistic selection: the arm with the largest upper band edge
/// f_hat(a) + width * sigma_n(a) / sqrt(rho), lowest index on ties.
int ucb_select(const logistic::DualLogisticModel& model, const ArmSet& arms, double width);

enum class RewardKind { bernoulli, continuous };

/// Draws one reward with conditional mean mu(<f*, arm>): Bernoulli, or
/// uniform on [mu - s, mu + s] with s = min(mu, 1 - mu). Exactly one
/// uniform variate is consumed per call.
double environment_sample(const FStar& f_star, const KernelSpec& spec, const Eigen::VectorXd& arm,
                          RewardKind kind, Rng& rng);

enum class BanditPolicy { ucb, forced };

/// Width inside the loop: recompute the information gain each round
/// (default) or keep gamma frozen at zero for a horizon-free constant width.
enum class WidthGammaMode { per_round, fixed_zero };

struct BanditConfig {
  ArmSet arms{};
  FStar f_star = FStar::linear(Eigen::VectorXd::Zero(1));
  double rho = 1.0;
  double y = 3.0;
  double b = 1.0;
  int horizon = 100;
  std::uint64_t seed = 1;
  int refit_every = 1;
  RewardKind rewards = RewardKind::bernoulli;
  BanditPolicy policy = BanditPolicy::ucb;
  int forced_arm = 0;
  WidthGammaMode width_gamma = WidthGammaMode::per_round;

  void validate() const;  // includes ||f*|| <= b
};

struct BanditTrace {
  std::uint64_t seed = 0;
  std::vector<int> arm;
  std::vector<double> reward;
  std::vector<double> regret;      // mu(u*) - mu(u_chosen), nonnegative
  std::vector<double> cum_regret;
  std::vector<double> radius;      // the width used for the round
  std::vector<double> gain;        // information gain entering that width
};

/// One UCB (or forced-policy) run. Rounds are sequential; observations of
/// the same arm are aggregated into per-arm counts and response means, so
/// each refit works on the fixed arm-anchor Gram matrix. This matches the
/// per-observation formulation exactly (same estimator, same variances)
/// because repeated covariates enter the loss, the Hessian and the
/// information gain only through their multiplicities.
BanditTrace run_bandit(const BanditConfig& config);

}  // namespace snkb::bandit
