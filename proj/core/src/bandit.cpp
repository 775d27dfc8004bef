#include "snkb/bandit.hpp"

#include <cmath>
#include <stdexcept>

#include "snkb/bounds.hpp"
#include "snkb/gram.hpp"

namespace snkb::bandit {

void ArmSet::validate() const {
  kernel.validate();
  if (arms.empty()) throw std::invalid_argument("ArmSet: arm set is empty");
  for (const auto& arm : arms) {
    if (arm.size() != kernel.input_dim) {
      throw std::invalid_argument("ArmSet: arm dimension mismatch");
    }
    if (kernel_eval(kernel, arm, arm) > 1.0 + 1e-12) {
      throw std::invalid_argument("ArmSet: arm with kernel diagonal > 1");
    }
  }
}

FStar FStar::linear(Eigen::VectorXd vector) {
  FStar f;
  f.linear_ = true;
  f.vector_ = std::move(vector);
  return f;
}

FStar FStar::dual(std::vector<Eigen::VectorXd> anchors, Eigen::VectorXd coefficients) {
  if (anchors.size() != static_cast<std::size_t>(coefficients.size())) {
    throw std::invalid_argument("FStar: anchors/coefficients length mismatch");
  }
  if (anchors.empty()) throw std::invalid_argument("FStar: no anchor points");
  FStar f;
  f.linear_ = false;
  f.anchors_ = std::move(anchors);
  f.coefficients_ = std::move(coefficients);
  return f;
}

const Eigen::VectorXd& FStar::vector() const {
  if (!linear_) throw std::logic_error("FStar: not a linear representation");
  return vector_;
}

const std::vector<Eigen::VectorXd>& FStar::anchors() const {
  if (linear_) throw std::logic_error("FStar: not a dual representation");
  return anchors_;
}

const Eigen::VectorXd& FStar::coefficients() const {
  if (linear_) throw std::logic_error("FStar: not a dual representation");
  return coefficients_;
}

double FStar::value_at(const KernelSpec& spec, const Eigen::VectorXd& x) const {
  if (linear_) {
    if (spec.family != KernelFamily::linear) {
      throw std::invalid_argument("FStar: explicit vector requires the linear kernel");
    }
    if (vector_.size() != x.size()) throw std::invalid_argument("FStar: dimension mismatch");
    return vector_.dot(x);
  }
  double acc = 0.0;
  for (std::size_t j = 0; j < anchors_.size(); ++j) {
    acc += coefficients_[static_cast<Eigen::Index>(j)] * kernel_eval(spec, anchors_[j], x);
  }
  return acc;
}

double FStar::rkhs_norm(const KernelSpec& spec) const {
  if (linear_) return vector_.norm();
  const GramState gram = GramState::batch(spec, anchors_);
  const double sq = coefficients_.dot(gram.matrix() * coefficients_);
  return std::sqrt(std::max(0.0, sq));
}

InstanceConstants instance_constants(const FStar& f_star, const ArmSet& arms) {
  arms.validate();
  InstanceConstants constants;
  double best_value = -std::numeric_limits<double>::infinity();
  double max_inverse_variance = 0.0;
  for (std::size_t i = 0; i < arms.arms.size(); ++i) {
    const double u = f_star.value_at(arms.kernel, arms.arms[i]);
    if (u > best_value) {
      best_value = u;
      constants.best_arm = static_cast<int>(i);
    }
    max_inverse_variance = std::max(max_inverse_variance, 1.0 / logistic::variance_fn(u));
  }
  constants.v_star = logistic::variance_fn(best_value);
  constants.kappa_star = max_inverse_variance;
  return constants;
}

int ucb_select(const logistic::DualLogisticModel& model, const ArmSet& arms, double width) {
  arms.validate();
  if (width < 0.0) throw std::invalid_argument("ucb_select: width must be nonnegative");
  int best = 0;
  double best_score = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < arms.arms.size(); ++i) {
    const double score = model.confidence_band(arms.arms[i], width).second;
    if (score > best_score) {
      best_score = score;
      best = static_cast<int>(i);
    }
  }
  return best;
}

double environment_sample(const FStar& f_star, const KernelSpec& spec, const Eigen::VectorXd& arm,
                          RewardKind kind, Rng& rng) {
  const double mean = logistic::link_mu(f_star.value_at(spec, arm));
  const double u = rng.u01();
  if (kind == RewardKind::bernoulli) return u < mean ? 1.0 : 0.0;
  const double spread = std::min(mean, 1.0 - mean);
  return mean + spread * (2.0 * u - 1.0);
}

void BanditConfig::validate() const {
  arms.validate();
  bounds::ConfidenceConfig{rho, y, b}.validate();
  if (horizon < 0) throw std::invalid_argument("BanditConfig: horizon must be nonnegative");
  if (refit_every < 1) throw std::invalid_argument("BanditConfig: refit_every must be >= 1");
  if (policy == BanditPolicy::forced &&
      (forced_arm < 0 || forced_arm >= static_cast<int>(arms.arms.size()))) {
    throw std::invalid_argument("BanditConfig: forced_arm out of range");
  }
  const double norm = f_star.rkhs_norm(arms.kernel);
  if (norm > b + 1e-9) {
    throw std::invalid_argument("BanditConfig: ||f*|| = " + std::to_string(norm) +
                                " exceeds the declared bound b");
  }
}

BanditTrace run_bandit(const BanditConfig& config) {
  config.validate();
  const int n_arms = static_cast<int>(config.arms.arms.size());
  const GramState anchor_gram = GramState::batch(config.arms.kernel, config.arms.arms);

  Eigen::VectorXd counts = Eigen::VectorXd::Zero(n_arms);
  Eigen::VectorXd sums = Eigen::VectorXd::Zero(n_arms);
  Eigen::VectorXd means = Eigen::VectorXd::Constant(n_arms, 0.5);  // arbitrary at count 0

  logistic::FitOptions options;
  options.counts = counts;
  logistic::DualLogisticModel model = logistic::fit(anchor_gram, means, config.rho, options);

  const InstanceConstants constants = instance_constants(config.f_star, config.arms);
  const double mu_star = logistic::link_mu(
      config.f_star.value_at(config.arms.kernel, config.arms.arms[constants.best_arm]));

  Rng rng = Rng::stream(config.seed, 0);

  BanditTrace trace;
  trace.seed = config.seed;
  trace.arm.reserve(config.horizon);
  trace.reward.reserve(config.horizon);
  trace.regret.reserve(config.horizon);
  trace.cum_regret.reserve(config.horizon);
  trace.radius.reserve(config.horizon);
  trace.gain.reserve(config.horizon);

  double cum = 0.0;
  for (int round = 1; round <= config.horizon; ++round) {
    double gain = 0.0;
    if (config.width_gamma == WidthGammaMode::per_round) {
      // gamma(rho^{-1} V_n) from the multiplicity-scaled anchor Gram matrix:
      // the nonzero spectrum of sum_a counts_a phi_a phi_a' equals that of
      // diag(sqrt(counts)) K diag(sqrt(counts)).
      const Eigen::VectorXd root = counts.cwiseSqrt();
      const Eigen::MatrixXd scaled =
          root.asDiagonal() * anchor_gram.matrix() * root.asDiagonal();
      gain = info_gain_from_eigs(psd_eigenvalues(scaled), config.rho);
    }
    const double width = bounds::omega(config.rho, config.y, gain, config.b);

    const int chosen = config.policy == BanditPolicy::forced
                           ? config.forced_arm
                           : ucb_select(model, config.arms, width);
    const double reward = environment_sample(config.f_star, config.arms.kernel,
                                             config.arms.arms[chosen], config.rewards, rng);

    counts[chosen] += 1.0;
    sums[chosen] += reward;
    means[chosen] = sums[chosen] / counts[chosen];

    if (round % config.refit_every == 0 || round == config.horizon) {
      logistic::FitOptions refit;
      refit.counts = counts;
      refit.warm_alpha = model.alpha();
      try {
        model = logistic::fit(anchor_gram, means, config.rho, refit);
      } catch (const std::exception& e) {
        throw std::runtime_error("run_bandit: round " + std::to_string(round) + ": " + e.what());
      }
    }

    const double u_chosen = config.f_star.value_at(config.arms.kernel, config.arms.arms[chosen]);
    const double regret = mu_star - logistic::link_mu(u_chosen);
    cum += regret;

    trace.arm.push_back(chosen);
    trace.reward.push_back(reward);
    trace.regret.push_back(regret);
    trace.cum_regret.push_back(cum);
    trace.radius.push_back(width);
    trace.gain.push_back(gain);
  }
  return trace;
}

}  // namespace snkb::bandit
