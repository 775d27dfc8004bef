#include "snkb/logistic.hpp"

#include <Eigen/Cholesky>
#include <Eigen/LU>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace snkb::logistic {

double link_mu(double u) {
  if (u >= 0.0) return 1.0 / (1.0 + std::exp(-u));
  const double e = std::exp(u);
  return e / (1.0 + e);
}

double variance_fn(double u) {
  // mu(u) mu(-u) rather than mu (1 - mu): both factors are computed in
  // their stable branch, so saturated inputs keep a faithful magnitude.
  const double v = link_mu(u) * link_mu(-u);
  return std::max(v, 1e-300);
}

namespace {

double softplus(double x) {
  return x > 0.0 ? x + std::log1p(std::exp(-x)) : std::log1p(std::exp(x));
}

void check_response(double y) {
  if (!(y >= 0.0 && y <= 1.0)) {
    throw std::invalid_argument("logistic: response outside [0, 1]");
  }
}

}  // namespace

double logistic_loss(double u, double y) {
  check_response(y);
  return softplus(-u) + (1.0 - y) * u;
}

DualLogisticModel fit(GramState gram, const Eigen::VectorXd& responses, double rho,
                      const FitOptions& options) {
  const int n = gram.size();
  if (responses.size() != n) throw std::invalid_argument("fit: responses length mismatch");
  if (!(rho > 0.0)) throw std::invalid_argument("fit: rho must be positive");
  for (int i = 0; i < n; ++i) check_response(responses[i]);

  Eigen::VectorXd counts = options.counts.value_or(Eigen::VectorXd::Ones(n));
  if (counts.size() != n) throw std::invalid_argument("fit: counts length mismatch");
  for (int i = 0; i < n; ++i) {
    if (!(counts[i] >= 0.0) || !std::isfinite(counts[i])) {
      throw std::invalid_argument("fit: counts must be finite and nonnegative");
    }
  }

  Eigen::VectorXd alpha = options.warm_alpha.value_or(Eigen::VectorXd::Zero(n));
  if (alpha.size() != n) throw std::invalid_argument("fit: warm start length mismatch");

  const Eigen::MatrixXd& K = gram.matrix();
  const double total = counts.sum();
  const double tol = 1e-10 * std::max(1.0, total);

  auto objective = [&](const Eigen::VectorXd& a, const Eigen::VectorXd& u) {
    double acc = 0.0;
    for (int i = 0; i < n; ++i) {
      if (counts[i] > 0.0) acc += counts[i] * logistic_loss(u[i], responses[i]);
    }
    return acc + rho * a.dot(u);  // u = K a, so a . u = a' K a
  };

  bool converged = (n == 0);
  double gradient_norm = 0.0;
  int iterations = 0;
  Eigen::VectorXd u = K * alpha;

  for (int iter = 0; iter < options.max_iterations && !converged; ++iter) {
    iterations = iter + 1;
    u = K * alpha;
    Eigen::VectorXd mu(n), w(n);
    for (int i = 0; i < n; ++i) {
      mu[i] = link_mu(u[i]);
      w[i] = variance_fn(u[i]);
    }
    const Eigen::VectorXd ghat = counts.cwiseProduct(mu - responses) + 2.0 * rho * alpha;
    const Eigen::VectorXd grad = K * ghat;
    gradient_norm = grad.norm();
    if (!std::isfinite(gradient_norm)) throw std::runtime_error("fit: non-finite gradient");
    if (gradient_norm <= tol) {
      converged = true;
      break;
    }

    // Newton direction: the dual Hessian K diag(c w) K + 2 rho K shares
    // K's null space, so solve the reduced system (diag(c w) K + 2 rho I)
    // delta = -ghat, whose solution is the Newton step modulo null(K) and
    // a strict descent direction for the dual objective.
    Eigen::MatrixXd B = counts.cwiseProduct(w).asDiagonal() * K;
    B.diagonal().array() += 2.0 * rho;
    const Eigen::VectorXd delta = Eigen::PartialPivLU<Eigen::MatrixXd>(B).solve(-ghat);
    const double slope = std::min(grad.dot(delta), 0.0);

    const double f0 = objective(alpha, u);
    if (!std::isfinite(f0)) throw std::runtime_error("fit: NaN in objective");
    // Absolute slack keeps the search from stalling once the attainable
    // decrease falls below the rounding noise of the objective itself.
    const double noise = 1e-14 * (1.0 + std::abs(f0));
    const Eigen::VectorXd kd = K * delta;
    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      const Eigen::VectorXd a_t = alpha + step * delta;
      const Eigen::VectorXd u_t = u + step * kd;
      const double f_t = objective(a_t, u_t);
      if (std::isfinite(f_t) && f_t <= f0 + 1e-4 * step * slope + noise) {
        alpha = a_t;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;  // stalled; the final gradient check decides
  }

  u = K * alpha;
  if (n > 0) {
    Eigen::VectorXd mu(n);
    for (int i = 0; i < n; ++i) mu[i] = link_mu(u[i]);
    const Eigen::VectorXd ghat = counts.cwiseProduct(mu - responses) + 2.0 * rho * alpha;
    gradient_norm = (K * ghat).norm();
    converged = gradient_norm <= tol;
  }
  if (!converged) {
    throw std::runtime_error("fit: no convergence after " + std::to_string(iterations) +
                             " iterations (gradient norm " + std::to_string(gradient_norm) + ")");
  }

  DualLogisticModel model;
  model.gram_ = std::move(gram);
  model.responses_ = responses;
  model.counts_ = std::move(counts);
  model.alpha_ = std::move(alpha);
  model.fitted_means_.resize(n);
  model.weights_.resize(n);
  for (int i = 0; i < n; ++i) {
    model.fitted_means_[i] = link_mu(u[i]);
    model.weights_[i] = variance_fn(u[i]);
  }
  model.rho_ = rho;
  model.converged_ = converged;
  model.gradient_norm_ = gradient_norm;
  model.iterations_ = iterations;
  return model;
}

double DualLogisticModel::predict_mean(const Eigen::VectorXd& a) const {
  if (gram_.size() == 0) return 0.0;
  return gram_.cross_kernel(a).dot(alpha_);
}

double DualLogisticModel::predictive_variance(const Eigen::VectorXd& a) const {
  const double kaa = kernel_eval(gram_.spec(), a, a);
  std::vector<int> support;
  support.reserve(static_cast<std::size_t>(gram_.size()));
  for (int i = 0; i < gram_.size(); ++i) {
    if (counts_[i] > 0.0) support.push_back(i);
  }
  if (support.empty()) return kaa;

  const int s = static_cast<int>(support.size());
  const Eigen::MatrixXd& K = gram_.matrix();
  Eigen::MatrixXd M(s, s);
  for (int i = 0; i < s; ++i) {
    for (int j = 0; j < s; ++j) M(i, j) = K(support[i], support[j]);
    M(i, i) += rho_ / (counts_[support[i]] * weights_[support[i]]);
  }
  M.diagonal().array() += 1e-12 * M.diagonal().maxCoeff();

  Eigen::LLT<Eigen::MatrixXd> llt(M);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("predictive_variance: factorization of (rho W^{-1} + K) failed");
  }
  const Eigen::VectorXd kn_full = gram_.cross_kernel(a);
  Eigen::VectorXd kn(s);
  for (int i = 0; i < s; ++i) kn[i] = kn_full[support[i]];
  const double correction = kn.dot(llt.solve(kn));
  return std::max(0.0, kaa - correction);
}

std::pair<double, double> DualLogisticModel::confidence_band(const Eigen::VectorXd& a,
                                                             double width) const {
  if (width < 0.0) throw std::invalid_argument("confidence_band: width must be nonnegative");
  const double center = predict_mean(a);
  const double half = width * std::sqrt(predictive_variance(a)) / std::sqrt(rho_);
  return {center - half, center + half};
}

const Eigen::MatrixXd& PrimalReferenceModel::h_star() const {
  if (!h_star_) throw std::logic_error("PrimalReferenceModel: no f_star was supplied");
  return *h_star_;
}

namespace {

double quad_norm(const Eigen::MatrixXd& H, const Eigen::VectorXd& v) {
  return std::sqrt(std::max(0.0, v.dot(H * v)));
}

double inv_quad_norm(const Eigen::MatrixXd& H, const Eigen::VectorXd& v) {
  Eigen::LLT<Eigen::MatrixXd> llt(H);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("PrimalReferenceModel: Hessian factorization failed");
  }
  return std::sqrt(std::max(0.0, v.dot(llt.solve(v))));
}

}  // namespace

double PrimalReferenceModel::ellipsoid_norm_h_hat(const Eigen::VectorXd& v) const {
  return quad_norm(h_hat_, v);
}
double PrimalReferenceModel::ellipsoid_norm_h_star(const Eigen::VectorXd& v) const {
  return quad_norm(h_star(), v);
}
double PrimalReferenceModel::inv_half_norm_h_hat(const Eigen::VectorXd& v) const {
  return inv_quad_norm(h_hat_, v);
}
double PrimalReferenceModel::inv_half_norm_h_star(const Eigen::VectorXd& v) const {
  return inv_quad_norm(h_star(), v);
}

PrimalReferenceModel primal_reference_fit(const Eigen::MatrixXd& features,
                                          const Eigen::VectorXd& responses, double rho,
                                          const std::optional<Eigen::VectorXd>& f_star,
                                          const std::optional<Eigen::VectorXd>& warm) {
  const int d = static_cast<int>(features.rows());
  const int n = static_cast<int>(features.cols());
  if (d < 1 || d > 50 || n > 500) {
    throw std::invalid_argument("primal_reference_fit: oracle scale is d <= 50, n <= 500");
  }
  if (responses.size() != n) {
    throw std::invalid_argument("primal_reference_fit: responses length mismatch");
  }
  if (!(rho > 0.0)) throw std::invalid_argument("primal_reference_fit: rho must be positive");
  for (int i = 0; i < n; ++i) {
    check_response(responses[i]);
    if (features.col(i).norm() > 1.0 + 1e-12) {
      throw std::invalid_argument("primal_reference_fit: feature column outside the unit ball");
    }
  }

  Eigen::VectorXd f = warm.value_or(Eigen::VectorXd::Zero(d));
  if (f.size() != d) throw std::invalid_argument("primal_reference_fit: warm start size mismatch");

  auto objective = [&](const Eigen::VectorXd& g) {
    double acc = rho * g.squaredNorm();
    const Eigen::VectorXd u = features.transpose() * g;
    for (int i = 0; i < n; ++i) acc += logistic_loss(u[i], responses[i]);
    return acc;
  };

  constexpr double kTol = 1e-10;
  constexpr int kMaxIter = 100;
  bool converged = false;
  double gradient_norm = 0.0;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    const Eigen::VectorXd u = features.transpose() * f;
    Eigen::VectorXd mu(n), w(n);
    for (int i = 0; i < n; ++i) {
      mu[i] = link_mu(u[i]);
      w[i] = variance_fn(u[i]);
    }
    const Eigen::VectorXd grad = features * (mu - responses) + 2.0 * rho * f;
    gradient_norm = grad.norm();
    if (!std::isfinite(gradient_norm)) {
      throw std::runtime_error("primal_reference_fit: non-finite gradient");
    }
    if (gradient_norm <= kTol) {
      converged = true;
      break;
    }
    Eigen::MatrixXd H = features * w.asDiagonal() * features.transpose();
    H.diagonal().array() += 2.0 * rho;
    const Eigen::VectorXd delta = Eigen::LLT<Eigen::MatrixXd>(H).solve(-grad);
    const double slope = std::min(grad.dot(delta), 0.0);
    const double f0 = objective(f);
    const double noise = 1e-14 * (1.0 + std::abs(f0));
    double step = 1.0;
    bool accepted = false;
    for (int half = 0; half < 60; ++half) {
      const Eigen::VectorXd cand = f + step * delta;
      const double f_t = objective(cand);
      if (std::isfinite(f_t) && f_t <= f0 + 1e-4 * step * slope + noise) {
        f = cand;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    if (!accepted) break;
  }
  {
    const Eigen::VectorXd u = features.transpose() * f;
    Eigen::VectorXd mu(n);
    for (int i = 0; i < n; ++i) mu[i] = link_mu(u[i]);
    gradient_norm = (features * (mu - responses) + 2.0 * rho * f).norm();
    converged = gradient_norm <= kTol;
  }
  if (!converged) {
    throw std::runtime_error("primal_reference_fit: no convergence (gradient norm " +
                             std::to_string(gradient_norm) + ")");
  }

  PrimalReferenceModel model;
  model.weights_ = f;
  const Eigen::VectorXd u = features.transpose() * f;
  Eigen::VectorXd w_hat(n);
  for (int i = 0; i < n; ++i) w_hat[i] = variance_fn(u[i]);
  model.h_hat_ = features * w_hat.asDiagonal() * features.transpose();
  model.h_hat_.diagonal().array() += rho;
  if (f_star) {
    if (f_star->size() != d) {
      throw std::invalid_argument("primal_reference_fit: f_star size mismatch");
    }
    const Eigen::VectorXd u_star = features.transpose() * (*f_star);
    Eigen::VectorXd w_star(n);
    for (int i = 0; i < n; ++i) w_star[i] = variance_fn(u_star[i]);
    Eigen::MatrixXd h = features * w_star.asDiagonal() * features.transpose();
    h.diagonal().array() += rho;
    model.h_star_ = std::move(h);
  }
  model.converged_ = converged;
  model.gradient_norm_ = gradient_norm;
  return model;
}

}  // namespace snkb::logistic
