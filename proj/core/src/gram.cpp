#include "snkb/gram.hpp"

#include <Eigen/Eigenvalues>
#include <cmath>
#include <stdexcept>

namespace snkb {

Eigen::VectorXd psd_eigenvalues(const Eigen::MatrixXd& sym) {
  if (sym.rows() != sym.cols()) throw std::invalid_argument("psd_eigenvalues: matrix not square");
  const Eigen::Index n = sym.rows();
  if (n == 0) return Eigen::VectorXd();
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sym, Eigen::EigenvaluesOnly);
  if (solver.info() != Eigen::Success) {
    throw std::runtime_error("psd_eigenvalues: eigendecomposition failed");
  }
  Eigen::VectorXd eigs = solver.eigenvalues().reverse();  // nonincreasing
  const double lambda_max = std::max(eigs[0], 0.0);
  const double tol = -1e-8 * std::max(1.0, lambda_max);
  for (Eigen::Index i = 0; i < n; ++i) {
    if (eigs[i] < tol) {
      throw std::runtime_error("psd_eigenvalues: eigenvalue " + std::to_string(eigs[i]) +
                               " below PSD tolerance");
    }
    if (eigs[i] < 0.0) eigs[i] = 0.0;
  }
  return eigs;
}

double info_gain_from_eigs(const Eigen::VectorXd& eigs, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("info_gain: rho must be positive");
  double acc = 0.0;
  for (Eigen::Index i = 0; i < eigs.size(); ++i) acc += std::log1p(eigs[i] / rho);
  return 0.5 * acc;
}

double rho_star_from_eigs(const Eigen::VectorXd& eigs) {
  const double gain_at_one = info_gain_from_eigs(eigs, 1.0);
  if (gain_at_one <= 1.0) return 1.0;
  // gamma(rho^{-1} V) <= gamma(V) for rho >= 1, so [1, gain_at_one] brackets
  // the root of rho - gamma(rho^{-1} V).
  double lo = 1.0;
  double hi = gain_at_one;
  while (hi - lo > 1e-10) {
    const double mid = 0.5 * (lo + hi);
    if (mid >= info_gain_from_eigs(eigs, mid)) {
      hi = mid;
    } else {
      lo = mid;
    }
  }
  return 0.5 * (lo + hi);
}

GramState::GramState(KernelSpec spec) : spec_(spec), K_(0, 0) { spec_.validate(); }

GramState GramState::batch(KernelSpec spec, const std::vector<Eigen::VectorXd>& points) {
  GramState state(spec);
  state.points_ = points;
  const Eigen::Index n = static_cast<Eigen::Index>(points.size());
  state.K_.resize(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    for (Eigen::Index j = 0; j < n; ++j) {
      state.K_(i, j) = kernel_eval(spec, points[i], points[j]);
    }
  }
  return state;
}

GramState GramState::from_matrix(Eigen::MatrixXd sym) {
  if (sym.rows() != sym.cols()) throw std::invalid_argument("GramState: matrix not square");
  if (!sym.isApprox(sym.transpose(), 1e-12)) {
    throw std::invalid_argument("GramState: matrix not symmetric");
  }
  GramState state(KernelSpec{KernelFamily::linear, 1.0, 1});
  state.has_points_ = false;
  state.K_ = std::move(sym);
  return state;
}

void GramState::append(const Eigen::VectorXd& point) {
  if (!has_points_) throw std::logic_error("GramState: append on a spectrum-only state");
  if (point.size() != spec_.input_dim) {
    throw std::invalid_argument("GramState: point dimension mismatch");
  }
  const Eigen::Index n = K_.rows();
  K_.conservativeResize(n + 1, n + 1);
  for (Eigen::Index j = 0; j < n; ++j) {
    K_(n, j) = kernel_eval(spec_, point, points_[static_cast<std::size_t>(j)]);
    K_(j, n) = kernel_eval(spec_, points_[static_cast<std::size_t>(j)], point);
  }
  K_(n, n) = kernel_eval(spec_, point, point);
  points_.push_back(point);
  eig_cache_.reset();
}

void GramState::set_jitter(double jitter) {
  if (jitter < 0.0) throw std::invalid_argument("GramState: jitter must be nonnegative");
  jitter_ = jitter;
  eig_cache_.reset();
}

const Eigen::VectorXd& GramState::eigenvalues() const {
  if (!eig_cache_) {
    if (jitter_ == 0.0) {
      eig_cache_ = psd_eigenvalues(K_);
    } else {
      Eigen::MatrixXd shifted = K_;
      shifted.diagonal().array() += jitter_;
      eig_cache_ = psd_eigenvalues(shifted);
    }
  }
  return *eig_cache_;
}

Eigen::VectorXd GramState::cross_kernel(const Eigen::VectorXd& a) const {
  if (!has_points_) throw std::logic_error("GramState: cross_kernel on a spectrum-only state");
  Eigen::VectorXd col(size());
  for (int j = 0; j < size(); ++j) {
    col[j] = kernel_eval(spec_, a, points_[static_cast<std::size_t>(j)]);
  }
  return col;
}

double GramState::info_gain(double rho) const { return info_gain_from_eigs(eigenvalues(), rho); }

double GramState::rho_star() const { return rho_star_from_eigs(eigenvalues()); }

}  // namespace snkb
