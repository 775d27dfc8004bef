#include "snkb/validation.hpp"

#include <Eigen/Cholesky>
#include <Eigen/Eigenvalues>
#include <algorithm>
#include <cmath>
#include <stdexcept>

#include "snkb/bounds.hpp"
#include "snkb/errors.hpp"
#include "snkb/gram.hpp"
#include "snkb/parallel.hpp"

namespace snkb::validation {

WilsonInterval wilson_interval(int successes, int trials) {
  if (trials <= 0 || successes < 0 || successes > trials) {
    throw std::invalid_argument("wilson_interval: invalid counts");
  }
  constexpr double z = 1.959963984540054;  // 97.5% normal quantile
  const double n = static_cast<double>(trials);
  const double p = static_cast<double>(successes) / n;
  const double z2 = z * z;
  const double denom = 1.0 + z2 / n;
  const double center = (p + z2 / (2.0 * n)) / denom;
  const double halfwidth = z / denom * std::sqrt(p * (1.0 - p) / n + z2 / (4.0 * n * n));
  return WilsonInterval{std::max(0.0, center - halfwidth), std::min(1.0, center + halfwidth),
                        halfwidth};
}

void CoverageConfig::validate() const {
  trace.validate();
  if (!(y > 0.0)) throw std::invalid_argument("CoverageConfig: y must be positive");
  if (theorem != CoverageTheorem::thm_stitched && !(rho > 0.0)) {
    throw std::invalid_argument("CoverageConfig: rho must be positive");
  }
  if (replications < 100) throw std::invalid_argument("CoverageConfig: need >= 100 replications");
  if (trace.horizon < 1) throw std::invalid_argument("CoverageConfig: horizon must be >= 1");
}

namespace {

double normalised_quadratic(const Eigen::MatrixXd& a, double shift, const Eigen::VectorXd& s) {
  Eigen::MatrixXd m = a;
  m.diagonal().array() += shift;
  Eigen::LLT<Eigen::MatrixXd> llt(m);
  if (llt.info() != Eigen::Success) {
    throw std::runtime_error("coverage: statistic factorization failed");
  }
  return std::sqrt(std::max(0.0, s.dot(llt.solve(s))));
}

}  // namespace

CoverageResult coverage_experiment(const CoverageConfig& config) {
  config.validate();
  const int reps = config.replications;
  const int horizon = config.trace.horizon;
  const int d = config.trace.dimension;

  std::vector<ReplicationOutcome> outcomes(static_cast<std::size_t>(reps));
  parallel_for(static_cast<std::size_t>(reps), config.threads, [&](std::size_t i) {
    const MartingaleTrace trace =
        simulate_trace(config.trace, stream_seed(config.master_seed, i));
    Eigen::VectorXd s = Eigen::VectorXd::Zero(d);
    Eigen::MatrixXd predictable = Eigen::MatrixXd::Zero(d, d);  // <S>_n
    Eigen::MatrixXd worst = Eigen::MatrixXd::Zero(d, d);        // V_n

    ReplicationOutcome out;
    out.index = i;
    for (int j = 0; j < horizon; ++j) {
      const auto x = trace.covariates.col(j);
      s += trace.noise[j] * x;
      predictable += trace.second_moments[j] * (x * x.transpose());
      worst += x * x.transpose();

      const Eigen::VectorXd eigs = psd_eigenvalues(worst);
      double stat = 0.0;
      double radius = 0.0;
      switch (config.theorem) {
        case CoverageTheorem::thm_bernstein_fixed:
          radius = bounds::beta_fixed(config.rho, config.y,
                                      info_gain_from_eigs(eigs, config.rho));
          stat = normalised_quadratic(predictable, config.rho, s);
          break;
        case CoverageTheorem::thm_hoeffding_fixed:
          radius = bounds::hoeffding_radius(config.rho, config.y,
                                            info_gain_from_eigs(eigs, config.rho));
          stat = normalised_quadratic(worst, config.rho, s);
          break;
        case CoverageTheorem::thm_stitched: {
          const bounds::StitchedRadius stitched =
              bounds::stitched_radius_from_eigs(eigs, config.y);
          radius = stitched.radius;
          stat = normalised_quadratic(predictable, stitched.schedule.rho_h, s);
          break;
        }
      }
      const double ratio = stat / radius;
      out.max_ratio = std::max(out.max_ratio, ratio);
      if (ratio > 1.0 && !out.violated) {
        out.violated = true;
        out.first_violation = j + 1;
      }
    }
    outcomes[i] = out;
  });

  CoverageResult result;
  result.replications = reps;
  for (const auto& out : outcomes) result.violations += out.violated ? 1 : 0;
  result.rate = static_cast<double>(result.violations) / reps;
  switch (config.theorem) {
    case CoverageTheorem::thm_bernstein_fixed:
      result.budget = bounds::bernstein_budget(config.y);
      break;
    case CoverageTheorem::thm_hoeffding_fixed:
      result.budget = bounds::hoeffding_budget(config.y);
      break;
    case CoverageTheorem::thm_stitched:
      result.budget = bounds::stitched_budget(config.y);
      break;
  }
  result.wilson = wilson_interval(result.violations, reps);
  result.outcomes = std::move(outcomes);
  return result;
}

void SupermartingaleConfig::validate() const {
  trace.validate();
  if (directions.empty()) throw std::invalid_argument("supermartingale: no directions");
  for (const auto& x : directions) {
    if (x.size() != trace.dimension) {
      throw std::invalid_argument("supermartingale: direction dimension mismatch");
    }
    if (x.norm() > 1.0 + 1e-12) {
      throw std::invalid_argument("supermartingale: direction outside the unit ball");
    }
  }
  if (checkpoints.empty()) throw std::invalid_argument("supermartingale: no checkpoints");
  for (std::size_t i = 0; i < checkpoints.size(); ++i) {
    if (checkpoints[i] < 1 || checkpoints[i] > trace.horizon) {
      throw std::invalid_argument("supermartingale: checkpoint outside the horizon");
    }
    if (i > 0 && checkpoints[i] <= checkpoints[i - 1]) {
      throw std::invalid_argument("supermartingale: checkpoints must be increasing");
    }
  }
  if (replications < 2) throw std::invalid_argument("supermartingale: need >= 2 replications");
}

std::vector<SupermartingaleCheckpoint> supermartingale_check(const SupermartingaleConfig& config) {
  config.validate();
  const int reps = config.replications;
  const std::size_t n_dir = config.directions.size();
  const std::size_t n_chk = config.checkpoints.size();

  // values[rep][dir * n_chk + chk]
  std::vector<std::vector<double>> values(static_cast<std::size_t>(reps));
  std::vector<int> clipped(static_cast<std::size_t>(reps), 0);

  parallel_for(static_cast<std::size_t>(reps), config.threads, [&](std::size_t r) {
    const MartingaleTrace trace =
        simulate_trace(config.trace, stream_seed(config.master_seed, r));
    std::vector<double> signal(n_dir, 0.0);     // <S_n, x>
    std::vector<double> quadratic(n_dir, 0.0);  // <x, <S>_n x>
    std::vector<double> row(n_dir * n_chk, 0.0);
    std::size_t next_chk = 0;
    for (int j = 0; j < trace.horizon; ++j) {
      const auto x_col = trace.covariates.col(j);
      for (std::size_t k = 0; k < n_dir; ++k) {
        const double proj = config.directions[k].dot(x_col);
        signal[k] += trace.noise[j] * proj;
        quadratic[k] += trace.second_moments[j] * proj * proj;
      }
      while (next_chk < n_chk && config.checkpoints[next_chk] == j + 1) {
        for (std::size_t k = 0; k < n_dir; ++k) {
          double exponent = signal[k] - 1.5 * quadratic[k];
          if (exponent > 700.0) {
            exponent = 700.0;
            ++clipped[r];
          }
          row[k * n_chk + next_chk] = std::exp(exponent);
        }
        ++next_chk;
      }
    }
    values[r] = std::move(row);
  });

  int total_clipped = 0;
  for (int c : clipped) total_clipped += c;
  if (total_clipped > 0) {
    throw std::runtime_error("supermartingale_check: exponent clipped " +
                             std::to_string(total_clipped) +
                             " times; clipped means would be biased");
  }

  std::vector<SupermartingaleCheckpoint> report;
  report.reserve(n_dir * n_chk);
  for (std::size_t k = 0; k < n_dir; ++k) {
    for (std::size_t c = 0; c < n_chk; ++c) {
      double sum = 0.0;
      for (int r = 0; r < reps; ++r) sum += values[static_cast<std::size_t>(r)][k * n_chk + c];
      const double mean = sum / reps;
      double ss = 0.0;
      for (int r = 0; r < reps; ++r) {
        const double dev = values[static_cast<std::size_t>(r)][k * n_chk + c] - mean;
        ss += dev * dev;
      }
      const double se = std::sqrt(ss / (reps - 1)) / std::sqrt(static_cast<double>(reps));
      report.push_back(SupermartingaleCheckpoint{static_cast<int>(k), config.checkpoints[c], mean,
                                                 se, mean <= 1.0 + 3.0 * se});
    }
  }
  return report;
}

std::vector<TruncationStep> truncation_check(const MartingaleTrace& trace, double rho) {
  if (!(rho > 0.0)) throw std::invalid_argument("truncation_check: rho must be positive");
  const int d = trace.dimension;
  Eigen::MatrixXd basis(d, 0);  // orthonormal columns spanning the head subspace
  Eigen::MatrixXd v_tail = Eigen::MatrixXd::Zero(d, d);
  Eigen::MatrixXd v_full = Eigen::MatrixXd::Zero(d, d);

  std::vector<TruncationStep> steps;
  steps.reserve(static_cast<std::size_t>(trace.horizon));
  for (int j = 0; j < trace.horizon; ++j) {
    const Eigen::VectorXd x = trace.covariates.col(j);
    Eigen::VectorXd x_tail = x;
    if (basis.cols() > 0) x_tail -= basis * (basis.transpose() * x);
    v_tail += x_tail * x_tail.transpose();
    v_full += x * x.transpose();

    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> tail_eig(v_tail);
    if (tail_eig.info() != Eigen::Success) {
      throw std::runtime_error("truncation_check: tail eigendecomposition failed");
    }
    const double tail_norm = tail_eig.eigenvalues()[d - 1];
    if (!(tail_norm < rho + 1.0 + 1e-9)) {
      throw CheckFailure("truncation_check: ||V_n^-|| = " + std::to_string(tail_norm) +
                         " >= rho + 1 at step " + std::to_string(j + 1));
    }

    // Absorb every tail eigendirection that has reached rho.
    for (int i = d - 1; i >= 0 && tail_eig.eigenvalues()[i] >= rho; --i) {
      Eigen::VectorXd e = tail_eig.eigenvectors().col(i);
      for (int pass = 0; pass < 2 && basis.cols() > 0; ++pass) {
        e -= basis * (basis.transpose() * e);
      }
      const double norm = e.norm();
      if (norm > 1e-8) {
        basis.conservativeResize(d, basis.cols() + 1);
        basis.col(basis.cols() - 1) = e / norm;
      }
    }

    const double gain = info_gain_from_eigs(psd_eigenvalues(v_full), rho);
    const int dim = static_cast<int>(basis.cols());
    if (!(dim <= 4.0 * gain + 1e-9)) {
      throw CheckFailure("truncation_check: D_n = " + std::to_string(dim) + " exceeds 4 gamma = " +
                         std::to_string(4.0 * gain) + " at step " + std::to_string(j + 1));
    }
    steps.push_back(TruncationStep{j + 1, dim, gain, tail_norm});
  }
  return steps;
}

}  // namespace snkb::validation
