#pragma once

#include <Eigen/Core>
#include <cstdint>
#include <vector>

#include "snkb/martingale.hpp"

namespace snkb::validation {

enum class CoverageTheorem {
  thm_bernstein_fixed,  // Bernstein statistic vs beta_fixed;   budget 2 e^{-y}
  thm_hoeffding_fixed,  // Hoeffding statistic vs sqrt(2(g+y)); budget e^{-y}
  thm_stitched          // per-step doubling level;             budget (pi^2/6) e^{-y}
};

struct WilsonInterval {
  double lower = 0.0;
  double upper = 0.0;
  double halfwidth = 0.0;
};

/// 95% Wilson score interval for a binomial proportion.
WilsonInterval wilson_interval(int successes, int trials);

struct CoverageConfig {
  TraceConfig trace{};
  CoverageTheorem theorem = CoverageTheorem::thm_hoeffding_fixed;
  double rho = 1.0;  // fixed-level theorems only
  double y = 3.0;
  int replications = 100;
  std::uint64_t master_seed = 1;
  int threads = 1;

  void validate() const;
};

struct ReplicationOutcome {
  std::uint64_t index = 0;
  bool violated = false;
  int first_violation = -1;  // 1-based step, -1 if none
  double max_ratio = 0.0;    // max_n stat_n / radius_n
};

struct CoverageResult {
  int replications = 0;
  int violations = 0;
  double rate = 0.0;
  double budget = 0.0;
  WilsonInterval wilson{};
  std::vector<ReplicationOutcome> outcomes;
};

/// Monte Carlo estimate of the frequency with which the time-uniform
/// statistic exceeds its radius anywhere along the path. Replication i
/// draws from the stream (master_seed, i), independent of scheduling.
CoverageResult coverage_experiment(const CoverageConfig& config);

struct SupermartingaleConfig {
  TraceConfig trace{};
  std::vector<Eigen::VectorXd> directions;  // each with norm <= 1
  std::vector<int> checkpoints;             // increasing, within horizon
  int replications = 1000;
  std::uint64_t master_seed = 1;
  int threads = 1;

  void validate() const;
};

struct SupermartingaleCheckpoint {
  int direction = 0;
  int n = 0;
  double mean = 0.0;
  double std_error = 0.0;
  bool within_bound = false;  // mean <= 1 + 3 SE
};

/// Empirical means of M_n(x) = exp(<S_n, x> - 3 <x, <S>_n x> / 2) at the
/// checkpoints. Exponents above 700 are clipped and counted; any clip
/// fails the run (the clipped mean would be silently biased).
std::vector<SupermartingaleCheckpoint> supermartingale_check(const SupermartingaleConfig& config);

struct TruncationStep {
  int n = 0;
  int dimension = 0;      // D_n of the absorbed subspace
  double gain = 0.0;      // gamma(rho^{-1} V_n)
  double tail_norm = 0.0; // ||V_n^-||_op
};

/// Runs the head/tail truncation construction along a trace: maintains the
/// predictable subspace built from tail eigendirections that reach rho, and
/// asserts at every step that D_n <= 4 gamma(rho^{-1} V_n) + 1e-9 and
/// ||V_n^-||_op < rho + 1 + 1e-9. Violations throw CheckFailure; both
/// inequalities are guaranteed, so a throw means an implementation bug.
std::vector<TruncationStep> truncation_check(const MartingaleTrace& trace, double rho);

}  // namespace snkb::validation
