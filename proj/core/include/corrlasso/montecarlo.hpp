#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "corrlasso/config.hpp"
#include "corrlasso/correlation.hpp"
#include "corrlasso/lasso_solver.hpp"
#include "corrlasso/signal_priors.hpp"
#include "corrlasso/theory_metrics.hpp"

namespace corrlasso {

struct EmpiricalMetrics {
  double mse = 0.0;
  double phi_on = 0.0;
  double phi_off = 0.0;
  double eer = 0.0;
  /// Absent when the estimate is identically zero.
  std::optional<double> cosine;
  /// Some |x_hat_i| equals xi exactly, so the EER identity may not hold.
  bool xi_tie = false;
};

/// Literal per-trial metrics. The EER is counted with strict inequalities and
/// cross-checked against 2 - phi_on - phi_off (ConsistencyError on mismatch
/// without a tie).
EmpiricalMetrics empirical_metrics(const Eigen::VectorXd& x_hat, const SignalVector& x0, double xi);

struct TrialOutcome {
  double mse = 0.0;
  double phi_on = 0.0;
  double phi_off = 0.0;
  double eer = 0.0;
  std::optional<double> cosine;
  bool solver_converged = false;
  bool xi_tie = false;
  int iterations = 0;
  std::uint64_t seed = 0;
};

/// One random draw of (A, x0, z). Everything is generated from a single
/// mt19937_64 seeded with `seed`: H column by column, then x0, then z.
struct TrialInstance {
  Eigen::MatrixXd design;
  SignalVector signal;
  Eigen::VectorXd observations;
  std::uint64_t seed = 0;
};

TrialInstance draw_instance(const CorrelationSpectrum& spectrum, const SparsePrior& prior,
                            std::size_t n, double sigma2, std::uint64_t seed);

/// Solves one prepared instance at lambda and scores the estimate.
TrialOutcome score_trial(const PreparedLasso& lasso, const TrialInstance& instance, double lambda,
                         double xi, const LassoOptions& opts = {});

/// Single trial at the config's (first) lambda. Deterministic given seed.
TrialOutcome run_trial(const ProblemConfig& config, const CorrelationSpectrum& spectrum,
                       std::uint64_t seed);
TrialOutcome run_trial(const ProblemConfig& config, std::uint64_t seed);

struct MetricSummary {
  double mean = 0.0;
  double stddev = 0.0;
  /// stddev / sqrt(count).
  double std_error = 0.0;
  std::size_t count = 0;
};

/// Sample mean, unbiased standard deviation and standard error, summed in
/// the given order.
MetricSummary summarize(const std::vector<double>& values);

struct EmpiricalReport {
  MetricSummary mse;
  MetricSummary phi_on;
  MetricSummary phi_off;
  MetricSummary eer;
  /// Over trials with a nonzero estimate only.
  MetricSummary cosine;
  std::size_t trial_count = 0;
  std::size_t nonconverged_count = 0;
  std::size_t tie_count = 0;
  std::size_t cosine_undefined_count = 0;
};

EmpiricalReport aggregate(const std::vector<TrialOutcome>& outcomes);

struct SweepPoint {
  double lambda = 0.0;
  std::optional<TheoryReport> theory;
  std::optional<EmpiricalReport> empirical;
  /// "ok", or a description of what failed at this point.
  std::string status = "ok";
};

/// For every lambda of the config: one saddle solve (unless mode is
/// empirical) and config.trials trials with seeds base_seed + i (unless mode
/// is theory). Each trial instance is drawn once and solved from a cold start
/// at every lambda, so results match run_trial exactly. Failures are recorded
/// per point and the sweep continues. Output does not depend on the thread
/// count.
std::vector<SweepPoint> run_sweep(const ProblemConfig& config);

/// Theory half of one sweep point.
TheoryReport theory_point(const ProblemConfig& config, const CorrelationSpectrum& spectrum,
                          double lambda);

}  // namespace corrlasso
