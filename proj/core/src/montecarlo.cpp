#include "corrlasso/montecarlo.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <exception>
#include <random>
#include <sstream>
#include <thread>

#include "corrlasso/cgmt_engine.hpp"
#include "corrlasso/error.hpp"

namespace corrlasso {

EmpiricalMetrics empirical_metrics(const Eigen::VectorXd& x_hat, const SignalVector& x0,
                                   double xi) {
  const Eigen::Index n = x0.entries.size();
  if (x_hat.size() != n) detail::invalid("empirical_metrics: estimate and signal lengths differ");
  if (!(xi > 0.0)) detail::invalid("empirical_metrics: xi must be positive");
  const auto k = static_cast<Eigen::Index>(x0.support.size());
  if (k == 0) detail::invalid("empirical_metrics: signal support is empty");
  if (k >= n) detail::invalid("empirical_metrics: signal support covers every entry");

  std::vector<char> on(static_cast<std::size_t>(n), 0);
  for (auto i : x0.support) on[static_cast<std::size_t>(i)] = 1;

  EmpiricalMetrics out;
  out.mse = (x_hat - x0.entries).squaredNorm() / static_cast<double>(n);

  Eigen::Index detected = 0, rejected = 0, missed = 0, false_alarms = 0;
  for (Eigen::Index i = 0; i < n; ++i) {
    const double a = std::abs(x_hat(i));
    if (a == xi) out.xi_tie = true;
    if (on[static_cast<std::size_t>(i)]) {
      if (a >= xi) ++detected;
      if (a < xi) ++missed;
    } else {
      if (a <= xi) ++rejected;
      if (a > xi) ++false_alarms;
    }
  }
  const double kd = static_cast<double>(k);
  const double offd = static_cast<double>(n - k);
  out.phi_on = static_cast<double>(detected) / kd;
  out.phi_off = static_cast<double>(rejected) / offd;
  out.eer = static_cast<double>(missed) / kd + static_cast<double>(false_alarms) / offd;
  if (!out.xi_tie && std::abs(out.eer - (2.0 - out.phi_on - out.phi_off)) > 1e-12) {
    throw ConsistencyError("empirical_metrics: EER differs from 2 - phi_on - phi_off");
  }

  const double nx = x_hat.norm();
  const double n0 = x0.entries.norm();
  if (nx > 0.0 && n0 > 0.0) out.cosine = x_hat.dot(x0.entries) / (nx * n0);
  return out;
}

TrialInstance draw_instance(const CorrelationSpectrum& spectrum, const SparsePrior& prior,
                            std::size_t n, double sigma2, std::uint64_t seed) {
  if (n < 2) detail::invalid("draw_instance: n must be at least 2");
  if (!(sigma2 >= 0.0)) detail::invalid("draw_instance: sigma2 must be nonnegative");
  const auto m = static_cast<Eigen::Index>(spectrum.m());
  const auto cols = static_cast<Eigen::Index>(n);

  std::mt19937_64 rng(seed);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double h_scale = 1.0 / std::sqrt(static_cast<double>(n));
  Eigen::MatrixXd h(m, cols);
  for (Eigen::Index j = 0; j < cols; ++j) {
    for (Eigen::Index i = 0; i < m; ++i) h(i, j) = h_scale * normal(rng);
  }

  TrialInstance inst;
  inst.seed = seed;
  inst.design.noalias() = spectrum.sqrt_factor * h;
  inst.signal = sample_signal(prior, n, rng);
  const double sigma = std::sqrt(sigma2);
  Eigen::VectorXd z(m);
  for (Eigen::Index i = 0; i < m; ++i) z(i) = sigma * normal(rng);
  inst.observations.noalias() = inst.design * inst.signal.entries;
  inst.observations += z;
  return inst;
}

TrialOutcome score_trial(const PreparedLasso& lasso, const TrialInstance& instance, double lambda,
                         double xi, const LassoOptions& opts) {
  const auto sol = lasso.solve(lambda, opts);
  const auto metrics = empirical_metrics(sol.estimate, instance.signal, xi);
  TrialOutcome out;
  out.mse = metrics.mse;
  out.phi_on = metrics.phi_on;
  out.phi_off = metrics.phi_off;
  out.eer = metrics.eer;
  out.cosine = metrics.cosine;
  out.xi_tie = metrics.xi_tie;
  out.solver_converged = sol.converged;
  out.iterations = sol.iterations;
  out.seed = instance.seed;
  return out;
}

TrialOutcome run_trial(const ProblemConfig& config, const CorrelationSpectrum& spectrum,
                       std::uint64_t seed) {
  config.validate();
  const auto inst =
      draw_instance(spectrum, config.signal_prior(), config.n, config.noise_variance(), seed);
  const PreparedLasso lasso(inst.design, inst.observations);
  return score_trial(lasso, inst, config.lambdas().front(), config.xi);
}

TrialOutcome run_trial(const ProblemConfig& config, std::uint64_t seed) {
  config.validate();
  return run_trial(config, spectral_decompose(config.correlation_model()), seed);
}

MetricSummary summarize(const std::vector<double>& values) {
  MetricSummary s;
  s.count = values.size();
  if (values.empty()) {
    s.mean = s.stddev = s.std_error = std::nan("");
    return s;
  }
  double sum = 0.0;
  for (double v : values) sum += v;
  s.mean = sum / static_cast<double>(s.count);
  if (s.count > 1) {
    double ss = 0.0;
    for (double v : values) ss += (v - s.mean) * (v - s.mean);
    s.stddev = std::sqrt(ss / static_cast<double>(s.count - 1));
    s.std_error = s.stddev / std::sqrt(static_cast<double>(s.count));
  }
  return s;
}

EmpiricalReport aggregate(const std::vector<TrialOutcome>& outcomes) {
  if (outcomes.empty()) detail::invalid("aggregate: no trial outcomes");
  std::vector<double> mse, on, off, eer, cosine;
  EmpiricalReport r;
  for (const auto& o : outcomes) {
    mse.push_back(o.mse);
    on.push_back(o.phi_on);
    off.push_back(o.phi_off);
    eer.push_back(o.eer);
    if (o.cosine) {
      cosine.push_back(*o.cosine);
    } else {
      ++r.cosine_undefined_count;
    }
    if (!o.solver_converged) ++r.nonconverged_count;
    if (o.xi_tie) ++r.tie_count;
  }
  r.mse = summarize(mse);
  r.phi_on = summarize(on);
  r.phi_off = summarize(off);
  r.eer = summarize(eer);
  r.cosine = summarize(cosine);
  r.trial_count = outcomes.size();
  return r;
}

TheoryReport theory_point(const ProblemConfig& config, const CorrelationSpectrum& spectrum,
                          double lambda) {
  ScalarProblem problem;
  problem.eigenvalues = spectrum.eigenvalues;
  problem.n = config.n;
  problem.sigma2 = config.noise_variance();
  problem.lambda = lambda;
  problem.prior = config.signal_prior();
  const CgmtEngine engine(problem);
  const auto saddle = engine.solve_saddle();
  return predict_all(saddle, problem.prior, lambda, config.xi);
}

namespace {

struct Cell {
  std::optional<TrialOutcome> outcome;
  std::string error;
};

}  // namespace

std::vector<SweepPoint> run_sweep(const ProblemConfig& config) {
  config.validate();
  const auto lambdas = config.lambdas();
  const auto spectrum = spectral_decompose(config.correlation_model());
  const auto prior = config.signal_prior();
  const double sigma2 = config.noise_variance();

  std::vector<SweepPoint> points(lambdas.size());
  for (std::size_t p = 0; p < lambdas.size(); ++p) points[p].lambda = lambdas[p];

  if (config.mode != RunMode::empirical) {
    for (auto& pt : points) {
      try {
        pt.theory = theory_point(config, spectrum, pt.lambda);
      } catch (const std::exception& e) {
        pt.status = std::string("theory failed: ") + e.what();
      }
    }
  }
  if (config.mode == RunMode::theory) return points;

  const auto trials = static_cast<std::size_t>(config.trials);
  const std::size_t width = lambdas.size();
  std::vector<Cell> cells(trials * width);

  std::atomic<std::size_t> next{0};
  auto worker = [&]() {
    for (std::size_t t = next++; t < trials; t = next++) {
      const std::uint64_t seed = config.base_seed + t;
      try {
        const auto inst = draw_instance(spectrum, prior, config.n, sigma2, seed);
        const PreparedLasso lasso(inst.design, inst.observations);
        for (std::size_t p = 0; p < width; ++p) {
          try {
            cells[t * width + p].outcome = score_trial(lasso, inst, lambdas[p], config.xi);
          } catch (const std::exception& e) {
            cells[t * width + p].error = e.what();
          }
        }
      } catch (const std::exception& e) {
        for (std::size_t p = 0; p < width; ++p) cells[t * width + p].error = e.what();
      }
    }
  };

  std::size_t threads = config.threads > 0 ? static_cast<std::size_t>(config.threads)
                                           : std::max(1u, std::thread::hardware_concurrency());
  threads = std::min(threads, trials);
  if (threads <= 1) {
    worker();
  } else {
    std::vector<std::thread> pool;
    for (std::size_t i = 0; i < threads; ++i) pool.emplace_back(worker);
    for (auto& th : pool) th.join();
  }

  for (std::size_t p = 0; p < width; ++p) {
    std::vector<TrialOutcome> outcomes;
    std::size_t failed = 0;
    std::string first_error;
    for (std::size_t t = 0; t < trials; ++t) {
      const auto& cell = cells[t * width + p];
      if (cell.outcome) {
        outcomes.push_back(*cell.outcome);
      } else {
        if (failed++ == 0) first_error = cell.error;
      }
    }
    if (!outcomes.empty()) points[p].empirical = aggregate(outcomes);
    if (failed > 0) {
      std::ostringstream msg;
      msg << failed << " trials failed: " << first_error;
      points[p].status =
          points[p].status == "ok" ? msg.str() : points[p].status + "; " + msg.str();
    }
  }
  return points;
}

}  // namespace corrlasso
