#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <limits>

#include "corrlasso/error.hpp"
#include "corrlasso/signal_priors.hpp"

namespace corrlasso {

/// Scalar data of the asymptotic problem: the spectrum of Sigma, the signal
/// dimension n (so delta = m / n), the noise variance and the regularizer.
struct ScalarProblem {
  Eigen::VectorXd eigenvalues;
  std::size_t n = 1;
  double sigma2 = 0.0;
  double lambda = 0.0;
  SparsePrior prior = SparsePrior::bernoulli(0.1);

  void validate() const;
  [[nodiscard]] double delta() const {
    return static_cast<double>(eigenvalues.size()) / static_cast<double>(n);
  }
};

struct SolverOptions {
  /// Target max-norm of the analytic gradient after the Newton polish.
  double stationarity_tol = 1e-9;
  /// Width, in log coordinates, at which each golden-section search stops.
  double golden_tol = 1e-9;
  int max_golden_iterations = 200;
  int max_bracket_doublings = 60;
  int max_newton_iterations = 50;
  /// |residual| target of the mu fixed point.
  double mu_tol = 1e-12;
  int max_mu_iterations = 2000;
  /// Starting point; a NaN alpha0 means "use kappa".
  double alpha0 = std::numeric_limits<double>::quiet_NaN();
  double beta0 = 1.0;
  double chi0 = 1.0;
};

struct SaddlePoint {
  double alpha_star = 0.0;
  double beta_star = 0.0;
  double chi_star = 0.0;
  double mu_star = 0.0;
  double objective_value = 0.0;
  bool converged = false;
  int iterations = 0;
  /// Max-norm of the analytic gradient of D at the reported point.
  double gradient_norm = std::numeric_limits<double>::infinity();
};

/// Local min-max signature at a stationary point: curvature of D along chi,
/// of the chi-maximized function along beta, and of the (beta, chi)-maximized
/// function along alpha.
struct CurvatureSignature {
  double chi = 0.0;
  double beta_reduced = 0.0;
  double alpha_reduced = 0.0;
  /// Raw second derivatives of D along each coordinate.
  Eigen::Vector3d diagonal = Eigen::Vector3d::Zero();

  [[nodiscard]] bool is_min_max() const {
    return chi < 0.0 && beta_reduced < 0.0 && alpha_reduced > 0.0;
  }
};

/// Raised by solve_saddle when it cannot certify a saddle; carries the best
/// iterate reached.
class SaddleError : public ConvergenceError {
 public:
  SaddleError(const std::string& what, SaddlePoint best)
      : ConvergenceError(what), best_(best) {}
  [[nodiscard]] const SaddlePoint& best() const { return best_; }

 private:
  SaddlePoint best_;
};

/// Evaluates and optimizes
///   D(a, b, x) = (1/n) sum_j (g_j a + s2) / (1 - g_j mu(a, b))
///                - (b^2 mu / 4 + x / 2 + a b^2 / (2 x))
///                + (x / a) E[e(X0 + (a b / x) Z; lambda a / x)]
/// where mu(a, b) solves (1/n) sum_j (a + s2/g_j) / (1/g_j - mu)^2 = b^2 / 4
/// on mu < 1 / g_max. Immutable after construction; all methods are const
/// and reentrant.
class CgmtEngine {
 public:
  explicit CgmtEngine(ScalarProblem problem);

  [[nodiscard]] const ScalarProblem& problem() const { return problem_; }

  /// Left side of the mu fixed point minus b^2/4, written with the
  /// denominators cleared so zero eigenvalues contribute nothing.
  [[nodiscard]] double mu_residual(double mu, double alpha, double beta) const;

  /// Unique root on (-inf, 1/g_max). Throws ConvergenceError unless
  /// |residual| <= tol * max(1, beta^2 / 4).
  [[nodiscard]] double solve_mu(double alpha, double beta, double tol = 1e-12,
                                int max_iterations = 2000) const;

  [[nodiscard]] double objective(double alpha, double beta, double chi) const;
  /// D with mu supplied by the caller (must be mu(alpha, beta)).
  [[nodiscard]] double objective(double alpha, double beta, double chi, double mu) const;

  /// Analytic gradient of D (mu resolved internally).
  [[nodiscard]] Eigen::Vector3d gradient(double alpha, double beta, double chi) const;

  /// Central finite-difference gradient with steps rel_step * |coordinate|.
  [[nodiscard]] Eigen::Vector3d fd_gradient(double alpha, double beta, double chi,
                                            double rel_step = 1e-6) const;

  /// Central finite differences of the analytic gradient, symmetrized.
  [[nodiscard]] Eigen::Matrix3d hessian(double alpha, double beta, double chi,
                                        double rel_step = 1e-5) const;

  [[nodiscard]] CurvatureSignature curvature(const SaddlePoint& point) const;

  /// min over alpha, max over beta, sup over chi of D. Nested golden-section
  /// searches in log coordinates locate the saddle, then a damped Newton
  /// iteration on the gradient polishes it. Throws SaddleError when the
  /// polish does not reach opts.stationarity_tol, when the point leaves the
  /// positive orthant, or when the local min-max signature fails.
  [[nodiscard]] SaddlePoint solve_saddle(const SolverOptions& opts = {}) const;

 private:
  struct TraceTerms {
    double value;      // (1/n) sum (g a + s2) / (1 - g mu)
    double slope;      // (1/n) sum g / (1 - g mu)
  };
  [[nodiscard]] TraceTerms trace_terms(double alpha, double mu) const;
  [[nodiscard]] double residual_slope(double mu, double alpha) const;

  ScalarProblem problem_;
  double gamma_max_;
  double inv_n_;
};

double solve_mu(const ScalarProblem& problem, double alpha, double beta);
double objective_D(const ScalarProblem& problem, double alpha, double beta, double chi);
SaddlePoint solve_saddle(const ScalarProblem& problem, const SolverOptions& opts = {});

}  // namespace corrlasso
