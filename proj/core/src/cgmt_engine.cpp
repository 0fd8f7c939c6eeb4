#include "corrlasso/cgmt_engine.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <sstream>

namespace corrlasso {

namespace {

constexpr double kNegInf = -std::numeric_limits<double>::infinity();

struct LineOptimum {
  double u = 0.0;
  double value = kNegInf;
  int evaluations = 0;
};

double finite_or_neg_inf(double v) { return std::isnan(v) ? kNegInf : v; }

// Maximizes g over the real line starting from u0. The bracket walks in
// steps of log 2 (factor-of-two moves of the underlying positive variable)
// until the value drops, then golden-section search shrinks it.
template <class G>
LineOptimum golden_maximize(G&& g, double u0, const SolverOptions& opts, const char* what) {
  const double step = std::numbers::ln2;
  LineOptimum best;
  auto eval = [&](double u) {
    const double v = finite_or_neg_inf(g(u));
    ++best.evaluations;
    if (v > best.value) {
      best.value = v;
      best.u = u;
    }
    return v;
  };

  double b = u0;
  double fb = eval(b);
  double up = b + step;
  double fup = eval(up);
  double dn = b - step;
  double fdn = eval(dn);

  double a, c;
  if (fb >= fup && fb >= fdn) {
    a = dn;
    c = up;
  } else {
    const double dir = fup >= fdn ? 1.0 : -1.0;
    a = b;
    b = dir > 0 ? up : dn;
    fb = dir > 0 ? fup : fdn;
    int doublings = 1;
    while (true) {
      c = b + dir * step;
      const double fc = eval(c);
      if (fc <= fb) break;
      a = b;
      b = c;
      fb = fc;
      if (++doublings > opts.max_bracket_doublings) {
        std::ostringstream msg;
        msg << "solve_saddle: no interior optimum along " << what << " within "
            << opts.max_bracket_doublings << " doublings of the start";
        throw ConvergenceError(msg.str());
      }
    }
    if (a > c) std::swap(a, c);
  }

  constexpr double kInvPhi = 0.6180339887498949;
  double x1 = c - kInvPhi * (c - a);
  double x2 = a + kInvPhi * (c - a);
  double f1 = eval(x1);
  double f2 = eval(x2);
  for (int it = 0; it < opts.max_golden_iterations && (c - a) > opts.golden_tol; ++it) {
    if (f1 >= f2) {
      c = x2;
      x2 = x1;
      f2 = f1;
      x1 = c - kInvPhi * (c - a);
      f1 = eval(x1);
    } else {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + kInvPhi * (c - a);
      f2 = eval(x2);
    }
  }
  return best;
}

double max_abs(const Eigen::Vector3d& v) { return v.cwiseAbs().maxCoeff(); }

}  // namespace

void ScalarProblem::validate() const {
  detail::require(eigenvalues.size() >= 1, "scalar problem: spectrum is empty");
  detail::require(eigenvalues.allFinite(), "scalar problem: spectrum has non-finite values");
  detail::require(eigenvalues.minCoeff() >= 0.0, "scalar problem: eigenvalues must be >= 0");
  detail::require(eigenvalues.maxCoeff() > 0.0, "scalar problem: all eigenvalues are zero");
  detail::require(n >= 1, "scalar problem: n must be at least 1");
  detail::require(sigma2 > 0.0 && std::isfinite(sigma2),
                  "scalar problem: noise variance sigma2 must be positive");
  detail::require(lambda > 0.0 && std::isfinite(lambda),
                  "scalar problem: regularizer lambda must be positive");
}

CgmtEngine::CgmtEngine(ScalarProblem problem) : problem_(std::move(problem)) {
  problem_.validate();
  gamma_max_ = problem_.eigenvalues.maxCoeff();
  inv_n_ = 1.0 / static_cast<double>(problem_.n);
}

double CgmtEngine::mu_residual(double mu, double alpha, double beta) const {
  const double s2 = problem_.sigma2;
  double sum = 0.0;
  for (double g : problem_.eigenvalues) {
    if (g == 0.0) continue;
    const double d = 1.0 - g * mu;
    sum += g * (g * alpha + s2) / (d * d);
  }
  return sum * inv_n_ - 0.25 * beta * beta;
}

double CgmtEngine::residual_slope(double mu, double alpha) const {
  const double s2 = problem_.sigma2;
  double sum = 0.0;
  for (double g : problem_.eigenvalues) {
    if (g == 0.0) continue;
    const double d = 1.0 - g * mu;
    sum += 2.0 * g * g * (g * alpha + s2) / (d * d * d);
  }
  return sum * inv_n_;
}

double CgmtEngine::solve_mu(double alpha, double beta, double tol, int max_iterations) const {
  if (!(alpha > 0.0) || !(beta > 0.0) || !std::isfinite(alpha) || !std::isfinite(beta)) {
    std::ostringstream msg;
    msg << "solve_mu: alpha and beta must be positive, got alpha=" << alpha << " beta=" << beta;
    detail::invalid(msg.str());
  }
  // Parametrize by the distance d = pole - mu > 0; the residual decreases in d.
  const double pole = 1.0 / gamma_max_;
  auto residual_at = [&](double d) { return mu_residual(pole - d, alpha, beta); };

  int budget = max_iterations;
  double d_neg = pole;  // residual < 0 here
  while (residual_at(d_neg) >= 0.0) {
    d_neg *= 2.0;
    if (--budget <= 0 || !std::isfinite(d_neg)) {
      throw ConvergenceError("solve_mu: could not bracket the root from below");
    }
  }
  double d_pos = d_neg;  // residual > 0 here
  do {
    d_pos *= 0.5;
    if (--budget <= 0 || pole - d_pos == pole) {
      throw ConvergenceError("solve_mu: root is not resolvable below the pole 1/gamma_max");
    }
  } while (residual_at(d_pos) <= 0.0);

  // Bisection on log-distance until the bracket ratio is small.
  while (d_neg / d_pos > 1.05 && budget-- > 0) {
    const double mid = std::sqrt(d_neg * d_pos);
    if (residual_at(mid) > 0.0) {
      d_pos = mid;
    } else {
      d_neg = mid;
    }
  }

  // The residual is increasing and convex in mu, so Newton started where it
  // is positive descends monotonically onto the root.
  double mu = pole - d_pos;
  double r = mu_residual(mu, alpha, beta);
  double best_mu = mu;
  double best_r = std::abs(r);
  while (budget-- > 0) {
    const double slope = residual_slope(mu, alpha);
    if (!(slope > 0.0)) break;
    const double next = mu - r / slope;
    if (!(next < pole) || next == mu) break;
    const double r_next = mu_residual(next, alpha, beta);
    if (std::abs(r_next) < best_r) {
      best_r = std::abs(r_next);
      best_mu = next;
    }
    if (std::abs(next - mu) <= 4.0 * std::numeric_limits<double>::epsilon() * std::abs(mu) ||
        r_next <= 0.0) {
      break;
    }
    mu = next;
    r = r_next;
  }
  // Relative to beta^2 / 4: the two sides cancel and lose digits as beta grows.
  const double scale = std::max(1.0, 0.25 * beta * beta);
  if (!(best_r <= tol * scale)) {
    std::ostringstream msg;
    msg << "solve_mu: residual " << best_r << " above tolerance " << tol * scale << " (alpha=" << alpha
        << ", beta=" << beta << ")";
    throw ConvergenceError(msg.str());
  }
  return best_mu;
}

CgmtEngine::TraceTerms CgmtEngine::trace_terms(double alpha, double mu) const {
  const double s2 = problem_.sigma2;
  TraceTerms out{0.0, 0.0};
  for (double g : problem_.eigenvalues) {
    const double d = 1.0 - g * mu;
    out.value += (g * alpha + s2) / d;
    out.slope += g / d;
  }
  out.value *= inv_n_;
  out.slope *= inv_n_;
  return out;
}

double CgmtEngine::objective(double alpha, double beta, double chi, double mu) const {
  detail::require(alpha > 0.0 && beta > 0.0 && chi > 0.0,
                  "objective: alpha, beta and chi must be positive");
  const double trace = trace_terms(alpha, mu).value;
  const double c = alpha * beta / chi;
  const double t = problem_.lambda * alpha / chi;
  return trace - (0.25 * beta * beta * mu + 0.5 * chi + 0.5 * alpha * beta * beta / chi) +
         (chi / alpha) * expectation_e(problem_.prior, c, t);
}

double CgmtEngine::objective(double alpha, double beta, double chi) const {
  return objective(alpha, beta, chi, solve_mu(alpha, beta));
}

Eigen::Vector3d CgmtEngine::gradient(double alpha, double beta, double chi) const {
  detail::require(alpha > 0.0 && beta > 0.0 && chi > 0.0,
                  "gradient: alpha, beta and chi must be positive");
  const double mu = solve_mu(alpha, beta);
  const auto trace = trace_terms(alpha, mu);
  // D = T(a, b) - a r / 2 + Psi(b, r) with r = chi / a; mu is stationary for T.
  const double r = chi / alpha;
  const auto channel = channel_moments(problem_.prior, beta / r, problem_.lambda / r);
  const double psi_r = 0.5 * channel.mse;
  const double psi_b = -(beta / r) * channel.active_probability;
  const double d_r = -0.5 * alpha + psi_r;

  Eigen::Vector3d grad;
  grad(0) = trace.slope - 0.5 * r - d_r * chi / (alpha * alpha);
  grad(1) = -0.5 * beta * mu + psi_b;
  grad(2) = d_r / alpha;
  return grad;
}

Eigen::Vector3d CgmtEngine::fd_gradient(double alpha, double beta, double chi,
                                        double rel_step) const {
  const Eigen::Vector3d x(alpha, beta, chi);
  Eigen::Vector3d grad;
  for (int i = 0; i < 3; ++i) {
    const double h = rel_step * std::abs(x(i));
    Eigen::Vector3d xp = x;
    Eigen::Vector3d xm = x;
    xp(i) += h;
    xm(i) -= h;
    grad(i) = (objective(xp(0), xp(1), xp(2)) - objective(xm(0), xm(1), xm(2))) / (xp(i) - xm(i));
  }
  return grad;
}

Eigen::Matrix3d CgmtEngine::hessian(double alpha, double beta, double chi, double rel_step) const {
  const Eigen::Vector3d x(alpha, beta, chi);
  Eigen::Matrix3d h;
  for (int i = 0; i < 3; ++i) {
    const double step = rel_step * std::abs(x(i));
    Eigen::Vector3d xp = x;
    Eigen::Vector3d xm = x;
    xp(i) += step;
    xm(i) -= step;
    h.col(i) = (gradient(xp(0), xp(1), xp(2)) - gradient(xm(0), xm(1), xm(2))) / (xp(i) - xm(i));
  }
  return 0.5 * (h + h.transpose());
}

CurvatureSignature CgmtEngine::curvature(const SaddlePoint& point) const {
  const Eigen::Matrix3d h = hessian(point.alpha_star, point.beta_star, point.chi_star);
  CurvatureSignature sig;
  sig.diagonal = h.diagonal();
  sig.chi = h(2, 2);
  sig.beta_reduced = h(1, 1) - h(1, 2) * h(1, 2) / h(2, 2);
  const Eigen::Matrix2d inner = h.block<2, 2>(1, 1);
  const Eigen::Vector2d cross = h.block<2, 1>(1, 0);
  sig.alpha_reduced = h(0, 0) - cross.dot(inner.ldlt().solve(cross));
  return sig;
}

SaddlePoint CgmtEngine::solve_saddle(const SolverOptions& opts) const {
  const double lambda = problem_.lambda;
  const auto& prior = problem_.prior;

  const double alpha0 = std::isnan(opts.alpha0) ? prior.kappa() : opts.alpha0;
  detail::require(alpha0 > 0.0 && opts.beta0 > 0.0 && opts.chi0 > 0.0,
                  "solve_saddle: initial point must be positive");

  // Warm starts carried between nested searches.
  double warm_log_beta = std::log(opts.beta0);
  double warm_log_chi = std::log(opts.chi0);

  // sup over chi for fixed (alpha, beta); returns value and argmax.
  auto sup_chi = [&](double alpha, double beta) {
    const double mu = solve_mu(alpha, beta, opts.mu_tol, opts.max_mu_iterations);
    const double trace = trace_terms(alpha, mu).value;
    const double fixed = trace - 0.25 * beta * beta * mu;
    auto d_of = [&](double log_chi) {
      const double chi = std::exp(log_chi);
      const double c = alpha * beta / chi;
      const double t = lambda * alpha / chi;
      if (!(c > 0.0) || !(t > 0.0) || !std::isfinite(c) || !std::isfinite(t)) return kNegInf;
      return fixed - 0.5 * chi - 0.5 * alpha * beta * beta / chi +
             (chi / alpha) * expectation_e(prior, c, t);
    };
    const auto opt = golden_maximize(d_of, warm_log_chi, opts, "chi");
    warm_log_chi = opt.u;
    return opt;
  };
  auto max_beta = [&](double alpha) {
    auto f_of = [&](double log_beta) { return sup_chi(alpha, std::exp(log_beta)).value; };
    const auto opt = golden_maximize(f_of, warm_log_beta, opts, "beta");
    warm_log_beta = opt.u;
    return opt;
  };

  int outer_evaluations = 0;
  const auto alpha_opt = golden_maximize(
      [&](double log_alpha) {
        ++outer_evaluations;
        return -max_beta(std::exp(log_alpha)).value;
      },
      std::log(alpha0), opts, "alpha");

  Eigen::Vector3d x;
  x(0) = std::exp(alpha_opt.u);
  x(1) = std::exp(max_beta(x(0)).u);
  x(2) = std::exp(sup_chi(x(0), x(1)).u);

  // Damped Newton on grad D = 0.
  Eigen::Vector3d g = gradient(x(0), x(1), x(2));
  int newton_iterations = 0;
  for (; newton_iterations < opts.max_newton_iterations; ++newton_iterations) {
    if (max_abs(g) <= opts.stationarity_tol) break;
    const Eigen::Matrix3d h = hessian(x(0), x(1), x(2));
    const Eigen::Vector3d step = h.fullPivLu().solve(-g);
    if (!step.allFinite()) break;
    bool accepted = false;
    double scale = 1.0;
    for (int halving = 0; halving < 40; ++halving, scale *= 0.5) {
      const Eigen::Vector3d trial = x + scale * step;
      if ((trial.array() <= 0.0).any()) continue;
      Eigen::Vector3d g_trial;
      try {
        g_trial = gradient(trial(0), trial(1), trial(2));
      } catch (const ConvergenceError&) {
        continue;
      }
      if (g_trial.allFinite() && max_abs(g_trial) < max_abs(g)) {
        x = trial;
        g = g_trial;
        accepted = true;
        break;
      }
    }
    if (!accepted) break;
  }

  SaddlePoint point;
  point.alpha_star = x(0);
  point.beta_star = x(1);
  point.chi_star = x(2);
  point.mu_star = solve_mu(x(0), x(1), opts.mu_tol, opts.max_mu_iterations);
  point.objective_value = objective(x(0), x(1), x(2), point.mu_star);
  point.gradient_norm = max_abs(g);
  point.iterations = outer_evaluations + newton_iterations;
  point.converged = point.gradient_norm <= opts.stationarity_tol;

  if ((x.array() <= 0.0).any() || !x.allFinite()) {
    throw SaddleError("solve_saddle: located point is not in the positive orthant", point);
  }
  if (!point.converged) {
    std::ostringstream msg;
    msg << "solve_saddle: gradient norm " << point.gradient_norm << " above tolerance "
        << opts.stationarity_tol << " after " << newton_iterations << " Newton steps";
    throw SaddleError(msg.str(), point);
  }
  const auto sig = curvature(point);
  if (!sig.is_min_max()) {
    std::ostringstream msg;
    msg << "solve_saddle: stationary point lacks the min-max curvature signature (chi "
        << sig.chi << ", beta " << sig.beta_reduced << ", alpha " << sig.alpha_reduced << ")";
    point.converged = false;
    throw SaddleError(msg.str(), point);
  }
  return point;
}

double solve_mu(const ScalarProblem& problem, double alpha, double beta) {
  return CgmtEngine(problem).solve_mu(alpha, beta);
}

double objective_D(const ScalarProblem& problem, double alpha, double beta, double chi) {
  return CgmtEngine(problem).objective(alpha, beta, chi);
}

SaddlePoint solve_saddle(const ScalarProblem& problem, const SolverOptions& opts) {
  return CgmtEngine(problem).solve_saddle(opts);
}

}  // namespace corrlasso
