#include "corrlasso/theory_metrics.hpp"

#include <cmath>
#include <sstream>

#include "corrlasso/error.hpp"
#include "corrlasso/quadrature.hpp"
#include "corrlasso/scalar_kernels.hpp"

namespace corrlasso {

namespace {

void check_saddle(const SaddlePoint& s, const char* who) {
  if (!s.converged) {
    detail::invalid(std::string(who) + ": saddle point did not converge");
  }
  if (!(s.alpha_star > 0.0 && s.beta_star > 0.0 && s.chi_star > 0.0)) {
    detail::invalid(std::string(who) + ": saddle point coordinates must be positive");
  }
}

void check_xi(double xi, const char* who) {
  if (!(xi > 0.0) || !std::isfinite(xi)) {
    std::ostringstream msg;
    msg << who << ": threshold xi must be positive, got " << xi;
    detail::invalid(msg.str());
  }
}

void check_lambda(double lambda, const char* who) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    std::ostringstream msg;
    msg << who << ": lambda must be positive, got " << lambda;
    detail::invalid(msg.str());
  }
}

// Effective noise level and threshold of the scalar channel.
struct Channel {
  double c;
  double t;
};

Channel channel_of(const SaddlePoint& s, double lambda) {
  return {s.alpha_star * s.beta_star / s.chi_star, lambda * s.alpha_star / s.chi_star};
}

// P(|eta(x + cZ; t)| >= xi) (or > xi; equal for continuous Z).
double detection_probability(double x, Channel ch, double xi) {
  const double hi = (ch.t + xi - x) / ch.c;
  const double lo = (-ch.t - xi - x) / ch.c;
  const double cuts[] = {lo, hi};
  return gaussian_expectation(
      [&](double z) { return std::abs(soft_threshold(x + ch.c * z, ch.t)) >= xi ? 1.0 : 0.0; },
      cuts);
}

double strict_miss_probability(double x, Channel ch, double xi) {
  const double hi = (ch.t + xi - x) / ch.c;
  const double lo = (-ch.t - xi - x) / ch.c;
  const double cuts[] = {lo, hi};
  return gaussian_expectation(
      [&](double z) { return std::abs(soft_threshold(x + ch.c * z, ch.t)) < xi ? 1.0 : 0.0; },
      cuts);
}

double eta_moment(double x, Channel ch, int power) {
  const double cuts[] = {(ch.t - x) / ch.c, (-ch.t - x) / ch.c};
  return gaussian_expectation(
      [&](double z) {
        const double e = soft_threshold(x + ch.c * z, ch.t);
        return power == 1 ? e : e * e;
      },
      cuts);
}

}  // namespace

double predict_mse(const SaddlePoint& saddle) {
  check_saddle(saddle, "predict_mse");
  return saddle.alpha_star;
}

SupportPrediction support_closed_form(const SaddlePoint& s, double lambda, double xi) {
  check_xi(xi, "predict_support");
  check_lambda(lambda, "predict_support");
  const double ab = s.alpha_star * s.beta_star;
  const double base = lambda / s.beta_star;
  SupportPrediction out;
  out.phi_on = gauss_q(base + s.chi_star * (xi + 1.0) / ab) +
               gauss_q(base + s.chi_star * (xi - 1.0) / ab);
  out.phi_off = 1.0 - 2.0 * gauss_q(base + s.chi_star * xi / ab);
  return out;
}

SupportPrediction support_quadrature(const SaddlePoint& s, const SparsePrior& prior,
                                     double lambda, double xi) {
  check_xi(xi, "predict_support");
  check_lambda(lambda, "predict_support");
  const auto ch = channel_of(s, lambda);
  SupportPrediction out;
  for (const auto& atom : prior.conditional_law()) {
    out.phi_on += atom.weight * detection_probability(atom.value, ch, xi);
  }
  out.phi_off = 1.0 - detection_probability(0.0, ch, xi);
  return out;
}

SupportPrediction predict_support(const SaddlePoint& saddle, const SparsePrior& prior,
                                  double lambda, double xi) {
  check_saddle(saddle, "predict_support");
  if (prior.is_bernoulli()) return support_closed_form(saddle, lambda, xi);
  return support_quadrature(saddle, prior, lambda, xi);
}

double eer_closed_form(const SaddlePoint& s, double lambda, double xi) {
  check_xi(xi, "predict_eer");
  check_lambda(lambda, "predict_eer");
  const double ab = s.alpha_star * s.beta_star;
  const double base = lambda / s.beta_star;
  return gauss_q(s.chi_star * (1.0 - xi) / ab - base) -
         gauss_q(s.chi_star * (1.0 + xi) / ab + base) + 2.0 * gauss_q(s.chi_star * xi / ab + base);
}

double eer_quadrature(const SaddlePoint& s, const SparsePrior& prior, double lambda, double xi) {
  check_xi(xi, "predict_eer");
  check_lambda(lambda, "predict_eer");
  const auto ch = channel_of(s, lambda);
  double miss = 0.0;
  for (const auto& atom : prior.conditional_law()) {
    miss += atom.weight * strict_miss_probability(atom.value, ch, xi);
  }
  const double false_alarm = 1.0 - strict_miss_probability(0.0, ch, xi);
  return miss + false_alarm;
}

double predict_eer(const SaddlePoint& saddle, const SparsePrior& prior, double lambda, double xi) {
  const auto support = predict_support(saddle, prior, lambda, xi);
  const double eer = 2.0 - support.phi_on - support.phi_off;
  const double direct = prior.is_bernoulli() ? eer_closed_form(saddle, lambda, xi)
                                             : eer_quadrature(saddle, prior, lambda, xi);
  if (!(std::abs(eer - direct) <= kEerRouteTolerance)) {
    std::ostringstream msg;
    msg << "predict_eer: routes disagree (" << eer << " vs " << direct << ")";
    throw ConsistencyError(msg.str());
  }
  return eer;
}

CosineTerms cosine_closed_form(const SaddlePoint& s, double lambda, double kappa) {
  check_lambda(lambda, "predict_cosine");
  const double a = s.alpha_star;
  const double b = s.beta_star;
  const double x = s.chi_star;
  const double ab = a * b;
  const double minus = lambda / b - x / ab;  // lambda/b - chi/(a b)
  const double plus = lambda / b + x / ab;
  const double la = lambda * a;

  CosineTerms out;
  out.i0 = (kappa / x) * (ab * (gauss_pdf(minus) - gauss_pdf(plus)) +
                          (x - la) * gauss_q(minus) + (x + la) * gauss_q(plus));
  // phi(plus) * exp(2 lambda chi / (a b^2)) == phi(minus); written that way to
  // stay finite when the exponent is large.
  out.i1 = (kappa / (x * x)) *
           ((ab * ab + (la - x) * (la - x)) * gauss_q(minus) +
            (ab * ab + (la + x) * (la + x)) * gauss_q(plus) -
            ab * ((la - x) * gauss_pdf(minus) + (la + x) * gauss_pdf(plus)));
  const double s0 = lambda / b;
  out.i2 = (2.0 * (1.0 - kappa) * a * a / (x * x)) *
           ((lambda * lambda + b * b) * gauss_q(s0) - lambda * b * gauss_pdf(s0));
  const double den = std::sqrt(kappa * (out.i1 + out.i2));
  if (!(den > 0.0) || !std::isfinite(den)) {
    throw UndefinedMetric("predict_cosine: E[eta^2] underflows; the estimate is identically zero");
  }
  out.value = out.i0 / den;
  return out;
}

double cosine_quadrature(const SaddlePoint& s, const SparsePrior& prior, double lambda) {
  check_lambda(lambda, "predict_cosine");
  const auto ch = channel_of(s, lambda);
  double num = 0.0;
  double eta2 = 0.0;
  for (const auto& atom : prior.full_law()) {
    if (atom.value != 0.0) num += atom.weight * atom.value * eta_moment(atom.value, ch, 1);
    eta2 += atom.weight * eta_moment(atom.value, ch, 2);
  }
  const double den = std::sqrt(prior.second_moment() * eta2);
  if (!(den > 0.0) || !std::isfinite(den)) {
    throw UndefinedMetric("predict_cosine: E[eta^2] underflows; the estimate is identically zero");
  }
  return num / den;
}

double predict_cosine(const SaddlePoint& saddle, const SparsePrior& prior, double lambda) {
  check_saddle(saddle, "predict_cosine");
  const double quad = cosine_quadrature(saddle, prior, lambda);
  if (!prior.is_bernoulli()) return quad;
  const double closed = cosine_closed_form(saddle, lambda, prior.kappa()).value;
  if (!(std::abs(closed - quad) <= kCosineRouteTolerance)) {
    std::ostringstream msg;
    msg << "predict_cosine: closed form " << closed << " disagrees with quadrature " << quad;
    throw ConsistencyError(msg.str());
  }
  return closed;
}

TheoryReport predict_all(const SaddlePoint& saddle, const SparsePrior& prior, double lambda,
                         double xi) {
  TheoryReport report;
  report.saddle = saddle;
  report.xi = xi;
  report.mse = predict_mse(saddle);
  const auto support = predict_support(saddle, prior, lambda, xi);
  report.phi_on = support.phi_on;
  report.phi_off = support.phi_off;
  report.eer = predict_eer(saddle, prior, lambda, xi);
  report.cosine = predict_cosine(saddle, prior, lambda);
  return report;
}

}  // namespace corrlasso
