#pragma once

#include "corrlasso/cgmt_engine.hpp"
#include "corrlasso/signal_priors.hpp"

namespace corrlasso {

struct SupportPrediction {
  double phi_on = 0.0;
  double phi_off = 0.0;
};

struct TheoryReport {
  double mse = 0.0;
  double phi_on = 0.0;
  double phi_off = 0.0;
  double eer = 0.0;
  double cosine = 0.0;
  double xi = 0.0;
  SaddlePoint saddle;
};

/// Tolerances of the two-route cross-checks.
inline constexpr double kEerRouteTolerance = 1e-10;
inline constexpr double kCosineRouteTolerance = 1e-8;

/// Asymptotic MSE, i.e. alpha_star. Throws InvalidArgument on an
/// unconverged saddle.
double predict_mse(const SaddlePoint& saddle);

/// Limits of the on-support detection rate P(|eta| >= xi | on support) and
/// the off-support rejection rate P(|eta| <= xi | off support) of the scalar
/// channel eta(X0 + (a b / x) Z; lambda a / x). Closed form for
/// sparse-Bernoulli priors, quadrature otherwise.
SupportPrediction predict_support(const SaddlePoint& saddle, const SparsePrior& prior,
                                  double lambda, double xi);

/// Closed-form support probabilities for the sparse-Bernoulli prior.
SupportPrediction support_closed_form(const SaddlePoint& saddle, double lambda, double xi);

/// Quadrature route, valid for any prior (on-support law for phi_on).
SupportPrediction support_quadrature(const SaddlePoint& saddle, const SparsePrior& prior,
                                     double lambda, double xi);

/// 2 - phi_on - phi_off, cross-checked against a second route (the direct
/// three-Q expression for sparse-Bernoulli priors, strict-inequality
/// quadrature otherwise). Throws ConsistencyError if they differ by more than
/// kEerRouteTolerance.
double predict_eer(const SaddlePoint& saddle, const SparsePrior& prior, double lambda, double xi);

/// Direct closed form of the element error rate for sparse-Bernoulli priors.
double eer_closed_form(const SaddlePoint& saddle, double lambda, double xi);

/// Strict-inequality quadrature route of the element error rate.
double eer_quadrature(const SaddlePoint& saddle, const SparsePrior& prior, double lambda,
                      double xi);

struct CosineTerms {
  double i0 = 0.0;  ///< E[eta X0]
  double i1 = 0.0;  ///< kappa E[eta^2 | X0 = 1]
  double i2 = 0.0;  ///< (1 - kappa) E[eta^2 | X0 = 0]
  double value = 0.0;
};

/// Closed-form I0 / sqrt(kappa (I1 + I2)) for sparse-Bernoulli priors.
CosineTerms cosine_closed_form(const SaddlePoint& saddle, double lambda, double kappa);

/// E[eta X0] / sqrt(E[X0^2] E[eta^2]) by quadrature, any prior.
double cosine_quadrature(const SaddlePoint& saddle, const SparsePrior& prior, double lambda);

/// Limit of the cosine similarity. For sparse-Bernoulli priors evaluates the
/// closed form and cross-checks it against quadrature (ConsistencyError past
/// kCosineRouteTolerance). Throws UndefinedMetric when E[eta^2] vanishes.
double predict_cosine(const SaddlePoint& saddle, const SparsePrior& prior, double lambda);

/// All four predictions at one saddle.
TheoryReport predict_all(const SaddlePoint& saddle, const SparsePrior& prior, double lambda,
                         double xi);

}  // namespace corrlasso
