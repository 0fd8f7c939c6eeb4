#pragma once

#include <cstddef>
#include <vector>

namespace corrlasso {

/// Which piece of a three-piece scalar map produced a value.
enum class Branch { upper, middle, lower };

struct PiecewiseEval {
  double value;
  Branch branch;
};

/// Huber-like cost kernel
///   e(a; b) = b a - b^2/2   (a > b)
///           = a^2 / 2       (|a| <= b)
///           = -b a - b^2/2  (a < -b)
/// Throws InvalidArgument unless b > 0.
PiecewiseEval cost_e_eval(double a, double b);
double cost_e(double a, double b);

/// Soft threshold eta(a; b) = sign(a) max(|a| - b, 0). Throws unless b > 0.
PiecewiseEval soft_threshold_eval(double a, double b);
double soft_threshold(double a, double b);

/// Standard normal density.
double gauss_pdf(double x);

/// Upper tail Q(x) = P(Z > x), evaluated through erfc so deep tails keep full
/// relative precision.
double gauss_q(double x);

/// Lower tail P(Z <= x) = Q(-x).
double gauss_cdf(double x);

double erf(double x);

struct QuadratureNode {
  double node;
  double weight;
};

/// Gauss-Hermite rule in the probabilists' normalization: sum w_i f(x_i)
/// approximates E[f(Z)] for Z ~ N(0,1); weights sum to one. Exact for
/// polynomials of degree <= 2 n_nodes - 1.
std::vector<QuadratureNode> hermite_nodes(std::size_t n_nodes);

/// Gauss-Legendre rule on [-1, 1] (weights sum to two).
std::vector<QuadratureNode> legendre_nodes(std::size_t n_nodes);

}  // namespace corrlasso
