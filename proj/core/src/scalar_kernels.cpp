#include "corrlasso/scalar_kernels.hpp"

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "corrlasso/error.hpp"

namespace corrlasso {
namespace {

void check_threshold(double b, const char* who) {
  if (!(b > 0.0) || !std::isfinite(b)) {
    detail::invalid(std::string(who) + ": threshold b must be positive and finite, got " +
                    std::to_string(b));
  }
}

// Golub-Welsch: nodes are the eigenvalues of the Jacobi matrix, weights the
// squared first eigenvector components scaled by the total mass.
std::vector<QuadratureNode> golub_welsch(const Eigen::VectorXd& diag,
                                         const Eigen::VectorXd& offdiag, double mass) {
  const auto n = diag.size();
  std::vector<QuadratureNode> rule(static_cast<std::size_t>(n));
  if (n == 1) {
    rule[0] = {diag(0), mass};
    return rule;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver;
  solver.computeFromTridiagonal(diag, offdiag, Eigen::ComputeEigenvectors);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("golub_welsch: tridiagonal eigensolver failed");
  }
  for (Eigen::Index i = 0; i < n; ++i) {
    const double v0 = solver.eigenvectors()(0, i);
    rule[static_cast<std::size_t>(i)] = {solver.eigenvalues()(i), mass * v0 * v0};
  }
  return rule;
}

}  // namespace

PiecewiseEval cost_e_eval(double a, double b) {
  check_threshold(b, "cost_e");
  if (a > b) return {b * a - 0.5 * b * b, Branch::upper};
  if (a < -b) return {-b * a - 0.5 * b * b, Branch::lower};
  return {0.5 * a * a, Branch::middle};
}

double cost_e(double a, double b) { return cost_e_eval(a, b).value; }

PiecewiseEval soft_threshold_eval(double a, double b) {
  check_threshold(b, "soft_threshold");
  if (a > b) return {a - b, Branch::upper};
  if (a < -b) return {a + b, Branch::lower};
  return {0.0, Branch::middle};
}

double soft_threshold(double a, double b) { return soft_threshold_eval(a, b).value; }

double gauss_pdf(double x) {
  return std::exp(-0.5 * x * x) * (std::numbers::inv_sqrtpi / std::numbers::sqrt2);
}

double gauss_q(double x) { return 0.5 * std::erfc(x / std::numbers::sqrt2); }

double gauss_cdf(double x) { return gauss_q(-x); }

double erf(double x) { return std::erf(x); }

std::vector<QuadratureNode> hermite_nodes(std::size_t n_nodes) {
  detail::require(n_nodes >= 1, "hermite_nodes: n_nodes must be at least 1");
  const auto n = static_cast<Eigen::Index>(n_nodes);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index k = 1; k < n; ++k) off(k - 1) = std::sqrt(static_cast<double>(k));
  auto rule = golub_welsch(diag, off, 1.0);
  // Symmetrize: the rule is exactly symmetric about zero.
  for (std::size_t i = 0, j = rule.size() - 1; i < j; ++i, --j) {
    const double x = 0.5 * (rule[j].node - rule[i].node);
    const double w = 0.5 * (rule[i].weight + rule[j].weight);
    rule[i] = {-x, w};
    rule[j] = {x, w};
  }
  if (rule.size() % 2 == 1) rule[rule.size() / 2].node = 0.0;
  return rule;
}

std::vector<QuadratureNode> legendre_nodes(std::size_t n_nodes) {
  detail::require(n_nodes >= 1, "legendre_nodes: n_nodes must be at least 1");
  const auto n = static_cast<Eigen::Index>(n_nodes);
  Eigen::VectorXd diag = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd off(std::max<Eigen::Index>(n - 1, 0));
  for (Eigen::Index k = 1; k < n; ++k) {
    const double kk = static_cast<double>(k);
    off(k - 1) = kk / std::sqrt(4.0 * kk * kk - 1.0);
  }
  auto rule = golub_welsch(diag, off, 2.0);
  for (std::size_t i = 0, j = rule.size() - 1; i < j; ++i, --j) {
    const double x = 0.5 * (rule[j].node - rule[i].node);
    const double w = 0.5 * (rule[i].weight + rule[j].weight);
    rule[i] = {-x, w};
    rule[j] = {x, w};
  }
  if (rule.size() % 2 == 1) rule[rule.size() / 2].node = 0.0;
  return rule;
}

}  // namespace corrlasso
