#pragma once

#include <Eigen/Dense>

namespace corrlasso {

/// argmin_x ||y - A x||^2 + lambda ||x||_1 (no 1/2 on the loss).
struct LassoInstance {
  Eigen::MatrixXd design;
  Eigen::VectorXd observations;
  double lambda = 0.0;

  void validate() const;
};

struct LassoOptions {
  double kkt_tol = 1e-9;
  int max_iterations = 20000;
  /// Iterations between attempts to finish on the current support/sign
  /// pattern with one linear solve. Zero disables the attempt.
  int polish_interval = 20;
};

struct LassoSolution {
  Eigen::VectorXd estimate;
  double objective = 0.0;
  int iterations = 0;
  bool converged = false;
  double kkt_residual = 0.0;
};

/// Design preprocessed for repeated solves at different lambda: Gram matrix,
/// A^T y and the Lipschitz constant 2 sigma_max(A)^2.
class PreparedLasso {
 public:
  PreparedLasso(Eigen::MatrixXd design, Eigen::VectorXd observations);

  [[nodiscard]] const Eigen::MatrixXd& design() const { return design_; }
  [[nodiscard]] const Eigen::VectorXd& observations() const { return observations_; }
  [[nodiscard]] double lipschitz() const { return lipschitz_; }

  /// Cold-start solve; the result depends only on (A, y, lambda, opts).
  [[nodiscard]] LassoSolution solve(double lambda, const LassoOptions& opts = {}) const;

 private:
  [[nodiscard]] double smooth_part(const Eigen::VectorXd& x, const Eigen::VectorXd& gx) const;
  [[nodiscard]] double kkt_from_gram(const Eigen::VectorXd& x, const Eigen::VectorXd& gx,
                                     double lambda) const;
  bool try_polish(const Eigen::VectorXd& x, double lambda, double tol, Eigen::VectorXd& out,
                  Eigen::VectorXd& gout) const;

  Eigen::MatrixXd design_;
  Eigen::VectorXd observations_;
  Eigen::MatrixXd gram_;
  Eigen::VectorXd aty_;
  double yty_ = 0.0;
  double lipschitz_ = 0.0;
};

/// Accelerated proximal gradient with function-value restart. The solution is
/// returned even when converged is false.
LassoSolution solve_lasso(const LassoInstance& instance, const LassoOptions& opts = {});

/// max_i of |2 A_i^T (A x - y) + lambda sign(x_i)| on the support and
/// max(0, |2 A_i^T (A x - y)| - lambda) off it.
double kkt_residual(const LassoInstance& instance, const Eigen::VectorXd& x);

double lasso_objective(const LassoInstance& instance, const Eigen::VectorXd& x);

}  // namespace corrlasso
