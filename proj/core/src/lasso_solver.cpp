#include "corrlasso/lasso_solver.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <vector>

#include "corrlasso/error.hpp"

namespace corrlasso {

namespace {

inline double shrink(double a, double b) {
  if (a > b) return a - b;
  if (a < -b) return a + b;
  return 0.0;
}

inline double sign_of(double v) { return v > 0.0 ? 1.0 : (v < 0.0 ? -1.0 : 0.0); }

double kkt_from_gradient(const Eigen::VectorXd& x, const Eigen::VectorXd& grad, double lambda) {
  double worst = 0.0;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    const double r = x(i) != 0.0 ? std::abs(grad(i) + lambda * sign_of(x(i)))
                                 : std::max(0.0, std::abs(grad(i)) - lambda);
    worst = std::max(worst, r);
  }
  return worst;
}

void check_lambda(double lambda) {
  if (!(lambda > 0.0) || !std::isfinite(lambda)) {
    std::ostringstream msg;
    msg << "lasso: lambda must be positive and finite, got " << lambda;
    detail::invalid(msg.str());
  }
}

// Gx for sparse x, accumulating only the active columns.
void gram_times(const Eigen::MatrixXd& g, const Eigen::VectorXd& x, Eigen::VectorXd& out) {
  out.setZero(g.rows());
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) out.noalias() += g.col(i) * x(i);
  }
}

}  // namespace

void LassoInstance::validate() const {
  check_lambda(lambda);
  if (design.rows() == 0 || design.cols() == 0) detail::invalid("lasso: empty design matrix");
  if (design.rows() != observations.size()) {
    std::ostringstream msg;
    msg << "lasso: design has " << design.rows() << " rows but observations has "
        << observations.size() << " entries";
    detail::invalid(msg.str());
  }
  if (!design.allFinite() || !observations.allFinite()) {
    detail::invalid("lasso: design and observations must be finite");
  }
}

PreparedLasso::PreparedLasso(Eigen::MatrixXd design, Eigen::VectorXd observations)
    : design_(std::move(design)), observations_(std::move(observations)) {
  LassoInstance probe{design_, observations_, 1.0};
  probe.validate();
  gram_ = design_.transpose() * design_;
  aty_ = design_.transpose() * observations_;
  yty_ = observations_.squaredNorm();
  double top = 0.0;
  if (design_.rows() < design_.cols()) {
    const Eigen::MatrixXd outer = design_ * design_.transpose();
    top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(outer, Eigen::EigenvaluesOnly)
              .eigenvalues()
              .maxCoeff();
  } else {
    top = Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd>(gram_, Eigen::EigenvaluesOnly)
              .eigenvalues()
              .maxCoeff();
  }
  lipschitz_ = 2.0 * top;
}

double PreparedLasso::smooth_part(const Eigen::VectorXd& x, const Eigen::VectorXd& gx) const {
  return yty_ - 2.0 * aty_.dot(x) + x.dot(gx);
}

double PreparedLasso::kkt_from_gram(const Eigen::VectorXd& x, const Eigen::VectorXd& gx,
                                    double lambda) const {
  return kkt_from_gradient(x, 2.0 * (gx - aty_), lambda);
}

bool PreparedLasso::try_polish(const Eigen::VectorXd& x, double lambda, double tol,
                               Eigen::VectorXd& out, Eigen::VectorXd& gout) const {
  std::vector<Eigen::Index> support;
  for (Eigen::Index i = 0; i < x.size(); ++i) {
    if (x(i) != 0.0) support.push_back(i);
  }
  const auto s = static_cast<Eigen::Index>(support.size());
  if (s == 0 || s > design_.rows()) return false;

  Eigen::MatrixXd gss(s, s);
  Eigen::VectorXd rhs(s);
  for (Eigen::Index a = 0; a < s; ++a) {
    for (Eigen::Index b = 0; b < s; ++b) gss(a, b) = gram_(support[a], support[b]);
    rhs(a) = aty_(support[a]) - 0.5 * lambda * sign_of(x(support[a]));
  }
  Eigen::LLT<Eigen::MatrixXd> llt(gss);
  if (llt.info() != Eigen::Success) return false;
  const Eigen::VectorXd z = llt.solve(rhs);
  for (Eigen::Index a = 0; a < s; ++a) {
    if (sign_of(z(a)) != sign_of(x(support[a]))) return false;
  }
  Eigen::VectorXd candidate = Eigen::VectorXd::Zero(x.size());
  for (Eigen::Index a = 0; a < s; ++a) candidate(support[a]) = z(a);
  Eigen::VectorXd gc;
  gram_times(gram_, candidate, gc);
  if (kkt_from_gram(candidate, gc, lambda) > tol) return false;
  out = std::move(candidate);
  gout = std::move(gc);
  return true;
}

LassoSolution PreparedLasso::solve(double lambda, const LassoOptions& opts) const {
  check_lambda(lambda);
  const Eigen::Index n = design_.cols();
  const double inv_l = 1.0 / lipschitz_;
  const double thr = lambda * inv_l;
  const LassoInstance view{design_, observations_, lambda};

  Eigen::VectorXd x = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd gx = Eigen::VectorXd::Zero(n);
  Eigen::VectorXd x_prev = x;
  Eigen::VectorXd gx_prev = gx;
  Eigen::VectorXd v(n), gv(n), x_new(n), gx_new(n);
  double f = smooth_part(x, gx);  // ||x||_1 = 0
  double t = 1.0;

  LassoSolution out;
  auto finish = [&](const Eigen::VectorXd& est) -> bool {
    const double r = kkt_residual(view, est);
    if (r > opts.kkt_tol) return false;
    out.estimate = est;
    out.kkt_residual = r;
    out.objective = lasso_objective(view, est);
    out.converged = true;
    return true;
  };

  int k = 0;
  for (; k < opts.max_iterations; ++k) {
    if (kkt_from_gram(x, gx, lambda) <= opts.kkt_tol && finish(x)) {
      out.iterations = k;
      return out;
    }
    if (opts.polish_interval > 0 && k > 0 && k % opts.polish_interval == 0) {
      Eigen::VectorXd xp, gxp;
      if (try_polish(x, lambda, opts.kkt_tol, xp, gxp) && finish(xp)) {
        out.iterations = k;
        return out;
      }
    }

    const double t_next = 0.5 * (1.0 + std::sqrt(1.0 + 4.0 * t * t));
    const double momentum = (t - 1.0) / t_next;
    v = x + momentum * (x - x_prev);
    gv = gx + momentum * (gx - gx_prev);
    for (Eigen::Index i = 0; i < n; ++i) {
      x_new(i) = shrink(v(i) - 2.0 * inv_l * (gv(i) - aty_(i)), thr);
    }
    gram_times(gram_, x_new, gx_new);
    double f_new = smooth_part(x_new, gx_new) + lambda * x_new.lpNorm<1>();

    if (f_new > f) {
      // Restart: plain proximal step from x, which cannot increase F.
      for (Eigen::Index i = 0; i < n; ++i) {
        x_new(i) = shrink(x(i) - 2.0 * inv_l * (gx(i) - aty_(i)), thr);
      }
      gram_times(gram_, x_new, gx_new);
      f_new = smooth_part(x_new, gx_new) + lambda * x_new.lpNorm<1>();
      t = 1.0;
    } else {
      t = t_next;
    }
    x_prev.swap(x);
    gx_prev.swap(gx);
    x.swap(x_new);
    gx.swap(gx_new);
    f = std::min(f, f_new);
  }

  out.iterations = k;
  if (!finish(x)) {
    out.estimate = x;
    out.kkt_residual = kkt_residual(view, x);
    out.objective = lasso_objective(view, x);
    out.converged = false;
  }
  return out;
}

LassoSolution solve_lasso(const LassoInstance& instance, const LassoOptions& opts) {
  instance.validate();
  return PreparedLasso(instance.design, instance.observations).solve(instance.lambda, opts);
}

double kkt_residual(const LassoInstance& instance, const Eigen::VectorXd& x) {
  if (x.size() != instance.design.cols()) {
    detail::invalid("kkt_residual: estimate length does not match the design");
  }
  const Eigen::VectorXd grad =
      2.0 * instance.design.transpose() * (instance.design * x - instance.observations);
  return kkt_from_gradient(x, grad, instance.lambda);
}

double lasso_objective(const LassoInstance& instance, const Eigen::VectorXd& x) {
  return (instance.observations - instance.design * x).squaredNorm() +
         instance.lambda * x.lpNorm<1>();
}

}  // namespace corrlasso
