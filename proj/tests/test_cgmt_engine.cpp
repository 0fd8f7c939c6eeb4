#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "corrlasso/cgmt_engine.hpp"
#include "corrlasso/correlation.hpp"
#include "corrlasso/error.hpp"

using namespace corrlasso;

namespace {

ScalarProblem reference_problem(double lambda, double sigma2 = 0.01) {
  ScalarProblem p;
  p.eigenvalues = spectral_decompose(CorrelationModel::exponential(0.7, 280)).eigenvalues;
  p.n = 400;
  p.sigma2 = sigma2;
  p.lambda = lambda;
  p.prior = SparsePrior::bernoulli(0.1);
  return p;
}

ScalarProblem identity_problem(std::size_t m, std::size_t n, double sigma2, double lambda = 0.1) {
  ScalarProblem p;
  p.eigenvalues = Eigen::VectorXd::Ones(static_cast<Eigen::Index>(m));
  p.n = n;
  p.sigma2 = sigma2;
  p.lambda = lambda;
  p.prior = SparsePrior::bernoulli(0.1);
  return p;
}

double identity_mu(double delta, double alpha, double sigma2, double beta) {
  return 1.0 - (2.0 / beta) * std::sqrt(delta * (alpha + sigma2));
}

}  // namespace

TEST(SolveMu, IdentityClosedForm) {
  const auto p = identity_problem(280, 400, 0.01);
  EXPECT_NEAR(solve_mu(p, 1.0, 2.0), 1.0 - std::sqrt(0.707), 1e-12);
  EXPECT_NEAR(solve_mu(p, 1.0, 2.0), 0.1591670796, 1e-9);
  for (double alpha : {0.01, 0.3, 2.0}) {
    for (double beta : {0.05, 0.7, 5.0}) {
      EXPECT_NEAR(solve_mu(p, alpha, beta), identity_mu(0.7, alpha, 0.01, beta), 1e-10);
    }
  }
}

TEST(SolveMu, ApproachesPoleForLargeBeta) {
  const CgmtEngine eng(reference_problem(0.1));
  const double pole = 1.0 / eng.problem().eigenvalues.maxCoeff();
  double prev = -INFINITY;
  double gap = INFINITY;
  for (double beta : {1.0, 10.0, 100.0}) {
    const double mu = eng.solve_mu(0.05, beta);
    EXPECT_LT(mu, pole);
    EXPECT_GT(mu, prev);
    EXPECT_LT(pole - mu, 0.5 * gap);
    gap = pole - mu;
    prev = mu;
  }
}

TEST(SolveMu, Homogeneity) {
  // Doubling every (alpha + sigma2 / g_j) and beta^2 leaves mu unchanged.
  auto p = reference_problem(0.1);
  const double mu1 = solve_mu(p, 0.04, 0.3);
  p.sigma2 *= 2.0;
  const double mu2 = solve_mu(p, 0.08, 0.3 * std::sqrt(2.0));
  EXPECT_NEAR(mu1, mu2, 1e-10 * std::max(1.0, std::abs(mu1)));
}

TEST(SolveMu, ResidualAndPoleGap) {
  const CgmtEngine eng(reference_problem(0.1));
  const double pole = 1.0 / eng.problem().eigenvalues.maxCoeff();
  for (double alpha : {1e-4, 0.02, 0.5}) {
    for (double beta : {1e-3, 0.1, 3.0}) {
      const double mu = eng.solve_mu(alpha, beta);
      EXPECT_LE(std::abs(eng.mu_residual(mu, alpha, beta)), 1e-12);
      EXPECT_LT(mu, pole - 1e-14);
    }
  }
  EXPECT_THROW((void)eng.solve_mu(0.0, 1.0), InvalidArgument);
  EXPECT_THROW((void)eng.solve_mu(1.0, -1.0), InvalidArgument);
}

TEST(SolveMu, ZeroEigenvaluesDropOut) {
  auto p = identity_problem(4, 10, 0.01);
  auto q = p;
  q.eigenvalues.resize(6);
  q.eigenvalues << 0.0, 0.0, 1.0, 1.0, 1.0, 1.0;
  EXPECT_NEAR(solve_mu(p, 0.1, 0.5), solve_mu(q, 0.1, 0.5), 1e-13);
  // Each zero eigenvalue adds sigma2 / n to the trace term of D.
  EXPECT_NEAR(objective_D(q, 0.1, 0.5, 0.3) - objective_D(p, 0.1, 0.5, 0.3), 2 * 0.01 / 10, 1e-13);
}

TEST(ObjectiveD, ReferenceValue) {
  const double d = objective_D(reference_problem(0.1), 0.1, 1.0, 1.0);
  EXPECT_TRUE(std::isfinite(d));
  EXPECT_NEAR(d, -0.46108909417689792, 1e-10);
}

TEST(ObjectiveD, IdentityTraceCollapse) {
  const auto p = identity_problem(280, 400, 0.01);
  const CgmtEngine eng(p);
  const double alpha = 0.05, beta = 0.4, chi = 0.02;
  const double mu = eng.solve_mu(alpha, beta);
  const double c = alpha * beta / chi, t = p.lambda * alpha / chi;
  const double rest = -(beta * beta * mu / 4 + chi / 2 + alpha * beta * beta / (2 * chi)) +
                      (chi / alpha) * expectation_e(p.prior, c, t);
  EXPECT_NEAR(eng.objective(alpha, beta, chi) - rest, 0.7 * (alpha + 0.01) / (1 - mu), 1e-13);
}

TEST(ObjectiveD, GradientMatchesFiniteDifferences) {
  const CgmtEngine eng(reference_problem(0.1));
  for (auto [a, b, x] : std::vector<std::array<double, 3>>{
           {0.02, 0.08, 0.007}, {0.1, 1.0, 1.0}, {0.05, 0.3, 0.02}}) {
    const auto g = eng.gradient(a, b, x);
    const auto fd = eng.fd_gradient(a, b, x);
    for (int i = 0; i < 3; ++i) EXPECT_NEAR(g(i), fd(i), 1e-6 * std::max(1.0, std::abs(g(i))));
  }
}

TEST(SolveSaddle, ChiSectionConcaveNearOptimum) {
  const CgmtEngine eng(reference_problem(0.1));
  const auto s = eng.solve_saddle();
  for (double f : {0.7, 0.85, 1.0, 1.2, 1.5}) {
    const double x = s.chi_star * f, h = 1e-4 * x;
    const double d2 = (eng.objective(s.alpha_star, s.beta_star, x + h) -
                       2 * eng.objective(s.alpha_star, s.beta_star, x) +
                       eng.objective(s.alpha_star, s.beta_star, x - h)) /
                      (h * h);
    EXPECT_LE(d2, 0.0) << f;
  }
}

TEST(SolveSaddle, SweepIsUShaped) {
  std::vector<double> alpha;
  for (double lambda = 0.01; lambda <= 0.5 + 1e-12; lambda += 0.035) {
    const auto s = solve_saddle(reference_problem(lambda));
    EXPECT_TRUE(s.converged);
    EXPECT_GT(s.alpha_star, 0.0);
    EXPECT_GT(s.beta_star, 0.0);
    EXPECT_GT(s.chi_star, 0.0);
    alpha.push_back(s.alpha_star);
  }
  const auto it = std::min_element(alpha.begin(), alpha.end());
  EXPECT_NE(it, alpha.begin());
  EXPECT_NE(it, alpha.end() - 1);
  for (auto i = alpha.begin(); i < it; ++i) EXPECT_GT(*i, *(i + 1));
  for (auto i = it; i + 1 < alpha.end(); ++i) EXPECT_LT(*i, *(i + 1));
}

TEST(SolveSaddle, PrototypeValues) {
  const auto s = solve_saddle(reference_problem(0.1));
  EXPECT_NEAR(s.alpha_star, 0.0209201, 1e-6);
  EXPECT_NEAR(s.beta_star, 0.085457, 1e-5);
  EXPECT_NEAR(s.chi_star, 0.00708349, 1e-7);
}

TEST(SolveSaddle, StationarityAndSignature) {
  for (double lambda : {0.01, 0.1, 0.5}) {
    const CgmtEngine eng(reference_problem(lambda));
    const auto s = eng.solve_saddle();
    EXPECT_LE(eng.fd_gradient(s.alpha_star, s.beta_star, s.chi_star).cwiseAbs().maxCoeff(), 1e-6);
    EXPECT_LE(s.gradient_norm, 1e-9);
    EXPECT_TRUE(eng.curvature(s).is_min_max());
    EXPECT_LT(s.mu_star, 1.0 / eng.problem().eigenvalues.maxCoeff());
  }
}

TEST(SolveSaddle, IdentityModelEqualsExplicitIdentity) {
  auto a = reference_problem(0.1);
  a.eigenvalues = spectral_decompose(CorrelationModel::exponential(0.0, 280)).eigenvalues;
  auto b = a;
  b.eigenvalues =
      spectral_decompose(CorrelationModel::explicit_matrix(Eigen::MatrixXd::Identity(280, 280)))
          .eigenvalues;
  EXPECT_NEAR(solve_saddle(a).alpha_star, solve_saddle(b).alpha_star, 1e-10);
}

TEST(SolveSaddle, IidLeastSquaresLimit) {
  // Overdetermined identity design with tiny lambda: alpha -> sigma2 / (delta - 1).
  const auto s = solve_saddle(identity_problem(800, 400, 0.01, 1e-6));
  EXPECT_NEAR(s.alpha_star, 0.01, 1e-5);
}

TEST(SolveSaddle, ToleranceTighteningIsStable) {
  const auto p = reference_problem(0.14);
  SolverOptions loose;
  loose.stationarity_tol = 1e-8;
  SolverOptions tight;
  tight.stationarity_tol = 1e-10;
  EXPECT_LT(std::abs(solve_saddle(p, loose).alpha_star - solve_saddle(p, tight).alpha_star), 1e-6);
}

TEST(SolveSaddle, RotationInvariant) {
  const Eigen::MatrixXd sigma = build_exponential(0.7, 60);
  std::mt19937_64 rng(8);
  std::normal_distribution<double> nd;
  Eigen::MatrixXd g(60, 60);
  for (Eigen::Index i = 0; i < g.size(); ++i) g.data()[i] = nd(rng);
  const Eigen::MatrixXd u = Eigen::HouseholderQR<Eigen::MatrixXd>(g).householderQ();
  const Eigen::MatrixXd rotated = u * sigma * u.transpose();
  ScalarProblem a;
  a.eigenvalues = spectral_decompose(sigma).eigenvalues;
  a.n = 100;
  a.sigma2 = 0.01;
  a.lambda = 0.1;
  auto b = a;
  b.eigenvalues = spectral_decompose(Eigen::MatrixXd(0.5 * (rotated + rotated.transpose()))).eigenvalues;
  EXPECT_NEAR(solve_saddle(a).alpha_star, solve_saddle(b).alpha_star, 1e-9);
}

TEST(SolveSaddle, MseDecreasesWithNoise) {
  double prev = INFINITY;
  for (double sigma2 : {0.05, 0.01, 0.002}) {
    const double a = solve_saddle(reference_problem(0.1, sigma2)).alpha_star;
    EXPECT_LT(a, prev);
    prev = a;
  }
}

TEST(SolveSaddle, RejectsBadProblem) {
  auto p = reference_problem(0.1);
  p.lambda = 0.0;
  EXPECT_THROW(CgmtEngine{p}, InvalidArgument);
  p = reference_problem(0.1);
  p.eigenvalues(0) = -1.0;
  EXPECT_THROW(CgmtEngine{p}, InvalidArgument);
}
