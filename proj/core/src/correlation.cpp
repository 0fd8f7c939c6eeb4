#include "corrlasso/correlation.hpp"

#include <cmath>
#include <sstream>

#include "corrlasso/error.hpp"

namespace corrlasso {

namespace {

void check_rho(double rho) {
  if (!(rho >= 0.0 && rho < 1.0)) {
    std::ostringstream msg;
    msg << "exponential correlation: rho must lie in [0, 1), got " << rho;
    detail::invalid(msg.str());
  }
}

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};

}  // namespace

Eigen::MatrixXd build_exponential(double rho, std::size_t m) {
  check_rho(rho);
  detail::require(m >= 1, "exponential correlation: dimension m must be at least 1");
  const auto size = static_cast<Eigen::Index>(m);
  Eigen::MatrixXd sigma(size, size);
  for (Eigen::Index j = 0; j < size; ++j) {
    for (Eigen::Index i = 0; i < size; ++i) {
      const auto d = static_cast<double>(i - j);
      sigma(i, j) = std::pow(rho, d * d);
    }
  }
  return sigma;
}

CorrelationModel CorrelationModel::exponential(double rho, std::size_t m) {
  CorrelationModel model{ExponentialCorrelation{rho}, m};
  model.validate();
  return model;
}

CorrelationModel CorrelationModel::identity(std::size_t m) {
  CorrelationModel model{IdentityCorrelation{}, m};
  model.validate();
  return model;
}

CorrelationModel CorrelationModel::explicit_matrix(Eigen::MatrixXd matrix) {
  const auto m = static_cast<std::size_t>(matrix.rows());
  CorrelationModel model{ExplicitCorrelation{std::move(matrix)}, m};
  model.validate();
  return model;
}

void CorrelationModel::validate() const {
  detail::require(m >= 1, "correlation model: dimension m must be at least 1");
  std::visit(overloaded{
                 [](const ExponentialCorrelation& e) { check_rho(e.rho); },
                 [](const IdentityCorrelation&) {},
                 [this](const ExplicitCorrelation& e) {
                   detail::require(e.matrix.rows() == e.matrix.cols(),
                                   "explicit correlation: matrix must be square");
                   detail::require(static_cast<std::size_t>(e.matrix.rows()) == m,
                                   "explicit correlation: matrix size does not match m");
                   detail::require(e.matrix.allFinite(),
                                   "explicit correlation: matrix has non-finite entries");
                   (void)spectral_decompose(e.matrix);
                 },
             },
             kind);
}

Eigen::MatrixXd CorrelationModel::matrix() const {
  validate();
  return std::visit(
      overloaded{
          [this](const ExponentialCorrelation& e) { return build_exponential(e.rho, m); },
          [this](const IdentityCorrelation&) -> Eigen::MatrixXd {
            const auto size = static_cast<Eigen::Index>(m);
            return Eigen::MatrixXd::Identity(size, size);
          },
          [](const ExplicitCorrelation& e) { return e.matrix; },
      },
      kind);
}

std::string CorrelationModel::describe() const {
  std::ostringstream out;
  std::visit(overloaded{
                 [&](const ExponentialCorrelation& e) { out << "exponential(rho=" << e.rho << ")"; },
                 [&](const IdentityCorrelation&) { out << "identity"; },
                 [&](const ExplicitCorrelation&) { out << "explicit"; },
             },
             kind);
  out << " m=" << m;
  return out.str();
}

CorrelationSpectrum spectral_decompose(const Eigen::MatrixXd& sigma) {
  detail::require(sigma.rows() >= 1 && sigma.rows() == sigma.cols(),
                  "spectral_decompose: matrix must be square and nonempty");
  detail::require(sigma.allFinite(), "spectral_decompose: matrix has non-finite entries");
  const double asym = (sigma - sigma.transpose()).cwiseAbs().maxCoeff();
  if (asym > kSymmetryTolerance) {
    std::ostringstream msg;
    msg << "spectral_decompose: matrix is not symmetric (max |S_ij - S_ji| = " << asym << ")";
    detail::invalid(msg.str());
  }

  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> solver(sigma);
  if (solver.info() != Eigen::Success) {
    throw ConvergenceError("spectral_decompose: eigensolver failed");
  }
  Eigen::VectorXd gamma = solver.eigenvalues();
  for (Eigen::Index j = 0; j < gamma.size(); ++j) {
    if (gamma(j) < -kEigenvalueClampTolerance) {
      std::ostringstream msg;
      msg << "spectral_decompose: matrix is not positive semidefinite (eigenvalue " << gamma(j)
          << ")";
      detail::invalid(msg.str());
    }
    if (gamma(j) < 0.0) gamma(j) = 0.0;
  }

  const Eigen::MatrixXd& u = solver.eigenvectors();
  CorrelationSpectrum spectrum;
  spectrum.sqrt_factor = u * gamma.cwiseSqrt().asDiagonal() * u.transpose();
  // Exact symmetry of the factor.
  spectrum.sqrt_factor = 0.5 * (spectrum.sqrt_factor + spectrum.sqrt_factor.transpose()).eval();
  spectrum.eigenvalues = std::move(gamma);
  return spectrum;
}

}  // namespace corrlasso
