#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <string>
#include <variant>

namespace corrlasso {

/// Entries rho^(|i-j|^2); note the squared distance in the exponent.
struct ExponentialCorrelation {
  double rho = 0.0;
};

struct IdentityCorrelation {};

/// User-supplied symmetric nonnegative-definite matrix.
struct ExplicitCorrelation {
  Eigen::MatrixXd matrix;
};

using CorrelationKind =
    std::variant<ExponentialCorrelation, IdentityCorrelation, ExplicitCorrelation>;

/// Left correlation model for designs A = Sigma^(1/2) H.
struct CorrelationModel {
  CorrelationKind kind = IdentityCorrelation{};
  std::size_t m = 1;

  static CorrelationModel exponential(double rho, std::size_t m);
  static CorrelationModel identity(std::size_t m);
  static CorrelationModel explicit_matrix(Eigen::MatrixXd matrix);

  /// Throws InvalidArgument when the invariants of the kind do not hold.
  void validate() const;

  /// Materializes Sigma.
  [[nodiscard]] Eigen::MatrixXd matrix() const;

  [[nodiscard]] std::string describe() const;
};

/// Eigenvalues (ascending, nonnegative) and symmetric square root of Sigma.
struct CorrelationSpectrum {
  Eigen::VectorXd eigenvalues;
  Eigen::MatrixXd sqrt_factor;

  [[nodiscard]] std::size_t m() const { return static_cast<std::size_t>(eigenvalues.size()); }
  [[nodiscard]] double max_eigenvalue() const { return eigenvalues(eigenvalues.size() - 1); }
  [[nodiscard]] double normalized_trace() const { return eigenvalues.mean(); }
};

/// Sigma(rho) with entries rho^(|i-j|^2). Requires 0 <= rho < 1 and m >= 1.
Eigen::MatrixXd build_exponential(double rho, std::size_t m);

inline constexpr double kSymmetryTolerance = 1e-10;
inline constexpr double kEigenvalueClampTolerance = 1e-12;

/// Eigendecomposition Sigma = U Gamma U^T. Eigenvalues in [-1e-12, 0) are
/// clamped to zero; anything more negative, or an asymmetric input, throws.
CorrelationSpectrum spectral_decompose(const Eigen::MatrixXd& sigma);

inline CorrelationSpectrum spectral_decompose(const CorrelationModel& model) {
  return spectral_decompose(model.matrix());
}

}  // namespace corrlasso
