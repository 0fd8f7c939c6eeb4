#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <random>
#include <string>
#include <vector>

namespace corrlasso {

/// One nonzero value of the prior and its probability given "on support".
struct Atom {
  double value = 1.0;
  double weight = 1.0;
};

/// Sparse prior p_X0 = (1 - kappa) delta_0 + kappa * sum_i w_i delta_{v_i}.
class SparsePrior {
 public:
  enum class Kind { sparse_bernoulli, sparse_generic };

  /// (1 - kappa) delta_0 + kappa delta_1.
  static SparsePrior bernoulli(double kappa);
  /// Finite mixture of nonzero atoms; weights must be positive and sum to one.
  static SparsePrior generic(double kappa, std::vector<Atom> atoms);

  [[nodiscard]] Kind kind() const { return kind_; }
  [[nodiscard]] bool is_bernoulli() const { return kind_ == Kind::sparse_bernoulli; }
  [[nodiscard]] double kappa() const { return kappa_; }
  /// Law of X0 conditioned on being on the support.
  [[nodiscard]] const std::vector<Atom>& conditional_law() const { return atoms_; }
  /// Full law including the zero mass (weights sum to one).
  [[nodiscard]] std::vector<Atom> full_law() const;
  /// E[X0^2] under the full law.
  [[nodiscard]] double second_moment() const;

  [[nodiscard]] std::string describe() const;

 private:
  SparsePrior(Kind kind, double kappa, std::vector<Atom> atoms);

  Kind kind_;
  double kappa_;
  std::vector<Atom> atoms_;
};

/// A k-sparse signal and its support (ascending indices).
struct SignalVector {
  Eigen::VectorXd entries;
  std::vector<Eigen::Index> support;

  [[nodiscard]] std::size_t k() const { return support.size(); }
};

/// k = round(kappa n); throws if it rounds to 0 or n.
std::size_t support_size(double kappa, std::size_t n);

/// Support drawn uniformly among size-k subsets, values iid from the
/// conditional law. Deterministic given the seed.
SignalVector sample_signal(const SparsePrior& prior, std::size_t n, std::uint64_t rng_seed);
SignalVector sample_signal(const SparsePrior& prior, std::size_t n, std::mt19937_64& rng);

/// E[e(X0 + c Z; t)] over the full prior and Z ~ N(0,1). Uses the closed form
/// for sparse-Bernoulli priors and breakpoint-aware quadrature otherwise.
double expectation_e(const SparsePrior& prior, double c, double t);

/// Closed form of E[e(X0 + c Z; t)] for (1 - kappa) delta_0 + kappa delta_1.
double expectation_e_bernoulli(double kappa, double c, double t);

/// Quadrature route of expectation_e, valid for every prior.
double expectation_e_quadrature(const SparsePrior& prior, double c, double t);

/// Moments of the soft-threshold channel eta(X + c Z; t).
struct ChannelMoments {
  double active_probability = 0.0;  ///< P(|X + c Z| > t)
  double mse = 0.0;                 ///< E[(eta(X + c Z; t) - X)^2]
};

/// Closed form for a point mass X = x.
ChannelMoments point_mass_channel(double x, double c, double t);

/// Mixture over the full prior law.
ChannelMoments channel_moments(const SparsePrior& prior, double c, double t);

}  // namespace corrlasso
