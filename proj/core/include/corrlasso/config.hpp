#pragma once

#include <Eigen/Dense>

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "corrlasso/correlation.hpp"
#include "corrlasso/signal_priors.hpp"

namespace corrlasso {

struct LambdaGrid {
  enum class Spacing { linear, log };
  double start = 0.01;
  double stop = 0.5;
  int count = 15;
  Spacing spacing = Spacing::linear;

  /// Grid values; the endpoints are reproduced exactly.
  [[nodiscard]] std::vector<double> values() const;
};

struct CorrelationSpec {
  enum class Type { exponential, identity, explicit_matrix };
  Type type = Type::identity;
  double rho = 0.0;
  Eigen::MatrixXd matrix;
};

struct PriorSpec {
  enum class Type { bernoulli, generic };
  Type type = Type::bernoulli;
  std::vector<Atom> atoms;
};

enum class RunMode { theory, empirical, both };

struct ProblemConfig {
  std::size_t n = 400;
  double delta = 0.7;
  double kappa = 0.1;
  CorrelationSpec correlation;
  std::optional<double> sigma2;
  std::optional<double> snr_db;
  PriorSpec prior;
  std::variant<double, LambdaGrid> lambda = 0.1;
  double xi = 0.001;
  int trials = 500;
  std::uint64_t base_seed = 0;
  RunMode mode = RunMode::both;
  std::string output;
  /// Worker threads for the trials; 0 means hardware concurrency.
  int threads = 0;

  /// Throws ConfigError naming the offending field.
  void validate() const;

  [[nodiscard]] std::size_t m() const;
  [[nodiscard]] std::size_t k() const;
  /// sigma2, or kappa / 10^(snr_db / 10).
  [[nodiscard]] double noise_variance() const;
  [[nodiscard]] SparsePrior signal_prior() const;
  [[nodiscard]] CorrelationModel correlation_model() const;
  [[nodiscard]] std::vector<double> lambdas() const;
};

/// Parses a JSON document. Unknown fields are rejected. A top-level "rho"
/// is shorthand for an exponential correlation.
ProblemConfig parse_config(const std::string& json_text);
ProblemConfig load_config(const std::string& path);

/// Canonical JSON form; parse_config(to_json(c)) reproduces c.
std::string to_json(const ProblemConfig& config);

std::string to_string(RunMode mode);
RunMode parse_mode(const std::string& text);

}  // namespace corrlasso
