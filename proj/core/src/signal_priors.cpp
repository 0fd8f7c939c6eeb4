#include "corrlasso/signal_priors.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include "corrlasso/error.hpp"
#include "corrlasso/quadrature.hpp"
#include "corrlasso/scalar_kernels.hpp"

namespace corrlasso {

namespace {

void check_kappa(double kappa) {
  if (!(kappa > 0.0 && kappa < 1.0)) {
    std::ostringstream msg;
    msg << "sparse prior: kappa must lie in (0, 1), got " << kappa;
    detail::invalid(msg.str());
  }
}

void check_scales(double c, double t, const char* who) {
  if (!(c > 0.0) || !(t > 0.0) || !std::isfinite(c) || !std::isfinite(t)) {
    std::ostringstream msg;
    msg << who << ": noise scale c and threshold t must be positive, got c=" << c << " t=" << t;
    detail::invalid(msg.str());
  }
}

}  // namespace

SparsePrior::SparsePrior(Kind kind, double kappa, std::vector<Atom> atoms)
    : kind_(kind), kappa_(kappa), atoms_(std::move(atoms)) {}

SparsePrior SparsePrior::bernoulli(double kappa) {
  check_kappa(kappa);
  return SparsePrior(Kind::sparse_bernoulli, kappa, {Atom{1.0, 1.0}});
}

SparsePrior SparsePrior::generic(double kappa, std::vector<Atom> atoms) {
  check_kappa(kappa);
  detail::require(!atoms.empty(), "sparse prior: atom list must be nonempty");
  double total = 0.0;
  for (const auto& a : atoms) {
    detail::require(std::isfinite(a.value) && a.value != 0.0,
                    "sparse prior: atom values must be finite and nonzero");
    detail::require(a.weight > 0.0 && std::isfinite(a.weight),
                    "sparse prior: atom weights must be positive");
    total += a.weight;
  }
  if (std::abs(total - 1.0) > 1e-12) {
    std::ostringstream msg;
    msg << "sparse prior: atom weights must sum to 1, got " << total;
    detail::invalid(msg.str());
  }
  return SparsePrior(Kind::sparse_generic, kappa, std::move(atoms));
}

std::vector<Atom> SparsePrior::full_law() const {
  std::vector<Atom> law;
  law.reserve(atoms_.size() + 1);
  law.push_back({0.0, 1.0 - kappa_});
  for (const auto& a : atoms_) law.push_back({a.value, kappa_ * a.weight});
  return law;
}

double SparsePrior::second_moment() const {
  double s = 0.0;
  for (const auto& a : atoms_) s += a.weight * a.value * a.value;
  return kappa_ * s;
}

std::string SparsePrior::describe() const {
  std::ostringstream out;
  out << (is_bernoulli() ? "sparse_bernoulli" : "sparse_generic") << "(kappa=" << kappa_;
  if (!is_bernoulli()) {
    out << ", atoms=[";
    for (std::size_t i = 0; i < atoms_.size(); ++i) {
      out << (i ? ", " : "") << "(" << atoms_[i].value << ", " << atoms_[i].weight << ")";
    }
    out << "]";
  }
  out << ")";
  return out.str();
}

std::size_t support_size(double kappa, std::size_t n) {
  check_kappa(kappa);
  detail::require(n >= 1, "support_size: n must be at least 1");
  const auto k = static_cast<std::size_t>(std::llround(kappa * static_cast<double>(n)));
  if (k == 0 || k == n) {
    std::ostringstream msg;
    msg << "support_size: round(kappa * n) = " << k << " for kappa=" << kappa << ", n=" << n
        << "; need 0 < k < n";
    detail::invalid(msg.str());
  }
  return k;
}

SignalVector sample_signal(const SparsePrior& prior, std::size_t n, std::mt19937_64& rng) {
  const std::size_t k = support_size(prior.kappa(), n);

  // Partial Fisher-Yates: the first k slots form a uniform k-subset.
  std::vector<Eigen::Index> index(n);
  std::iota(index.begin(), index.end(), Eigen::Index{0});
  for (std::size_t i = 0; i < k; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, n - 1);
    std::swap(index[i], index[pick(rng)]);
  }
  SignalVector signal;
  signal.support.assign(index.begin(), index.begin() + static_cast<std::ptrdiff_t>(k));
  std::sort(signal.support.begin(), signal.support.end());

  signal.entries = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(n));
  const auto& atoms = prior.conditional_law();
  if (atoms.size() == 1) {
    for (auto i : signal.support) signal.entries(i) = atoms.front().value;
    return signal;
  }
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  for (auto i : signal.support) {
    const double u = unit(rng);
    double acc = 0.0;
    double value = atoms.back().value;
    for (const auto& a : atoms) {
      acc += a.weight;
      if (u < acc) {
        value = a.value;
        break;
      }
    }
    signal.entries(i) = value;
  }
  return signal;
}

SignalVector sample_signal(const SparsePrior& prior, std::size_t n, std::uint64_t rng_seed) {
  std::mt19937_64 rng(rng_seed);
  return sample_signal(prior, n, rng);
}

double expectation_e_bernoulli(double kappa, double c, double t) {
  check_kappa(kappa);
  check_scales(c, t, "expectation_e");
  const double s = t / c;
  const double up = (t + 1.0) / c;  // (t + 1) / c
  const double dn = (t - 1.0) / c;  // (t - 1) / c

  const double zero_part = 0.5 * c * c + c * t * gauss_pdf(s) - (t * t + c * c) * gauss_q(s);

  // The closed form carries phi((t+1)/c) * exp(2t/c^2); that product equals
  // phi((t-1)/c) and is evaluated as such to avoid overflow for small c.
  double one_part = (t - 0.5 * t * t) * gauss_q(dn) - (t + 0.5 * t * t) * gauss_q(up) +
                    c * t * (gauss_pdf(up) + gauss_pdf(dn)) -
                    0.5 * c * ((t - 1.0) * gauss_pdf(up) + (t + 1.0) * gauss_pdf(dn)) +
                    0.25 * (c * c + 1.0) *
                        (std::erf(up / std::numbers::sqrt2) + std::erf(dn / std::numbers::sqrt2));
  return (1.0 - kappa) * zero_part + kappa * one_part;
}

double expectation_e_quadrature(const SparsePrior& prior, double c, double t) {
  check_scales(c, t, "expectation_e");
  double total = 0.0;
  for (const auto& atom : prior.full_law()) {
    const double x = atom.value;
    const double cuts[] = {(t - x) / c, (-t - x) / c};
    total += atom.weight *
             gaussian_expectation([&](double z) { return cost_e(x + c * z, t); }, cuts);
  }
  return total;
}

double expectation_e(const SparsePrior& prior, double c, double t) {
  if (prior.is_bernoulli()) return expectation_e_bernoulli(prior.kappa(), c, t);
  return expectation_e_quadrature(prior, c, t);
}

ChannelMoments point_mass_channel(double x, double c, double t) {
  check_scales(c, t, "point_mass_channel");
  const double h = (t - x) / c;
  const double l = (-t - x) / c;
  const double qh = gauss_q(h);
  const double ql_upper = gauss_q(-l);  // P(Z < l)
  const double ph = gauss_pdf(h);
  const double pl = gauss_pdf(l);

  ChannelMoments out;
  out.active_probability = qh + ql_upper;
  // Z > h: eta - x = cZ - t; Z < l: eta - x = cZ + t; otherwise eta - x = -x.
  const double above = c * c * (qh + h * ph) - 2.0 * c * t * ph + t * t * qh;
  const double below = c * c * (ql_upper - l * pl) - 2.0 * c * t * pl + t * t * ql_upper;
  const double dead = x * x * (gauss_q(l) - qh);
  out.mse = above + below + dead;
  return out;
}

ChannelMoments channel_moments(const SparsePrior& prior, double c, double t) {
  ChannelMoments total;
  for (const auto& atom : prior.full_law()) {
    const auto m = point_mass_channel(atom.value, c, t);
    total.active_probability += atom.weight * m.active_probability;
    total.mse += atom.weight * m.mse;
  }
  return total;
}

}  // namespace corrlasso
