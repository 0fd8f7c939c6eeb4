#include <gtest/gtest.h>

#include <cmath>

#include "corrlasso/error.hpp"
#include "corrlasso/signal_priors.hpp"
#include "oracles.hpp"

using namespace corrlasso;

TEST(SampleSignal, DefaultSizeHasFortyOnes) {
  const auto prior = SparsePrior::bernoulli(0.1);
  for (std::uint64_t seed : {0u, 1u, 77u}) {
    const auto x = sample_signal(prior, 400, seed);
    EXPECT_EQ(x.k(), 40u);
    EXPECT_EQ((x.entries.array() == 1.0).count(), 40);
    EXPECT_EQ((x.entries.array() == 0.0).count(), 360);
    for (auto i : x.support) EXPECT_EQ(x.entries(i), 1.0);
  }
}

TEST(SampleSignal, TinyAndDeterministic) {
  const auto x = sample_signal(SparsePrior::bernoulli(0.5), 2, 9);
  EXPECT_EQ(x.entries.sum(), 1.0);
  const auto a = sample_signal(SparsePrior::bernoulli(0.1), 400, 123);
  const auto b = sample_signal(SparsePrior::bernoulli(0.1), 400, 123);
  EXPECT_EQ(a.entries, b.entries);
  EXPECT_EQ(a.support, b.support);
}

TEST(SampleSignal, SupportSpreadsOverIndices) {
  // Uniform subsets: each index is on support with probability k/n.
  std::vector<int> hits(50, 0);
  for (std::uint64_t s = 0; s < 2000; ++s) {
    for (auto i : sample_signal(SparsePrior::bernoulli(0.2), 50, s).support) ++hits[i];
  }
  for (int h : hits) EXPECT_NEAR(h / 2000.0, 0.2, 0.05);
}

TEST(SampleSignal, Rejects) {
  EXPECT_THROW(support_size(0.001, 100), InvalidArgument);
  EXPECT_THROW(support_size(0.999, 100), InvalidArgument);
  EXPECT_THROW(SparsePrior::bernoulli(0.0), InvalidArgument);
  EXPECT_THROW(SparsePrior::generic(0.1, {{1.0, 0.5}, {2.0, 0.4}}), InvalidArgument);
  EXPECT_THROW(SparsePrior::generic(0.1, {{0.0, 1.0}}), InvalidArgument);
}

TEST(SampleSignal, GenericAtoms) {
  const auto prior = SparsePrior::generic(0.25, {{-1.0, 0.5}, {2.0, 0.5}});
  const auto x = sample_signal(prior, 400, 4);
  EXPECT_EQ(x.k(), 100u);
  for (auto i : x.support) EXPECT_TRUE(x.entries(i) == -1.0 || x.entries(i) == 2.0);
  EXPECT_NEAR(prior.second_moment(), 0.25 * 2.5, 1e-15);
}

TEST(ExpectationE, ClosedFormAgainstQuadratureOracle) {
  EXPECT_NEAR(expectation_e_bernoulli(0.1, 1.0, 0.5), oracle::expect_e_bernoulli(0.1, 1.0, 0.5),
              1e-8);
  for (double kappa : {0.05, 0.1, 0.3}) {
    for (int i = 0; i < 10; ++i) {
      for (int j = 0; j < 10; ++j) {
        const double c = 0.05 * std::pow(1.6, i);
        const double t = 0.02 * std::pow(1.7, j);
        EXPECT_NEAR(expectation_e_bernoulli(kappa, c, t), oracle::expect_e_bernoulli(kappa, c, t),
                    1e-8)
            << kappa << " " << c << " " << t;
      }
    }
  }
}

TEST(ExpectationE, LargeThresholdLimit) {
  EXPECT_NEAR(expectation_e(SparsePrior::bernoulli(0.1), 1.0, 50.0), 0.55, 1e-6);
}

TEST(ExpectationE, PureNoiseLimit) {
  for (double c : {0.3, 1.0, 2.0}) {
    for (double t : {0.1, 0.7, 2.5}) {
      const double s = t / c;
      const double oracle_value = oracle::expect_e_bernoulli(0.0, c, t);
      const double direct = 2.0 * (t * c * oracle::phi(s) - 0.5 * t * t * oracle::q(s)) +
                            0.5 * c * c * (1.0 - 2.0 * oracle::q(s) - 2.0 * s * oracle::phi(s));
      EXPECT_NEAR(oracle_value, direct, 1e-10);
      EXPECT_NEAR(expectation_e_bernoulli(1e-300, c, t), direct, 1e-10);
    }
  }
}

TEST(ExpectationE, NondecreasingInThresholdAndNonnegative) {
  // e(a; t) grows with t toward a^2 / 2.
  const auto prior = SparsePrior::bernoulli(0.1);
  for (double c : {0.1, 0.5, 1.5}) {
    double prev = 0.0;
    for (double t = 0.01; t < 5.0; t *= 1.3) {
      const double v = expectation_e(prior, c, t);
      EXPECT_GE(v, 0.0);
      EXPECT_GE(v, prev - 1e-14);
      EXPECT_LE(v, 0.5 * (0.1 + c * c) + 1e-14);
      prev = v;
    }
  }
}

TEST(ExpectationE, GenericPriorMatchesOracle) {
  const auto prior = SparsePrior::generic(0.2, {{-1.0, 0.3}, {2.0, 0.7}});
  for (double c : {0.2, 1.0}) {
    for (double t : {0.1, 0.9}) {
      double want = 0.8 * oracle::gauss_expect([&](double z) { return oracle::e_cost(c * z, t); },
                                               {t / c, -t / c});
      for (auto [x, w] : std::vector<std::pair<double, double>>{{-1.0, 0.3}, {2.0, 0.7}}) {
        want += 0.2 * w *
                oracle::gauss_expect([&](double z) { return oracle::e_cost(x + c * z, t); },
                                     {(t - x) / c, (-t - x) / c});
      }
      EXPECT_NEAR(expectation_e(prior, c, t), want, 1e-10);
    }
  }
  const auto as_generic = SparsePrior::generic(0.1, {{1.0, 1.0}});
  EXPECT_NEAR(expectation_e_quadrature(as_generic, 0.7, 0.3), expectation_e_bernoulli(0.1, 0.7, 0.3),
              1e-12);
}

TEST(ExpectationE, Rejects) {
  EXPECT_THROW(expectation_e(SparsePrior::bernoulli(0.1), 0.0, 1.0), InvalidArgument);
  EXPECT_THROW(expectation_e(SparsePrior::bernoulli(0.1), 1.0, -1.0), InvalidArgument);
}

TEST(ChannelMoments, PointMassAgainstOracle) {
  for (double x : {0.0, 1.0, -0.4}) {
    for (double c : {0.05, 0.8}) {
      for (double t : {0.02, 0.6}) {
        const auto m = point_mass_channel(x, c, t);
        const std::vector<double> cuts{(t - x) / c, (-t - x) / c};
        const double p = oracle::gauss_expect(
            [&](double z) { return std::abs(x + c * z) > t ? 1.0 : 0.0; }, cuts);
        const double mse = oracle::gauss_expect(
            [&](double z) {
              const double d = oracle::eta(x + c * z, t) - x;
              return d * d;
            },
            cuts);
        EXPECT_NEAR(m.active_probability, p, 1e-12);
        EXPECT_NEAR(m.mse, mse, 1e-12);
      }
    }
  }
}
