#include <gtest/gtest.h>

#include <cmath>

#include "mpthermo/dynamics.hpp"

using mpt::BernoulliExample;

TEST(Sampler, OrbitsAreReproducible) {
  const auto ex = BernoulliExample::make(0.3);
  const mpt::OrbitSampler a(ex.measure, 42), b(ex.measure, 42);
  EXPECT_EQ(a.orbit(7, 50), b.orbit(7, 50));
  EXPECT_NE(a.orbit(7, 50), a.orbit(8, 50));
  EXPECT_TRUE(a.positive_on_cylinders());
}

TEST(Birkhoff, MaxPlusSumAndLimit) {
  const mpt::DepthKFunction f(2, 1, {1.0, 0.0});
  const std::vector<int> x{1, 1, 0, 1};
  EXPECT_EQ(mpt::maxplus_birkhoff(f, x, 2), 0.0);
  EXPECT_EQ(mpt::maxplus_birkhoff(f, x, 3), 1.0);
  const auto ex = BernoulliExample::make(0.5);
  const auto report = mpt::birkhoff_limit_test(mpt::OrbitSampler(ex.measure, 3), ex.f, 100, 200);
  EXPECT_EQ(report.attained, 100u);
  EXPECT_EQ(report.supremum, 1.0);
  EXPECT_NEAR(report.log_miss_probability, 200.0 * std::log(0.5), 1e-9);
}

TEST(Partition, ExactFormula) {
  // e^{ns}(1 - p^n) + p^n
  const auto v = mpt::partition_function_exact(0.5, -0.2, 10);
  const double expected = std::exp(-2.0) * (1.0 - std::pow(0.5, 10)) + std::pow(0.5, 10);
  EXPECT_NEAR(v.integral, expected, 1e-15);
  EXPECT_NEAR(v.c, std::log(expected) / 10.0, 1e-15);
  // frozen reference from the command-line run
  EXPECT_NEAR(mpt::partition_function_exact(0.5, -0.6931471805599453, 20).c, -0.65848984537381161, 1e-14);
  // deep tails stay finite in log space
  EXPECT_TRUE(std::isfinite(mpt::partition_function_exact(0.5, -50.0, 100000).c));
}

TEST(Partition, CylinderSumMatchesExact) {
  for (double p : {0.2, 0.5, 0.9}) {
    const auto ex = BernoulliExample::make(p);
    for (std::size_t n : {1u, 4u, 12u}) {
      const double s = -0.7;
      EXPECT_NEAR(mpt::partition_integral_cylinders(ex.measure, ex.f, s, n),
                  mpt::partition_function_exact(p, s, n).integral, 1e-12);
    }
  }
}

TEST(Partition, LimitIsMaxOfSAndLogP) {
  EXPECT_EQ(mpt::partition_limit(0.5, -0.2), -0.2);
  EXPECT_EQ(mpt::partition_limit(0.5, -2.0), std::log(0.5));
  EXPECT_NEAR(mpt::partition_function_exact(0.5, -2.0, 4000).c, std::log(0.5), 1e-3);
}

TEST(Partition, MonteCarloIntervalCoversExactForShortOrbits) {
  const auto ex = BernoulliExample::make(0.5);
  mpt::MonteCarloOptions opts;
  opts.samples = 20000;
  const auto e = mpt::partition_function_mc(mpt::OrbitSampler(ex.measure, 1), ex.f, -0.2, 5, opts);
  const double exact = mpt::partition_function_exact(0.5, -0.2, 5).c;
  EXPECT_LE(e.ci_low, exact);
  EXPECT_GE(e.ci_high, exact);
  EXPECT_EQ(e.samples, 20000u);
}

TEST(Ldp, FrozenBoundForFairCoin) {
  // inf over t of tb + max(-t, log p) is b log p at t = -log p
  const auto est = mpt::empirical_rate(0.5, 0.5, {1, 5, 10, 20});
  EXPECT_NEAR(est.bound.bound, -0.34657359027997264, 1e-9);
  EXPECT_NEAR(est.bound.t_star, std::log(2.0), 1e-6);
  EXPECT_NEAR(est.limsup, std::log(0.5), 1e-12);
  for (double r : est.rates) EXPECT_NEAR(r, std::log(0.5), 1e-12);
  EXPECT_LE(est.limsup, est.bound.bound);
}

TEST(Ldp, BoundDominatesRateAcrossParameters) {
  for (double p : {0.1, 0.3, 0.7, 0.95}) {
    for (double b : {0.1, 0.5, 0.9}) {
      const auto est = mpt::empirical_rate(p, b, {10, 40});
      EXPECT_LE(est.limsup, est.bound.bound + 1e-9) << p << ' ' << b;
    }
  }
}

TEST(Ldp, Preconditions) {
  EXPECT_THROW(BernoulliExample::make(1.5), mpt::PreconditionError);
  EXPECT_THROW(mpt::ldp_upper_bound([](double) { return 0.0; }, 1.0, 1.0, 5.0), mpt::PreconditionError);
  EXPECT_THROW(mpt::empirical_rate(0.5, 0.5, {}), mpt::PreconditionError);
}

TEST(MaxsumTail, MatchesClosedForm) {
  const auto ex = BernoulliExample::make(0.3);
  // max-sum <= 1/2 means every symbol carries f = 0: probability p^n
  EXPECT_NEAR(mpt::maxsum_tail_cylinders(ex.measure, ex.f, 0.5, 8), std::pow(0.3, 8), 1e-15);
}

TEST(Convexity, MaxPlusConvexityOfC) {
  // f + 1 has minimum 1 and shifts c by s
  const auto c = [](double s) { return s + mpt::partition_function_exact(0.4, s, 6).c; };
  for (double s : {-1.0, -0.3, 0.2}) {
    for (double t : {-0.8, 0.0, 0.5}) {
      EXPECT_TRUE(mpt::c_maxplus_convexity_check(c, 1.0, s, t, 0.0, -0.4).holds());
      EXPECT_TRUE(mpt::c_maxplus_convexity_check(c, 1.0, s, t, -0.7, 0.0).holds());
    }
  }
  EXPECT_THROW(mpt::c_maxplus_convexity_check(c, 0.5, 0.1, 0.2, 0.0, -1.0), mpt::PreconditionError);
  EXPECT_THROW(mpt::c_maxplus_convexity_check(c, 1.0, 0.1, 0.2, -0.5, -1.0), mpt::PreconditionError);
}
