#include <gtest/gtest.h>

#include <cmath>

#include "mpthermo/simplex.hpp"

using mpt::Level1Observable;
using mpt::ProbVector;

namespace {
mpt::SimplexGrid grid2(std::size_t resolution = 400) {
  mpt::SimplexGrid g;
  g.dimension = 2;
  g.resolution = resolution;
  return g;
}
}  // namespace

TEST(ProbVector, ValidatesMassesAndTotal) {
  EXPECT_NO_THROW(ProbVector({0.25, 0.75}));
  EXPECT_THROW(ProbVector({0.5, 0.6}), mpt::PreconditionError);
  EXPECT_THROW(ProbVector({-0.1, 1.1}), mpt::PreconditionError);
  EXPECT_EQ(ProbVector::uniform(4)[2], 0.25);
  EXPECT_EQ(ProbVector::point_mass(3, 1).masses(), (std::vector<double>{0, 1, 0}));
}

TEST(Entropy, ShannonAndLogSumExp) {
  EXPECT_NEAR(mpt::shannon_entropy(ProbVector::uniform(3)), std::log(3.0), 1e-15);
  EXPECT_EQ(mpt::shannon_entropy(ProbVector::point_mass(2, 0)), 0.0);
  const std::vector<double> big{1000.0, 1000.0};
  EXPECT_NEAR(mpt::log_sum_exp(big), 1000.0 + std::log(2.0), 1e-12);
}

TEST(Gibbs, SoftmaxIsTheShannonEquilibrium) {
  const Level1Observable g{{0.5, 0.0}};
  const auto p = mpt::gibbs_solution(g);
  EXPECT_NEAR(p[0], std::exp(0.5) / (1.0 + std::exp(0.5)), 1e-15);
  const auto eq = mpt::level2_pressure(mpt::shannon_density(), mpt::inclusion_j(g), grid2());
  // frozen: log(1 + e^{1/2})
  EXPECT_NEAR(eq.value, 0.97407698418010669, 1e-12);
  ASSERT_EQ(eq.equilibria.size(), 1u);
  EXPECT_NEAR(eq.equilibria[0][0], p[0], 1e-6);
}

TEST(Level2Pressure, TwoBumpPicksTheRightBump) {
  const mpt::Level2Density h = [](const ProbVector& p) {
    return mpt::MaxPlusValue(std::max(-20.0 * (p[0] - 0.2) * (p[0] - 0.2), -20.0 * (p[0] - 0.8) * (p[0] - 0.8)));
  };
  const auto eq = mpt::level2_pressure(h, mpt::inclusion_j(Level1Observable{{0.5, 0.0}}), grid2());
  // maximizer 0.8 + 0.5/40, value 0.403125
  EXPECT_NEAR(eq.value, 0.403125, 1e-12);
  ASSERT_EQ(eq.equilibria.size(), 1u);
  EXPECT_NEAR(eq.equilibria[0][0], 0.8125, 1e-9);
}

TEST(Level2Pressure, SymmetricTwoBumpHasTwoEquilibria) {
  const mpt::Level2Density h = [](const ProbVector& p) {
    return mpt::MaxPlusValue(std::max(-20.0 * (p[0] - 0.2) * (p[0] - 0.2), -20.0 * (p[0] - 0.8) * (p[0] - 0.8)));
  };
  const auto eq = mpt::level2_pressure(h, [](const ProbVector&) { return 0.0; }, grid2());
  EXPECT_NEAR(eq.value, 0.0, 1e-12);
  EXPECT_EQ(eq.equilibria.size(), 2u);
}

TEST(DeltaDensity, PressureIsEvaluation) {
  const ProbVector at({0.3, 0.7});
  const Level1Observable g{{2.0, -1.0}};
  const auto eq = mpt::level2_pressure(mpt::delta_density(at), mpt::inclusion_j(g), grid2(10));
  EXPECT_NEAR(eq.value, g.integrate(at), 1e-12);
}

TEST(ConvexPressure, AxiomsHoldForShannon) {
  const auto report = mpt::pressure_axioms_C1C2C3(mpt::shannon_density(), grid2(200), 100, 5);
  EXPECT_EQ(report.trials, 100u);
  EXPECT_LE(report.worst(), 1e-9);
}

TEST(ConvexPressure, TranslationShiftsGammaByTheConstant) {
  const Level1Observable phi{{0.3, -0.4}};
  const double a = mpt::convex_pressure_gamma(mpt::shannon_density(), phi, grid2());
  const double b = mpt::convex_pressure_gamma(mpt::shannon_density(), phi.shifted(1.25), grid2());
  EXPECT_NEAR(b - a, 1.25, 1e-12);
}

TEST(EntropyRecovery, RecoversShannonFromAbove) {
  const ProbVector mu({0.6, 0.4});
  const auto rec = mpt::entropy_recovery(mpt::shannon_density(), mu, mpt::coefficient_grid_family(2, -3, 3, 60), grid2());
  EXPECT_GE(rec.value, mpt::shannon_entropy(mu) - 1e-9);
  EXPECT_NEAR(rec.value, mpt::shannon_entropy(mu), 1e-4);
}

TEST(ConcaveEnvelope, FlattensTheValleyBetweenBumps) {
  const mpt::Level2Density h = [](const ProbVector& p) {
    return mpt::MaxPlusValue(std::max(-20.0 * (p[0] - 0.2) * (p[0] - 0.2), -20.0 * (p[0] - 0.8) * (p[0] - 0.8)));
  };
  const mpt::ConcaveEnvelope1D env(h, 10001);
  EXPECT_NEAR(env(ProbVector({0.5, 0.5})).value(), 0.0, 1e-12);
  EXPECT_NEAR(env(ProbVector({0.1, 0.9})).value(), -0.2, 1e-6);
}

TEST(Markov, StationaryAndEntropy) {
  const auto m = mpt::MarkovMeasure::from_rows({ProbVector({0.9, 0.1}), ProbVector({0.3, 0.7})});
  EXPECT_NEAR(m.stationary[0], 0.75, 1e-12);
  const double h = 0.75 * mpt::shannon_entropy(ProbVector({0.9, 0.1})) + 0.25 * mpt::shannon_entropy(ProbVector({0.3, 0.7}));
  EXPECT_NEAR(m.ks_entropy(), h, 1e-12);
  const auto b = mpt::MarkovMeasure::bernoulli(ProbVector({0.2, 0.8}));
  EXPECT_NEAR(b.ks_entropy(), mpt::shannon_entropy(ProbVector({0.2, 0.8})), 1e-15);
  EXPECT_NEAR(b.integrate(Level1Observable{{1.0, 0.0}}), 0.2, 1e-15);
}

TEST(NonlinearPressure, ZeroPotentialGivesMaximalEntropy) {
  const mpt::NonlinearSpec spec{[](double) { return 0.0; }, Level1Observable{{1.0, 0.0}}};
  const auto r = mpt::nonlinear_pressure(spec, mpt::MeasureFamily::Bernoulli, grid2(200));
  EXPECT_NEAR(r.value, std::log(2.0), 1e-9);
}

TEST(NonlinearPressure, LinearFMatchesLogSumExp) {
  const mpt::NonlinearSpec spec{[](double x) { return x; }, Level1Observable{{0.7, 0.0}}};
  const auto r = mpt::nonlinear_pressure(spec, mpt::MeasureFamily::Bernoulli, grid2(200));
  EXPECT_NEAR(r.value, std::log(1.0 + std::exp(0.7)), 1e-9);
}

TEST(SimplexGrid, Validates) {
  mpt::SimplexGrid g;
  g.resolution = 0;
  EXPECT_THROW(g.validate(), mpt::PreconditionError);
  g.resolution = 10000;
  g.dimension = 5;
  EXPECT_THROW(g.validate(), mpt::PreconditionError);
  g.dimension = 3;
  g.resolution = 4;
  EXPECT_EQ(g.points().size(), 15u);
}
