#include <gtest/gtest.h>

#include <cmath>

#include "mpthermo/rng.hpp"
#include "mpthermo/shift.hpp"

using mpt::CylinderMeasure;
using mpt::ShiftSpace;
using mpt::Word;

TEST(ShiftSpace, ValidatesParameters) {
  EXPECT_NO_THROW(ShiftSpace(2, 0.3));
  EXPECT_THROW(ShiftSpace(2, 1.0 / 3.0), mpt::PreconditionError);
  EXPECT_THROW(ShiftSpace(1, 0.1), mpt::PreconditionError);
  EXPECT_THROW(ShiftSpace(3, 0.0), mpt::PreconditionError);
  EXPECT_DOUBLE_EQ(ShiftSpace(3, 0.2).contraction_rate(), 0.8);
  EXPECT_EQ(ShiftSpace(3, 0.2).words(4), 81u);
}

TEST(Word, EncodingIsLexicographic) {
  const Word w({1, 0, 2}, 3);
  EXPECT_EQ(w.encode(), 9u + 0u + 2u);
  EXPECT_EQ(Word::decode(11, 3, 3).symbols(), w.symbols());
  for (std::size_t i = 0; i < 27; ++i) EXPECT_EQ(Word::decode(i, 3, 3).encode(), i);
  EXPECT_THROW(Word({3}, 3), mpt::PreconditionError);
}

TEST(Word, MetricIsGammaToTheFirstDifference) {
  const ShiftSpace space(2, 0.25);
  EXPECT_EQ(mpt::first_difference(Word({0, 1, 1}, 2).encode(), Word({0, 1, 0}, 2).encode(), 3, 2), 2u);
  EXPECT_DOUBLE_EQ(mpt::word_metric(Word({0, 1, 1}, 2), Word({0, 1, 0}, 2), space), 0.0625);
  EXPECT_DOUBLE_EQ(mpt::word_metric(Word({0, 1}, 2), Word({1, 1}, 2), space), 1.0);
  EXPECT_EQ(mpt::word_metric(Word({0, 1}, 2), Word({0, 1}, 2), space), 0.0);
}

TEST(DepthKFunction, LipschitzConstant) {
  const ShiftSpace space(2, 0.25);
  // f depends on the second symbol only: jump 1 at distance gamma
  const mpt::DepthKFunction f(2, 2, {0.0, 1.0, 0.0, 1.0});
  EXPECT_DOUBLE_EQ(mpt::lipschitz_constant(f, space), 4.0);
  EXPECT_EQ(f.at_encoded(Word({1, 1, 0}, 2).encode(), 3), 1.0);
  EXPECT_EQ(f.sup_norm(), 1.0);
}

TEST(Jacobian, ValidatesNormalizationAndLipschitz) {
  const ShiftSpace space(2, 0.25);
  EXPECT_NO_THROW(mpt::make_bernoulli_jacobian(0.3, space));
  EXPECT_THROW(mpt::Jacobian(mpt::DepthKFunction(2, 1, {0.5, 0.6}), space), mpt::PreconditionError);
  // normalized but Lip = |0.9-0.1|/gamma > 1
  EXPECT_THROW(mpt::Jacobian(mpt::DepthKFunction(2, 2, {0.9, 0.1, 0.1, 0.9}), space), mpt::PreconditionError);
  const std::vector<double> probs{0.2, 0.3, 0.5};
  EXPECT_NEAR(mpt::make_product_jacobian(probs, ShiftSpace(3, 0.2))[2], 0.5, 0);
}

TEST(Jacobian, RandomJacobiansRespectTheBound) {
  mpt::Rng rng(3);
  for (std::size_t d : {2u, 3u}) {
    const ShiftSpace space(d, 0.9 / static_cast<double>(d + 1));
    for (std::size_t depth = 1; depth <= 4; ++depth) {
      for (int i = 0; i < 20; ++i) {
        const auto J = mpt::random_jacobian(space, depth, rng);
        EXPECT_LE(J.lipschitz(), 1.0 + 1e-9);
        EXPECT_EQ(J.depth(), depth);
      }
    }
  }
}

TEST(CylinderMeasure, RefineAndCoarsenRoundTrip) {
  mpt::Rng rng(5);
  const ShiftSpace space(3, 0.2);
  const auto mu = CylinderMeasure::random(space, 3, rng);
  const auto fine = mu.refine();
  EXPECT_EQ(fine.depth(), 4u);
  const auto back = fine.coarsen(3);
  for (std::size_t i = 0; i < mu.masses().size(); ++i) EXPECT_NEAR(back[i], mu[i], 1e-15);
  EXPECT_NEAR(mu.cylinder(Word({2}, 3)), mu.coarsen(1)[2], 1e-15);
  EXPECT_EQ(mu.at_depth(3), mu);
  EXPECT_THROW(CylinderMeasure(space, 1, {0.5, 0.5, 0.5}), mpt::PreconditionError);
}

TEST(CylinderMeasure, ProductMeasure) {
  const ShiftSpace space(2, 0.3);
  const auto mu = CylinderMeasure::product(space, {{0.3, 0.7}, {0.6, 0.4}});
  EXPECT_NEAR(mu[Word({1, 0}, 2).encode()], 0.42, 1e-15);
  EXPECT_NEAR(CylinderMeasure::point_mass(space, Word({1, 1}, 2))[3], 1.0, 0);
}

TEST(Operators, DualIsAdjointOfTransfer) {
  mpt::Rng rng(9);
  const ShiftSpace space(2, 0.3);
  for (int trial = 0; trial < 50; ++trial) {
    const auto J = mpt::random_jacobian(space, 1 + rng.index(3), rng);
    const auto mu = CylinderMeasure::random(space, 3, rng);
    std::vector<double> vals(16);
    for (auto& v : vals) v = rng.uniform(-1, 1);
    const mpt::DepthKFunction f(2, 4, vals);
    const double lhs = mpt::dual_apply(J, mu).integrate(f);
    const double rhs = mu.integrate(mpt::transfer_apply(J, f));
    EXPECT_NEAR(lhs, rhs, 1e-12);
  }
}

TEST(Operators, PushforwardUndoesDual) {
  mpt::Rng rng(10);
  const ShiftSpace space(3, 0.2);
  const auto J = mpt::random_jacobian(space, 2, rng);
  const auto mu = CylinderMeasure::random(space, 2, rng);
  const auto back = mpt::pushforward_apply(mpt::dual_apply(J, mu));
  for (std::size_t i = 0; i < mu.masses().size(); ++i) EXPECT_NEAR(back[i], mu[i], 1e-15);
}

TEST(Operators, DualRequiresEnoughDepth) {
  mpt::Rng rng(1);
  const ShiftSpace space(2, 0.3);
  const auto J = mpt::random_jacobian(space, 3, rng);
  EXPECT_THROW(mpt::dual_apply(J, CylinderMeasure::trivial(space)), mpt::PreconditionError);
}

TEST(Operators, TransferOfConstantIsConstant) {
  const ShiftSpace space(2, 0.3);
  const auto J = mpt::make_bernoulli_jacobian(0.3, space);
  const auto g = mpt::transfer_apply(J, mpt::DepthKFunction::constant(2, 2.5));
  for (double v : g.values()) EXPECT_NEAR(v, 2.5, 1e-15);
}

TEST(ComposeDuals, BernoulliCompositionIsAProduct) {
  const ShiftSpace space(2, 0.3);
  const std::vector<mpt::Jacobian> js{mpt::make_bernoulli_jacobian(0.3, space), mpt::make_bernoulli_jacobian(0.6, space)};
  const auto r = mpt::compose_duals(js, CylinderMeasure::trivial(space));
  EXPECT_EQ(r.measure.depth(), 2u);
  EXPECT_NEAR(r.measure[Word({0, 1}, 2).encode()], 0.3 * 0.4, 1e-15);
  EXPECT_EQ(r.gaps.size(), 2u);
}
