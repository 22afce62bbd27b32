#include <gtest/gtest.h>

#include "mpthermo/mpifs.hpp"
#include "mpthermo/rng.hpp"

using mpt::MaxPlusValue;
using mpt::MpIFSSystem;

TEST(MpIFS, ValidatesNormalization) {
  EXPECT_THROW(MpIFSSystem(2, {{0, 1}}, {{0.0, -1.0}}), mpt::PreconditionError);
  EXPECT_THROW(MpIFSSystem(2, {{0, 2}}, {{0.0, 0.0}}), mpt::PreconditionError);
  EXPECT_THROW(MpIFSSystem(2, {{0, 1}}, {{0.0, 0.5}}), mpt::PreconditionError);
  EXPECT_NO_THROW(MpIFSSystem(2, {{1, 0}, {0, 0}}, {{0.0, -1.0}, {-2.0, 0.0}}));
}

TEST(MpIFS, HandComputedOperators) {
  // map 0 swaps the points; map 1 sends everything to point 0
  const MpIFSSystem sys(2, {{1, 0}, {0, 0}}, {{0.0, -1.0}, {-2.0, 0.0}});
  const auto Lf = mpt::mpifs_ruelle({3.0, 5.0}, sys);
  EXPECT_EQ(Lf, (mpt::PointTable{5.0, 3.0}));
  const auto image = mpt::mpifs_transfer({MaxPlusValue(0.0), MaxPlusValue(-1.0)}, sys);
  EXPECT_EQ(image[0], MaxPlusValue(-1.0));
  EXPECT_EQ(image[1], MaxPlusValue(0.0));
  EXPECT_EQ(mpt::pressure_of({MaxPlusValue(0.0), MaxPlusValue::bottom()}, {3.0, 9.0}), MaxPlusValue(3.0));
}

TEST(MpIFS, TransferAndRuelleAreDual) {
  mpt::Rng rng(31);
  for (int trial = 0; trial < 200; ++trial) {
    const std::size_t n = 1 + rng.index(12);
    const auto sys = mpt::random_mpifs(n, 1 + rng.index(4), rng);
    mpt::PointDensity lambda(n);
    for (auto& v : lambda) v = rng.uniform() < 0.2 ? MaxPlusValue::bottom() : MaxPlusValue(-rng.uniform(0, 3));
    mpt::PointTable f(n);
    for (auto& x : f) x = rng.uniform(-2, 2);
    const auto a = mpt::pressure_of(mpt::mpifs_transfer(lambda, sys), f);
    const auto b = mpt::pressure_of(lambda, mpt::mpifs_ruelle(f, sys));
    const auto c = mpt::markov_apply(lambda, f, sys);
    EXPECT_LE(mpt::residual(a, b), 1e-12);
    EXPECT_LE(mpt::residual(a, c), 1e-12);
  }
}

TEST(MpIFS, LimitDensityIsInvariant) {
  mpt::Rng rng(32);
  for (int trial = 0; trial < 100; ++trial) {
    const std::size_t n = 1 + rng.index(20);
    const auto sys = mpt::random_mpifs(n, 1 + rng.index(4), rng);
    const auto lambda = mpt::mpifs_limit_density(sys);
    const auto report = mpt::mpifs_invariance_check(lambda, sys, {});
    EXPECT_TRUE(report.all_hold()) << report.transfer_residual;
    MaxPlusValue top;
    for (const auto& v : lambda) top = oplus(top, v);
    EXPECT_EQ(top, MaxPlusValue::unit());
  }
}

TEST(MpIFS, NonInvariantDensityIsRejectedByAllThreeTests) {
  const MpIFSSystem sys(2, {{1, 0}, {0, 0}}, {{0.0, -1.0}, {-2.0, 0.0}});
  const auto report = mpt::mpifs_invariance_check({MaxPlusValue(0.0), MaxPlusValue(-5.0)}, sys, {});
  EXPECT_TRUE(report.agree());
  EXPECT_FALSE(report.all_hold());
}

TEST(MpIFS, ValueIterationOnConstantMaps) {
  const auto sys = mpt::constant_map_system({{0.0, -1.0, -2.0}, {-3.0, 0.0, -1.0}, {-0.5, -4.0, 0.0}});
  const auto it = mpt::mpifs_value_iteration(sys);
  ASSERT_TRUE(it.converged);
  EXPECT_TRUE(mpt::mpifs_invariance_check(it.density, sys, {}).all_hold());
  const auto limit = mpt::mpifs_limit_density(sys);
  for (std::size_t i = 0; i < 3; ++i) EXPECT_LE(mpt::residual(limit[i], it.density[i]), 1e-12);
}

TEST(MpIFS, InverseProblem) {
  const mpt::PointTable h{0.0, -1.0, -2.5};
  const auto sol = mpt::inverse_problem_solve(h);
  EXPECT_EQ(sol.fixed_point_residual, 0.0);
  EXPECT_EQ(sol.pointwise_normalization, 0.0);
  EXPECT_EQ(sol.family_normalization, 0.0);
  mpt::PointDensity lambda{MaxPlusValue(0.0), MaxPlusValue(-1.0), MaxPlusValue(-2.5)};
  EXPECT_TRUE(mpt::mpifs_invariance_check(lambda, sol.system, {}).all_hold());
  EXPECT_THROW(mpt::inverse_problem_solve({-1.0, -2.0}), mpt::PreconditionError);
  EXPECT_THROW(mpt::inverse_problem_solve({0.0, 1.0}), mpt::PreconditionError);
}
