#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "mpthermo/maxplus.hpp"
#include "mpthermo/rng.hpp"

using mpt::MaxPlusValue;

namespace {
const double kInf = std::numeric_limits<double>::infinity();
}

TEST(MaxPlusValue, BottomIsNeutralForOplusAndAbsorbingForOdot) {
  const MaxPlusValue a(2.5);
  EXPECT_EQ(oplus(a, MaxPlusValue::bottom()), a);
  EXPECT_EQ(oplus(MaxPlusValue::bottom(), a), a);
  EXPECT_TRUE(odot(a, MaxPlusValue::bottom()).is_bottom());
  EXPECT_EQ(odot(a, MaxPlusValue::unit()), a);
  EXPECT_EQ(odot(MaxPlusValue(-1.0), MaxPlusValue(3.0)), MaxPlusValue(2.0));
  EXPECT_EQ(oplus(MaxPlusValue(-1.0), MaxPlusValue(3.0)), MaxPlusValue(3.0));
}

TEST(MaxPlusValue, RejectsNonFinitePayloads) {
  EXPECT_THROW(MaxPlusValue(std::nan("")), mpt::PreconditionError);
  EXPECT_THROW(MaxPlusValue{kInf}, mpt::PreconditionError);
  EXPECT_THROW(MaxPlusValue{-kInf}, mpt::PreconditionError);
  EXPECT_TRUE(MaxPlusValue::from_extended(-kInf).is_bottom());
  EXPECT_EQ(MaxPlusValue::from_extended(1.5), MaxPlusValue(1.5));
  EXPECT_THROW(MaxPlusValue::bottom().value(), mpt::PreconditionError);
  EXPECT_EQ(MaxPlusValue::bottom().extended(), -kInf);
}

TEST(MaxPlusValue, OrderingPutsBottomBelowEverything) {
  EXPECT_LT(MaxPlusValue::bottom(), MaxPlusValue(-1e300));
  EXPECT_LT(MaxPlusValue(1.0), MaxPlusValue(2.0));
  EXPECT_EQ(MaxPlusValue::bottom(), MaxPlusValue());
}

TEST(MaxPlusValue, Residual) {
  EXPECT_EQ(mpt::residual(MaxPlusValue(1.0), MaxPlusValue(3.5)), 2.5);
  EXPECT_EQ(mpt::residual(MaxPlusValue::bottom(), MaxPlusValue::bottom()), 0.0);
  EXPECT_EQ(mpt::residual(MaxPlusValue::bottom(), MaxPlusValue(0.0)), kInf);
}

TEST(MaxPlusValue, StreamsBottomAsMinusInfinity) {
  std::ostringstream os;
  os << MaxPlusValue::bottom();
  EXPECT_NE(os.str().find("inf"), std::string::npos);
}

// Semiring laws on random values, bottom included.
TEST(MaxPlusValue, SemiringLawsHoldOnRandomTriples) {
  mpt::Rng rng(7);
  const auto draw = [&] { return rng.uniform() < 0.2 ? MaxPlusValue::bottom() : MaxPlusValue(rng.uniform(-5, 5)); };
  for (int i = 0; i < 2000; ++i) {
    const auto a = draw(), b = draw(), c = draw();
    EXPECT_EQ(oplus(a, b), oplus(b, a));
    EXPECT_EQ(oplus(oplus(a, b), c), oplus(a, oplus(b, c)));
    EXPECT_EQ(oplus(a, a), a);
    EXPECT_EQ(odot(a, b), odot(b, a));
    EXPECT_LE(mpt::residual(odot(a, oplus(b, c)), oplus(odot(a, b), odot(a, c))), 1e-12);
  }
}

TEST(DensitySample, NormalizationShiftsTheSupremumToZero) {
  mpt::DensitySample<int> h({0, 1, 2}, {MaxPlusValue(-3.0), MaxPlusValue(1.5), MaxPlusValue::bottom()});
  EXPECT_EQ(h.supremum(), MaxPlusValue(1.5));
  EXPECT_FALSE(h.is_normalized());
  const auto n = h.normalized();
  EXPECT_TRUE(n.is_normalized());
  EXPECT_EQ(n.values()[0], MaxPlusValue(-4.5));
  EXPECT_TRUE(n.values()[2].is_bottom());
  mpt::DensitySample<int> empty({0}, {MaxPlusValue::bottom()});
  EXPECT_FALSE(empty.has_support());
  EXPECT_THROW(empty.normalized(), mpt::PreconditionError);
  EXPECT_THROW(mpt::DensitySample<int>({0, 1}, {MaxPlusValue(0.0)}), mpt::PreconditionError);
}

TEST(PressureEval, KeepsTiedMaximizers) {
  mpt::DensitySample<int> h({0, 1, 2, 3}, {MaxPlusValue(1.0), MaxPlusValue(-1.0), MaxPlusValue::bottom(), MaxPlusValue(-2.0)});
  const auto r = mpt::pressure_eval(h, [](int x) { return static_cast<double>(x); });
  EXPECT_EQ(r.value, MaxPlusValue(1.0));
  EXPECT_EQ(r.argmax, (std::vector<std::size_t>{0, 3}));
}

TEST(IdempotentPressure, AxiomsHoldOnRandomDensities) {
  mpt::Rng rng(11);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<int> pts;
    std::vector<MaxPlusValue> vals;
    for (int i = 0; i < 30; ++i) {
      pts.push_back(i);
      vals.push_back(rng.uniform() < 0.3 ? MaxPlusValue::bottom() : MaxPlusValue(-rng.uniform(0, 4)));
    }
    vals[rng.index(30)] = MaxPlusValue::unit();
    const mpt::IdempotentPressure<int> ell(mpt::DensitySample<int>(pts, vals));
    std::vector<double> g(30), g2(30);
    for (auto& x : g) x = rng.uniform(-3, 3);
    for (auto& x : g2) x = rng.uniform(-3, 3);
    const auto report = mpt::axioms_check(
        ell, [&](int x) { return g[x]; }, [&](int x) { return g2[x]; }, rng.uniform(-2, 2));
    EXPECT_LE(report.max_residual(), 1e-12);
    // l(0) = 0 for a normalized density
    EXPECT_EQ(ell([](int) { return 0.0; }), MaxPlusValue::unit());
  }
}

TEST(IdempotentPressure, RejectsDensityWithoutSupport) {
  EXPECT_THROW(mpt::IdempotentPressure<int>(mpt::DensitySample<int>({0}, {MaxPlusValue::bottom()})),
               mpt::PreconditionError);
}
