#include <gtest/gtest.h>

#include <cmath>

#include "mpthermo/ifs.hpp"
#include "mpthermo/transport.hpp"

using mpt::CylinderMeasure;
using mpt::ShiftSpace;

namespace {
mpt::WeightedJacobianFamily bernoulli_family(const ShiftSpace& space) {
  return mpt::WeightedJacobianFamily(
      space, {mpt::make_bernoulli_jacobian(0.3, space), mpt::make_bernoulli_jacobian(0.7, space)}, {0.0, -1.0});
}
double first_cylinder(const CylinderMeasure& m) { return m.coarsen(1)[0]; }
}  // namespace

TEST(WeightedFamily, ValidatesWeights) {
  const ShiftSpace space(2, 0.2);
  const auto J = mpt::make_bernoulli_jacobian(0.3, space);
  EXPECT_THROW(mpt::WeightedJacobianFamily(space, {J, J}, {-0.5, -1.0}), mpt::PreconditionError);
  EXPECT_THROW(mpt::WeightedJacobianFamily(space, {J, J}, {0.0, 0.5}), mpt::PreconditionError);
  EXPECT_THROW(mpt::WeightedJacobianFamily(space, {J}, {0.0, 0.0}), mpt::PreconditionError);
  EXPECT_EQ(bernoulli_family(space).max_jacobian_depth(), 1u);
}

TEST(Attractor, LeafCountWordsAndWeights) {
  const ShiftSpace space(2, 0.2);
  const auto fam = bernoulli_family(space);
  const auto sample = mpt::attractor_build(fam, 4, CylinderMeasure::trivial(space));
  ASSERT_EQ(sample.leaves.size(), 16u);
  EXPECT_DOUBLE_EQ(sample.rate, 0.6);
  for (const auto& leaf : sample.leaves) {
    double w = 0.0;
    for (int s : leaf.word.symbols()) w += fam.weight(static_cast<std::size_t>(s));
    EXPECT_EQ(leaf.weight, w);
  }
  std::size_t members = 0;
  for (const auto& c : sample.clusters) {
    members += c.members.size();
    EXPECT_LE(c.diameter, sample.epsilon);
  }
  EXPECT_EQ(members, 16u);
}

TEST(Attractor, MatchesBruteForceBitwise) {
  const ShiftSpace space(2, 0.2);
  const auto fam = bernoulli_family(space);
  const auto nu0 = CylinderMeasure::uniform(space, 1);
  const auto sample = mpt::attractor_build(fam, 6, nu0);
  const auto cmp = mpt::compare_with_brute_force(fam, 6, nu0, sample);
  EXPECT_EQ(cmp.leaves, 64u);
  EXPECT_TRUE(cmp.bitwise_equal);
  EXPECT_EQ(cmp.max_mass_difference, 0.0);
}

TEST(Attractor, RejectsOversizedRequests) {
  const ShiftSpace space(2, 0.2);
  mpt::AttractorOptions opts;
  opts.leaf_budget = 100;
  EXPECT_THROW(mpt::attractor_build(bernoulli_family(space), 8, CylinderMeasure::trivial(space), opts),
               mpt::PreconditionError);
}

TEST(Attractor, WeightFloorPrunesBranches) {
  const ShiftSpace space(2, 0.2);
  mpt::AttractorOptions opts;
  opts.weight_floor = -1.5;
  const auto sample = mpt::attractor_build(bernoulli_family(space), 4, CylinderMeasure::trivial(space), opts);
  // at most one use of the -1 map survives: 1 + 4 words
  EXPECT_EQ(sample.leaves.size(), 5u);
  EXPECT_GT(sample.pruned, 0u);
}

TEST(DensityEstimate, LeafMeasuresCarryTheirBestWeight) {
  const ShiftSpace space(2, 0.2);
  const auto sample = mpt::attractor_build(bernoulli_family(space), 5, CylinderMeasure::trivial(space));
  const auto at_zero_word = mpt::density_entropy_estimate(sample, sample.leaves.front().measure);
  EXPECT_EQ(at_zero_word.value, mpt::MaxPlusValue::unit());
  EXPECT_GE(at_zero_word.matches, 1u);
  const auto far = mpt::density_entropy_estimate(sample, CylinderMeasure::point_mass(space, mpt::Word({1, 1, 1}, 2)));
  EXPECT_TRUE(far.value.is_bottom());
  EXPECT_LE(far.value, far.upper);
}

TEST(InvariantPressure, FrozenValues) {
  const ShiftSpace space(2, 0.2);
  const auto fam = bernoulli_family(space);
  const auto nu0 = CylinderMeasure::trivial(space);
  const auto zero = mpt::invariant_pressure_solve(fam, [](const CylinderMeasure&) { return 0.0; }, 0.0, 6, nu0);
  EXPECT_EQ(zero.value, 0.0);
  // max(0 + 0.3, -1 + 0.7)
  const auto ell = mpt::invariant_pressure_solve(fam, first_cylinder, 1.0, 6, nu0);
  EXPECT_NEAR(ell.value, 0.3, 1e-15);
  EXPECT_NEAR(ell.error_bound, std::pow(0.6, 6) / 0.4, 1e-15);
  EXPECT_LE(ell.fixed_point_residual, ell.error_bound);
  EXPECT_EQ(ell.argmax.symbols().front(), 0);
}

TEST(InvariantPressure, ConvergesInN) {
  const ShiftSpace space(2, 0.2);
  const auto fam = bernoulli_family(space);
  const auto nu0 = CylinderMeasure::uniform(space, 2);
  const mpt::MeasureObservable g = [](const CylinderMeasure& m) { return m.coarsen(2)[1] - m.coarsen(2)[2]; };
  double previous = mpt::invariant_pressure_solve(fam, g, 2.0, 2, nu0).value;
  for (std::size_t N = 3; N <= 8; ++N) {
    const auto cur = mpt::invariant_pressure_solve(fam, g, 2.0, N, nu0);
    EXPECT_LE(std::abs(cur.value - previous), 2.0 * std::pow(0.6, N - 1) / 0.4 + 1e-12);
    previous = cur.value;
  }
}

TEST(Pushforward, InvarianceOnAGrid) {
  std::vector<mpt::ProbVector> pts;
  for (int k = 0; k <= 10; ++k) pts.emplace_back(std::vector<double>{k / 10.0, 1.0 - k / 10.0});
  const std::vector<std::size_t> swap{1, 0};
  EXPECT_NEAR(mpt::pushforward(pts[3], swap)[0], 0.7, 1e-15);
  std::vector<mpt::MaxPlusValue> flat(pts.size(), mpt::MaxPlusValue::unit());
  const auto inv = mpt::pushforward_invariance_check(mpt::DensitySample<mpt::ProbVector>(pts, flat), swap, {});
  EXPECT_TRUE(inv.invariant);
  std::vector<mpt::MaxPlusValue> tilted;
  for (int k = 0; k <= 10; ++k) tilted.emplace_back(-k / 10.0);
  const auto not_inv = mpt::pushforward_invariance_check(mpt::DensitySample<mpt::ProbVector>(pts, tilted), swap, {});
  EXPECT_FALSE(not_inv.invariant);
  EXPECT_TRUE(not_inv.witness.has_value());
  EXPECT_GT(not_inv.density_residual, 0.5);
}
