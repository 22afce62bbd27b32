#include <gtest/gtest.h>

#include <cmath>
#include <limits>
#include <sstream>

#include "mpthermo/io.hpp"
#include "mpthermo/rng.hpp"

TEST(FormatDouble, RoundTripsAndNamesSpecials) {
  mpt::Rng rng(41);
  for (int i = 0; i < 1000; ++i) {
    const double x = rng.uniform(-1e6, 1e6) * std::pow(10.0, rng.uniform(-20, 20));
    EXPECT_EQ(std::stod(mpt::format_double(x)), x);
  }
  EXPECT_EQ(mpt::format_double(0.1), "0.10000000000000001");
  EXPECT_EQ(mpt::format_double(std::nan("")), "nan");
  EXPECT_EQ(mpt::format_double(std::numeric_limits<double>::infinity()), "inf");
  EXPECT_EQ(mpt::format_double(-std::numeric_limits<double>::infinity()), "-inf");
}

TEST(Json, MeasureRoundTrip) {
  mpt::Rng rng(42);
  const mpt::ShiftSpace space(3, 0.2);
  const auto mu = mpt::CylinderMeasure::random(space, 3, rng);
  const auto text = mpt::to_json(mu).dump();
  const auto back = mpt::measure_from_json(nlohmann::json::parse(text));
  EXPECT_EQ(back, mu);
  EXPECT_THROW(mpt::measure_from_json(nlohmann::json{{"d", 2}}), mpt::PreconditionError);
}

TEST(Json, AttractorSampleLayout) {
  const mpt::ShiftSpace space(2, 0.2);
  const mpt::WeightedJacobianFamily fam(
      space, {mpt::make_bernoulli_jacobian(0.3, space), mpt::make_bernoulli_jacobian(0.7, space)}, {0.0, -1.0});
  const auto sample = mpt::attractor_build(fam, 3, mpt::CylinderMeasure::trivial(space));
  const auto j = mpt::to_json(sample);
  EXPECT_EQ(j.at("words").size(), 8u);
  EXPECT_EQ(j.at("weights").size(), 8u);
  EXPECT_EQ(j.at("N").get<std::size_t>(), 3u);
  EXPECT_DOUBLE_EQ(j.at("r").get<double>(), 0.6);
  const auto m0 = mpt::measure_from_json(j.at("cylinder_measures")[j.at("measures")[0].get<std::size_t>()]);
  EXPECT_EQ(m0, sample.leaves[0].measure);
}

TEST(Csv, HeaderAndDeterminism) {
  const mpt::ConfigMap config{{"seed", "7"}, {"p", "0.5"}};
  const auto render = [&] {
    std::ostringstream os;
    mpt::CsvWriter csv(os, config, {"a", "b"});
    csv.row({mpt::format_double(1.0 / 3.0), "x"});
    return os.str();
  };
  EXPECT_EQ(render(), "# p=0.5\n# seed=7\na,b\n0.33333333333333331,x\n");
  EXPECT_EQ(render(), render());
  std::ostringstream os;
  mpt::CsvWriter csv(os, {}, {"a", "b"});
  EXPECT_THROW(csv.row({"1"}), mpt::PreconditionError);
}
