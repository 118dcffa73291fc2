#include <cmath>
#include <sstream>

#include <gtest/gtest.h>

#include "loewner/driving.hpp"

using namespace loewner;

TEST(Driving, ConstantPreset) {
  const auto d = make_constant(1.0, Codomain::Unimodular);
  EXPECT_EQ(d.value_at(3.7), cd(1.0));
  EXPECT_TRUE(d.piecewise_constant());
  EXPECT_TRUE(std::isinf(d.horizon()));
}

TEST(Driving, RadialConstantMustBeUnimodular) {
  EXPECT_THROW(make_constant(0.5, Codomain::Unimodular), PreconditionError);
  EXPECT_THROW(make_constant(cd{0.0, 1.0}, Codomain::Real), PreconditionError);
  EXPECT_NO_THROW(make_constant(std::polar(1.0, 2.0), Codomain::Unimodular));
}

TEST(Driving, SqrtPreset) {
  const auto d = make_sqrt(2.0);
  EXPECT_DOUBLE_EQ(d.real_value_at(4.0), 4.0);
  EXPECT_EQ(d.codomain(), Codomain::Real);
  EXPECT_FALSE(d.piecewise_constant());
}

TEST(Driving, LinearTableMidpoint) {
  const auto d = make_table({0.0, 1.0}, {0.0, 2.0}, Interpolation::PiecewiseLinear, Codomain::Real);
  EXPECT_DOUBLE_EQ(d.real_value_at(0.5), 1.0);
}

TEST(Driving, PiecewiseConstantTakesLeftSample) {
  const auto d = make_table({0.0, 1.0, 2.0}, {5.0, -1.0, 3.0}, Interpolation::PiecewiseConstant,
                            Codomain::Real);
  EXPECT_EQ(d.real_value_at(0.0), 5.0);
  EXPECT_EQ(d.real_value_at(0.999), 5.0);
  EXPECT_EQ(d.real_value_at(1.0), -1.0);
  EXPECT_EQ(d.real_value_at(2.0), 3.0);
  EXPECT_EQ(d.left_value(1.0).real(), 5.0);
  EXPECT_EQ(d.left_value(0.5).real(), 5.0);
  EXPECT_EQ(d.left_value(2.0).real(), -1.0);
}

TEST(Driving, UnimodularLinearStaysOnCircle) {
  const auto d = make_table({0.0, 1.0}, {cd{1.0, 0.0}, cd{0.0, 1.0}}, Interpolation::PiecewiseLinear,
                            Codomain::Unimodular);
  for (double t = 0.0; t <= 1.0; t += 0.125) EXPECT_NEAR(std::abs(d.value_at(t)), 1.0, 1e-15);
  EXPECT_NEAR(std::arg(d.value_at(0.5)), 0.25 * 3.14159265358979, 1e-14);
}

TEST(Driving, TableErrors) {
  EXPECT_THROW(make_table({}, {}, Interpolation::PiecewiseLinear, Codomain::Real), PreconditionError);
  EXPECT_THROW(make_table({0.0, 0.0}, {1.0, 2.0}, Interpolation::PiecewiseLinear, Codomain::Real),
               PreconditionError);
  EXPECT_THROW(make_table({0.0, 1.0}, {1.0, 0.5}, Interpolation::PiecewiseLinear, Codomain::Unimodular),
               PreconditionError);
  const auto d = make_table({0.0, 1.0}, {0.0, 2.0}, Interpolation::PiecewiseLinear, Codomain::Real);
  EXPECT_THROW(d.value_at(1.5), PreconditionError);
}

TEST(Driving, Breakpoints) {
  const auto d = make_table({0.0, 1.0, 2.0, 3.0}, {0.0, 1.0, 2.0, 3.0},
                            Interpolation::PiecewiseConstant, Codomain::Real);
  const auto br = d.breakpoints(0.5, 2.5);
  ASSERT_EQ(br.size(), 4u);
  EXPECT_EQ(br[0], 0.5);
  EXPECT_EQ(br[1], 1.0);
  EXPECT_EQ(br[2], 2.0);
  EXPECT_EQ(br[3], 2.5);
}

TEST(Brownian, ZeroKappaIsConstant) {
  const auto d = brownian_driving(42, 0.0, 1.0, 64, 0.0);
  for (const cd &v : d.values()) EXPECT_EQ(v, cd(0.0));
  const auto coarse = brownian_driving(42, 0.0, 1.0, 8, 0.7), fine = brownian_driving(42, 0.0, 1.0, 512, 0.7);
  for (double t : {0.0, 0.3, 0.77, 1.0}) EXPECT_EQ(coarse.value_at(t), fine.value_at(t));
}

TEST(Brownian, Deterministic) {
  const auto a = brownian_path(123, 2.0, 1.0, 2048), b = brownian_path(123, 2.0, 1.0, 2048);
  EXPECT_EQ(a.values, b.values);
  const auto c = brownian_path(124, 2.0, 1.0, 2048);
  EXPECT_NE(a.values, c.values);
}

TEST(Brownian, StartValue) {
  const auto p = brownian_path(5, 1.0, 2.0, 10, 0.25);
  EXPECT_EQ(p.values.front(), 0.25);
  EXPECT_EQ(p.values.size(), 11u);
}

TEST(Brownian, TerminalLawOverSeeds) {
  const double kappa = 2.0, T = 1.0;
  const int N = 400;
  double mean = 0.0, sq = 0.0;
  std::vector<double> x(N);
  for (int s = 0; s < N; ++s) x[s] = brownian_path(s, kappa, T, 256).values.back();
  for (double v : x) mean += v;
  mean /= N;
  for (double v : x) sq += (v - mean) * (v - mean);
  const double var = sq / (N - 1);
  EXPECT_LE(std::abs(mean), 3.0 * std::sqrt(kappa * T / N));
  EXPECT_GE(var, 0.7 * kappa * T);
  EXPECT_LE(var, 1.3 * kappa * T);
}

TEST(Brownian, IncrementVariance) {
  // Single long path: increments should have variance kappa T / n.
  const auto p = brownian_path(9, 3.0, 2.0, 20000);
  double sq = 0.0;
  for (std::size_t j = 0; j + 1 < p.values.size(); ++j) {
    const double d = p.values[j + 1] - p.values[j];
    sq += d * d;
  }
  const double var = sq / 20000.0, expect = 3.0 * 2.0 / 20000.0;
  EXPECT_NEAR(var / expect, 1.0, 0.05);
}

TEST(Brownian, RadialUnimodular) {
  const auto d = radial_unimodular_from_brownian(77, 4.0, 1.0, 500);
  for (const cd &v : d.values()) EXPECT_NEAR(std::abs(v), 1.0, 1e-12);
  const auto path = brownian_path(77, 4.0, 1.0, 500);
  EXPECT_NEAR(std::abs(d.values()[200] - std::polar(1.0, -path.values[200])), 0.0, 1e-15);
  const auto zero = radial_unimodular_from_brownian(77, 0.0, 1.0, 50);
  for (const cd &v : zero.values()) EXPECT_EQ(v, cd(1.0));
}

TEST(DrivingCsv, RealRoundTrip) {
  const auto d = brownian_driving(3, 1.5, 1.0, 100, 0.0);
  std::stringstream ss;
  write_driving_csv(ss, d);
  EXPECT_EQ(ss.str().substr(0, 8), "t,value\n");
  const auto back = read_driving_csv(ss, Interpolation::PiecewiseConstant);
  ASSERT_EQ(back.times().size(), d.times().size());
  for (std::size_t j = 0; j < d.times().size(); ++j) {
    EXPECT_NEAR(back.times()[j], d.times()[j], 1e-12);
    EXPECT_NEAR(std::abs(back.values()[j] - d.values()[j]), 0.0, 1e-12);
  }
}

TEST(DrivingCsv, UnimodularRoundTrip) {
  const auto d = radial_unimodular_from_brownian(3, 1.5, 1.0, 100);
  std::stringstream ss;
  write_driving_csv(ss, d);
  EXPECT_EQ(ss.str().substr(0, 8), "t,re,im\n");
  const auto back = read_driving_csv(ss, Interpolation::PiecewiseConstant);
  EXPECT_EQ(back.codomain(), Codomain::Unimodular);
  for (std::size_t j = 0; j < d.times().size(); ++j)
    EXPECT_NEAR(std::abs(back.values()[j] - d.values()[j]), 0.0, 1e-12);
}

TEST(DrivingCsv, RejectsBadInput) {
  std::stringstream bad_header("time,value\n0,1\n");
  EXPECT_THROW(read_driving_csv(bad_header, Interpolation::PiecewiseLinear), PreconditionError);
  std::stringstream bad_row("t,value\n0,1,2\n");
  EXPECT_THROW(read_driving_csv(bad_row, Interpolation::PiecewiseLinear), PreconditionError);
  std::stringstream empty("t,value\n");
  EXPECT_THROW(read_driving_csv(empty, Interpolation::PiecewiseLinear), PreconditionError);
}
