#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "loewner/coefficients.hpp"
#include "test_util.hpp"

using namespace loewner;
using loewner_test::random_unimodular_table;

namespace {

// Piecewise-constant table on [0, cells] extended with its last value up to `horizon`.
DrivingTerm extended_random(std::mt19937_64 &rng, std::size_t cells, double horizon) {
  std::uniform_real_distribution<double> angle(-3.14159265358979, 3.14159265358979);
  std::vector<double> t;
  std::vector<cd> v;
  for (std::size_t j = 0; j <= cells; ++j) {
    t.push_back(0.5 * static_cast<double>(j));
    v.push_back(std::polar(1.0, angle(rng)));
  }
  t.push_back(horizon);
  v.push_back(v.back());
  return make_table(t, v, Interpolation::PiecewiseConstant, Codomain::Unimodular);
}

DrivingTerm rotate(const DrivingTerm &d, double theta) {
  std::vector<cd> v(d.values());
  for (cd &x : v) x *= std::polar(1.0, theta);
  return make_table(d.times(), v, Interpolation::PiecewiseConstant, Codomain::Unimodular);
}

} // namespace

TEST(HerglotzCoeffs, Examples) {
  EXPECT_EQ(herglotz_coeffs(1.0, 1), cd(2.0));
  EXPECT_NEAR(std::abs(herglotz_coeffs(-1.0, 2) - 2.0), 0.0, 1e-15);
  for (unsigned j = 1; j <= 10; ++j) EXPECT_NEAR(std::abs(herglotz_coeffs(std::polar(1.0, 0.37), j)), 2.0, 1e-14);
  EXPECT_THROW(herglotz_coeffs(1.0, 0), PreconditionError);
  EXPECT_THROW(herglotz_coeffs(0.5, 1), PreconditionError);
}

TEST(Quadrature, ConstantDrivings) {
  const auto minus = make_constant(-1.0, Codomain::Unimodular), plus = make_constant(1.0, Codomain::Unimodular);
  EXPECT_NEAR(std::abs(a2_quadrature(0.0, minus) - 2.0), 0.0, 1e-8);
  EXPECT_NEAR(std::abs(a3_quadrature(0.0, minus) - 3.0), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(a2_quadrature(0.0, plus) + 2.0), 0.0, 1e-8);
  EXPECT_NEAR(std::abs(a3_quadrature(0.0, plus) - 3.0), 0.0, 1e-6);
  for (double th : {0.3, 1.7, -2.4}) {
    const auto d = make_constant(std::polar(1.0, th), Codomain::Unimodular);
    const cd a2 = a2_quadrature(0.0, d);
    EXPECT_NEAR(std::abs(a2 + 2.0 * std::polar(1.0, th)), 0.0, 1e-9);
    EXPECT_NEAR(std::abs(a2), 2.0, 1e-9);
  }
}

TEST(Quadrature, ShortTailRejected) {
  const auto d = make_constant(-1.0, Codomain::Unimodular);
  EXPECT_THROW(a2_quadrature(0.0, d, 10.0), PreconditionError);
  EXPECT_THROW(a3_quadrature(1.0, d, 30.0), PreconditionError);
}

TEST(Quadrature, BoundsOnRandomDrivings) {
  std::mt19937_64 rng(1);
  for (int j = 0; j < 50; ++j) {
    const auto d = extended_random(rng, 12, 50.0);
    const cd a3 = a3_quadrature(0.0, d);
    EXPECT_LE(std::abs(a3), 3.0 + 1e-8) << j;
    EXPECT_LE(std::abs(a2_quadrature(0.0, d)), 2.0 + 1e-8) << j;
  }
}

TEST(Bieberbach, Koebe) {
  const auto r = bieberbach_verify(make_constant(-1.0, Codomain::Unimodular));
  EXPECT_TRUE(r.bounds_pass);
  EXPECT_NEAR(std::abs(r.b2 - 2.0), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(r.b3 - 3.0), 0.0, 1e-8);
  EXPECT_LT(r.error_budget, 1e-6);
}

TEST(Bieberbach, NormalizationAtPositiveS) {
  const auto r = bieberbach_verify(make_constant(-1.0, Codomain::Unimodular), 1.5);
  EXPECT_EQ(r.b2, std::exp(-1.5) * r.a2);
  EXPECT_EQ(r.b3, std::exp(-1.5) * r.a3);
  EXPECT_NEAR(std::abs(r.b2 - 2.0), 0.0, 1e-8);
}

TEST(Bieberbach, BrownianSeeds) {
  for (std::uint64_t seed = 0; seed < 20; ++seed) {
    const auto d = radial_unimodular_from_brownian(seed, 2.0, 45.0, 900);
    EXPECT_TRUE(bieberbach_verify(d).bounds_pass) << seed;
  }
}

TEST(Bieberbach, ShiftConsistency) {
  std::mt19937_64 rng(2);
  const auto d = extended_random(rng, 10, 60.0);
  const double s = 1.0;
  std::vector<double> t;
  std::vector<cd> v;
  for (std::size_t j = 0; j < d.times().size(); ++j)
    if (d.times()[j] >= s) {
      if (t.empty() && d.times()[j] > s) {
        t.push_back(0.0);
        v.push_back(d.value_at(s));
      }
      t.push_back(d.times()[j] - s);
      v.push_back(d.values()[j]);
    }
  const auto shifted = make_table(t, v, Interpolation::PiecewiseConstant, Codomain::Unimodular);
  const auto a = bieberbach_verify(d, s), b = bieberbach_verify(shifted, 0.0);
  EXPECT_NEAR(std::abs(a.b2 - b.b2), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(a.b3 - b.b3), 0.0, 1e-8);
}

TEST(Bieberbach, RotationCovariance) {
  std::mt19937_64 rng(3);
  const auto d = extended_random(rng, 8, 50.0);
  const double th = 0.9;
  const auto a = bieberbach_verify(d), b = bieberbach_verify(rotate(d, th));
  EXPECT_NEAR(std::abs(b.b2 - std::polar(1.0, th) * a.b2), 0.0, 1e-9);
  EXPECT_NEAR(std::abs(b.b3 - std::polar(1.0, 2.0 * th) * a.b3), 0.0, 1e-8);
}

TEST(CoeffsFromJet, Koebe) {
  const auto r = coeffs_from_jet(0.0, make_constant(-1.0, Codomain::Unimodular));
  EXPECT_NEAR(std::abs(r.a2 - 2.0), 0.0, 1e-6);
  EXPECT_NEAR(std::abs(r.a3 - 3.0), 0.0, 1e-6);
  EXPECT_TRUE(r.bounds_pass);
}

TEST(CoeffsFromJet, AgreesWithQuadrature) {
  std::mt19937_64 rng(4);
  for (int j = 0; j < 8; ++j) {
    const auto d = extended_random(rng, 8, 60.0);
    const double s = 0.25 * j;
    const auto q = bieberbach_verify(d, s), jet = coeffs_from_jet(s, d);
    EXPECT_NEAR(std::abs(q.a2 - jet.a2), 0.0, 1e-6) << j;
    EXPECT_NEAR(std::abs(q.a3 - jet.a3), 0.0, 1e-6) << j;
  }
}

TEST(CoeffsFromJet, NonConvergence) {
  EXPECT_THROW(coeffs_from_jet(0.0, make_constant(-1.0, Codomain::Unimodular), 3.0), NumericalError);
  EXPECT_THROW(coeffs_from_jet(0.0, make_constant(-1.0, Codomain::Unimodular), 40.0, 1e-10, 2),
               PreconditionError);
}
