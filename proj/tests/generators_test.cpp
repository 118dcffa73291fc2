#include <cmath>
#include <random>

#include <gtest/gtest.h>

#include "loewner/generators.hpp"
#include "loewner/radial.hpp"
#include "test_util.hpp"

using namespace loewner;
using loewner_test::random_herglotz;

namespace {

FieldSpec field(std::function<cd(cd)> f) { return FieldSpec{std::move(f), {}}; }

FieldSpec from_tau_p(cd tau, std::function<cd(cd)> p) {
  return field([tau, p](cd z) { return (tau - z) * (1.0 - std::conj(tau) * z) * p(z); });
}

struct Case {
  const char *name;
  FieldSpec H;
  bool generator;
};

std::vector<Case> battery() {
  const cd a{1.0, 1.0};
  return {
      {"-z", field([](cd z) { return -z; }), true},
      {"z", field([](cd z) { return z; }), false},
      {"1-z^2", field([](cd z) { return 1.0 - z * z; }), true},
      {"(1-z)^2", field([](cd z) { return (1.0 - z) * (1.0 - z); }), true},
      {"i+iz^2", field([](cd z) { return I + I * z * z; }), true},
      {"1", field([](cd) { return cd(1.0); }), false},
      {"-z(1+z)/(1-z)", field([](cd z) { return -z * (1.0 + z) / (1.0 - z); }), true},
      {"iz", field([](cd z) { return I * z; }), true},
      {"a-conj(a)z^2", field([a](cd z) { return a - std::conj(a) * z * z; }), true},
  };
}

} // namespace

TEST(GeneratorTest, Examples) {
  const auto neg = generator_test(field([](cd z) { return -z; }));
  EXPECT_TRUE(neg.accepted);
  EXPECT_LT(neg.max_violation, -0.99);
  const auto pos = generator_test(field([](cd z) { return z; }));
  EXPECT_FALSE(pos.accepted);
  EXPECT_GE(pos.max_violation, 1.0);
  const auto rot = generator_test(field([](cd z) { return I + I * z * z; }));
  EXPECT_TRUE(rot.accepted);
  EXPECT_NEAR(rot.max_violation, 0.0, 1e-9);
}

TEST(GeneratorTest, NegZExpression) {
  // Re[2 conj(z) H + (1 - |z|^2) H'] = -(1 + |z|^2) for H = -z.
  const FieldSpec H = field([](cd z) { return -z; });
  for (cd z : {cd(0.0), cd(0.5, 0.2), cd(-0.7, 0.1)}) {
    const double e = (2.0 * std::conj(z) * H(z) + (1.0 - std::norm(z)) * H.deriv(z)).real();
    EXPECT_NEAR(e, -(1.0 + std::norm(z)), 1e-8);
  }
}

TEST(GeneratorTest, ThreeCharacterizationsAgree) {
  for (const auto &c : battery()) {
    const bool a = generator_test(c.H).accepted, b = aq_test(c.H).accepted,
               o = orbit_contraction_test(c.H).accepted;
    EXPECT_EQ(a, c.generator) << c.name;
    EXPECT_EQ(b, c.generator) << c.name;
    EXPECT_EQ(o, c.generator) << c.name;
  }
}

TEST(GeneratorTest, RandomConstructionsAgree) {
  std::mt19937_64 rng(1);
  for (int j = 0; j < 20; ++j) {
    const auto p = random_herglotz(rng);
    const cd tau = std::polar(std::vector<double>{0.0, 0.5, 1.0}[j % 3], 0.7 * j);
    const FieldSpec H = from_tau_p(tau, p);
    EXPECT_TRUE(generator_test(H).accepted) << j;
    EXPECT_TRUE(aq_test(H).accepted) << j;
    EXPECT_TRUE(orbit_contraction_test(H).accepted) << j;
    const FieldSpec bad = field([H](cd z) { return -H(z); });
    EXPECT_FALSE(generator_test(bad).accepted) << j;
    EXPECT_FALSE(aq_test(bad).accepted) << j;
    EXPECT_FALSE(orbit_contraction_test(bad).accepted) << j;
  }
}

TEST(GeneratorTest, Cone) {
  const FieldSpec h1 = field([](cd z) { return 1.0 - z * z; }), h2 = field([](cd z) { return -z; });
  EXPECT_TRUE(generator_test(field([&](cd z) { return h1(z) + h2(z); })).accepted);
  EXPECT_TRUE(generator_test(field([&](cd z) { return 3.5 * h1(z); })).accepted);
}

TEST(ExtractAQ, Examples) {
  const auto neg = extract_a_q(field([](cd z) { return -z; }));
  EXPECT_NEAR(std::abs(neg.a), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(neg.q(cd{0.3, 0.2}) - 1.0), 0.0, 1e-12);
  EXPECT_NEAR(std::abs(neg.q(0.0) - 1.0), 0.0, 1e-8);
  const auto hyp = extract_a_q(field([](cd z) { return 1.0 - z * z; }));
  EXPECT_NEAR(std::abs(hyp.a - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(hyp.q(cd{0.4, -0.1})), 0.0, 1e-12);
  const auto one = extract_a_q(field([](cd) { return cd(1.0); }));
  EXPECT_NEAR(std::abs(one.q(0.5) - cd(-0.5)), 0.0, 1e-12);
  EXPECT_FALSE(aq_test(field([](cd) { return cd(1.0); })).accepted);
}

TEST(Semigroup, ClosedForms) {
  const FieldSpec neg = field([](cd z) { return -z; }), hyp = field([](cd z) { return 1.0 - z * z; });
  const cd z{0.3, -0.4};
  EXPECT_EQ(semigroup_point(neg, DiscPoint(z), 0.0).value(), z);
  for (double t = 0.25; t <= 3.0; t += 0.25) {
    EXPECT_NEAR(std::abs(semigroup_point(neg, DiscPoint(z), t).value() - std::exp(-t) * z), 0.0, 1e-10);
    const double th = std::tanh(t);
    EXPECT_NEAR(std::abs(semigroup_point(hyp, DiscPoint(z), t).value() - (z + th) / (1.0 + z * th)), 0.0,
                1e-8);
  }
}

TEST(Semigroup, Law) {
  std::mt19937_64 rng(2);
  std::uniform_real_distribution<double> u(0.0, 2.0);
  const FieldSpec H = from_tau_p(cd{0.2, 0.3}, random_herglotz(rng));
  for (int j = 0; j < 20; ++j) {
    const double s = u(rng), t = u(rng);
    const cd z = loewner_test::random_disc_point(rng, 0.8);
    const cd a = semigroup_point(H, DiscPoint(z), s + t).value();
    const cd b = semigroup_point(H, semigroup_point(H, DiscPoint(z), s), t).value();
    EXPECT_NEAR(std::abs(a - b), 0.0, 1e-8);
  }
}

TEST(BerksonPorta, Examples) {
  const auto neg = berkson_porta(field([](cd z) { return -z; }));
  EXPECT_NEAR(std::abs(neg.tau), 0.0, 1e-8);
  EXPECT_NEAR(std::abs(neg.p(cd{0.2, 0.1}) - 1.0), 0.0, 1e-8);
  const auto hyp = berkson_porta(field([](cd z) { return 1.0 - z * z; }));
  EXPECT_NEAR(std::abs(hyp.tau - 1.0), 0.0, 1e-3);
  EXPECT_NEAR(std::abs(hyp.p(0.0) - 1.0), 0.0, 1e-3);
  EXPECT_LT(hyp.residual, 1e-8);
  const auto par = berkson_porta(field([](cd z) { return (1.0 - z) * (1.0 - z); }));
  EXPECT_NEAR(std::abs(par.tau - 1.0), 0.0, 1e-3);
  EXPECT_NEAR(std::abs(par.p(cd{0.3, 0.3}) - 1.0), 0.0, 1e-3);
}

TEST(BerksonPorta, RandomRoundTrip) {
  std::mt19937_64 rng(3);
  for (int j = 0; j < 12; ++j) {
    const double mod = std::vector<double>{0.0, 0.5, 1.0}[j % 3];
    const cd tau = std::polar(mod, 1.3 * j + 0.2);
    const FieldSpec H = from_tau_p(tau, random_herglotz(rng));
    const auto r = berkson_porta(H);
    EXPECT_NEAR(std::abs(r.tau - tau), 0.0, mod < 1.0 ? 1e-6 : 1e-3) << j;
    EXPECT_LT(r.residual, 1e-8) << j;
    EXPECT_GE(r.min_re_p, -1e-8) << j;
  }
}

TEST(BerksonPorta, RejectsZeroField) {
  EXPECT_THROW(berkson_porta(field([](cd) { return cd(0.0); })), PreconditionError);
}

TEST(Herglotz, Examples) {
  const auto zero = [](double) { return cd(0.0); };
  const auto one = [](cd, double) { return cd(1.0); };
  EXPECT_NEAR(std::abs(herglotz_eval(zero, one, cd{0.3, 0.1}, 0.0) - cd{-0.3, -0.1}), 0.0, 1e-15);
  const cd z{0.2, -0.5};
  const auto t1 = [](double) { return cd(1.0); };
  EXPECT_NEAR(std::abs(herglotz_eval(t1, one, z, 0.0) - (1.0 - z) * (1.0 - z)), 0.0, 1e-15);
  const auto G = make_herglotz_field(t1, one);
  EXPECT_TRUE(generator_test(G.frozen(0.0)).accepted);
}

TEST(GeneralEvolve, ClosedFormAndIdentity) {
  const auto G = TimeFieldSpec::autonomous(field([](cd z) { return -z; }));
  const cd z{0.4, 0.2};
  EXPECT_EQ(general_evolve(G, DiscPoint(z), 1.0, 1.0).value(), z);
  EXPECT_NEAR(std::abs(general_evolve(G, DiscPoint(z), 0.5, 2.0).value() - std::exp(-1.5) * z), 0.0, 1e-10);
}

TEST(GeneralEvolve, MatchesRadialEvolve) {
  const auto k = [](double t) { return std::polar(1.0, t); };
  const auto G = make_herglotz_field([](double) { return cd(0.0); },
                                     [k](cd z, double t) { return (1.0 + k(t) * z) / (1.0 - k(t) * z); });
  std::vector<double> times;
  std::vector<cd> vals;
  for (int j = 0; j <= 4000; ++j) {
    times.push_back(j * 1e-3);
    vals.push_back(k(j * 1e-3));
  }
  const auto d = make_table(times, vals, Interpolation::PiecewiseLinear, Codomain::Unimodular);
  const cd z{0.3, 0.4};
  RadialEvolutionQuery q{DiscPoint(z), 0.5, 2.5, d, 1e-12, 1e-15};
  const cd a = general_evolve(G, DiscPoint(z), 0.5, 2.5).value();
  const cd b = evolve(q).value();
  // Piecewise-linear interpolation on the arc is exact for k(t) = e^{it}.
  EXPECT_NEAR(std::abs(a - b), 0.0, 1e-9);
}

TEST(GeneralEvolve, RejectsNonGenerator) {
  const auto G = TimeFieldSpec::autonomous(field([](cd z) { return z; }));
  EXPECT_THROW(general_evolve(G, DiscPoint(0.1), 0.0, 1.0), PreconditionError);
}

TEST(ProductFormula, RadialConverges) {
  const auto G = make_herglotz_field([](double) { return cd(0.0); }, [](cd z, double t) {
    const cd k = std::polar(1.0, t);
    return (1.0 + k * z) / (1.0 - k * z);
  });
  const auto e = product_formula_check(G, 0.0, 1.0, {8, 16, 32, 64});
  for (std::size_t j = 0; j + 1 < e.size(); ++j) EXPECT_LT(e[j + 1], e[j]);
  EXPECT_LT(e[3], e[0] / 4.0);
  const auto origin = product_formula_check(G, 0.0, 1.0, {8, 16}, {0.0});
  for (double x : origin) EXPECT_EQ(x, 0.0);
}

TEST(ProductFormula, AutonomousIsExact) {
  const auto G = TimeFieldSpec::autonomous(field([](cd z) { return 1.0 - z * z; }));
  for (double e : product_formula_check(G, 0.0, 1.0, {2, 4, 8})) EXPECT_LT(e, 1e-9);
}

TEST(Commutation, SeparableVersusRadial) {
  const std::vector<std::pair<double, double>> iv{{0.0, 0.5}, {0.3, 1.1}, {1.0, 1.7}};
  const TimeFieldSpec sep{[](cd z, double t) { return (1.0 + t) * -z; }, {}};
  const auto a = commutation_check(sep, iv);
  EXPECT_TRUE(a.commuting);
  EXPECT_LT(a.max_residual, 1e-8);
  const auto aut = commutation_check(TimeFieldSpec::autonomous(field([](cd z) { return 1.0 - z * z; })), iv);
  EXPECT_LT(aut.max_residual, 1e-8);
  const auto rad = make_herglotz_field([](double) { return cd(0.0); }, [](cd z, double t) {
    const cd k = std::polar(1.0, t);
    return (1.0 + k * z) / (1.0 - k * z);
  });
  const auto b = commutation_check(rad, iv);
  EXPECT_FALSE(b.commuting);
  EXPECT_GT(b.max_residual, 1e-4);
}
