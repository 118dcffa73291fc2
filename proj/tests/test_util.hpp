#pragma once

#include <complex>
#include <cstdint>
#include <random>
#include <vector>

#include "loewner/driving.hpp"

namespace loewner_test {

using namespace loewner;

/// Closed-form forward radial map for constant driving k:
/// K_k(phi) = e^{-(t-s)} K_k(z) with K_k(w) = w / (1 + k w)^2.
inline std::complex<double> koebe_k(std::complex<double> w, std::complex<double> k) {
  return w / ((1.0 + k * w) * (1.0 + k * w));
}

/// Root inside the disc of w / (1 + k w)^2 = c.
inline std::complex<double> koebe_k_inverse(std::complex<double> c, std::complex<double> k) {
  if (c == 0.0) return 0.0;
  // c k^2 w^2 + (2 c k - 1) w + c = 0
  const std::complex<double> a = c * k * k, b = 2.0 * c * k - 1.0;
  const std::complex<double> disc = std::sqrt(b * b - 4.0 * a * c);
  const std::complex<double> r1 = (-b + disc) / (2.0 * a), r2 = (-b - disc) / (2.0 * a);
  return std::abs(r1) < std::abs(r2) ? r1 : r2;
}

/// Random piecewise-constant unimodular driving on [0, horizon] with `cells` equal cells.
inline DrivingTerm random_unimodular_table(std::mt19937_64 &rng, double horizon, std::size_t cells) {
  std::uniform_real_distribution<double> angle(-3.14159265358979, 3.14159265358979);
  std::vector<double> t(cells + 1);
  std::vector<std::complex<double>> v(cells + 1);
  for (std::size_t j = 0; j <= cells; ++j) {
    t[j] = horizon * static_cast<double>(j) / static_cast<double>(cells);
    v[j] = std::polar(1.0, angle(rng));
  }
  t[cells] = horizon;
  return make_table(t, v, Interpolation::PiecewiseConstant, Codomain::Unimodular);
}

inline std::complex<double> random_disc_point(std::mt19937_64 &rng, double max_radius) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  return std::polar(max_radius * std::sqrt(u(rng)), 2.0 * 3.14159265358979 * u(rng));
}


/// Random Herglotz function: positive combination of (zeta + r z)/(zeta - r z) plus i b.
struct RandomHerglotz {
  std::vector<std::complex<double>> zeta;
  std::vector<double> weight;
  double r = 0.8;
  double b = 0.0;

  std::complex<double> operator()(std::complex<double> z) const {
    std::complex<double> acc{0.0, b};
    for (std::size_t j = 0; j < zeta.size(); ++j)
      acc += weight[j] * (zeta[j] + r * z) / (zeta[j] - r * z);
    return acc;
  }
};

inline RandomHerglotz random_herglotz(std::mt19937_64 &rng, std::size_t terms = 3) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  RandomHerglotz p;
  for (std::size_t j = 0; j < terms; ++j) {
    p.zeta.push_back(std::polar(1.0, 2.0 * 3.14159265358979 * u(rng)));
    p.weight.push_back(0.2 + u(rng));
  }
  p.b = 2.0 * u(rng) - 1.0;
  return p;
}

} // namespace loewner_test
