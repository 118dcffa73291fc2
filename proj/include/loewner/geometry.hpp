#pragma once

#include <algorithm>
#include <cmath>
#include <complex>

#include "errors.hpp"

namespace loewner {

using cd = std::complex<double>;

inline constexpr cd I{0.0, 1.0};

/// A point of the open unit disc.
class DiscPoint {
public:
  explicit DiscPoint(cd value) : value_(value) {
    detail::require(std::abs(value) < 1.0, "DiscPoint: |z| must be < 1");
  }
  cd value() const { return value_; }
  operator cd() const { return value_; }

private:
  cd value_;
};

/// A point of the open upper half-plane.
class HalfPlanePoint {
public:
  explicit HalfPlanePoint(cd value) : value_(value) {
    detail::require(value.imag() > 0.0, "HalfPlanePoint: Im w must be > 0");
  }
  cd value() const { return value_; }
  operator cd() const { return value_; }

private:
  cd value_;
};

/// Disc automorphism T_z(w) = (z - w) / (1 - conj(z) w); an involution swapping z and 0.
inline cd mobius_T(DiscPoint z, DiscPoint w) {
  const cd a = z.value(), b = w.value();
  return (a - b) / (1.0 - std::conj(a) * b);
}

/// Hyperbolic distance with curvature -4 normalization, 1/2 log((1+r)/(1-r)).
inline double poincare_distance(DiscPoint z, DiscPoint w) {
  const double r = std::abs(mobius_T(z, w));
  return std::atanh(std::min(r, 1.0));
}

/// Infinitesimal form of the same metric: |v| / (1 - |z|^2).
inline double kobayashi_metric_disc(DiscPoint z, cd v) {
  return std::abs(v) / (1.0 - std::norm(z.value()));
}

/// Same as kobayashi_metric_disc without the DiscPoint check (returns +inf on the boundary).
inline double kobayashi_metric_unchecked(cd z, cd v) {
  const double d = 1.0 - std::norm(z);
  return d > 0.0 ? std::abs(v) / d : INFINITY;
}

/// Cayley transform z -> i (1 + z) / (1 - z), disc onto upper half-plane.
/// Accepts closed-disc points other than the pole z = 1 so boundary limits can be probed.
inline cd cayley(cd z) {
  detail::require(std::abs(z) <= 1.0 + 1e-15, "cayley: |z| must be <= 1");
  detail::require(z != cd{1.0, 0.0}, "cayley: z = 1 is the pole");
  return I * (1.0 + z) / (1.0 - z);
}

inline HalfPlanePoint cayley(DiscPoint z) { return HalfPlanePoint(cayley(z.value())); }

inline cd inverse_cayley(cd w) {
  detail::require(w.imag() >= 0.0, "inverse_cayley: Im w must be >= 0");
  return (w - I) / (w + I);
}

inline DiscPoint inverse_cayley(HalfPlanePoint w) { return DiscPoint(inverse_cayley(w.value())); }

} // namespace loewner
