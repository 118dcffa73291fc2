#pragma once

#include <algorithm>
#include <complex>
#include <cstddef>
#include <vector>

#include "errors.hpp"

namespace loewner {

/// Truncated power series at the origin, c_0 + c_1 z + ... + c_order z^order.
/// All arithmetic drops terms of degree > order.
class Jet {
public:
  using value_type = std::complex<double>;

  static constexpr std::size_t default_order = 8;

  explicit Jet(std::size_t order = default_order) : coeffs_(order + 1) {
    detail::require(order >= 1, "Jet: order must be >= 1");
  }

  Jet(std::size_t order, std::vector<value_type> coeffs) : Jet(order) {
    detail::require(coeffs.size() <= order + 1, "Jet: too many coefficients for order");
    std::copy(coeffs.begin(), coeffs.end(), coeffs_.begin());
  }

  static Jet constant(std::size_t order, value_type c) {
    Jet j(order);
    j[0] = c;
    return j;
  }

  /// The jet of z itself.
  static Jet identity(std::size_t order) {
    Jet j(order);
    j[1] = 1.0;
    return j;
  }

  std::size_t order() const { return coeffs_.size() - 1; }
  std::size_t size() const { return coeffs_.size(); }
  const std::vector<value_type> &coeffs() const { return coeffs_; }

  value_type &operator[](std::size_t i) { return coeffs_[i]; }
  const value_type &operator[](std::size_t i) const { return coeffs_[i]; }

  value_type evaluate(value_type z) const {
    value_type acc = 0.0;
    for (std::size_t i = coeffs_.size(); i-- > 0;) acc = acc * z + coeffs_[i];
    return acc;
  }

  Jet &operator+=(const Jet &o) {
    check_order(o);
    for (std::size_t i = 0; i < size(); ++i) coeffs_[i] += o.coeffs_[i];
    return *this;
  }
  Jet &operator-=(const Jet &o) {
    check_order(o);
    for (std::size_t i = 0; i < size(); ++i) coeffs_[i] -= o.coeffs_[i];
    return *this;
  }
  Jet &operator*=(value_type c) {
    for (auto &x : coeffs_) x *= c;
    return *this;
  }

  friend Jet operator+(Jet a, const Jet &b) { return a += b; }
  friend Jet operator-(Jet a, const Jet &b) { return a -= b; }
  friend Jet operator*(Jet a, value_type c) { return a *= c; }
  friend Jet operator*(value_type c, Jet a) { return a *= c; }
  friend Jet operator-(Jet a) { return a *= -1.0; }

  void check_order(const Jet &o) const {
    detail::require(o.order() == order(), "Jet: order mismatch");
  }

private:
  std::vector<value_type> coeffs_;
};

inline Jet jet_scale(const Jet &a, Jet::value_type c) { return a * c; }

/// Cauchy product truncated to the common order.
inline Jet jet_mul(const Jet &a, const Jet &b) {
  a.check_order(b);
  Jet r(a.order());
  const std::size_t n = a.size();
  for (std::size_t i = 0; i < n; ++i) {
    if (a[i] == 0.0) continue;
    for (std::size_t j = 0; i + j < n; ++j) r[i + j] += a[i] * b[j];
  }
  return r;
}

/// Series quotient a / b; requires b[0] != 0.
inline Jet jet_div(const Jet &a, const Jet &b) {
  a.check_order(b);
  if (b[0] == 0.0) throw PreconditionError("jet_div: divisor has zero constant term");
  Jet q(a.order());
  const std::size_t n = a.size();
  for (std::size_t k = 0; k < n; ++k) {
    Jet::value_type acc = a[k];
    for (std::size_t j = 1; j <= k; ++j) acc -= b[j] * q[k - j];
    q[k] = acc / b[0];
  }
  return q;
}

inline Jet operator*(const Jet &a, const Jet &b) { return jet_mul(a, b); }
inline Jet operator/(const Jet &a, const Jet &b) { return jet_div(a, b); }

} // namespace loewner
