#pragma once

#include <cmath>
#include <complex>
#include <limits>
#include <vector>

#include "driving.hpp"
#include "jet.hpp"
#include "quadrature.hpp"
#include "radial.hpp"

namespace loewner {

/// Coefficients of f_s(z) = e^s z + a2 z^2 + a3 z^3 + ... and of the class-S
/// normalization e^{-s} f_s = z + b2 z^2 + b3 z^3 + ...
struct CoefficientResult {
  double s = 0.0;
  cd a2, a3;
  cd b2, b3;
  bool bounds_pass = false;  // |b2| <= 2 + tol and |b3| <= 3 + tol
  double error_budget = 0.0; // quadrature error estimate plus truncated-tail bound
};

inline constexpr double bieberbach_tol = 1e-8;

/// p_j in p(z) = (1 + k z) / (1 - k z) = 1 + sum_j p_j z^j.
inline cd herglotz_coeffs(cd k, unsigned j) {
  detail::require(j >= 1, "herglotz_coeffs: j must be >= 1");
  detail::require(std::abs(std::abs(k) - 1.0) < 1e-12, "herglotz_coeffs: k must be unimodular");
  return 2.0 * std::pow(k, static_cast<int>(j));
}

namespace coeff_detail {

inline double default_tmax(double s, double t_max) { return std::isnan(t_max) ? s + 40.0 : t_max; }

inline void check_args(double s, double t_max, const DrivingTerm &d) {
  detail::require(s >= 0.0, "coefficients: s must be >= 0");
  detail::require(t_max - s >= 40.0 - 1e-12, "coefficients: need T_max - s >= 40");
  detail::require(d.codomain() == Codomain::Unimodular, "coefficients: driving must be unimodular");
  d.check_range(s, t_max);
}

/// Cell boundaries of the driving on [s, t_max], subdivided so no panel is longer than 1/2.
inline std::vector<double> quadrature_nodes(const DrivingTerm &d, double s, double t_max) {
  const std::vector<double> br = d.breakpoints(s, t_max);
  std::vector<double> nodes{br.front()};
  for (std::size_t j = 0; j + 1 < br.size(); ++j) {
    const auto pieces = static_cast<std::size_t>(std::ceil((br[j + 1] - br[j]) / 0.5));
    for (std::size_t p = 1; p <= pieces; ++p)
      nodes.push_back(p == pieces ? br[j + 1]
                                  : br[j] + (br[j + 1] - br[j]) * static_cast<double>(p) /
                                                static_cast<double>(pieces));
  }
  return nodes;
}

/// Driving value for quadrature inside the panel that starts at `a` (frozen cells are
/// evaluated by their left value so panel ends never pick up the next cell).
inline cd panel_value(const DrivingTerm &d, double a, double tau) {
  return d.piecewise_constant() ? d.value_at(a) : d.value_at(tau);
}

/// Tail integrals I(tau) = int_tau^{T_max} e^{-u} k(u) du on the shared node grid;
/// a2(tau) = -2 e^{2 tau} I(tau).
class A2Cache {
public:
  A2Cache(const DrivingTerm &d, double s, double t_max, double tol)
      : d_(d), nodes_(quadrature_nodes(d, s, t_max)), tail_(nodes_.size(), 0.0), tol_(tol) {
    for (std::size_t j = nodes_.size() - 1; j-- > 0;) {
      const auto r = panel(nodes_[j], nodes_[j], nodes_[j + 1]);
      tail_[j] = tail_[j + 1] + r.value;
      error_ += r.error_estimate;
    }
  }

  const std::vector<double> &nodes() const { return nodes_; }
  cd tail_at_node(std::size_t j) const { return tail_[j]; }
  double error_estimate() const { return error_; }

  /// I(tau) for tau in panel j, i.e. nodes[j] <= tau <= nodes[j+1].
  cd tail(std::size_t j, double tau) const {
    return tail_[j + 1] + panel(nodes_[j], tau, nodes_[j + 1]).value;
  }

private:
  QuadratureResult panel(double cell_start, double a, double b) const {
    return integrate_gk15(
        [&](double u) { return std::exp(-u) * panel_value(d_, cell_start, u); }, a, b,
        tol_ * std::max(b - a, 1e-300));
  }

  const DrivingTerm &d_;
  std::vector<double> nodes_;
  std::vector<cd> tail_;
  double tol_;
  double error_ = 0.0;
};

} // namespace coeff_detail

/// a2(s) = -2 e^{2s} int_s^inf e^{-tau} k(tau) d tau, truncated at T_max (default s + 40).
inline cd a2_quadrature(double s, const DrivingTerm &driving,
                        double t_max = std::numeric_limits<double>::quiet_NaN()) {
  t_max = coeff_detail::default_tmax(s, t_max);
  coeff_detail::check_args(s, t_max, driving);
  const coeff_detail::A2Cache cache(driving, s, t_max, 1e-12 * std::exp(-s));
  return -2.0 * std::exp(2.0 * s) * cache.tail_at_node(0);
}

/// a3(s) = -e^{3s} int_s^inf e^{-3 tau} (2 e^tau k^2 + 4 a2(tau) k) d tau, with the nested
/// a2(tau) read from a shared tail-integral cache.
inline cd a3_quadrature(double s, const DrivingTerm &driving,
                        double t_max = std::numeric_limits<double>::quiet_NaN(),
                        double *error_estimate = nullptr) {
  t_max = coeff_detail::default_tmax(s, t_max);
  coeff_detail::check_args(s, t_max, driving);
  const double tol = 1e-12 * std::exp(-2.0 * s);
  const coeff_detail::A2Cache cache(driving, s, t_max, tol);
  const auto &nodes = cache.nodes();
  cd total = 0.0;
  double err = cache.error_estimate();
  for (std::size_t j = 0; j + 1 < nodes.size(); ++j) {
    const double a = nodes[j], b = nodes[j + 1];
    // e^{-3 tau} 4 a2(tau) k(tau) = -8 e^{-tau} I(tau) k(tau)
    auto integrand = [&](double tau) {
      const cd k = coeff_detail::panel_value(driving, a, tau);
      return 2.0 * std::exp(-2.0 * tau) * k * k - 8.0 * std::exp(-tau) * k * cache.tail(j, tau);
    };
    const auto r = integrate_gk15(integrand, a, b, tol * (b - a));
    total += r.value;
    err += r.error_estimate;
  }
  if (error_estimate) *error_estimate = std::exp(3.0 * s) * err;
  return -std::exp(3.0 * s) * total;
}

/// Computes a2, a3 by quadrature and checks |b2| <= 2, |b3| <= 3.
inline CoefficientResult bieberbach_verify(const DrivingTerm &driving, double s = 0.0,
                                           double t_max = std::numeric_limits<double>::quiet_NaN()) {
  t_max = coeff_detail::default_tmax(s, t_max);
  CoefficientResult r;
  r.s = s;
  double err3 = 0.0;
  r.a2 = a2_quadrature(s, driving, t_max);
  r.a3 = a3_quadrature(s, driving, t_max, &err3);
  const double e = std::exp(-s);
  r.b2 = e * r.a2;
  r.b3 = e * r.a3;
  r.error_budget = e * err3 + 2.0 * std::exp(-(t_max - s));
  r.bounds_pass = std::abs(r.b2) <= 2.0 + bieberbach_tol && std::abs(r.b3) <= 3.0 + bieberbach_tol;
  return r;
}

/// Independent route: a_m(s) = lim e^t [z^m] phi_{s,t}, from the jet of the evolution family.
inline CoefficientResult coeffs_from_jet(double s, const DrivingTerm &driving,
                                         double t_max = std::numeric_limits<double>::quiet_NaN(),
                                         double tol = 1e-10, std::size_t order = 3) {
  detail::require(order >= 3, "coeffs_from_jet: order must be >= 3");
  t_max = std::min(coeff_detail::default_tmax(s, t_max), driving.horizon());
  detail::require(t_max > s, "coeffs_from_jet: T_max must exceed s");
  OdeOptions opt;
  opt.rel_tol = 1e-12;
  opt.abs_tol = 1e-15;
  const double scale = std::exp(s);
  Jet psi = Jet::identity(order);
  cd a2 = 0.0, a3 = 0.0;
  double t = s, change = std::numeric_limits<double>::infinity();
  while (t < t_max) {
    const double next = std::min(t + 1.0, t_max);
    radial_detail::advance_scaled_jet(psi, s, t, next, driving, opt);
    t = next;
    const cd n2 = scale * psi[2], n3 = scale * psi[3];
    change = std::max(std::abs(n2 - a2), std::abs(n3 - a3));
    a2 = n2;
    a3 = n3;
    if (change < tol) break;
  }
  if (change >= tol)
    throw NumericalError("coeffs_from_jet: no convergence before T_max (last change " +
                         std::to_string(change) + ")");
  CoefficientResult r;
  r.s = s;
  r.a2 = a2;
  r.a3 = a3;
  r.b2 = a2 / scale;
  r.b3 = a3 / scale;
  r.error_budget = change;
  r.bounds_pass = std::abs(r.b2) <= 2.0 + bieberbach_tol && std::abs(r.b3) <= 3.0 + bieberbach_tol;
  return r;
}

} // namespace loewner
