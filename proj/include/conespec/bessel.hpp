#pragma once

// Cylinder functions J_nu, Y_nu of real order and the radial solutions
// sqrt(r) J_nu(k r), sqrt(r) Y_nu(k r) of -u'' + (nu^2 - 1/4) u / r^2 = k^2 u.

#include <boost/math/special_functions/bessel.hpp>
#include <boost/math/special_functions/bessel_prime.hpp>
#include <cmath>
#include <numbers>
#include <stdexcept>

#include "conespec/error.hpp"

namespace conespec {

/// J, Y and derivatives at x. When Boost reports overflow (x -> 0 with large
/// order) the leading small-x terms are returned in scaled form: the true
/// values are J * exp(log_scale_j) and Y * exp(log_scale_y).
struct BesselPair {
  double J = 0.0, Y = 0.0, dJ = 0.0, dY = 0.0;
  double log_scale_j = 0.0;
  double log_scale_y = 0.0;

  bool scaled() const { return log_scale_j != 0.0 || log_scale_y != 0.0; }
};

/// Largest order the radial solvers ask for.
inline constexpr double kBesselNuMax = 200.0;

inline BesselPair bessel_pair(double nu, double x) {
  require(nu >= 0.0 && nu <= kBesselNuMax, ErrorCode::Domain,
          "bessel order outside [0, nu_max]");
  require(x > 0.0 && std::isfinite(x), ErrorCode::Domain, "bessel argument must be positive");
  namespace bm = boost::math;
  BesselPair b;
  try {
    b.J = bm::cyl_bessel_j(nu, x);
    b.dJ = bm::cyl_bessel_j_prime(nu, x);
    b.Y = bm::cyl_neumann(nu, x);
    b.dY = bm::cyl_neumann_prime(nu, x);
    if (std::isfinite(b.Y) && std::isfinite(b.dY)) return b;
  } catch (const std::overflow_error&) {
  }
  // J ~ (x/2)^nu / Gamma(nu+1),  Y ~ -Gamma(nu)/pi (2/x)^nu  (nu > 0)
  require(nu > 0.0, ErrorCode::Domain, "Y_0 overflow is not reachable for x > 0");
  const double lx = std::log(0.5 * x);
  b.log_scale_j = nu * lx - std::lgamma(nu + 1.0);
  b.log_scale_y = std::lgamma(nu) - nu * lx;
  b.J = 1.0;
  b.dJ = nu / x;
  b.Y = -1.0 / std::numbers::pi;
  b.dY = nu / (std::numbers::pi * x);
  return b;
}

/// Value and r-derivative of a radial solution.
struct RadialValue {
  double u = 0.0;
  double du = 0.0;
};

/// Regular and singular radial solutions of -u'' + (nu^2-1/4)u/r^2 = lambda u.
/// For lambda > 0: f = sqrt(r) J_nu(k r), g = sqrt(r) Y_nu(k r), W(f,g) = 2/pi.
/// For lambda = 0: f = r^{nu+1/2}, g = r^{1/2-nu}, W(f,g) = -2 nu.
struct RadialBasis {
  RadialValue f, g;
  double wronskian = 0.0;
};

inline RadialBasis radial_basis(double nu, double lambda, double r) {
  require(lambda >= 0.0, ErrorCode::Domain, "lambda must be nonnegative");
  require(r > 0.0, ErrorCode::Domain, "radius must be positive");
  RadialBasis out;
  if (lambda == 0.0) {
    const double a = nu + 0.5, b = 0.5 - nu;
    out.f = {std::pow(r, a), a * std::pow(r, a - 1.0)};
    out.g = {std::pow(r, b), b * std::pow(r, b - 1.0)};
    out.wronskian = -2.0 * nu;
    return out;
  }
  const double k = std::sqrt(lambda);
  const BesselPair b = bessel_pair(nu, k * r);
  require(!b.scaled(), ErrorCode::SolverFailure,
          "radial basis requested in the Bessel overflow range");
  const double sr = std::sqrt(r);
  out.f = {sr * b.J, 0.5 * b.J / sr + sr * k * b.dJ};
  out.g = {sr * b.Y, 0.5 * b.Y / sr + sr * k * b.dY};
  out.wronskian = 2.0 / std::numbers::pi;
  return out;
}

}  // namespace conespec
