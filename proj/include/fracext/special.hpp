#pragma once

#include "fracext/types.hpp"

namespace fracext::special {

/// c_s = 4^s Gamma(s), the constant linking the extension to the derivative.
double extension_constant(Order s);

/// Profile psi_s(t) = (4^s Gamma(s))^{-1} e^{-1/(4t)} t^{-s-1} for t > 0, 0 otherwise.
double psi_profile(double t, Order s);
double log_psi_profile(double t, Order s);

/// Poisson-type kernel Psi_s(x, t) = x^{2s} (4^s Gamma(s))^{-1} e^{-x^2/(4t)} t^{-s-1}.
/// Evaluated in log space; underflows to exactly 0 below exp(-700).
double psi_kernel(double x, double t, Order s);
double log_psi_kernel(double x, double t, Order s);

/// Integral of Psi_s(x, .) over the real line (equals 1).
Estimate kernel_mass(double x, Order s, const QuadratureSpec& spec = {});

struct BesselArg {
  double nu;
  double z;
};

/// Modified Bessel function of the second kind from its cosh integral
/// representation. `error` carries quadrature plus tail bound.
Estimate bessel_k(BesselArg arg, double rel_tol = 1e-12);
/// e^z K_nu(z), the same quadrature without the leading exponential.
Estimate bessel_k_scaled(BesselArg arg, double rel_tol = 1e-12);

/// Laplace transform of psi_s at real omega > 0, by quadrature.
Estimate laplace_psi_numeric(Order s, double omega, const QuadratureSpec& spec = {});
/// (2^{s-1} Gamma(s))^{-1} omega^{s/2} K_s(sqrt(omega)).
double laplace_psi_closed(Order s, double omega);

/// Laplace transform in t of Psi_s(x, .), by quadrature and in closed form
/// (2^{s-1} Gamma(s))^{-1} x^s omega^{s/2} K_s(x sqrt(omega)).
Estimate laplace_kernel_numeric(double x, Order s, double omega, const QuadratureSpec& spec = {});
double laplace_kernel_closed(double x, Order s, double omega);

/// Decaying solution of x^alpha y'' = y, y(0) = 1:
/// c_k x^{1/2} K_{1/(2k)}(x^k / k), k = (2 - alpha)/2.
double bvp_solution(double alpha, double x);

/// Lower incomplete gamma function gamma(a, x).
double lower_gamma(double a, double x);

}  // namespace fracext::special
