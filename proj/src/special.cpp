#include "fracext/special.hpp"

#include <boost/math/special_functions/gamma.hpp>
#include <cmath>
#include <limits>
#include <vector>

#include "fracext/integrate.hpp"

namespace fracext::special {
namespace {

constexpr double kUnderflowLog = -700.0;

double safe_exp(double log_value) {
  return log_value < kUnderflowLog ? 0.0 : std::exp(log_value);
}

Tolerance tolerance_from(const QuadratureSpec& spec) {
  return {spec.abs_tol, spec.rel_tol, static_cast<std::size_t>(spec.max_subdivisions)};
}

std::vector<double> uniform_points(double a, double b, double step) {
  std::vector<double> pts;
  const int n = std::max(1, static_cast<int>(std::ceil((b - a) / step)));
  for (int i = 0; i <= n; ++i) pts.push_back(a + (b - a) * i / n);
  return pts;
}

// Log-variable range for integrals of e^{-e^y + s y - omega e^{-y}/4}: above
// y_hi the double exponential is negligible; below y_lo either the e^{sy}
// decay or the omega factor is.
struct LogRange {
  double lo, hi, tail_bound;
};

LogRange log_range(double s, double omega) {
  const double hi = std::log(760.0);
  double lo = std::log(1e-18 * s) / s;
  if (omega > 0.0) lo = std::max(lo, std::log(omega / 3200.0));
  const double tail = std::exp(s * lo) / s * std::exp(-0.25 * omega * std::exp(-lo));
  return {lo, hi, tail / std::tgamma(s)};
}

}  // namespace

double extension_constant(Order s) {
  return std::pow(4.0, s.value()) * std::tgamma(s.value());
}

double log_psi_profile(double t, Order s) {
  if (t <= 0.0) return -std::numeric_limits<double>::infinity();
  const double sv = s.value();
  return -1.0 / (4.0 * t) - (sv + 1.0) * std::log(t) - std::log(extension_constant(s));
}

double psi_profile(double t, Order s) { return t <= 0.0 ? 0.0 : safe_exp(log_psi_profile(t, s)); }

double log_psi_kernel(double x, double t, Order s) {
  if (t <= 0.0 || !(x > 0.0)) return -std::numeric_limits<double>::infinity();
  const double sv = s.value();
  return 2.0 * sv * std::log(x) - x * x / (4.0 * t) - (sv + 1.0) * std::log(t) -
         std::log(extension_constant(s));
}

double psi_kernel(double x, double t, Order s) {
  if (!(x > 0.0)) fail(ErrorKind::InvalidArgument, "psi_kernel requires x > 0");
  return t <= 0.0 ? 0.0 : safe_exp(log_psi_kernel(x, t, s));
}

Estimate kernel_mass(double x, Order s, const QuadratureSpec& spec) {
  if (!(x > 0.0)) fail(ErrorKind::InvalidArgument, "kernel_mass requires x > 0");
  spec.validate();
  // t = x^2 tau, tau = 1/(4u), u = e^y: dt = -t dy.
  const auto range = log_range(s.value(), 0.0);
  auto integrand = [&](double y) {
    const double t = 0.25 * x * x * std::exp(-y);
    return safe_exp(log_psi_kernel(x, t, s) + std::log(t));
  };
  const auto pts = uniform_points(range.lo, range.hi, 2.0);
  const auto r = integrate(integrand, std::span<const double>(pts), tolerance_from(spec));
  if (!r.converged) fail(ErrorKind::ToleranceNotMet, "kernel_mass: subdivision limit reached");
  return {r.value, r.error + range.tail_bound};
}

Estimate bessel_k_scaled(BesselArg arg, double rel_tol) {
  if (!(arg.z > 0.0)) fail(ErrorKind::InvalidArgument, "bessel_k requires z > 0");
  if (!(std::abs(arg.nu) < 2.0)) fail(ErrorKind::InvalidArgument, "bessel_k supports |nu| < 2");
  const double nu = std::abs(arg.nu);
  const double z = arg.z;
  // e^{-z(cosh u - 1)} = e^{-2 z sinh^2(u/2)}.
  auto exponent = [&](double u) {
    const double sh = std::sinh(0.5 * u);
    return -2.0 * z * sh * sh;
  };
  double upper = 1.0;
  while (exponent(upper) + nu * upper > -48.0) upper *= 1.25;
  auto integrand = [&](double u) { return std::exp(exponent(u)) * std::cosh(nu * u); };
  const auto pts = uniform_points(0.0, upper, 1.0);
  const auto r = integrate(integrand, std::span<const double>(pts), Tolerance{1e-300, rel_tol, 100000});
  if (!r.converged) fail(ErrorKind::ToleranceNotMet, "bessel_k: subdivision limit reached");
  const double decay_rate = z * std::sinh(upper) - nu;
  const double tail = std::exp(exponent(upper)) * std::cosh(nu * upper) / std::max(decay_rate, 1e-300);
  return {r.value, r.error + tail};
}

Estimate bessel_k(BesselArg arg, double rel_tol) {
  const auto scaled = bessel_k_scaled(arg, rel_tol);
  const double factor = std::exp(-arg.z);
  return {scaled.value * factor, scaled.error * factor};
}

Estimate laplace_psi_numeric(Order s, double omega, const QuadratureSpec& spec) {
  if (!(omega > 0.0)) fail(ErrorKind::InvalidArgument, "laplace transform needs omega > 0");
  spec.validate();
  const auto range = log_range(s.value(), omega);
  auto integrand = [&](double y) {
    const double t = 0.25 * std::exp(-y);
    return safe_exp(log_psi_profile(t, s) + std::log(t) - omega * t);
  };
  const auto pts = uniform_points(range.lo, range.hi, 2.0);
  const auto r = integrate(integrand, std::span<const double>(pts), tolerance_from(spec));
  if (!r.converged) fail(ErrorKind::ToleranceNotMet, "laplace_psi_numeric: subdivision limit reached");
  return {r.value, r.error + range.tail_bound};
}

double laplace_psi_closed(Order s, double omega) {
  if (!(omega > 0.0)) fail(ErrorKind::InvalidArgument, "laplace transform needs omega > 0");
  const double sv = s.value();
  const double k = bessel_k({sv, std::sqrt(omega)}).value;
  return std::pow(omega, 0.5 * sv) * k / (std::pow(2.0, sv - 1.0) * std::tgamma(sv));
}

Estimate laplace_kernel_numeric(double x, Order s, double omega, const QuadratureSpec& spec) {
  if (!(x > 0.0) || !(omega > 0.0)) {
    fail(ErrorKind::InvalidArgument, "laplace_kernel_numeric needs x > 0 and omega > 0");
  }
  spec.validate();
  const auto range = log_range(s.value(), omega * x * x);
  auto integrand = [&](double y) {
    const double t = 0.25 * x * x * std::exp(-y);
    return safe_exp(log_psi_kernel(x, t, s) + std::log(t) - omega * t);
  };
  const auto pts = uniform_points(range.lo, range.hi, 2.0);
  const auto r = integrate(integrand, std::span<const double>(pts), tolerance_from(spec));
  if (!r.converged) fail(ErrorKind::ToleranceNotMet, "laplace_kernel_numeric: subdivision limit reached");
  return {r.value, r.error + range.tail_bound};
}

double laplace_kernel_closed(double x, Order s, double omega) {
  const double sv = s.value();
  const double z = x * std::sqrt(omega);
  const double k = bessel_k({sv, z}).value;
  return std::pow(x, sv) * std::pow(omega, 0.5 * sv) * k /
         (std::pow(2.0, sv - 1.0) * std::tgamma(sv));
}

double bvp_solution(double alpha, double x) {
  if (!(alpha < 1.0)) fail(ErrorKind::InvalidArgument, "bvp_solution requires alpha < 1");
  if (x < 0.0) fail(ErrorKind::InvalidArgument, "bvp_solution requires x >= 0");
  if (x == 0.0) return 1.0;
  const double k = 0.5 * (2.0 - alpha);
  const double nu = 1.0 / (2.0 * k);
  const double z = std::pow(x, k) / k;
  const double log_ck = (1.0 - nu) * std::log(2.0) - nu * std::log(k) - std::lgamma(nu);
  const double scaled = bessel_k_scaled({nu, z}).value;
  return safe_exp(log_ck + 0.5 * std::log(x) - z + std::log(scaled));
}

double lower_gamma(double a, double x) {
  if (x <= 0.0) return 0.0;
  return boost::math::tgamma_lower(a, x);
}

}  // namespace fracext::special
