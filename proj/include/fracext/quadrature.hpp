#pragma once

#include <span>
#include <string>
#include <vector>

#include "fracext/types.hpp"

namespace fracext::quadrature {

/// Result of a Marchaud derivative evaluation. `error` is the sum of the
/// adaptive quadrature estimate and the analytic tail truncation bound.
struct MarchaudResult {
  double value = 0.0;
  double error = 0.0;
  double quadrature_error = 0.0;
  double tail_bound = 0.0;
  // Unnormalized contributions of (0, split_delta) and (split_delta, inf).
  double singular_part = 0.0;
  double tail_part = 0.0;
  std::vector<std::string> warnings;
};

/// s / Gamma(1 - s).
double normalization(Order s);

/// Marchaud derivative of order s at t:
///   int_0^inf (f(t) - f(t -/+ tau)) / tau^{1+s} dtau,
/// times s/Gamma(1-s) when `normalized`. Left uses the past of f, right the future.
MarchaudResult marchaud(const HolderFunction& f, double t, Order s, Side side,
                        bool normalized = false, const QuadratureSpec& spec = {});

/// int_0^inf (f(t) - f(t -/+ tau)) e^{-a/tau} tau^{-1-s-m} dtau. With a = 0,
/// m = 0 this is the unnormalized Marchaud integral; a > 0 gives the damped
/// integrals behind the extension and its x-derivative.
MarchaudResult damped_marchaud(const HolderFunction& f, double t, Order s, Side side, double a,
                               int m, const QuadratureSpec& spec = {});

/// A function together with its classical derivatives f', f'', ...
struct SmoothFunction {
  HolderFunction f;
  std::vector<HolderFunction> derivatives;
};

/// Higher-order derivative: the normalized Marchaud derivative of order {s}
/// applied to the [s]-th classical derivative.
MarchaudResult marchaud_general(const SmoothFunction& f, double t, GeneralOrder order, Side side,
                                const QuadratureSpec& spec = {});

/// Independent check of `marchaud` by fixed (non-adaptive) tanh-sinh panels:
/// log-spaced below the split point, unit-length linear panels beyond it.
double oracle_marchaud(const HolderFunction& f, double t, Order s, Side side,
                       bool normalized = false);

/// Normalized left derivatives for each order in `orders`.
std::vector<MarchaudResult> limit_small_s(const HolderFunction& f, double t,
                                          std::span<const double> orders,
                                          const QuadratureSpec& spec = {});

}  // namespace fracext::quadrature
