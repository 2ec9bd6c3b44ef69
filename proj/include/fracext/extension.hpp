#pragma once

#include <vector>

#include "fracext/types.hpp"

namespace fracext::extension {

/// A point (x, t) of the upper half-plane at which to evaluate U = Psi_s * f.
struct ExtensionQuery {
  double x = 1.0;
  double t = 0.0;
  Order s{0.5};
  HolderFunction f;
  QuadratureSpec spec{};

  void validate() const;
};

enum class Extrapolation { None, Richardson };

/// Decreasing x values at which the boundary limit is sampled.
struct LimitSchedule {
  std::vector<double> x_values;
  Extrapolation extrapolation = Extrapolation::Richardson;
  // Relative agreement required between the full and the reduced fit.
  double tolerance = 1e-3;

  /// `count` values x0, x0 r, x0 r^2, ...
  static LimitSchedule geometric(double x0 = 0.5, double ratio = 0.5, int count = 8);
  void validate() const;
};

struct LimitRow {
  double x = 0.0;
  double value = 0.0;
  double error = 0.0;  // quadrature error of this row
};

struct LimitResult {
  double value = 0.0;
  double error = 0.0;
  // Truncation bound of the far past shared with the quadrature route (not in `error`).
  double tail_bound = 0.0;
  std::vector<LimitRow> table;
};

struct FluxResult {
  double raw = 0.0;        // limit of -c_s x^{1-2s} dU/dx
  double corrected = 0.0;  // raw / (2s)
  double error = 0.0;      // error of raw
  double tail_bound = 0.0;
  std::vector<LimitRow> table;
};

/// U(x, t) = int_0^inf psi_s(tau) f(t - tau x^2) dtau, evaluated in increment
/// form so that it stays accurate as x -> 0.
Estimate extend(const ExtensionQuery& q);

/// U(x, t) straight from the unscaled convolution int Psi_s(x, tau) f(t - tau) dtau.
/// Meant for validation at moderate x.
Estimate extend_convolution(const ExtensionQuery& q);

/// Extension for the backward equation: int_0^inf psi_s(tau) f(t + tau x^2) dtau.
Estimate backward_extend(const HolderFunction& f, double x, double t, Order s,
                         const QuadratureSpec& spec = {});

/// -c_s x^{-2s} (U(x,t) - f(t)) at a single x. Left side uses `extend`,
/// right side `backward_extend`. The error excludes the tail truncation bound.
Estimate trace_value(const HolderFunction& f, double x, double t, Order s, Side side = Side::Left,
                     const QuadratureSpec& spec = {});

/// -c_s x^{1-2s} dU/dx(x, t) at a single x.
Estimate flux_value(const HolderFunction& f, double x, double t, Order s, Side side = Side::Left,
                    const QuadratureSpec& spec = {});

/// x -> 0 limit of trace_value: the unnormalized Marchaud derivative.
LimitResult trace_limit(const HolderFunction& f, double t, Order s,
                        const LimitSchedule& schedule = LimitSchedule::geometric(),
                        const QuadratureSpec& spec = {}, Side side = Side::Left);

/// x -> 0 limit of flux_value, raw and divided by 2s.
FluxResult flux_limit(const HolderFunction& f, double t, Order s,
                      const LimitSchedule& schedule = LimitSchedule::geometric(),
                      const QuadratureSpec& spec = {}, Side side = Side::Left);

/// Fits v(x) = L + sum_j c_j x^{e_j} over the table and returns L, with an
/// error estimate from refitting without the largest x.
LimitResult extrapolate(std::vector<LimitRow> table, std::vector<double> exponents,
                        double tolerance);

/// Correction exponents of the trace/flux tables: 2-2s, 2, 4-2s, 4.
std::vector<double> correction_exponents(Order s);

struct ComposeResult {
  double value = 0.0;  // normalized D^{1-s} D^s f (t)
  double error = 0.0;
  double interpolation_error = 0.0;
  int grid_points = 0;
};

/// Normalized D^{1-s} applied to the trace-route D^s f, tabulated on a grid
/// and interpolated. Uses one period when f is periodic, the support side of
/// a known left tail, else a window of half-width 20.
ComposeResult compose_check(const HolderFunction& f, double t, Order s,
                            const LimitSchedule& schedule = LimitSchedule::geometric(),
                            const QuadratureSpec& spec = {}, double tolerance = 1e-2);

/// Same for several evaluation points sharing one tabulation of D^s f.
std::vector<ComposeResult> compose_check(const HolderFunction& f, const std::vector<double>& ts,
                                         Order s,
                                         const LimitSchedule& schedule = LimitSchedule::geometric(),
                                         const QuadratureSpec& spec = {},
                                         double tolerance = 1e-2);

}  // namespace fracext::extension
