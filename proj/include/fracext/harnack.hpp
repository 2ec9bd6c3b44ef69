#pragma once

#include <string>
#include <vector>

#include "fracext/types.hpp"

namespace fracext::harnack {

struct Interval {
  double lo = 0.0;
  double hi = 1.0;

  double length() const { return hi - lo; }
  bool contains(const Interval& other) const { return other.lo >= lo && other.hi <= hi; }
};

/// Windows of the parabolic Harnack inequality: the sup is taken over an
/// earlier interval than the inf.
struct HarnackWindow {
  double t0 = 0.0;
  double delta = 1.0;

  HarnackWindow(double t0, double delta);
  /// Parabolic parametrization with delta = rho^2.
  static HarnackWindow from_rho(double t0, double rho);

  Interval sup_interval() const { return {t0 - 0.75 * delta, t0 - 0.25 * delta}; }
  Interval inf_interval() const { return {t0 + 0.75 * delta, t0 + delta}; }
  Interval span() const { return {t0 - delta, t0 + delta}; }
};

/// The alternative windows I, I+ (far left) and I- (around tau).
struct RemarkWindow {
  double tau = 0.0;
  double delta = 1.0;

  RemarkWindow(double tau, double delta);
  static RemarkWindow from_rho(double tau, double rho);

  Interval I() const { return {tau - 15.0 * delta / 8.0, tau + delta / 8.0}; }
  Interval I_plus() const { return {tau - 15.0 * delta / 8.0, tau - 7.0 * delta / 4.0}; }
  Interval I_minus() const { return {tau - delta / 8.0, tau + delta / 8.0}; }
};

/// A nonnegative function with D^s phi = 0 on J, up to the recorded residual.
struct StationaryFunction {
  HolderFunction function;
  Interval J;
  Order s{0.5};
  double residual = 0.0;   // sup over the check points of |normalized D^s phi|
  double scale = 1.0;      // max |phi| on J
  double threshold = 0.0;  // residual bound that was enforced (relative to scale)
  std::vector<double> nodes, values;

  double operator()(double t) const { return function.eval(t); }
};

struct StationaryOptions {
  double history_factor = 40.0;  // GL history window, in units of |J|
  bool extrapolate = true;       // combine the n and 2n solutions (removes the O(h) term)
  double threshold = 1e-3;       // allowed residual relative to scale
  int check_points = 12;
  double check_margin = 0.1;     // residual checked on [lo + margin |J|, hi]
  QuadratureSpec spec{};
};

/// Gruenwald-Letnikov construction of phi on J = (lo, hi) with phi = exterior
/// to the left of J, checked by the quadrature route.
StationaryFunction solve_stationary(const Interval& J, const HolderFunction& exterior, Order s,
                                    int n = 400, const StationaryOptions& options = {});

/// Grunwald-Letnikov weights g_k = (-1)^k binom(s, k), k = 0..count-1.
std::vector<double> gl_weights(Order s, std::size_t count);

/// max of phi on the sup interval over min on the inf interval, each sampled
/// at n_samples points. +infinity when the min is 0 and the max positive.
double harnack_ratio(const StationaryFunction& phi, const HarnackWindow& w, int n_samples = 64);
double harnack_ratio_remark(const StationaryFunction& phi, const RemarkWindow& w,
                            int n_samples = 64);

struct GammaRow {
  double t0 = 0.0, delta = 0.0, sup = 0.0, inf = 0.0, ratio = 0.0;
};

struct GammaEstimate {
  double gamma = 0.0;  // max ratio: a lower bound for any admissible constant
  std::vector<GammaRow> rows;
};

/// Ratios over all (t0, delta) pairs; every window must lie in J.
GammaEstimate gamma_estimate(const StationaryFunction& phi, const std::vector<double>& t0s,
                             const std::vector<double>& deltas, int n_samples = 64);

/// n_t0 x n_delta pairs with [t0 - delta, t0 + delta] inside J.
void window_grid(const Interval& J, int n_t0, int n_delta, std::vector<double>& t0s,
                 std::vector<double>& deltas);

/// CSV with columns t0,delta,sup,inf,ratio.
void write_gamma_csv(const GammaEstimate& estimate, const std::string& path);

}  // namespace fracext::harnack
