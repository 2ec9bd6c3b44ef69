#pragma once

#include <functional>
#include <string>
#include <vector>

#include "fracext/types.hpp"

namespace fracext::pde {

/// x nodes graded toward 0 (x_i = X (i/N)^p, i = 1..N) and uniform t nodes.
struct Grid {
  std::vector<double> x_nodes;
  std::vector<double> t_nodes;
  Order s{0.5};

  static Grid graded(Order s, double X, int N, double T0, double T1, int M, double power = 2.0);
  void validate() const;
};

/// |x|^{1-2s}.
struct Weight {
  double exponent = 0.0;

  explicit Weight(Order s) : exponent(1.0 - 2.0 * s.value()) {}
  double operator()(double x) const;
  /// int_a^b |x|^exponent dx (signed-power antiderivative, any a < b).
  double integral(double a, double b) const;
  /// int_a^b |x|^{-exponent} dx.
  double inverse_integral(double a, double b) const;
};

/// U on (x nodes including 0) x t nodes, row-major in t: values[j * x.size() + i].
/// A reflected field has x running over [-X, X] with 0 in the middle.
struct ExtensionField {
  std::vector<double> x;
  std::vector<double> t;
  std::vector<double> values;
  std::vector<double> boundary_trace;
  double weight_exponent = 0.0;
  bool reflected = false;
  // Largest excursion of U outside [min(inf f, 0), max(sup f, 0)].
  double max_principle_violation = 0.0;

  double at(std::size_t i, std::size_t j) const { return values[j * x.size() + i]; }
  double& at(std::size_t i, std::size_t j) { return values[j * x.size() + i]; }
  std::size_t zero_index() const;
};

enum class FarBoundary {
  Zero,         // U(X, t) = 0, X checked against the convolution formula
  Convolution,  // U(X, t) taken from the convolution formula
  Constant      // U(X, t) = far_value
};

enum class TimeScheme { BackwardEuler, BDF2 };

struct SolveOptions {
  FarBoundary far = FarBoundary::Zero;
  double far_value = 0.0;
  double far_tolerance = 1e-6;  // relative to bound_M, for FarBoundary::Zero
  TimeScheme scheme = TimeScheme::BDF2;
  QuadratureSpec spec{};
};

/// Implicit finite volumes for x^{1-2s} U_t = (x^{1-2s} U_x)_x with U(0,t) = f(t).
/// The initial slice is the convolution solution at t_nodes.front().
ExtensionField solve_degenerate_heat(const HolderFunction& f, const Grid& grid,
                                     const SolveOptions& options = {});

/// Even extension across x = 0. Reflecting a reflected field returns it unchanged.
ExtensionField reflect(const ExtensionField& field);

/// The x >= 0 half of a field.
ExtensionField positive_half(const ExtensionField& field);

/// Separable test function eta(x, t) = X(x) T(t) with derivatives.
struct TestFunction {
  std::function<double(double)> space, space_dx;
  std::function<double(double)> time, time_dt;

  double operator()(double x, double t) const { return space(x) * time(t); }
};

/// exp(1 - 1/(1 - u^2)) bump in u = (v - center)/radius, zero outside.
std::function<double(double)> smooth_bump(double center, double radius);
std::function<double(double)> smooth_bump_derivative(double center, double radius);

/// Even space bump of radius R times a time bump on (t_center - t_radius, t_center + t_radius).
TestFunction bump_test_function(double R, double t_center, double t_radius);

/// int int |x|^{1-2s} (U_x eta_x - U eta_t) dx dt over a reflected field.
double weak_residual(const ExtensionField& reflected, const TestFunction& eta);

/// The residual predicted by the boundary flux: (4s/c_s) int D^s f(t) eta(0,t) dt
/// with D^s the unnormalized derivative, given its samples on `t`.
double predicted_weak_residual(Order s, const std::vector<double>& t,
                               const std::vector<double>& marchaud_values,
                               const TestFunction& eta);

/// int x^{1-2s} U_x(x, t) eta(t) dt at the grid nodes nearest to each x.
/// U_x is taken one-sided in the variable x^{2s}, exact for A + B x^{2s}.
std::vector<double> weak_flux_limit(const ExtensionField& field,
                                    const std::function<double(double)>& eta_t,
                                    const std::vector<double>& x_sequence);

enum class IntervalFamily {
  All,            // every endpoint pair on the grid
  OriginAnchored  // intervals (-r, r), (0, r), (-r, 0)
};

/// sup over grid intervals J of (avg_J w)(avg_J 1/w) for w = |x|^{1-2s} on (-R, R).
double a2_constant(Order s, double R = 1.0, int n_intervals = 64,
                   IntervalFamily family = IntervalFamily::All);

/// 1/(4s(1-s)): the A2 product of any interval (-r, r) or (0, r).
double a2_closed_form(Order s);

/// CSV with columns x,t,U,w.
void write_field_csv(const ExtensionField& field, const std::string& path);

}  // namespace fracext::pde
