#pragma once

#include <optional>
#include <vector>

namespace fracext {

/// Piecewise cubic (four-point Lagrange) interpolant on sorted nodes.
/// With a period, nodes must be uniform and cover one period [t0, t0 + P).
class CubicInterpolant {
 public:
  CubicInterpolant() = default;
  CubicInterpolant(std::vector<double> nodes, std::vector<double> values,
                   std::optional<double> period = std::nullopt);

  double operator()(double t) const;
  /// Derivatives of order 1..3 of the local cubic at t.
  double derivative(double t, int order = 1) const;
  /// p(t) - p(t - h), exact Taylor form when both points share a cell.
  double increment(double t, double h) const;

  double front() const { return nodes_.front(); }
  double back() const { return nodes_.back(); }
  double max_abs() const;
  const std::vector<double>& nodes() const { return nodes_; }
  const std::vector<double>& values() const { return values_; }

 private:
  struct Local {
    double c0, c1, c2, c3;  // p(t) = c0 + c1 d + c2 d^2 + c3 d^3, d = t - anchor
    double anchor;
    int cell;
  };
  Local local(double t) const;
  double node(long k) const;
  double value(long k) const;

  std::vector<double> nodes_;
  std::vector<double> values_;
  std::optional<double> period_;
};

}  // namespace fracext
