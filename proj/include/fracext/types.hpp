#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "fracext/error.hpp"

namespace fracext {

/// Fractional order s in the open interval (0, 1).
class Order {
 public:
  explicit Order(double s) : s_(s) {
    if (!(s > 0.0 && s < 1.0)) {
      fail(ErrorKind::InvalidArgument, "order must lie in (0,1), got " + std::to_string(s));
    }
  }
  double value() const noexcept { return s_; }
  /// Order 1 - s, used by the composition identity.
  Order complement() const { return Order(1.0 - s_); }

 private:
  double s_;
};

/// Order s in (0, n) split as [s] + {s}; integer orders are rejected.
class GeneralOrder {
 public:
  explicit GeneralOrder(double s);
  double value() const noexcept { return s_; }
  int integer_part() const noexcept { return integer_part_; }
  Order fractional_part() const noexcept { return fractional_; }

 private:
  double s_;
  int integer_part_;
  Order fractional_;
};

enum class Side { Left, Right };

/// The function takes the constant `value` on the half-line beyond `edge`
/// (for a left tail: t <= edge; for a right tail: t >= edge).
struct TailValue {
  double edge;
  double value;
};

/// An evaluatable, bounded, locally Holder continuous function together with
/// its declared regularity data and optional structural hints that let the
/// integrators replace truncated tails by exact contributions.
struct HolderFunction {
  std::function<double(double)> eval;
  double bound_M = 0.0;
  double holder_exp = 1.0;
  double holder_const = 0.0;

  std::function<double(double)> derivative;
  // Accurate f(t) - f(t - h); h may be negative.
  std::function<double(double, double)> increment_fn;

  std::optional<TailValue> left_tail;
  std::optional<TailValue> right_tail;
  std::optional<double> period;
  // Points where f is not smooth (integrators split there).
  std::vector<double> kinks;

  std::string name = "function";

  double operator()(double t) const { return eval(t); }

  /// f(t) - f(t - h), free of cancellation for small |h| when possible.
  double increment(double t, double h) const;

  bool has_derivative() const noexcept { return static_cast<bool>(derivative); }

  /// Samples the declared bound and Holder estimate on [lo, hi]; returns
  /// human-readable warnings (empty when all checks pass).
  std::vector<std::string> check_samples(double lo, double hi, int samples = 257) const;
};

/// Multiplies f by a constant; the regularity data scales accordingly.
HolderFunction scaled(const HolderFunction& f, double factor);
/// t -> f(t - shift).
HolderFunction translated(const HolderFunction& f, double shift);
/// t -> f(-t).
HolderFunction reflected(const HolderFunction& f);
/// t -> a f(t) + b g(t).
HolderFunction linear_combination(double a, const HolderFunction& f, double b,
                                  const HolderFunction& g);

/// Controls for singular-integral evaluation.
struct QuadratureSpec {
  double split_delta = 1.0;
  double tail_cutoff = 1.0e5;
  double abs_tol = 1.0e-11;
  double rel_tol = 1.0e-11;
  int max_subdivisions = 400000;

  void validate() const;
};

/// A numerical value together with an error estimate or bound.
struct Estimate {
  double value = 0.0;
  double error = 0.0;
};

}  // namespace fracext
