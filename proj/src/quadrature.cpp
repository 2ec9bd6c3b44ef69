#include "fracext/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

#include "fracext/integrate.hpp"
#include "fracext/special.hpp"

namespace fracext::quadrature {
namespace {

// Distance along the used half-line at which f becomes the known tail
// constant, or nullopt when no tail is declared.
struct History {
  std::optional<double> edge_distance;
  double tail_value = 0.0;
  std::vector<double> kink_distances;
};

History history_of(const HolderFunction& f, double t, Side side) {
  History h;
  const auto& tail = side == Side::Left ? f.left_tail : f.right_tail;
  if (tail) {
    h.edge_distance = side == Side::Left ? t - tail->edge : tail->edge - t;
    h.tail_value = tail->value;
  }
  for (double k : f.kinks) {
    const double d = side == Side::Left ? t - k : k - t;
    if (d > 0.0) h.kink_distances.push_back(d);
  }
  if (h.edge_distance && *h.edge_distance > 0.0) h.kink_distances.push_back(*h.edge_distance);
  return h;
}

double difference(const HolderFunction& f, double t, double tau, Side side) {
  return side == Side::Left ? f.increment(t, tau) : f.increment(t, -tau);
}

}  // namespace

double normalization(Order s) { return s.value() / std::tgamma(1.0 - s.value()); }

namespace {

// int_U^inf e^{-a/tau} tau^{-1-alpha} dtau = U^{-alpha} gamma(alpha, a/U) / (a/U)^alpha.
double damped_power_tail(double upper, double a, double alpha) {
  const double z = a / upper;
  double scaled;
  if (z < 1e-6) {
    scaled = 1.0 / alpha - z / (alpha + 1.0) + 0.5 * z * z / (alpha + 2.0);
  } else {
    scaled = special::lower_gamma(alpha, z) * std::pow(z, -alpha);
  }
  return std::pow(upper, -alpha) * scaled;
}

// sum_{k >= 0} w(b + k P) for w(tau) = e^{-a/tau} tau^{-1-alpha}: direct terms,
// then Euler-Maclaurin from X = b + N P with the closed-form integral.
double lattice_sum(double b, double P, double a, double alpha) {
  const int N = 64 + static_cast<int>(std::ceil(4.0 * a / P));
  double sum = 0.0;
  for (int k = 0; k < N; ++k) {
    const double tau = b + k * P;
    sum += std::exp(-a / tau - (1.0 + alpha) * std::log(tau));
  }
  const double X = b + N * P;
  const double w = std::exp(-a / X - (1.0 + alpha) * std::log(X));
  const double p1 = a / (X * X) - (1.0 + alpha) / X;
  const double p2 = -2.0 * a / (X * X * X) + (1.0 + alpha) / (X * X);
  const double p3 = 6.0 * a / (X * X * X * X) - 2.0 * (1.0 + alpha) / (X * X * X);
  const double w1 = w * p1;
  const double w3 = w * (p3 + 3.0 * p1 * p2 + p1 * p1 * p1);
  sum += damped_power_tail(X, a, alpha) / P + 0.5 * w - P * w1 / 12.0 + P * P * P * w3 / 720.0;
  return sum;
}

}  // namespace

MarchaudResult damped_marchaud(const HolderFunction& f, double t, Order order, Side side,
                               double a, int m, const QuadratureSpec& spec) {
  spec.validate();
  const double s = order.value();
  if (!(s < f.holder_exp)) {
    fail(ErrorKind::OrderTooLarge, "order " + std::to_string(s) +
                                       " is not below the Holder exponent " +
                                       std::to_string(f.holder_exp));
  }
  if (!(a >= 0.0) || m < 0 || (m > 0 && a == 0.0)) {
    fail(ErrorKind::InvalidArgument, "damped_marchaud needs a >= 0, m >= 0, and a > 0 when m > 0");
  }
  MarchaudResult out;
  const double ft = f.eval(t);
  if (std::abs(ft) > f.bound_M * (1.0 + 1e-12)) {
    out.warnings.push_back("|f(t)| exceeds the declared bound M");
  }
  const History hist = history_of(f, t, side);
  if (hist.edge_distance && *hist.edge_distance <= 0.0) {
    return out;  // f is constant on the whole half-line used
  }

  const Tolerance tol{spec.abs_tol, spec.rel_tol, static_cast<std::size_t>(spec.max_subdivisions)};
  const double delta = spec.split_delta;
  const double alpha = s + m;
  auto weight = [&](double tau) {
    return a > 0.0 ? std::exp(-a / tau - (1.0 + alpha) * std::log(tau))
                   : std::pow(tau, -1.0 - alpha);
  };
  std::vector<double> scales;
  if (a > 0.0) scales = {a / 16.0, a / 4.0, a, 4.0 * a, 16.0 * a};

  // Singular part: tau = delta u^p with p = 1/(gamma - s) makes the undamped
  // integrand bounded at u = 0 for Holder data.
  const double p = 1.0 / (f.holder_exp - s);
  auto singular = [&](double u) {
    const double tau = delta * std::pow(u, p);
    if (tau <= 0.0) return 0.0;
    return difference(f, t, tau, side) * weight(tau) * p * tau / u;
  };
  std::vector<double> u_breaks{0.25, 0.5, 0.75};
  for (const std::vector<double>* list : {&hist.kink_distances, static_cast<const std::vector<double>*>(&scales)}) {
    for (double d : *list) {
      if (d < delta) u_breaks.push_back(std::pow(d / delta, 1.0 / p));
    }
  }
  const auto su = breakpoints(0.0, 1.0, u_breaks);
  const auto sing = integrate(singular, std::span<const double>(su), tol);
  if (!sing.converged) fail(ErrorKind::ToleranceNotMet, "marchaud: singular part did not converge");

  double tail_integral = 0.0;
  double tail_error = 0.0;
  double remainder = 0.0;
  if (f.period && !hist.edge_distance) {
    // Periodic past: fold (delta, inf) onto one period with the lattice sum of the weight.
    const double P = *f.period;
    auto folded = [&](double u) {
      const double value = side == Side::Left ? f.eval(t - delta - u) : f.eval(t + delta + u);
      return value * lattice_sum(delta + u, P, a, alpha);
    };
    std::vector<double> cuts;
    for (int k = 1; k < 8; ++k) cuts.push_back(P * k / 8.0);
    const auto pb = breakpoints(0.0, P, cuts);
    const auto r = integrate(folded, std::span<const double>(pb), tol);
    if (!r.converged) fail(ErrorKind::ToleranceNotMet, "marchaud: periodic tail did not converge");
    tail_integral = -r.value;
    tail_error = r.error;
    remainder = ft * damped_power_tail(delta, a, alpha);
  } else {
    // Tail part on (delta, upper) plus the exact remainder beyond it.
    double upper = spec.tail_cutoff;
    if (hist.edge_distance) {
      upper = std::max(delta, *hist.edge_distance);
      remainder = (ft - hist.tail_value) * damped_power_tail(upper, a, alpha);
    } else {
      remainder = ft * damped_power_tail(upper, a, alpha);
      out.tail_bound = 2.0 * f.bound_M * damped_power_tail(upper, a, alpha);
    }
    if (upper > delta) {
      std::vector<double> extra = hist.kink_distances;
      for (double b = 2.0 * delta; b < upper; b *= 2.0) extra.push_back(b);
      extra.insert(extra.end(), scales.begin(), scales.end());
      const auto tb = breakpoints(delta, upper, extra);
      auto tail = [&](double tau) { return difference(f, t, tau, side) * weight(tau); };
      const auto r = integrate(tail, std::span<const double>(tb), tol);
      if (!r.converged) fail(ErrorKind::ToleranceNotMet, "marchaud: tail did not converge");
      tail_integral = r.value;
      tail_error = r.error;
    }
  }

  out.singular_part = sing.value;
  out.tail_part = tail_integral + remainder;
  out.quadrature_error = sing.error + tail_error;
  out.value = out.singular_part + out.tail_part;
  out.error = out.quadrature_error + out.tail_bound;
  return out;
}

MarchaudResult marchaud(const HolderFunction& f, double t, Order order, Side side,
                        bool normalized, const QuadratureSpec& spec) {
  MarchaudResult out = damped_marchaud(f, t, order, side, 0.0, 0, spec);
  if (normalized) {
    const double factor = normalization(order);
    out.value *= factor;
    out.error *= factor;
    out.quadrature_error *= factor;
    out.tail_bound *= factor;
  }
  return out;
}

MarchaudResult marchaud_general(const SmoothFunction& f, double t, GeneralOrder order, Side side,
                                const QuadratureSpec& spec) {
  const int k = order.integer_part();
  if (k == 0) return marchaud(f.f, t, order.fractional_part(), side, true, spec);
  if (static_cast<int>(f.derivatives.size()) < k || !f.derivatives[k - 1].eval) {
    fail(ErrorKind::MissingDerivative,
         "derivative of order " + std::to_string(k) + " is not available");
  }
  return marchaud(f.derivatives[k - 1], t, order.fractional_part(), side, true, spec);
}

namespace {

// Fixed tanh-sinh rule on [0, 1] with nodes stored as distances from the
// nearer endpoint so that endpoint clustering survives rounding.
struct TanhSinhRule {
  std::vector<double> offset;  // distance from the nearer endpoint, fraction of length
  std::vector<bool> from_left;
  std::vector<double> weight;

  TanhSinhRule() {
    constexpr double h = 1.0 / 16.0;
    constexpr int K = 52;
    for (int k = -K; k <= K; ++k) {
      const double arg = 0.5 * std::numbers::pi * std::sinh(k * h);
      const double near = 1.0 / (1.0 + std::exp(2.0 * std::abs(arg)));
      const double w =
          0.5 * h * 0.5 * std::numbers::pi * std::cosh(k * h) / (std::cosh(arg) * std::cosh(arg));
      if (!(w > 0.0) || !(near > 0.0)) continue;
      offset.push_back(near);
      from_left.push_back(k <= 0);
      weight.push_back(w);
    }
  }

  template <class F>
  double apply(F& f, double a, double b) const {
    const double len = b - a;
    double sum = 0.0;
    for (std::size_t i = 0; i < weight.size(); ++i) {
      const double x = from_left[i] ? a + len * offset[i] : b - len * offset[i];
      sum += weight[i] * f(x);
    }
    return sum * len;
  }
};

const TanhSinhRule& tanh_sinh() {
  static const TanhSinhRule rule;
  return rule;
}

template <class F>
double panels(F& f, double a, double b, double width, const std::vector<double>& cuts) {
  std::vector<double> pts{a, b};
  for (double c : cuts) {
    if (c > a && c < b) pts.push_back(c);
  }
  std::sort(pts.begin(), pts.end());
  double sum = 0.0;
  for (std::size_t i = 0; i + 1 < pts.size(); ++i) {
    const double lo = pts[i], hi = pts[i + 1];
    if (!(hi > lo)) continue;
    const int n = std::max(1, static_cast<int>(std::ceil((hi - lo) / width)));
    for (int j = 0; j < n; ++j) {
      sum += tanh_sinh().apply(f, lo + (hi - lo) * j / n, lo + (hi - lo) * (j + 1) / n);
    }
  }
  return sum;
}

}  // namespace

double oracle_marchaud(const HolderFunction& f, double t, Order order, Side side, bool normalized) {
  constexpr double kInner = 1e-10;
  constexpr double kSplit = 1.0;
  constexpr double kFar = 1e5;
  const double s = order.value();
  if (!(s < f.holder_exp)) fail(ErrorKind::OrderTooLarge, "order not below Holder exponent");

  auto delta_f = [&](double tau) {
    return side == Side::Left ? f.increment(t, tau) : f.increment(t, -tau);
  };
  std::optional<double> edge;
  double tail_value = 0.0;
  const auto& tail = side == Side::Left ? f.left_tail : f.right_tail;
  if (tail) {
    edge = side == Side::Left ? t - tail->edge : tail->edge - t;
    tail_value = tail->value;
    if (*edge <= 0.0) return 0.0;
  }
  std::vector<double> cuts;
  for (double k : f.kinks) {
    const double d = side == Side::Left ? t - k : k - t;
    if (d > 0.0) cuts.push_back(d);
  }
  if (edge) cuts.push_back(*edge);

  // (0, kInner): linear model of the increment.
  double total = delta_f(kInner) * std::pow(kInner, -s) / (1.0 - s);

  // (kInner, kSplit) in y = log tau.
  auto in_log = [&](double y) {
    const double tau = std::exp(y);
    return delta_f(tau) * std::exp(-s * y);
  };
  std::vector<double> log_cuts;
  for (double c : cuts) {
    if (c > kInner && c < kSplit) log_cuts.push_back(std::log(c));
  }
  total += panels(in_log, std::log(kInner), std::log(kSplit), 1.0, log_cuts);

  // (kSplit, end) on unit linear panels.
  const double end = edge ? std::max(kSplit, *edge) : kFar;
  auto linear = [&](double tau) { return delta_f(tau) * std::pow(tau, -1.0 - s); };
  if (end > kSplit) total += panels(linear, kSplit, end, 1.0, cuts);
  const double ft = f.eval(t);
  total += (edge ? ft - tail_value : ft) * std::pow(end, -s) / s;
  return normalized ? total * normalization(order) : total;
}

std::vector<MarchaudResult> limit_small_s(const HolderFunction& f, double t,
                                          std::span<const double> orders,
                                          const QuadratureSpec& spec) {
  std::vector<MarchaudResult> out;
  out.reserve(orders.size());
  for (double s : orders) out.push_back(marchaud(f, t, Order(s), Side::Left, true, spec));
  return out;
}

}  // namespace fracext::quadrature
