#include "fracext/functions.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <memory>
#include <numbers>
#include <sstream>

#include "fracext/integrate.hpp"
#include "fracext/interpolation.hpp"

namespace fracext {

GeneralOrder::GeneralOrder(double s)
    : s_(s),
      integer_part_(static_cast<int>(std::floor(s))),
      fractional_(s > 0.0 && s != std::floor(s) ? Order(s - std::floor(s)) : Order(0.5)) {
  if (!(s > 0.0) || s == std::floor(s) || !std::isfinite(s)) {
    fail(ErrorKind::InvalidArgument, "general order must be positive and non-integer");
  }
}

double HolderFunction::increment(double t, double h) const {
  if (h == 0.0) return 0.0;
  if (increment_fn) return increment_fn(t, h);
  if (derivative && std::abs(h) <= 1e-6 * std::max(1.0, std::abs(t))) {
    return derivative(t - 0.5 * h) * h;
  }
  return eval(t) - eval(t - h);
}

std::vector<std::string> HolderFunction::check_samples(double lo, double hi, int samples) const {
  std::vector<std::string> warnings;
  double worst_bound = 0.0;
  double worst_holder = 0.0;
  for (int i = 0; i < samples; ++i) {
    const double t = lo + (hi - lo) * i / std::max(1, samples - 1);
    const double v = eval(t);
    if (!std::isfinite(v)) {
      warnings.push_back(name + ": non-finite value at t=" + std::to_string(t));
      return warnings;
    }
    worst_bound = std::max(worst_bound, std::abs(v) - bound_M);
    for (double tau : {1.0, 0.1, 0.01, 1e-3}) {
      const double ratio = std::abs(increment(t, tau)) / std::pow(tau, holder_exp);
      worst_holder = std::max(worst_holder, ratio - holder_const);
    }
  }
  if (worst_bound > 1e-12 * std::max(1.0, bound_M)) {
    warnings.push_back(name + ": declared bound M exceeded by " + std::to_string(worst_bound));
  }
  if (worst_holder > 1e-9 * std::max(1.0, holder_const)) {
    warnings.push_back(name + ": declared Holder constant exceeded by " +
                       std::to_string(worst_holder));
  }
  return warnings;
}

HolderFunction scaled(const HolderFunction& f, double factor) {
  HolderFunction g = f;
  g.eval = [f, factor](double t) { return factor * f.eval(t); };
  g.bound_M = std::abs(factor) * f.bound_M;
  g.holder_const = std::abs(factor) * f.holder_const;
  if (f.derivative) g.derivative = [f, factor](double t) { return factor * f.derivative(t); };
  g.increment_fn = [f, factor](double t, double h) { return factor * f.increment(t, h); };
  if (f.left_tail) g.left_tail = TailValue{f.left_tail->edge, factor * f.left_tail->value};
  if (f.right_tail) g.right_tail = TailValue{f.right_tail->edge, factor * f.right_tail->value};
  g.name = std::to_string(factor) + "*" + f.name;
  return g;
}

HolderFunction translated(const HolderFunction& f, double shift) {
  HolderFunction g = f;
  g.eval = [f, shift](double t) { return f.eval(t - shift); };
  if (f.derivative) g.derivative = [f, shift](double t) { return f.derivative(t - shift); };
  g.increment_fn = [f, shift](double t, double h) { return f.increment(t - shift, h); };
  if (f.left_tail) g.left_tail = TailValue{f.left_tail->edge + shift, f.left_tail->value};
  if (f.right_tail) g.right_tail = TailValue{f.right_tail->edge + shift, f.right_tail->value};
  for (double& k : g.kinks) k += shift;
  g.name = f.name + "(t-" + std::to_string(shift) + ")";
  return g;
}

HolderFunction reflected(const HolderFunction& f) {
  HolderFunction g = f;
  g.eval = [f](double t) { return f.eval(-t); };
  if (f.derivative) g.derivative = [f](double t) { return -f.derivative(-t); };
  g.increment_fn = [f](double t, double h) { return f.increment(-t, -h); };
  g.left_tail.reset();
  g.right_tail.reset();
  if (f.right_tail) g.left_tail = TailValue{-f.right_tail->edge, f.right_tail->value};
  if (f.left_tail) g.right_tail = TailValue{-f.left_tail->edge, f.left_tail->value};
  for (double& k : g.kinks) k = -k;
  g.name = f.name + "(-t)";
  return g;
}

HolderFunction linear_combination(double a, const HolderFunction& f, double b,
                                  const HolderFunction& g) {
  HolderFunction h;
  h.eval = [=](double t) { return a * f.eval(t) + b * g.eval(t); };
  h.bound_M = std::abs(a) * f.bound_M + std::abs(b) * g.bound_M;
  h.holder_exp = std::min(f.holder_exp, g.holder_exp);
  h.holder_const = std::abs(a) * f.holder_const + std::abs(b) * g.holder_const;
  if (f.derivative && g.derivative) {
    h.derivative = [=](double t) { return a * f.derivative(t) + b * g.derivative(t); };
  }
  h.increment_fn = [=](double t, double dt) {
    return a * f.increment(t, dt) + b * g.increment(t, dt);
  };
  if (f.left_tail && g.left_tail) {
    h.left_tail = TailValue{std::min(f.left_tail->edge, g.left_tail->edge),
                            a * f.left_tail->value + b * g.left_tail->value};
  }
  if (f.right_tail && g.right_tail) {
    h.right_tail = TailValue{std::max(f.right_tail->edge, g.right_tail->edge),
                             a * f.right_tail->value + b * g.right_tail->value};
  }
  if (f.period && g.period && std::abs(*f.period - *g.period) <= 1e-14 * *f.period) {
    h.period = f.period;
  }
  h.kinks = f.kinks;
  h.kinks.insert(h.kinks.end(), g.kinks.begin(), g.kinks.end());
  h.name = "combo(" + f.name + "," + g.name + ")";
  return h;
}

void QuadratureSpec::validate() const {
  if (!(split_delta > 0.0) || !(tail_cutoff > split_delta) || !(abs_tol > 0.0) ||
      !(rel_tol > 0.0) || max_subdivisions <= 0) {
    fail(ErrorKind::InvalidArgument,
         "quadrature spec requires split_delta > 0, tail_cutoff > split_delta, "
         "positive tolerances and max_subdivisions");
  }
}

std::vector<double> breakpoints(double a, double b, std::vector<double> extra) {
  std::vector<double> pts{a, b};
  for (double p : extra) {
    if (p > a && p < b && std::isfinite(p)) pts.push_back(p);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

namespace functions {

HolderFunction constant(double c) {
  HolderFunction f;
  f.eval = [c](double) { return c; };
  f.bound_M = std::abs(c);
  f.holder_exp = 1.0;
  f.holder_const = 0.0;
  f.derivative = [](double) { return 0.0; };
  f.increment_fn = [](double, double) { return 0.0; };
  f.left_tail = TailValue{0.0, c};
  f.right_tail = TailValue{0.0, c};
  f.name = "constant";
  return f;
}

HolderFunction sine(double amplitude, double frequency, double phase) {
  HolderFunction f;
  f.eval = [=](double t) { return amplitude * std::sin(frequency * t + phase); };
  f.derivative = [=](double t) {
    return amplitude * frequency * std::cos(frequency * t + phase);
  };
  f.increment_fn = [=](double t, double h) {
    return 2.0 * amplitude * std::cos(frequency * (t - 0.5 * h) + phase) *
           std::sin(0.5 * frequency * h);
  };
  f.bound_M = std::abs(amplitude);
  f.holder_exp = 1.0;
  f.holder_const = std::abs(amplitude * frequency);
  if (frequency != 0.0) f.period = 2.0 * std::numbers::pi / std::abs(frequency);
  f.name = "sine";
  return f;
}

HolderFunction cosine(double amplitude, double frequency, double phase) {
  HolderFunction f = sine(amplitude, frequency, phase + 0.5 * std::numbers::pi);
  f.name = "cosine";
  return f;
}

namespace {

double bump_shape(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  return std::exp(1.0 - 1.0 / (1.0 - u * u));
}

double bump_slope(double u) {
  if (std::abs(u) >= 1.0) return 0.0;
  const double q = 1.0 - u * u;
  return bump_shape(u) * (-2.0 * u / (q * q));
}

}  // namespace

HolderFunction bump(double center, double radius, double height) {
  if (!(radius > 0.0)) fail(ErrorKind::InvalidArgument, "bump radius must be positive");
  HolderFunction f;
  f.eval = [=](double t) { return height * bump_shape((t - center) / radius); };
  f.derivative = [=](double t) { return height / radius * bump_slope((t - center) / radius); };
  // exp(g(u1)) - exp(g(u2)) = exp(g(u2)) expm1(g(u1) - g(u2)), g(u) = -u^2/(1 - u^2).
  f.increment_fn = [=](double t, double h) {
    const double u1 = (t - center) / radius, u2 = (t - h - center) / radius;
    if (!(std::abs(u1) < 1.0 && std::abs(u2) < 1.0)) {
      return height * (bump_shape(u1) - bump_shape(u2));
    }
    const double q1 = (1.0 - u1) * (1.0 + u1), q2 = (1.0 - u2) * (1.0 + u2);
    const double diff = (-h / radius) * (u1 + u2) / (q1 * q2);
    if (!(std::abs(diff) < 0.5)) return height * (bump_shape(u1) - bump_shape(u2));
    return height * std::exp(-u2 * u2 / q2) * std::expm1(diff);
  };
  f.bound_M = std::abs(height);
  f.holder_exp = 1.0;
  double slope = 0.0;
  for (int i = 0; i <= 4000; ++i) {
    slope = std::max(slope, std::abs(bump_slope(-1.0 + i / 2000.0)));
  }
  f.holder_const = 1.001 * slope * std::abs(height) / radius;
  f.left_tail = TailValue{center - radius, 0.0};
  f.right_tail = TailValue{center + radius, 0.0};
  f.name = "bump";
  return f;
}

HolderFunction shifted_bump(double center, double radius, double height, double offset) {
  HolderFunction f = linear_combination(1.0, bump(center, radius, height), 1.0, constant(offset));
  f.left_tail = TailValue{center - radius, offset};
  f.right_tail = TailValue{center + radius, offset};
  f.name = "shifted-bump";
  return f;
}

HolderFunction power_stationary(double a, double s, double clamp) {
  if (!(s > 0.0 && s < 1.0) || !(clamp > 0.0 && clamp < 1.0)) {
    fail(ErrorKind::InvalidArgument, "power_stationary needs s in (0,1) and clamp in (0,1)");
  }
  const double eps = clamp;
  const double cap = std::pow(eps, s - 1.0);
  HolderFunction f;
  f.eval = [=](double t) {
    const double d = t - a;
    if (d <= 0.0) return 0.0;
    if (d <= eps) return cap;
    return std::pow(d, s - 1.0);
  };
  f.derivative = [=](double t) {
    const double d = t - a;
    if (d <= eps) return 0.0;
    return (s - 1.0) * std::pow(d, s - 2.0);
  };
  f.bound_M = cap;
  f.holder_exp = 1.0;
  f.holder_const = (1.0 - s) * std::pow(eps, s - 2.0);
  f.left_tail = TailValue{a, 0.0};
  f.kinks = {a, a + eps};
  f.name = "power-stationary";
  return f;
}

HolderFunction exponential(double rate) {
  HolderFunction f;
  f.eval = [=](double t) { return std::exp(rate * t); };
  f.derivative = [=](double t) { return rate * std::exp(rate * t); };
  f.increment_fn = [=](double t, double h) {
    return -std::exp(rate * t) * std::expm1(-rate * h);
  };
  f.bound_M = 1.0;
  f.holder_exp = 1.0;
  f.holder_const = std::abs(rate);
  f.name = "exponential";
  return f;
}

HolderFunction table(std::vector<double> t, std::vector<double> values) {
  auto interp = std::make_shared<CubicInterpolant>(std::move(t), std::move(values));
  HolderFunction f;
  f.eval = [interp](double x) { return (*interp)(x); };
  f.derivative = [interp](double x) { return interp->derivative(x, 1); };
  f.increment_fn = [interp](double x, double h) { return interp->increment(x, h); };
  f.bound_M = interp->max_abs();
  f.holder_exp = 1.0;
  double slope = 0.0;
  const auto& nodes = interp->nodes();
  for (std::size_t i = 0; i + 1 < nodes.size(); ++i) {
    for (int k = 0; k <= 8; ++k) {
      const double x = nodes[i] + (nodes[i + 1] - nodes[i]) * k / 8.0;
      slope = std::max(slope, std::abs(interp->derivative(x, 1)));
    }
  }
  f.holder_const = 1.01 * slope + 1e-300;
  f.left_tail = TailValue{nodes.front(), interp->values().front()};
  f.right_tail = TailValue{nodes.back(), interp->values().back()};
  // Cell boundaries carry derivative jumps; use them as quadrature breakpoints.
  f.kinks = nodes;
  f.name = "table";
  return f;
}

HolderFunction periodic_table(std::vector<double> t, std::vector<double> values, double period) {
  if (!(period > 0.0)) fail(ErrorKind::InvalidArgument, "periodic_table needs period > 0");
  auto interp = std::make_shared<CubicInterpolant>(std::move(t), std::move(values), period);
  HolderFunction f;
  f.eval = [interp](double x) { return (*interp)(x); };
  f.derivative = [interp](double x) { return interp->derivative(x, 1); };
  f.increment_fn = [interp](double x, double h) { return interp->increment(x, h); };
  f.bound_M = interp->max_abs();
  f.holder_exp = 1.0;
  double slope = 0.0;
  for (double x : interp->nodes()) slope = std::max(slope, std::abs(interp->derivative(x, 1)));
  f.holder_const = 1.05 * slope + 1e-300;
  f.period = period;
  f.name = "periodic_table";
  return f;
}

HolderFunction table_from_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorKind::ConfigInvalid, "cannot open table file " + path);
  std::vector<double> t, v;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double a = 0.0, b = 0.0;
    if (!(row >> a >> b)) continue;  // header or malformed row
    t.push_back(a);
    v.push_back(b);
  }
  if (t.size() < 2) fail(ErrorKind::ConfigInvalid, "table file needs at least two samples");
  return table(std::move(t), std::move(v));
}

}  // namespace functions
}  // namespace fracext
