#include "fracext/harnack.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <memory>

#include "fracext/integrate.hpp"
#include "fracext/interpolation.hpp"
#include "fracext/quadrature.hpp"

namespace fracext::harnack {
namespace {

void require_window(double delta) {
  if (!(delta > 0.0) || !std::isfinite(delta)) {
    fail(ErrorKind::InvalidArgument, "window radius must be > 0");
  }
}

void require_inside(const Interval& J, const Interval& span) {
  if (!J.contains(span)) {
    fail(ErrorKind::WindowOutsideJ, "window [" + std::to_string(span.lo) + ", " +
                                        std::to_string(span.hi) + "] is not inside J");
  }
}

struct Extremes {
  double max = -std::numeric_limits<double>::infinity();
  double min = std::numeric_limits<double>::infinity();
};

Extremes sample(const StationaryFunction& phi, const Interval& I, int n) {
  Extremes e;
  for (int k = 0; k < n; ++k) {
    const double t = n == 1 ? 0.5 * (I.lo + I.hi) : I.lo + I.length() * k / (n - 1);
    const double v = phi(t);
    e.max = std::max(e.max, v);
    e.min = std::min(e.min, v);
  }
  return e;
}

double ratio_of(double sup, double inf) {
  if (inf <= 0.0) return sup > 0.0 ? std::numeric_limits<double>::infinity() : 1.0;
  return sup / inf;
}

// phi_j for j = 1..n on J nodes a + j h; phi_0 = exterior(a).
std::vector<double> gl_solve(const HolderFunction& exterior, double a, double b, Order s, int n,
                             double history_factor) {
  const double h = (b - a) / n;
  const auto K = static_cast<std::size_t>(std::ceil(history_factor * n));
  const auto g = gl_weights(s, K + n + 1);
  // Unknowns and history in one array: index K + j holds node a + j h.
  std::vector<double> v(K + n + 1);
  for (std::size_t k = 0; k <= K; ++k) v[K - k] = exterior.eval(a - static_cast<double>(k) * h);
  // History cells holding a kink of the exterior (spikes, support edges) use
  // cell averages instead of point values.
  for (double kink : exterior.kinks) {
    const double pos = (a - kink) / h;
    if (!(pos > 0.5) || pos > static_cast<double>(K)) continue;
    const auto k = static_cast<std::size_t>(std::llround(pos));
    const double c = a - static_cast<double>(k) * h;
    const auto pts = breakpoints(c - 0.5 * h, c + 0.5 * h, exterior.kinks);
    const auto r = integrate([&](double x) { return exterior.eval(x); },
                             std::span<const double>(pts), Tolerance{1e-14, 1e-12, 20000});
    v[K - k] = r.value / h;
  }
  const double far = exterior.left_tail ? exterior.left_tail->value : v[0];
  std::vector<double> partial(g.size());
  double acc = 0.0;
  for (std::size_t k = 0; k < g.size(); ++k) partial[k] = acc += g[k];
  for (int j = 1; j <= n; ++j) {
    const std::size_t idx = K + j;
    double sum = 0.0;
    for (std::size_t k = 1; k <= idx; ++k) sum -= g[k] * v[idx - k];
    // Past beyond the window is replaced by its far value.
    v[idx] = sum + far * partial[idx];
  }
  return {v.begin() + static_cast<std::ptrdiff_t>(K), v.end()};
}

}  // namespace

HarnackWindow::HarnackWindow(double t0_, double delta_) : t0(t0_), delta(delta_) {
  require_window(delta);
}

HarnackWindow HarnackWindow::from_rho(double t0, double rho) { return {t0, rho * rho}; }

RemarkWindow::RemarkWindow(double tau_, double delta_) : tau(tau_), delta(delta_) {
  require_window(delta);
}

RemarkWindow RemarkWindow::from_rho(double tau, double rho) { return {tau, rho * rho}; }

std::vector<double> gl_weights(Order s, std::size_t count) {
  std::vector<double> g(count);
  if (count == 0) return g;
  g[0] = 1.0;
  for (std::size_t k = 1; k < count; ++k) {
    g[k] = g[k - 1] * (1.0 - (s.value() + 1.0) / static_cast<double>(k));
  }
  return g;
}

StationaryFunction solve_stationary(const Interval& J, const HolderFunction& exterior, Order s,
                                    int n, const StationaryOptions& options) {
  if (!(J.hi > J.lo) || n < 8) fail(ErrorKind::InvalidArgument, "solve_stationary needs |J| > 0, n >= 8");
  if (!exterior.eval) fail(ErrorKind::InvalidArgument, "solve_stationary needs an exterior function");
  const double a = J.lo, b = J.hi;
  std::vector<double> values = gl_solve(exterior, a, b, s, n, options.history_factor);
  if (options.extrapolate) {
    const auto fine = gl_solve(exterior, a, b, s, 2 * n, options.history_factor);
    for (int j = 1; j <= n; ++j) values[j] = 2.0 * fine[2 * j] - values[j];
  }
  std::vector<double> nodes(n + 1);
  for (int j = 0; j <= n; ++j) nodes[j] = a + (b - a) * j / n;

  StationaryFunction out;
  out.J = J;
  out.s = s;
  out.threshold = options.threshold;
  out.nodes = nodes;
  out.values = values;
  double scale = 0.0, lowest = 0.0;
  for (double v : values) {
    scale = std::max(scale, std::abs(v));
    lowest = std::min(lowest, v);
  }
  out.scale = scale > 0.0 ? scale : 1.0;
  if (lowest < -1e-9 * out.scale) {
    fail(ErrorKind::NegativeValues, "stationary solution dips to " + std::to_string(lowest));
  }

  auto interp = std::make_shared<CubicInterpolant>(nodes, values);
  auto ext = std::make_shared<HolderFunction>(exterior);
  HolderFunction phi;
  phi.eval = [interp, ext, a](double t) { return t <= a ? ext->eval(t) : (*interp)(t); };
  phi.derivative = [interp, ext, a](double t) {
    if (t > a) return interp->derivative(t, 1);
    return ext->has_derivative() ? ext->derivative(t) : 0.0;
  };
  phi.increment_fn = [interp, ext, a](double t, double h) {
    if (t > a && t - h > a) return interp->increment(t, h);
    if (t <= a && t - h <= a) return ext->increment(t, h);
    const double hi = t <= a ? ext->eval(t) : (*interp)(t);
    const double lo = t - h <= a ? ext->eval(t - h) : (*interp)(t - h);
    return hi - lo;
  };
  phi.bound_M = std::max(exterior.bound_M, scale);
  phi.holder_exp = std::min(1.0, exterior.holder_exp);
  phi.holder_const = exterior.holder_const;
  phi.left_tail = exterior.left_tail;
  phi.right_tail = TailValue{b, values.back()};
  for (double k : exterior.kinks) {
    if (k < a) phi.kinks.push_back(k);
  }
  phi.kinks.insert(phi.kinks.end(), nodes.begin(), nodes.end());
  phi.name = "stationary(" + exterior.name + ")";
  out.function = phi;

  // Independent check with the quadrature route on the interpolant.
  QuadratureSpec check = options.spec;
  check.abs_tol = std::max(check.abs_tol, 1e-9 * out.scale);
  check.rel_tol = std::max(check.rel_tol, 1e-9);
  const double lo = a + options.check_margin * (b - a);
  for (int k = 0; k < options.check_points; ++k) {
    const double t = lo + (b - lo) * (k + 0.5) / options.check_points;
    const auto r = quadrature::marchaud(phi, t, s, Side::Left, true, check);
    out.residual = std::max(out.residual, std::abs(r.value));
  }
  if (out.residual > options.threshold * out.scale) {
    fail(ErrorKind::ResidualTooLarge, "stationarity residual " + std::to_string(out.residual) +
                                          " exceeds " +
                                          std::to_string(options.threshold * out.scale));
  }
  return out;
}

double harnack_ratio(const StationaryFunction& phi, const HarnackWindow& w, int n_samples) {
  require_inside(phi.J, w.span());
  const auto hi = sample(phi, w.sup_interval(), n_samples);
  const auto lo = sample(phi, w.inf_interval(), n_samples);
  return ratio_of(hi.max, lo.min);
}

double harnack_ratio_remark(const StationaryFunction& phi, const RemarkWindow& w, int n_samples) {
  require_inside(phi.J, w.I());
  const auto hi = sample(phi, w.I_plus(), n_samples);
  const auto lo = sample(phi, w.I_minus(), n_samples);
  return ratio_of(hi.max, lo.min);
}

GammaEstimate gamma_estimate(const StationaryFunction& phi, const std::vector<double>& t0s,
                             const std::vector<double>& deltas, int n_samples) {
  GammaEstimate out;
  for (double t0 : t0s) {
    for (double d : deltas) {
      const HarnackWindow w(t0, d);
      require_inside(phi.J, w.span());
      GammaRow row{t0, d, sample(phi, w.sup_interval(), n_samples).max,
                   sample(phi, w.inf_interval(), n_samples).min, 0.0};
      row.ratio = ratio_of(row.sup, row.inf);
      out.gamma = std::max(out.gamma, row.ratio);
      out.rows.push_back(row);
    }
  }
  return out;
}

void window_grid(const Interval& J, int n_t0, int n_delta, std::vector<double>& t0s,
                 std::vector<double>& deltas) {
  if (n_t0 < 1 || n_delta < 1) fail(ErrorKind::InvalidArgument, "window grid needs >= 1 point");
  const double L = J.length();
  const double d_min = 0.05 * L, d_max = 0.2 * L;
  deltas.clear();
  t0s.clear();
  for (int k = 0; k < n_delta; ++k) {
    deltas.push_back(n_delta == 1 ? d_max : d_min + (d_max - d_min) * k / (n_delta - 1));
  }
  const double lo = J.lo + d_max, hi = J.hi - d_max;
  for (int k = 0; k < n_t0; ++k) {
    t0s.push_back(n_t0 == 1 ? 0.5 * (lo + hi) : lo + (hi - lo) * k / (n_t0 - 1));
  }
}

void write_gamma_csv(const GammaEstimate& estimate, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::ConfigInvalid, "cannot write " + path);
  out.precision(17);
  out << "t0,delta,sup,inf,ratio\n";
  for (const auto& r : estimate.rows) {
    out << r.t0 << ',' << r.delta << ',' << r.sup << ',' << r.inf << ',' << r.ratio << '\n';
  }
}

}  // namespace fracext::harnack
