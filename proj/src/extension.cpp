#include "fracext/extension.hpp"

#include <Eigen/Dense>
#include <algorithm>
#include <cmath>

#include "fracext/functions.hpp"
#include "fracext/integrate.hpp"
#include "fracext/quadrature.hpp"
#include "fracext/special.hpp"

namespace fracext::extension {
namespace {

constexpr double kMinX = 1e-4;

void require_positive_x(double x) {
  if (!(x > 0.0) || !std::isfinite(x)) fail(ErrorKind::InvalidArgument, "extension needs x > 0");
}

// T(x) = int (f(t) -/+ ...) e^{-x^2/(4 tau)} tau^{-1-s-m}: the damped Marchaud integral.
quadrature::MarchaudResult damped(const HolderFunction& f, double x, double t, Order s, Side side,
                                  int m, const QuadratureSpec& spec) {
  return quadrature::damped_marchaud(f, t, s, side, 0.25 * x * x, m, spec);
}

Estimate extension_value(const HolderFunction& f, double x, double t, Order s, Side side,
                         const QuadratureSpec& spec) {
  require_positive_x(x);
  const auto r = damped(f, x, t, s, side, 0, spec);
  const double scale = std::pow(x, 2.0 * s.value()) / special::extension_constant(s);
  return {f.eval(t) - scale * r.value, scale * r.error};
}

}  // namespace

void ExtensionQuery::validate() const {
  require_positive_x(x);
  if (!std::isfinite(t)) fail(ErrorKind::InvalidArgument, "extension needs a finite t");
  if (!f.eval) fail(ErrorKind::InvalidArgument, "extension query has no function");
  spec.validate();
}

LimitSchedule LimitSchedule::geometric(double x0, double ratio, int count) {
  LimitSchedule out;
  double x = x0;
  for (int i = 0; i < count; ++i, x *= ratio) out.x_values.push_back(x);
  out.validate();
  return out;
}

void LimitSchedule::validate() const {
  if (x_values.size() < 2) fail(ErrorKind::InvalidArgument, "limit schedule needs >= 2 values");
  for (std::size_t i = 0; i < x_values.size(); ++i) {
    if (!(x_values[i] >= kMinX)) {
      fail(ErrorKind::InvalidArgument, "limit schedule values must be >= 1e-4");
    }
    if (i > 0 && !(x_values[i] < x_values[i - 1])) {
      fail(ErrorKind::InvalidArgument, "limit schedule must be strictly decreasing");
    }
  }
  if (!(tolerance > 0.0)) fail(ErrorKind::InvalidArgument, "limit schedule tolerance must be > 0");
}

Estimate extend(const ExtensionQuery& q) {
  q.validate();
  return extension_value(q.f, q.x, q.t, q.s, Side::Left, q.spec);
}

Estimate backward_extend(const HolderFunction& f, double x, double t, Order s,
                         const QuadratureSpec& spec) {
  spec.validate();
  return extension_value(f, x, t, s, Side::Right, spec);
}

Estimate extend_convolution(const ExtensionQuery& q) {
  q.validate();
  const double sv = q.s.value();
  const double a = 0.25 * q.x * q.x;
  const auto& f = q.f;
  // Past of f beyond distance `upper` is either the known tail constant or truncated.
  double upper = q.spec.tail_cutoff;
  double tail_value = 0.0;
  double bound = 0.0;
  std::vector<double> kinks;
  for (double k : f.kinks) {
    if (q.t - k > 0.0) kinks.push_back(q.t - k);
  }
  auto mass_beyond = [&](double u) { return special::lower_gamma(sv, a / u) / std::tgamma(sv); };
  if (f.left_tail) {
    upper = q.t - f.left_tail->edge;
    tail_value = f.left_tail->value;
    if (upper <= 0.0) return {tail_value, 0.0};
  } else {
    bound = f.bound_M * mass_beyond(upper);
  }
  const double lo = std::min(a / 800.0, 0.5 * upper);
  auto integrand = [&](double y) {
    const double tau = std::exp(y);
    return special::psi_kernel(q.x, tau, q.s) * tau * f.eval(q.t - tau);
  };
  std::vector<double> extra;
  for (double y = std::floor(std::log(lo)) + 1.0; y < std::log(upper); y += 1.0) extra.push_back(y);
  for (double k : kinks) {
    if (k > lo && k < upper) extra.push_back(std::log(k));
  }
  const auto pts = breakpoints(std::log(lo), std::log(upper), extra);
  const auto r = integrate(integrand, std::span<const double>(pts),
                           Tolerance{q.spec.abs_tol, q.spec.rel_tol,
                                     static_cast<std::size_t>(q.spec.max_subdivisions)});
  if (!r.converged) fail(ErrorKind::ToleranceNotMet, "extend_convolution did not converge");
  return {r.value + tail_value * mass_beyond(upper), r.error + bound};
}

Estimate trace_value(const HolderFunction& f, double x, double t, Order s, Side side,
                     const QuadratureSpec& spec) {
  require_positive_x(x);
  const auto r = damped(f, x, t, s, side, 0, spec);
  return {r.value, r.quadrature_error};
}

Estimate flux_value(const HolderFunction& f, double x, double t, Order s, Side side,
                    const QuadratureSpec& spec) {
  require_positive_x(x);
  // -c_s x^{1-2s} U_x = 2s T_0(x) - (x^2/2) T_1(x), differentiating the kernel factor.
  const auto t0 = damped(f, x, t, s, side, 0, spec);
  const auto t1 = damped(f, x, t, s, side, 1, spec);
  const double sv = s.value();
  return {2.0 * sv * t0.value - 0.5 * x * x * t1.value,
          2.0 * sv * t0.quadrature_error + 0.5 * x * x * t1.quadrature_error};
}

std::vector<double> correction_exponents(Order s) {
  const double sv = s.value();
  std::vector<double> e{2.0 - 2.0 * sv, 2.0, 4.0 - 2.0 * sv, 4.0};
  std::sort(e.begin(), e.end());
  return e;
}

namespace {

double fit_limit(const std::vector<LimitRow>& rows, const std::vector<double>& exponents) {
  const auto n = static_cast<Eigen::Index>(rows.size());
  const auto k = static_cast<Eigen::Index>(exponents.size());
  Eigen::MatrixXd A(n, k + 1);
  Eigen::VectorXd b(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    A(i, 0) = 1.0;
    for (Eigen::Index j = 0; j < k; ++j) A(i, j + 1) = std::pow(rows[i].x, exponents[j]);
    b(i) = rows[i].value;
  }
  return A.colPivHouseholderQr().solve(b)(0);
}

}  // namespace

LimitResult extrapolate(std::vector<LimitRow> table, std::vector<double> exponents,
                        double tolerance) {
  if (table.size() < 2) fail(ErrorKind::InvalidArgument, "extrapolate needs >= 2 rows");
  std::sort(table.begin(), table.end(), [](const auto& l, const auto& r) { return l.x > r.x; });
  LimitResult out;
  double row_error = 0.0;
  for (const auto& r : table) row_error = std::max(row_error, r.error);
  // Keep at least two spare rows so that the reduced fit is still overdetermined.
  const std::size_t max_terms = table.size() >= 4 ? table.size() - 3 : 0;
  if (exponents.size() > max_terms) exponents.resize(max_terms);
  if (exponents.empty()) {
    out.value = table.back().value;
    out.error = std::abs(table.back().value - table[table.size() - 2].value) + row_error;
  } else {
    out.value = fit_limit(table, exponents);
    const std::vector<LimitRow> reduced(table.begin() + 1, table.end());
    out.error = std::abs(out.value - fit_limit(reduced, exponents)) + row_error;
  }
  out.table = std::move(table);
  if (out.error > tolerance * (1.0 + std::abs(out.value))) {
    fail(ErrorKind::NonConvergent, "x -> 0 limit is not settled: estimate " +
                                       std::to_string(out.value) + " +- " +
                                       std::to_string(out.error));
  }
  return out;
}

namespace {

// 2 M C^{-s}/s unless the past is periodic or ends in a known constant.
double truncation_bound(const HolderFunction& f, double t, Order s, Side side,
                        const QuadratureSpec& spec) {
  const auto& tail = side == Side::Left ? f.left_tail : f.right_tail;
  if (f.period || tail) return 0.0;
  (void)t;
  return 2.0 * f.bound_M * std::pow(spec.tail_cutoff, -s.value()) / s.value();
}

LimitResult limit_of(const std::vector<LimitRow>& rows, Order s, const LimitSchedule& schedule) {
  if (schedule.extrapolation == Extrapolation::None) return extrapolate(rows, {}, schedule.tolerance);
  return extrapolate(rows, correction_exponents(s), schedule.tolerance);
}

}  // namespace

LimitResult trace_limit(const HolderFunction& f, double t, Order s, const LimitSchedule& schedule,
                        const QuadratureSpec& spec, Side side) {
  schedule.validate();
  std::vector<LimitRow> rows;
  for (double x : schedule.x_values) {
    const auto v = trace_value(f, x, t, s, side, spec);
    rows.push_back({x, v.value, v.error});
  }
  auto out = limit_of(rows, s, schedule);
  out.tail_bound = truncation_bound(f, t, s, side, spec);
  return out;
}

FluxResult flux_limit(const HolderFunction& f, double t, Order s, const LimitSchedule& schedule,
                      const QuadratureSpec& spec, Side side) {
  schedule.validate();
  std::vector<LimitRow> rows;
  for (double x : schedule.x_values) {
    const auto v = flux_value(f, x, t, s, side, spec);
    rows.push_back({x, v.value, v.error});
  }
  const auto lim = limit_of(rows, s, schedule);
  FluxResult out;
  out.raw = lim.value;
  out.corrected = lim.value / (2.0 * s.value());
  out.error = lim.error;
  out.table = lim.table;
  out.tail_bound = 2.0 * s.value() * truncation_bound(f, t, s, side, spec);
  return out;
}

namespace {

constexpr double kComposeHalfWidth = 20.0;
constexpr double kInterpolationTarget = 1e-6;
constexpr int kMaxGridCells = 4096;

struct Tabulation {
  HolderFunction g;  // normalized D^s f
  double interpolation_error = 0.0;
  int points = 0;
  double tail_bound = 0.0;  // bound on the untabulated past (window mode only)
};

Tabulation tabulate(const HolderFunction& f, double lo, double hi, bool periodic, Order s,
                    const LimitSchedule& schedule, const QuadratureSpec& spec,
                    std::optional<double> zero_edge) {
  const double norm = quadrature::normalization(s);
  auto g_at = [&](double tau) {
    if (zero_edge && tau <= *zero_edge) return 0.0;
    return norm * trace_limit(f, tau, s, schedule, spec).value;
  };
  int cells = 128;
  std::vector<double> nodes, values;
  Tabulation out;
  for (;;) {
    const int count = periodic ? cells : cells + 1;
    const double h = (hi - lo) / cells;
    nodes.resize(count);
    values.resize(count);
    for (int i = 0; i < count; ++i) {
      nodes[i] = lo + h * i;
      values[i] = g_at(nodes[i]);
    }
    out.g = periodic ? functions::periodic_table(nodes, values, hi - lo)
                     : functions::table(nodes, values);
    double scale = 0.0;
    for (double v : values) scale = std::max(scale, std::abs(v));
    double worst = 0.0;
    for (int j = 0; j < 8; ++j) {
      const double mid = lo + h * (std::floor((j + 0.5) * cells / 8.0) + 0.5);
      worst = std::max(worst, std::abs(out.g(mid) - g_at(mid)));
    }
    out.interpolation_error = worst;
    out.points = count;
    if (worst <= kInterpolationTarget * std::max(scale, 1e-300) || cells >= kMaxGridCells) break;
    cells *= 2;
  }
  return out;
}

}  // namespace

std::vector<ComposeResult> compose_check(const HolderFunction& f, const std::vector<double>& ts,
                                         Order s, const LimitSchedule& schedule,
                                         const QuadratureSpec& spec, double tolerance) {
  if (ts.empty()) return {};
  if (!f.has_derivative()) {
    fail(ErrorKind::MissingDerivative, "compose_check needs f with an exact derivative");
  }
  const double t_max = *std::max_element(ts.begin(), ts.end());
  const double t_min = *std::min_element(ts.begin(), ts.end());
  const Order outer(1.0 - s.value());
  Tabulation tab;
  if (f.period) {
    tab = tabulate(f, 0.0, *f.period, true, s, schedule, spec, std::nullopt);
  } else if (f.left_tail) {
    // D^s f vanishes to the left of the tail edge.
    const double lo = f.left_tail->edge;
    const double hi = std::max(t_max, lo + 1e-3);
    tab = tabulate(f, lo, hi, false, s, schedule, spec, lo);
  } else {
    const double lo = t_min - kComposeHalfWidth;
    tab = tabulate(f, lo, t_max, false, s, schedule, spec, std::nullopt);
    tab.tail_bound = 2.0 * tab.g.bound_M * std::pow(t_min - lo, -outer.value()) /
                     outer.value() * quadrature::normalization(outer);
    // The table continues its first value into the past; the bound covers
    // the difference from the true past of D^s f.
    if (tab.tail_bound > tolerance) {
      fail(ErrorKind::GridTooNarrow, "compose_check: outer tail bound " +
                                         std::to_string(tab.tail_bound) +
                                         " exceeds the tolerance");
    }
  }
  // The tabulated data carry ~1e-8 errors; tighter outer tolerances buy nothing.
  QuadratureSpec outer_spec = spec;
  outer_spec.abs_tol = std::max(spec.abs_tol, 1e-9);
  outer_spec.rel_tol = std::max(spec.rel_tol, 1e-9);
  std::vector<ComposeResult> out;
  for (double t : ts) {
    const auto r = quadrature::marchaud(tab.g, t, outer, Side::Left, true, outer_spec);
    ComposeResult c;
    c.value = r.value;
    c.interpolation_error = tab.interpolation_error;
    c.error = r.quadrature_error + tab.tail_bound + tab.interpolation_error;
    c.grid_points = tab.points;
    out.push_back(c);
  }
  return out;
}

ComposeResult compose_check(const HolderFunction& f, double t, Order s,
                            const LimitSchedule& schedule, const QuadratureSpec& spec,
                            double tolerance) {
  return compose_check(f, std::vector<double>{t}, s, schedule, spec, tolerance).front();
}

}  // namespace fracext::extension
