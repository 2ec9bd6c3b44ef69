#include "fracext/pde.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>

#include "fracext/extension.hpp"
#include "fracext/special.hpp"

namespace fracext::pde {
namespace {

double signed_power_antiderivative(double x, double e) {
  const double v = std::pow(std::abs(x), e + 1.0) / (e + 1.0);
  return x < 0.0 ? -v : v;
}

// int_a^b |x|^e x dx.
double first_moment(double a, double b, double e) {
  return (std::pow(std::abs(b), e + 2.0) - std::pow(std::abs(a), e + 2.0)) / (e + 2.0);
}

// Thomas algorithm for sub/diag/super with rhs; returns the solution in rhs.
void solve_tridiagonal(const std::vector<double>& sub, std::vector<double> diag,
                       const std::vector<double>& super, std::vector<double>& rhs) {
  const std::size_t n = diag.size();
  for (std::size_t i = 1; i < n; ++i) {
    if (!(std::abs(diag[i - 1]) > 1e-300)) fail(ErrorKind::SingularMatrix, "zero pivot in tridiagonal solve");
    const double m = sub[i] / diag[i - 1];
    diag[i] -= m * super[i - 1];
    rhs[i] -= m * rhs[i - 1];
  }
  if (!(std::abs(diag[n - 1]) > 1e-300)) fail(ErrorKind::SingularMatrix, "zero pivot in tridiagonal solve");
  rhs[n - 1] /= diag[n - 1];
  for (std::size_t i = n - 1; i-- > 0;) rhs[i] = (rhs[i] - super[i] * rhs[i + 1]) / diag[i];
}

double extension_at(const HolderFunction& f, double x, double t, Order s,
                    const QuadratureSpec& spec) {
  extension::ExtensionQuery q;
  q.x = x;
  q.t = t;
  q.s = s;
  q.f = f;
  q.spec = spec;
  return extension::extend(q).value;
}

}  // namespace

Grid Grid::graded(Order s, double X, int N, double T0, double T1, int M, double power) {
  if (!(X > 0.0) || N < 3 || M < 2 || !(T1 > T0) || !(power >= 1.0)) {
    fail(ErrorKind::InvalidArgument, "graded grid needs X > 0, N >= 3, M >= 2, T1 > T0, power >= 1");
  }
  Grid g;
  g.s = s;
  for (int i = 1; i <= N; ++i) {
    g.x_nodes.push_back(X * std::pow(static_cast<double>(i) / N, power));
  }
  for (int j = 0; j <= M; ++j) g.t_nodes.push_back(T0 + (T1 - T0) * j / M);
  g.validate();
  return g;
}

void Grid::validate() const {
  if (x_nodes.size() < 3 || t_nodes.size() < 3) {
    fail(ErrorKind::InvalidArgument, "grid needs >= 3 x nodes and >= 3 t nodes");
  }
  if (!(x_nodes.front() > 0.0)) fail(ErrorKind::InvalidArgument, "first x node must be > 0");
  for (std::size_t i = 1; i < x_nodes.size(); ++i) {
    if (!(x_nodes[i] > x_nodes[i - 1])) fail(ErrorKind::InvalidArgument, "x nodes must increase");
  }
  const double dt = t_nodes[1] - t_nodes[0];
  for (std::size_t j = 1; j < t_nodes.size(); ++j) {
    const double d = t_nodes[j] - t_nodes[j - 1];
    if (!(d > 0.0) || std::abs(d - dt) > 1e-9 * std::max(1.0, std::abs(dt))) {
      fail(ErrorKind::InvalidArgument, "t nodes must be uniform and increasing");
    }
  }
}

double Weight::operator()(double x) const {
  if (exponent == 0.0) return 1.0;
  return std::pow(std::abs(x), exponent);
}

double Weight::integral(double a, double b) const {
  return signed_power_antiderivative(b, exponent) - signed_power_antiderivative(a, exponent);
}

double Weight::inverse_integral(double a, double b) const {
  return signed_power_antiderivative(b, -exponent) - signed_power_antiderivative(a, -exponent);
}

std::size_t ExtensionField::zero_index() const {
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (x[i] == 0.0) return i;
  }
  fail(ErrorKind::InvalidArgument, "field has no x = 0 column");
}

ExtensionField solve_degenerate_heat(const HolderFunction& f, const Grid& grid,
                                     const SolveOptions& options) {
  grid.validate();
  const Order s = grid.s;
  const Weight w(s);
  const double sv = s.value();
  const std::size_t N = grid.x_nodes.size();  // nodes x_1..x_N, x_N = X
  const std::size_t M = grid.t_nodes.size();
  const double X = grid.x_nodes.back();

  ExtensionField field;
  field.x.push_back(0.0);
  field.x.insert(field.x.end(), grid.x_nodes.begin(), grid.x_nodes.end());
  field.t = grid.t_nodes;
  field.values.assign((N + 1) * M, 0.0);
  field.weight_exponent = w.exponent;
  for (double t : grid.t_nodes) field.boundary_trace.push_back(f.eval(t));

  std::vector<double> far(M, options.far_value);
  switch (options.far) {
    case FarBoundary::Zero: {
      const double scale = std::max(f.bound_M, 1e-300);
      for (int k = 0; k <= 4; ++k) {
        const double t = grid.t_nodes[(M - 1) * k / 4];
        const double v = extension_at(f, X, t, s, options.spec);
        if (std::abs(v) > options.far_tolerance * scale) {
          fail(ErrorKind::FarBoundaryTooClose,
               "|U(X, t)| = " + std::to_string(std::abs(v)) + " at X = " + std::to_string(X));
        }
      }
      std::fill(far.begin(), far.end(), 0.0);
      break;
    }
    case FarBoundary::Convolution:
      for (std::size_t j = 0; j < M; ++j) far[j] = extension_at(f, X, grid.t_nodes[j], s, options.spec);
      break;
    case FarBoundary::Constant:
      break;
  }

  // Face conductances: exact for steady profiles A + B x^{2s}.
  const auto& xs = field.x;
  std::vector<double> K(N);
  for (std::size_t i = 0; i < N; ++i) {
    K[i] = 1.0 / w.inverse_integral(xs[i], xs[i + 1]);
  }
  // Control-volume masses of the interior nodes 1..N-1.
  std::vector<double> mass(N, 0.0);
  for (std::size_t i = 1; i < N; ++i) {
    mass[i] = w.integral(0.5 * (xs[i - 1] + xs[i]), 0.5 * (xs[i] + xs[i + 1]));
  }

  const std::size_t seeded = options.scheme == TimeScheme::BDF2 ? 2 : 1;
  for (std::size_t j = 0; j < seeded; ++j) {
    field.at(0, j) = field.boundary_trace[j];
    for (std::size_t i = 1; i < N; ++i) {
      field.at(i, j) = extension_at(f, xs[i], grid.t_nodes[j], s, options.spec);
    }
    field.at(N, j) = far[j];
  }

  const double dt = grid.t_nodes[1] - grid.t_nodes[0];
  const std::size_t n = N - 1;
  std::vector<double> sub(n), diag(n), super(n), rhs(n);
  for (std::size_t j = seeded; j < M; ++j) {
    const bool bdf2 = options.scheme == TimeScheme::BDF2;
    const double c = bdf2 ? 1.5 / dt : 1.0 / dt;
    const double u0 = field.boundary_trace[j];
    const double uN = far[j];
    for (std::size_t k = 0; k < n; ++k) {
      const std::size_t i = k + 1;
      sub[k] = -K[i - 1];
      super[k] = -K[i];
      diag[k] = c * mass[i] + K[i - 1] + K[i];
      const double history = bdf2 ? (2.0 * field.at(i, j - 1) - 0.5 * field.at(i, j - 2)) / dt
                                  : field.at(i, j - 1) / dt;
      rhs[k] = mass[i] * history;
    }
    rhs[0] += K[0] * u0;
    rhs[n - 1] += K[N - 1] * uN;
    sub[0] = 0.0;
    super[n - 1] = 0.0;
    solve_tridiagonal(sub, diag, super, rhs);
    field.at(0, j) = u0;
    for (std::size_t k = 0; k < n; ++k) field.at(k + 1, j) = rhs[k];
    field.at(N, j) = uN;
  }

  double lo = 0.0, hi = 0.0;
  for (std::size_t j = 0; j < M; ++j) {
    lo = std::min({lo, field.boundary_trace[j], far[j]});
    hi = std::max({hi, field.boundary_trace[j], far[j]});
  }
  for (std::size_t j = 0; j < seeded; ++j) {
    for (std::size_t i = 0; i <= N; ++i) {
      lo = std::min(lo, field.at(i, j));
      hi = std::max(hi, field.at(i, j));
    }
  }
  for (double v : field.values) {
    if (!std::isfinite(v)) fail(ErrorKind::SingularMatrix, "non-finite value in the solved field");
    field.max_principle_violation = std::max({field.max_principle_violation, v - hi, lo - v});
  }
  (void)sv;
  return field;
}

ExtensionField reflect(const ExtensionField& field) {
  if (field.reflected) return field;
  ExtensionField out;
  const std::size_t nx = field.x.size();  // x[0] = 0
  out.t = field.t;
  out.boundary_trace = field.boundary_trace;
  out.weight_exponent = field.weight_exponent;
  out.reflected = true;
  out.max_principle_violation = field.max_principle_violation;
  for (std::size_t i = nx - 1; i >= 1; --i) out.x.push_back(-field.x[i]);
  out.x.insert(out.x.end(), field.x.begin(), field.x.end());
  const std::size_t mx = out.x.size();
  out.values.resize(mx * field.t.size());
  for (std::size_t j = 0; j < field.t.size(); ++j) {
    for (std::size_t i = 0; i < mx; ++i) {
      const std::size_t src = i < nx - 1 ? nx - 1 - i : i - (nx - 1);
      out.values[j * mx + i] = field.at(src, j);
    }
  }
  return out;
}

ExtensionField positive_half(const ExtensionField& field) {
  if (!field.reflected) return field;
  const std::size_t z = field.zero_index();
  ExtensionField out;
  out.x.assign(field.x.begin() + static_cast<std::ptrdiff_t>(z), field.x.end());
  out.t = field.t;
  out.boundary_trace = field.boundary_trace;
  out.weight_exponent = field.weight_exponent;
  out.max_principle_violation = field.max_principle_violation;
  const std::size_t mx = out.x.size();
  out.values.resize(mx * out.t.size());
  for (std::size_t j = 0; j < out.t.size(); ++j) {
    for (std::size_t i = 0; i < mx; ++i) out.values[j * mx + i] = field.at(z + i, j);
  }
  return out;
}

std::function<double(double)> smooth_bump(double center, double radius) {
  return [=](double v) {
    const double u = (v - center) / radius;
    if (std::abs(u) >= 1.0) return 0.0;
    return std::exp(1.0 - 1.0 / (1.0 - u * u));
  };
}

std::function<double(double)> smooth_bump_derivative(double center, double radius) {
  return [=](double v) {
    const double u = (v - center) / radius;
    if (std::abs(u) >= 1.0) return 0.0;
    const double q = 1.0 - u * u;
    return std::exp(1.0 - 1.0 / q) * (-2.0 * u / (q * q)) / radius;
  };
}

TestFunction bump_test_function(double R, double t_center, double t_radius) {
  if (!(R > 0.0) || !(t_radius > 0.0)) fail(ErrorKind::InvalidArgument, "test function radii must be > 0");
  return {smooth_bump(0.0, R), smooth_bump_derivative(0.0, R), smooth_bump(t_center, t_radius),
          smooth_bump_derivative(t_center, t_radius)};
}

double weak_residual(const ExtensionField& field, const TestFunction& eta) {
  const double e = field.weight_exponent;
  const std::size_t nx = field.x.size();
  const std::size_t nt = field.t.size();
  const Weight w(Order(0.5 * (1.0 - e)));
  const double dt = field.t[1] - field.t[0];
  std::vector<double> space(nx);
  for (std::size_t i = 0; i < nx; ++i) space[i] = eta.space(field.x[i]);
  double total = 0.0;
  for (std::size_t j = 0; j < nt; ++j) {
    const double tw = (j == 0 || j + 1 == nt) ? 0.5 * dt : dt;
    const double T = eta.time(field.t[j]);
    const double Tt = eta.time_dt(field.t[j]);
    if (T == 0.0 && Tt == 0.0) continue;
    double slice = 0.0;
    for (std::size_t i = 0; i + 1 < nx; ++i) {
      const double a = field.x[i], b = field.x[i + 1];
      const double ua = field.at(i, j), ub = field.at(i + 1, j);
      // w U_x is taken constant on the cell (harmonic weight).
      const double flux = (ub - ua) / w.inverse_integral(a, b);
      slice += flux * (space[i + 1] - space[i]) * T;
      // int w U eta_t with U eta linear on the cell.
      const double ga = ua * space[i] * Tt, gb = ub * space[i + 1] * Tt;
      const double m0 = w.integral(a, b);
      const double m1 = first_moment(a, b, e) - a * m0;  // int w (x - a)
      slice -= ga * m0 + (gb - ga) * m1 / (b - a);
    }
    total += tw * slice;
  }
  return total;
}

double predicted_weak_residual(Order s, const std::vector<double>& t,
                               const std::vector<double>& marchaud_values,
                               const TestFunction& eta) {
  if (t.size() != marchaud_values.size() || t.size() < 2) {
    fail(ErrorKind::InvalidArgument, "predicted_weak_residual needs matching samples");
  }
  double integral = 0.0;
  for (std::size_t j = 0; j + 1 < t.size(); ++j) {
    integral += 0.5 * (t[j + 1] - t[j]) *
                (marchaud_values[j] * eta(0.0, t[j]) + marchaud_values[j + 1] * eta(0.0, t[j + 1]));
  }
  return 4.0 * s.value() / special::extension_constant(s) * integral;
}

std::vector<double> weak_flux_limit(const ExtensionField& input,
                                    const std::function<double(double)>& eta_t,
                                    const std::vector<double>& x_sequence) {
  const ExtensionField field = positive_half(input);
  const double e = field.weight_exponent;
  const Weight w(Order(0.5 * (1.0 - e)));
  const std::size_t nt = field.t.size();
  const double dt = field.t[1] - field.t[0];
  std::vector<double> out;
  for (double x : x_sequence) {
    std::size_t best = 1;
    for (std::size_t i = 1; i + 1 < field.x.size(); ++i) {
      if (std::abs(field.x[i] - x) < std::abs(field.x[best] - x)) best = i;
    }
    const double conductance = 1.0 / w.inverse_integral(field.x[best], field.x[best + 1]);
    double sum = 0.0;
    for (std::size_t j = 0; j < nt; ++j) {
      const double tw = (j == 0 || j + 1 == nt) ? 0.5 * dt : dt;
      sum += tw * conductance * (field.at(best + 1, j) - field.at(best, j)) * eta_t(field.t[j]);
    }
    out.push_back(sum);
  }
  return out;
}

double a2_closed_form(Order s) { return 1.0 / (4.0 * s.value() * (1.0 - s.value())); }

double a2_constant(Order s, double R, int n_intervals, IntervalFamily family) {
  if (!(R > 0.0) || n_intervals < 1) fail(ErrorKind::InvalidArgument, "a2_constant needs R > 0, n >= 1");
  const Weight w(s);
  auto product = [&](double a, double b) {
    const double len = b - a;
    return (w.integral(a, b) / len) * (w.inverse_integral(a, b) / len);
  };
  double best = 0.0;
  if (family == IntervalFamily::All) {
    std::vector<double> g(n_intervals + 1);
    for (int k = 0; k <= n_intervals; ++k) g[k] = -R + 2.0 * R * k / n_intervals;
    for (int i = 0; i <= n_intervals; ++i) {
      for (int j = i + 1; j <= n_intervals; ++j) best = std::max(best, product(g[i], g[j]));
    }
  } else {
    for (int k = 1; k <= n_intervals; ++k) {
      const double r = R * k / n_intervals;
      best = std::max({best, product(-r, r), product(0.0, r), product(-r, 0.0)});
    }
  }
  return best;
}

void write_field_csv(const ExtensionField& field, const std::string& path) {
  std::ofstream out(path);
  if (!out) fail(ErrorKind::ConfigInvalid, "cannot write " + path);
  out.precision(17);
  const Weight w(Order(0.5 * (1.0 - field.weight_exponent)));
  out << "x,t,U,w\n";
  for (std::size_t j = 0; j < field.t.size(); ++j) {
    for (std::size_t i = 0; i < field.x.size(); ++i) {
      out << field.x[i] << ',' << field.t[j] << ',' << field.at(i, j) << ',' << w(field.x[i])
          << '\n';
    }
  }
}

}  // namespace fracext::pde
