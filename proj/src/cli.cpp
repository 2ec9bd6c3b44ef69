#include "fracext/cli.hpp"

#include <CLI11.hpp>
#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <map>
#include <numbers>
#include <random>
#include <set>
#include <sstream>
#include <thread>

#include "fracext/extension.hpp"
#include "fracext/functions.hpp"
#include "fracext/harnack.hpp"
#include "fracext/pde.hpp"
#include "fracext/quadrature.hpp"
#include "fracext/special.hpp"

namespace fracext::cli {
namespace {

// Typed, tracked access to the flat parameter object; unknown keys are an error.
class Params {
 public:
  explicit Params(const json& j) : j_(j) {
    if (!j_.is_object()) fail(ErrorKind::ConfigInvalid, "parameters must be a JSON object");
  }

  bool has(const std::string& key) const { return j_.contains(key); }

  double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
    used_.insert(key);
    if (!j_.contains(key)) {
      if (!fallback) fail(ErrorKind::ConfigInvalid, "missing parameter '" + key + "'");
      return *fallback;
    }
    const auto& v = j_.at(key);
    if (!v.is_number()) fail(ErrorKind::ConfigInvalid, "parameter '" + key + "' must be a number");
    const double d = v.get<double>();
    if (!std::isfinite(d)) fail(ErrorKind::ConfigInvalid, "parameter '" + key + "' must be finite");
    return d;
  }

  int integer(const std::string& key, std::optional<int> fallback = std::nullopt) {
    const double d = number(key, fallback ? std::optional<double>(*fallback) : std::nullopt);
    if (d != std::floor(d) || std::abs(d) > 1e9) {
      fail(ErrorKind::ConfigInvalid, "parameter '" + key + "' must be an integer");
    }
    return static_cast<int>(d);
  }

  bool flag(const std::string& key, bool fallback) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (!v.is_boolean()) fail(ErrorKind::ConfigInvalid, "parameter '" + key + "' must be true/false");
    return v.get<bool>();
  }

  std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
    used_.insert(key);
    if (!j_.contains(key)) {
      if (!fallback) fail(ErrorKind::ConfigInvalid, "missing parameter '" + key + "'");
      return *fallback;
    }
    const auto& v = j_.at(key);
    if (!v.is_string()) fail(ErrorKind::ConfigInvalid, "parameter '" + key + "' must be a string");
    return v.get<std::string>();
  }

  std::vector<double> numbers(const std::string& key, std::vector<double> fallback) {
    used_.insert(key);
    if (!j_.contains(key)) return fallback;
    const auto& v = j_.at(key);
    if (v.is_number()) return {v.get<double>()};
    if (!v.is_array() || v.empty()) {
      fail(ErrorKind::ConfigInvalid, "parameter '" + key + "' must be a number or non-empty list");
    }
    std::vector<double> out;
    for (const auto& e : v) {
      if (!e.is_number()) fail(ErrorKind::ConfigInvalid, "parameter '" + key + "' must hold numbers");
      out.push_back(e.get<double>());
    }
    return out;
  }

  void finish() const {
    for (const auto& item : j_.items()) {
      if (!used_.count(item.key())) {
        fail(ErrorKind::ConfigInvalid, "unknown parameter '" + item.key() + "'");
      }
    }
  }

 private:
  json j_;
  std::set<std::string> used_;
};

Order order_from(Params& p, const std::string& key = "s") {
  const double s = p.number(key);
  if (!(s > 0.0 && s < 1.0)) fail(ErrorKind::ConfigInvalid, "'" + key + "' must lie in (0, 1)");
  return Order(s);
}

Side side_from(Params& p) {
  const auto side = p.text("side", "left");
  if (side == "left") return Side::Left;
  if (side == "right") return Side::Right;
  fail(ErrorKind::ConfigInvalid, "side must be 'left' or 'right'");
}

QuadratureSpec spec_from(Params& p) {
  QuadratureSpec q;
  q.split_delta = p.number("split_delta", q.split_delta);
  q.tail_cutoff = p.number("tail_cutoff", q.tail_cutoff);
  q.abs_tol = p.number("abs_tol", q.abs_tol);
  q.rel_tol = p.number("rel_tol", q.rel_tol);
  q.max_subdivisions = p.integer("max_subdivisions", q.max_subdivisions);
  try {
    q.validate();
  } catch (const Error& e) {
    fail(ErrorKind::ConfigInvalid, e.what());
  }
  return q;
}

HolderFunction function_from(Params& p, std::optional<double> s_for_power) {
  const auto name = p.text("fn");
  if (name == "constant") return functions::constant(p.number("c", 1.0));
  if (name == "sine" || name == "cosine") {
    const double A = p.number("amplitude", 1.0);
    const double w = p.number("frequency", 1.0);
    const double phase = p.number("phase", 0.0);
    return name == "sine" ? functions::sine(A, w, phase) : functions::cosine(A, w, phase);
  }
  if (name == "bump" || name == "shifted-bump") {
    const double c = p.number("center", 0.0);
    const double r = p.number("radius", 1.0);
    const double h = p.number("height", 1.0);
    if (!(r > 0.0)) fail(ErrorKind::ConfigInvalid, "bump radius must be > 0");
    if (name == "bump") return functions::bump(c, r, h);
    return functions::shifted_bump(c, r, h, p.number("offset", 0.5));
  }
  if (name == "power-stationary") {
    const double a = p.number("a", 0.0);
    const double clamp = p.number("clamp", 1e-8);
    const double s = s_for_power ? *s_for_power : p.number("s");
    if (!(clamp > 0.0 && clamp < 1.0)) fail(ErrorKind::ConfigInvalid, "clamp must lie in (0, 1)");
    return functions::power_stationary(a, s, clamp);
  }
  if (name == "exponential") return functions::exponential(p.number("rate", 1.0));
  if (name == "table") return functions::table_from_csv(p.text("path"));
  fail(ErrorKind::ConfigInvalid, "unknown function '" + name + "'");
}

// Classical derivatives for generalized orders: only the trigonometric family has them in closed form.
quadrature::SmoothFunction smooth_from(const json& params, const HolderFunction& f, int count) {
  quadrature::SmoothFunction out{f, {}};
  const auto name = params.value("fn", std::string());
  if (name != "sine" && name != "cosine" && name != "constant") return out;
  const double A = params.value("amplitude", 1.0), w = params.value("frequency", 1.0);
  double phase = params.value("phase", 0.0);
  if (name == "cosine") phase += 0.5 * std::numbers::pi;
  for (int k = 1; k <= count; ++k) {
    if (name == "constant") {
      out.derivatives.push_back(functions::constant(0.0));
    } else {
      out.derivatives.push_back(
          functions::sine(A * std::pow(w, k), w, phase + 0.5 * std::numbers::pi * k));
    }
  }
  return out;
}

// Portable uniform [0, 1) from a 64-bit Mersenne twister.
double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

extension::LimitSchedule schedule_from(Params& p) {
  auto sched = extension::LimitSchedule::geometric(p.number("x0", 0.5), p.number("ratio", 0.5),
                                                   p.integer("count", 8));
  const auto mode = p.text("extrapolation", "richardson");
  if (mode == "none") {
    sched.extrapolation = extension::Extrapolation::None;
  } else if (mode != "richardson") {
    fail(ErrorKind::ConfigInvalid, "extrapolation must be 'richardson' or 'none'");
  }
  sched.tolerance = p.number("limit_tolerance", sched.tolerance);
  return sched;
}

json table_rows(const std::vector<extension::LimitRow>& rows, Table& table) {
  table.columns = {"x", "value", "error"};
  for (const auto& r : rows) table.rows.push_back({r.x, r.value, r.error});
  return json(static_cast<int>(rows.size()));
}

pde::Grid grid_from(Params& p, Order s) {
  return pde::Grid::graded(s, p.number("X", 20.0), p.integer("N", 200), p.number("T0", 0.0),
                           p.number("T1", 2.0), p.integer("M", 200), p.number("grading", 2.0));
}

pde::SolveOptions solve_options_from(Params& p, const QuadratureSpec& spec) {
  pde::SolveOptions o;
  o.spec = spec;
  const auto far = p.text("far", "convolution");
  if (far == "zero") {
    o.far = pde::FarBoundary::Zero;
  } else if (far == "convolution") {
    o.far = pde::FarBoundary::Convolution;
  } else if (far == "constant") {
    o.far = pde::FarBoundary::Constant;
  } else {
    fail(ErrorKind::ConfigInvalid, "far must be 'zero', 'convolution' or 'constant'");
  }
  o.far_value = p.number("far_value", 0.0);
  const auto scheme = p.text("scheme", "bdf2");
  if (scheme == "euler") {
    o.scheme = pde::TimeScheme::BackwardEuler;
  } else if (scheme != "bdf2") {
    fail(ErrorKind::ConfigInvalid, "scheme must be 'bdf2' or 'euler'");
  }
  return o;
}

harnack::StationaryFunction stationary_from(Params& p, Order s, const QuadratureSpec& spec) {
  const auto exterior = function_from(p, s.value());
  harnack::StationaryOptions o;
  o.spec = spec;
  o.threshold = p.number("threshold", o.threshold);
  o.extrapolate = p.flag("extrapolate", true);
  o.history_factor = p.number("history_factor", o.history_factor);
  const harnack::Interval J{p.number("J_lo", 0.0), p.number("J_hi", 1.0)};
  return harnack::solve_stationary(J, exterior, s, p.integer("n", 400), o);
}

struct Outcome {
  json result = json::object();
  double error_bound = 0.0;
  std::vector<std::string> warnings;
  std::vector<std::pair<std::string, Table>> tables;
};

Outcome run_deriv(Params& p, const json& raw) {
  Outcome out;
  const double sv = p.number("s");
  const double t = p.number("t", 0.0);
  const auto side = side_from(p);
  const bool normalized = p.flag("normalized", false);
  const bool oracle = p.flag("oracle", false);
  const auto spec = spec_from(p);
  if (!(sv > 0.0) || sv == std::floor(sv)) fail(ErrorKind::ConfigInvalid, "s must be positive and not an integer");
  const auto f = function_from(p, sv < 1.0 ? std::optional<double>(sv) : std::nullopt);
  quadrature::MarchaudResult r;
  if (sv < 1.0) {
    r = quadrature::marchaud(f, t, Order(sv), side, normalized, spec);
    if (oracle) out.result["oracle"] = quadrature::oracle_marchaud(f, t, Order(sv), side, normalized);
  } else {
    const GeneralOrder g(sv);
    r = quadrature::marchaud_general(smooth_from(raw, f, g.integer_part()), t, g, side, spec);
  }
  out.result["value"] = r.value;
  out.result["quadrature_error"] = r.quadrature_error;
  out.result["tail_bound"] = r.tail_bound;
  out.result["singular_part"] = r.singular_part;
  out.result["tail_part"] = r.tail_part;
  out.error_bound = r.error;
  out.warnings = r.warnings;
  return out;
}

Outcome run_kernel_check(Params& p) {
  Outcome out;
  const auto s = order_from(p);
  const double x = p.number("x", 1.0);
  if (!(x > 0.0)) fail(ErrorKind::ConfigInvalid, "x must be > 0");
  const auto m = special::kernel_mass(x, s, spec_from(p));
  out.result["mass"] = m.value;
  out.result["deviation"] = std::abs(m.value - 1.0);
  out.error_bound = m.error;
  return out;
}

Outcome run_bessel(Params& p) {
  Outcome out;
  const auto s = order_from(p);
  const double omega = p.number("omega", 1.0);
  if (!(omega > 0.0)) fail(ErrorKind::ConfigInvalid, "omega must be > 0");
  const auto spec = spec_from(p);
  Estimate numeric;
  double closed = 0.0;
  if (p.has("x")) {
    const double x = p.number("x");
    if (!(x > 0.0)) fail(ErrorKind::ConfigInvalid, "x must be > 0");
    numeric = special::laplace_kernel_numeric(x, s, omega, spec);
    closed = special::laplace_kernel_closed(x, s, omega);
  } else {
    numeric = special::laplace_psi_numeric(s, omega, spec);
    closed = special::laplace_psi_closed(s, omega);
  }
  const auto k = special::bessel_k({s.value(), std::sqrt(omega)});
  out.result["numeric"] = numeric.value;
  out.result["closed_form"] = closed;
  out.result["relative_difference"] = std::abs(numeric.value - closed) / std::abs(closed);
  out.result["bessel_k"] = k.value;
  out.error_bound = numeric.error;
  return out;
}

Outcome run_extend(Params& p, std::uint64_t seed) {
  Outcome out;
  const auto s = order_from(p);
  const auto f = function_from(p, s.value());
  const double x = p.number("x", 1.0);
  const double t = p.number("t", 0.0);
  const auto side = side_from(p);
  const auto spec = spec_from(p);
  const bool conv = p.flag("convolution_check", false);
  const int checks = p.integer("reflection_checks", 0);
  extension::ExtensionQuery q{x, t, s, f, spec};
  const auto u = side == Side::Left ? extension::extend(q) : extension::backward_extend(f, x, t, s, spec);
  out.result["value"] = u.value;
  out.error_bound = u.error;
  if (conv && side == Side::Left) {
    const auto c = extension::extend_convolution(q);
    out.result["convolution"] = c.value;
    out.result["convolution_difference"] = std::abs(c.value - u.value);
  }
  if (checks > 0) {
    std::mt19937_64 rng(seed);
    const auto g = reflected(f);
    double worst = 0.0;
    Table table;
    table.columns = {"x", "t", "backward", "forward_reflected", "difference"};
    for (int k = 0; k < checks; ++k) {
      const double xr = 0.05 + 2.95 * uniform01(rng);
      const double tr = -3.0 + 6.0 * uniform01(rng);
      const double back = extension::backward_extend(f, xr, tr, s, spec).value;
      extension::ExtensionQuery qr{xr, -tr, s, g, spec};
      const double fwd = extension::extend(qr).value;
      worst = std::max(worst, std::abs(back - fwd));
      table.rows.push_back({xr, tr, back, fwd, std::abs(back - fwd)});
    }
    out.result["reflection_max_difference"] = worst;
    out.tables.emplace_back("reflection", std::move(table));
  }
  return out;
}

Outcome run_trace(Params& p) {
  Outcome out;
  const auto s = order_from(p);
  const auto f = function_from(p, s.value());
  const double t = p.number("t", 0.0);
  const auto side = side_from(p);
  const auto sched = schedule_from(p);
  const auto spec = spec_from(p);
  const bool compare = p.flag("compare", true);
  const auto r = extension::trace_limit(f, t, s, sched, spec, side);
  out.result["value"] = r.value;
  out.result["tail_bound"] = r.tail_bound;
  if (compare) {
    const auto q = quadrature::marchaud(f, t, s, side, false, spec);
    out.result["marchaud"] = q.value;
    out.result["discrepancy"] = std::abs(q.value - r.value);
  }
  Table table;
  table_rows(r.table, table);
  out.tables.emplace_back("trace", std::move(table));
  out.error_bound = r.error;
  return out;
}

Outcome run_flux(Params& p) {
  Outcome out;
  const auto s = order_from(p);
  const auto f = function_from(p, s.value());
  const double t = p.number("t", 0.0);
  const auto side = side_from(p);
  const auto sched = schedule_from(p);
  const auto spec = spec_from(p);
  const bool compare = p.flag("compare", true);
  const auto r = extension::flux_limit(f, t, s, sched, spec, side);
  out.result["raw"] = r.raw;
  out.result["corrected"] = r.corrected;
  if (compare) {
    const auto tr = extension::trace_limit(f, t, s, sched, spec, side);
    out.result["trace"] = tr.value;
    out.result["ratio"] = r.raw / tr.value;
    out.result["ratio_over_2s"] = r.raw / tr.value / (2.0 * s.value());
  }
  Table table;
  table_rows(r.table, table);
  out.tables.emplace_back("flux", std::move(table));
  out.error_bound = r.error;
  return out;
}

Outcome run_compose(Params& p) {
  Outcome out;
  const auto s = order_from(p);
  const auto f = function_from(p, s.value());
  const auto ts = p.numbers("t", {0.0});
  const auto sched = schedule_from(p);
  const auto spec = spec_from(p);
  const double tol = p.number("tolerance", 1e-2);
  const auto rs = extension::compose_check(f, ts, s, sched, spec, tol);
  Table table;
  table.columns = {"t", "value", "derivative", "difference", "error"};
  double worst = 0.0, bound = 0.0;
  for (std::size_t k = 0; k < ts.size(); ++k) {
    const double d = f.derivative(ts[k]);
    const double diff = std::abs(rs[k].value - d);
    worst = std::max(worst, diff);
    bound = std::max(bound, rs[k].error);
    table.rows.push_back({ts[k], rs[k].value, d, diff, rs[k].error});
  }
  out.result["value"] = rs.front().value;
  out.result["derivative"] = f.derivative(ts.front());
  out.result["max_difference"] = worst;
  out.result["grid_points"] = rs.front().grid_points;
  out.tables.emplace_back("compose", std::move(table));
  out.error_bound = bound;
  return out;
}

Outcome run_pde(Params& p) {
  Outcome out;
  const auto s = order_from(p);
  const auto f = function_from(p, s.value());
  const auto grid = grid_from(p, s);
  const auto spec = spec_from(p);
  const auto options = solve_options_from(p, spec);
  const int checks = p.integer("check_points", 10);
  const bool field_csv = p.flag("field_csv", true);
  const auto field = pde::solve_degenerate_heat(f, grid, options);
  out.result["max_principle_violation"] = field.max_principle_violation;
  if (checks > 0) {
    // Compare with the convolution solution on a checks x checks node lattice.
    double worst = 0.0;
    const std::size_t nx = field.x.size() - 1, nt = field.t.size() - 1;
    for (int a = 1; a <= checks; ++a) {
      for (int b = 1; b <= checks; ++b) {
        const std::size_t i = nx * a / (checks + 1), j = nt * b / checks;
        extension::ExtensionQuery q{field.x[i], field.t[j], s, f, spec};
        worst = std::max(worst, std::abs(field.at(i, j) - extension::extend(q).value));
      }
    }
    out.result["max_discrepancy"] = worst;
    out.error_bound = worst;
  }
  if (field_csv) {
    Table table;
    table.columns = {"x", "t", "U", "w"};
    const pde::Weight w(s);
    for (std::size_t j = 0; j < field.t.size(); ++j) {
      for (std::size_t i = 0; i < field.x.size(); ++i) {
        table.rows.push_back({field.x[i], field.t[j], field.at(i, j),
                              field.x[i] == 0.0 ? json() : json(w(field.x[i]))});
      }
    }
    out.tables.emplace_back("field", std::move(table));
  }
  return out;
}

Outcome run_weak(Params& p) {
  Outcome out;
  const auto s = order_from(p);
  const auto spec = spec_from(p);
  const bool stationary = p.flag("stationary", false);
  HolderFunction f;
  if (stationary) {
    const auto st = stationary_from(p, s, spec);
    f = st.function;
    out.result["stationarity_residual"] = st.residual;
  } else {
    f = function_from(p, s.value());
  }
  const auto grid = grid_from(p, s);
  const auto options = solve_options_from(p, spec);
  const double T0 = grid.t_nodes.front(), T1 = grid.t_nodes.back();
  const auto eta = pde::bump_test_function(p.number("R", 2.0), p.number("eta_center", 0.5 * (T0 + T1)),
                                           p.number("eta_radius", 0.4 * (T1 - T0)));
  const auto xs = p.numbers("flux_x", {0.1, 0.01, 0.001});
  const auto field = pde::solve_degenerate_heat(f, grid, options);
  const double residual = pde::weak_residual(pde::reflect(field), eta);
  std::vector<double> D;
  for (double t : field.t) D.push_back(quadrature::marchaud(f, t, s, Side::Left, false, spec).value);
  const double predicted = pde::predicted_weak_residual(s, field.t, D, eta);
  const auto flux = pde::weak_flux_limit(field, eta.time, xs);
  out.result["residual"] = residual;
  out.result["predicted"] = predicted;
  out.result["difference"] = std::abs(residual - predicted);
  Table table;
  table.columns = {"x", "flux"};
  for (std::size_t k = 0; k < xs.size(); ++k) table.rows.push_back({xs[k], flux[k]});
  out.tables.emplace_back("flux", std::move(table));
  out.error_bound = std::abs(residual - predicted);
  return out;
}

Outcome run_a2(Params& p) {
  Outcome out;
  const auto s = order_from(p);
  const double R = p.number("R", 1.0);
  const int n = p.integer("n", 64);
  const auto fam = p.text("family", "all");
  pde::IntervalFamily family = pde::IntervalFamily::All;
  if (fam == "anchored") {
    family = pde::IntervalFamily::OriginAnchored;
  } else if (fam != "all") {
    fail(ErrorKind::ConfigInvalid, "family must be 'all' or 'anchored'");
  }
  if (!(R > 0.0) || n < 1) fail(ErrorKind::ConfigInvalid, "a2 needs R > 0 and n >= 1");
  out.result["value"] = pde::a2_constant(s, R, n, family);
  out.result["closed_form"] = pde::a2_closed_form(s);
  return out;
}

Outcome run_stationary(Params& p) {
  Outcome out;
  const auto s = order_from(p);
  const auto st = stationary_from(p, s, spec_from(p));
  out.result["residual"] = st.residual;
  out.result["scale"] = st.scale;
  out.result["min_value"] = *std::min_element(st.values.begin(), st.values.end());
  Table table;
  table.columns = {"t", "phi"};
  for (std::size_t k = 0; k < st.nodes.size(); ++k) table.rows.push_back({st.nodes[k], st.values[k]});
  out.tables.emplace_back("phi", std::move(table));
  out.error_bound = st.residual;
  return out;
}

Outcome run_harnack(Params& p) {
  Outcome out;
  const auto s = order_from(p);
  const auto st = stationary_from(p, s, spec_from(p));
  const int samples = p.integer("samples", 64);
  std::vector<double> t0s, deltas;
  harnack::window_grid(st.J, p.integer("n_t0", 5), p.integer("n_delta", 5), t0s, deltas);
  const auto g = harnack::gamma_estimate(st, t0s, deltas, samples);
  const auto g2 = harnack::gamma_estimate(st, t0s, deltas, 2 * samples);
  out.result["gamma"] = g.gamma;
  out.result["gamma_doubled_samples"] = g2.gamma;
  out.result["stationarity_residual"] = st.residual;
  Table table;
  table.columns = {"t0", "delta", "sup", "inf", "ratio"};
  for (const auto& r : g.rows) table.rows.push_back({r.t0, r.delta, r.sup, r.inf, r.ratio});
  out.tables.emplace_back("gamma", std::move(table));
  out.error_bound = std::abs(g2.gamma - g.gamma);
  return out;
}

Outcome run_limits(Params& p) {
  Outcome out;
  const auto f = function_from(p, std::nullopt);
  const double t = p.number("t", 0.0);
  const auto orders = p.numbers("orders", {0.2, 0.1, 0.05, 0.02, 0.8, 0.9, 0.95, 0.98});
  const auto spec = spec_from(p);
  Table table;
  table.columns = {"s", "value", "f", "derivative", "distance_to_f", "distance_to_derivative"};
  const double fv = f.eval(t);
  const double dv = f.has_derivative() ? f.derivative(t) : std::nan("");
  for (double s : orders) {
    if (!(s > 0.0 && s < 1.0)) fail(ErrorKind::ConfigInvalid, "orders must lie in (0, 1)");
    const auto r = quadrature::marchaud(f, t, Order(s), Side::Left, true, spec);
    table.rows.push_back({s, r.value, fv, dv, std::abs(r.value - fv), std::abs(r.value - dv)});
  }
  out.result["f"] = fv;
  out.result["derivative"] = dv;
  out.tables.emplace_back("limits", std::move(table));
  return out;
}

Outcome dispatch(const RunConfig& config) {
  Params p(config.params);
  Outcome out;
  const auto& c = config.command;
  if (c == "deriv") {
    out = run_deriv(p, config.params);
  } else if (c == "kernel-check") {
    out = run_kernel_check(p);
  } else if (c == "bessel") {
    out = run_bessel(p);
  } else if (c == "extend") {
    out = run_extend(p, config.seed);
  } else if (c == "trace") {
    out = run_trace(p);
  } else if (c == "flux") {
    out = run_flux(p);
  } else if (c == "compose") {
    out = run_compose(p);
  } else if (c == "pde-solve") {
    out = run_pde(p);
  } else if (c == "weak-check") {
    out = run_weak(p);
  } else if (c == "a2") {
    out = run_a2(p);
  } else if (c == "stationary") {
    out = run_stationary(p);
  } else if (c == "harnack") {
    out = run_harnack(p);
  } else if (c == "limits") {
    out = run_limits(p);
  } else {
    fail(ErrorKind::ConfigInvalid, "unknown command '" + c + "'");
  }
  p.finish();
  return out;
}

int exit_code_for(ErrorKind kind) {
  return kind == ErrorKind::ConfigInvalid || kind == ErrorKind::InvalidArgument ? 2 : 3;
}

// Token -> JSON value: numbers, booleans, comma lists of numbers, else a string.
json parse_value(const std::string& token) {
  if (token == "true") return true;
  if (token == "false") return false;
  auto as_number = [](const std::string& s, double& out) {
    std::istringstream in(s);
    in >> out;
    return !s.empty() && in && in.eof();
  };
  double d = 0.0;
  if (as_number(token, d)) return d;
  if (token.find(',') != std::string::npos) {
    json list = json::array();
    std::stringstream ss(token);
    std::string item;
    while (std::getline(ss, item, ',')) {
      if (!as_number(item, d)) return token;
      list.push_back(d);
    }
    return list;
  }
  return token;
}

// "a:b:step" range or comma list.
json parse_range(const std::string& spec) {
  if (spec.find(':') != std::string::npos) {
    double a = 0.0, b = 0.0, step = 0.0;
    char c1 = 0, c2 = 0;
    std::istringstream in(spec);
    if (!(in >> a >> c1 >> b >> c2 >> step) || !(step > 0.0) || b < a) {
      fail(ErrorKind::ConfigInvalid, "bad sweep range '" + spec + "'");
    }
    json list = json::array();
    const auto n = static_cast<long>(std::floor((b - a) / step + 1e-9));
    for (long k = 0; k <= n; ++k) {
      // Round to 12 digits so 0.1:0.9:0.2 yields 0.3 rather than 0.30000000000000004.
      char buf[32];
      std::snprintf(buf, sizeof buf, "%.12g", a + step * static_cast<double>(k));
      list.push_back(std::strtod(buf, nullptr));
    }
    return list;
  }
  json list = json::array();
  std::stringstream ss(spec);
  std::string item;
  while (std::getline(ss, item, ',')) list.push_back(parse_value(item));
  return list;
}

std::string format_number(double v) {
  if (!std::isfinite(v)) return std::isnan(v) ? "nan" : (v > 0 ? "inf" : "-inf");
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string csv_field(const json& v) {
  if (v.is_null()) return "";
  if (v.is_boolean()) return v.get<bool>() ? "true" : "false";
  if (v.is_number()) return format_number(v.get<double>());
  const std::string s = v.is_string() ? v.get<std::string>() : v.dump();
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string q = "\"";
  for (char c : s) {
    if (c == '"') q += '"';
    q += c;
  }
  return q + "\"";
}

}  // namespace

const std::vector<std::string>& commands() {
  static const std::vector<std::string> names{"deriv",   "kernel-check", "bessel", "extend",
                                              "trace",   "flux",         "compose", "pde-solve",
                                              "weak-check", "a2",        "stationary", "harnack",
                                              "limits"};
  return names;
}

void RunConfig::validate() const {
  const auto& names = commands();
  if (std::find(names.begin(), names.end(), command) == names.end()) {
    fail(ErrorKind::ConfigInvalid, "unknown command '" + command + "'");
  }
  if (!params.is_object()) fail(ErrorKind::ConfigInvalid, "params must be an object");
  if (!sweep.is_object()) fail(ErrorKind::ConfigInvalid, "sweep must be an object");
  for (const auto& item : sweep.items()) {
    if (!item.value().is_array() || item.value().empty()) {
      fail(ErrorKind::ConfigInvalid, "sweep range for '" + item.key() + "' is empty");
    }
  }
  if (threads < 0) fail(ErrorKind::ConfigInvalid, "threads must be >= 0");
}

HolderFunction resolve_function(const json& params, const std::string& prefix) {
  json sub = json::object();
  for (const auto& item : params.items()) {
    if (item.key().rfind(prefix, 0) == 0) sub[item.key().substr(prefix.size())] = item.value();
  }
  Params p(sub);
  std::optional<double> s;
  if (sub.contains("s") && sub["s"].is_number()) s = sub["s"].get<double>();
  return function_from(p, s);
}

RunResult run(const RunConfig& config) {
  RunResult out;
  const auto start = std::chrono::steady_clock::now();
  json record;
  record["command"] = config.command;
  record["params"] = config.params;
  record["seed"] = config.seed;
  record["version"] = FRACEXT_VERSION;
  record["warnings"] = json::array();
  try {
    config.validate();
    auto outcome = dispatch(config);
    record["result"] = outcome.result;
    record["error_bound"] = outcome.error_bound;
    for (const auto& w : outcome.warnings) record["warnings"].push_back(w);
    out.tables = std::move(outcome.tables);
  } catch (const Error& e) {
    record["result"] = nullptr;
    record["error"] = {{"category", to_string(e.kind())}, {"message", e.what()}};
    out.exit_code = exit_code_for(e.kind());
  } catch (const std::exception& e) {
    record["result"] = nullptr;
    record["error"] = {{"category", "ComputationFailed"}, {"message", e.what()}};
    out.exit_code = 3;
  }
  record["wall_time_ms"] =
      std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
  out.record = std::move(record);
  return out;
}

RunResult sweep(const RunConfig& config) {
  config.validate();
  // Lexicographic order: keys sorted (json objects are ordered maps), values ascending.
  std::vector<std::string> keys;
  std::vector<std::vector<json>> values;
  for (const auto& item : config.sweep.items()) {
    keys.push_back(item.key());
    std::vector<json> v(item.value().begin(), item.value().end());
    std::stable_sort(v.begin(), v.end());
    values.push_back(std::move(v));
  }
  std::vector<std::vector<json>> points{{}};
  for (const auto& v : values) {
    std::vector<std::vector<json>> next;
    for (const auto& prefix : points) {
      for (const auto& x : v) {
        auto p = prefix;
        p.push_back(x);
        next.push_back(std::move(p));
      }
    }
    points = std::move(next);
  }

  std::vector<RunResult> results(points.size());
  const int hw = static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
  const int workers = std::min<int>(config.threads > 0 ? config.threads : hw,
                                    static_cast<int>(points.size()));
  std::atomic<std::size_t> next{0};
  auto work = [&] {
    for (std::size_t k; (k = next.fetch_add(1)) < points.size();) {
      RunConfig one = config;
      one.sweep = json::object();
      for (std::size_t i = 0; i < keys.size(); ++i) one.params[keys[i]] = points[k][i];
      results[k] = run(one);
    }
  };
  std::vector<std::thread> pool;
  for (int w = 1; w < workers; ++w) pool.emplace_back(work);
  work();
  for (auto& th : pool) th.join();

  std::set<std::string> result_keys;
  for (const auto& r : results) {
    if (r.record["result"].is_object()) {
      for (const auto& item : r.record["result"].items()) {
        if (item.value().is_primitive()) result_keys.insert(item.key());
      }
    }
  }
  Table table;
  table.columns = keys;
  table.columns.insert(table.columns.end(), {"status", "error_category"});
  table.columns.insert(table.columns.end(), result_keys.begin(), result_keys.end());
  table.columns.push_back("error_bound");
  RunResult out;
  int failures = 0;
  for (std::size_t k = 0; k < points.size(); ++k) {
    const auto& rec = results[k].record;
    std::vector<json> row = points[k];
    const bool ok = results[k].exit_code == 0;
    failures += ok ? 0 : 1;
    row.push_back(ok ? "ok" : "failed");
    row.push_back(ok ? json() : rec["error"]["category"]);
    for (const auto& key : result_keys) {
      row.push_back(ok && rec["result"].contains(key) ? rec["result"][key] : json());
    }
    row.push_back(ok ? rec["error_bound"] : json());
    table.rows.push_back(std::move(row));
  }
  out.record["command"] = config.command;
  out.record["params"] = config.params;
  out.record["sweep"] = config.sweep;
  out.record["seed"] = config.seed;
  out.record["version"] = FRACEXT_VERSION;
  out.record["result"] = {{"points", points.size()}, {"failures", failures}};
  out.record["error_bound"] = nullptr;
  out.record["warnings"] = json::array();
  out.record["wall_time_ms"] = 0.0;
  out.tables.emplace_back("sweep", std::move(table));
  out.exit_code = failures == 0 ? 0 : 3;
  return out;
}

RunConfig parse_arguments(int argc, const char* const* argv) {
  CLI::App app{"fracext: Marchaud derivatives, extension problem, Harnack checks"};
  app.allow_extras();
  std::string command, config_path, output;
  std::vector<std::string> sweeps;
  std::uint64_t seed = 0;
  int threads = 0;
  app.add_option("command", command, "one of: deriv kernel-check bessel extend trace flux compose "
                                      "pde-solve weak-check a2 stationary harnack limits")
      ->required();
  app.add_option("--config", config_path, "JSON config file");
  app.add_option("--output", output, "output path prefix (record .json, tables _<name>.csv)");
  app.add_option("--seed", seed, "seed for randomized sampling");
  app.add_option("--threads", threads, "sweep parallelism (0 = core count)");
  app.add_option("--sweep", sweeps, "key=a:b:step or key=v1,v2,...");
  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp&) {
    std::cout << app.help();
    std::exit(0);
  } catch (const CLI::ParseError& e) {
    fail(ErrorKind::ConfigInvalid, e.what());
  }

  RunConfig cfg;
  if (!config_path.empty()) {
    std::ifstream in(config_path);
    if (!in) fail(ErrorKind::ConfigInvalid, "cannot open config " + config_path);
    json file;
    try {
      file = json::parse(in);
    } catch (const json::exception& e) {
      fail(ErrorKind::ConfigInvalid, std::string("bad config JSON: ") + e.what());
    }
    if (file.contains("params")) cfg.params = file["params"];
    if (file.contains("sweep")) cfg.sweep = file["sweep"];
    if (file.contains("output")) cfg.output = file["output"].get<std::string>();
    if (file.contains("seed")) cfg.seed = file["seed"].get<std::uint64_t>();
    if (file.contains("threads")) cfg.threads = file["threads"].get<int>();
  }
  cfg.command = command;
  if (!output.empty()) cfg.output = output;
  if (app.count("--seed")) cfg.seed = seed;
  if (app.count("--threads")) cfg.threads = threads;
  for (const auto& s : sweeps) {
    const auto eq = s.find('=');
    if (eq == std::string::npos || eq == 0) fail(ErrorKind::ConfigInvalid, "sweep needs key=values");
    cfg.sweep[s.substr(0, eq)] = parse_range(s.substr(eq + 1));
  }
  const auto extras = app.remaining();
  for (std::size_t i = 0; i < extras.size(); ++i) {
    const auto& tok = extras[i];
    if (tok.rfind("--", 0) != 0 || tok.size() < 3) {
      fail(ErrorKind::ConfigInvalid, "unexpected argument '" + tok + "'");
    }
    std::string key = tok.substr(2);
    std::replace(key.begin(), key.end(), '-', '_');
    if (key == "fn" || key == "function") key = "fn";
    const bool has_value = i + 1 < extras.size() && extras[i + 1].rfind("--", 0) != 0;
    cfg.params[key] = has_value ? parse_value(extras[++i]) : json(true);
  }
  cfg.validate();
  return cfg;
}

std::string to_csv(const Table& table) {
  std::string out;
  for (std::size_t i = 0; i < table.columns.size(); ++i) {
    if (i) out += ',';
    out += csv_field(table.columns[i]);
  }
  out += "\r\n";
  for (const auto& row : table.rows) {
    for (std::size_t i = 0; i < row.size(); ++i) {
      if (i) out += ',';
      out += csv_field(row[i]);
    }
    out += "\r\n";
  }
  return out;
}

void emit(const RunConfig& config, const RunResult& result) {
  if (config.output.empty()) {
    std::cout << result.record.dump(2) << '\n';
    return;
  }
  const std::filesystem::path base(config.output);
  if (base.has_parent_path()) std::filesystem::create_directories(base.parent_path());
  {
    std::ofstream out(config.output + ".json");
    if (!out) fail(ErrorKind::ConfigInvalid, "cannot write " + config.output + ".json");
    out << result.record.dump(2) << '\n';
  }
  for (const auto& [name, table] : result.tables) {
    std::ofstream out(config.output + "_" + name + ".csv", std::ios::binary);
    if (!out) fail(ErrorKind::ConfigInvalid, "cannot write table " + name);
    out << to_csv(table);
  }
}

int main_entry(int argc, const char* const* argv) {
  RunConfig cfg;
  try {
    cfg = parse_arguments(argc, argv);
  } catch (const Error& e) {
    json record{{"command", argc > 1 ? argv[1] : ""},
                {"error", {{"category", to_string(e.kind())}, {"message", e.what()}}},
                {"version", FRACEXT_VERSION}};
    std::cout << record.dump(2) << '\n';
    return 2;
  }
  const auto result = cfg.sweep.empty() ? run(cfg) : sweep(cfg);
  try {
    emit(cfg, result);
  } catch (const std::exception& e) {
    std::cerr << "fracext: " << e.what() << '\n';
    return 2;
  }
  return result.exit_code;
}

}  // namespace fracext::cli
