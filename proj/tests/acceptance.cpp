// One PASS/FAIL line per acceptance criterion; exit status is the number of failures.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <json.hpp>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fracext/extension.hpp"
#include "fracext/functions.hpp"
#include "fracext/harnack.hpp"
#include "fracext/pde.hpp"
#include "fracext/quadrature.hpp"
#include "fracext/special.hpp"

using namespace fracext;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(const char* format, auto... args) {
  char buf[512];
  std::snprintf(buf, sizeof buf, format, args...);
  return buf;
}

int failures = 0;

void criterion(int id, const char* name, const std::function<Outcome()>& body) {
  const auto start = std::chrono::steady_clock::now();
  Outcome o;
  try {
    o = body();
  } catch (const std::exception& e) {
    o = {false, std::string("exception: ") + e.what()};
  }
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (!o.pass) ++failures;
  std::printf("[%s] %2d %-22s %s (%.1f s)\n", o.pass ? "PASS" : "FAIL", id, name, o.detail.c_str(), secs);
  std::fflush(stdout);
}

const std::vector<double> kOrders{0.1, 0.2, 0.3, 0.4, 0.5, 0.6, 0.7, 0.8, 0.9};

Outcome kernel_mass() {
  double worst = 0.0;
  for (double s : {0.1, 0.3, 0.5, 0.7, 0.9}) {
    for (double x : {0.01, 1.0, 10.0}) {
      worst = std::max(worst, std::abs(special::kernel_mass(x, Order(s)).value - 1.0));
    }
  }
  return {worst <= 1e-8, fmt("max |mass - 1| = %.2e (tol 1e-8)", worst)};
}

Outcome laplace_bessel() {
  double worst = 0.0;
  for (double s : {0.2, 0.5, 0.8}) {
    for (double w : {0.5, 1.0, 4.0}) {
      const double n = special::laplace_psi_numeric(Order(s), w).value;
      const double c = special::laplace_psi_closed(Order(s), w);
      worst = std::max(worst, std::abs(n - c) / std::abs(c));
    }
  }
  // K_{1/2}(1) = sqrt(pi/2) e^{-1} makes the s = 1/2, omega = 1 value exactly e^{-1}.
  const double v = special::laplace_psi_numeric(Order(0.5), 1.0).value;
  const double pin = std::abs(v - std::exp(-1.0));
  return {worst <= 1e-6 && pin <= 1e-8,
          fmt("max rel diff = %.2e (tol 1e-6); s=0.5,w=1: %.10f vs e^-1 diff %.1e (tol 1e-8)", worst,
              v, pin)};
}

Outcome trace_agreement() {
  double worst = 0.0;
  const HolderFunction fs[] = {functions::sine(), functions::bump()};
  for (const auto& f : fs) {
    for (double s : kOrders) {
      for (double t : {-0.4, 0.0, 0.55}) {
        const double tr = extension::trace_limit(f, t, Order(s)).value;
        const double q = quadrature::marchaud(f, t, Order(s), Side::Left).value;
        worst = std::max(worst, std::abs(tr - q) / (1.0 + std::abs(q)));
      }
    }
  }
  return {worst <= 1e-4, fmt("max |trace - quad|/(1+|quad|) = %.2e over 54 cases (tol 1e-4)", worst)};
}

Outcome flux_ratio() {
  double worst = 0.0;
  std::string ratios;
  const HolderFunction fs[] = {functions::sine(), functions::bump()};
  for (const auto& f : fs) {
    for (double s : {0.2, 0.5, 0.8}) {
      const double t = 0.3;
      const double ratio = extension::flux_limit(f, t, Order(s)).raw / extension::trace_limit(f, t, Order(s)).value;
      worst = std::max(worst, std::abs(ratio / (2.0 * s) - 1.0));
      ratios += fmt(" %.5f", ratio);
    }
  }
  return {worst <= 0.01, fmt("ratios%s; max |ratio/2s - 1| = %.2e (tol 1e-2)", ratios.c_str(), worst)};
}

Outcome composition() {
  double worst = 0.0;
  const std::pair<HolderFunction, std::vector<double>> cases[] = {
      {functions::sine(), {0.0, 1.0, 2.0}}, {functions::bump(), {-0.5, 0.0, 0.4}}};
  for (const auto& [f, ts] : cases) {
    for (double s : {0.3, 0.5, 0.7}) {
      const auto rs = extension::compose_check(f, ts, Order(s));
      for (std::size_t k = 0; k < ts.size(); ++k) {
        const double d = f.derivative(ts[k]);
        worst = std::max(worst, std::abs(rs[k].value - d) / (1.0 + std::abs(d)));
      }
    }
  }
  return {worst <= 1e-2, fmt("max |D^{1-s}D^s f - f'|/(1+|f'|) = %.2e (tol 1e-2)", worst)};
}

Outcome limits() {
  const auto f = functions::bump();
  const double t = 0.2;
  auto distances = [&](const std::vector<double>& orders, double target) {
    std::vector<double> d;
    for (const auto& r : quadrature::limit_small_s(f, t, orders)) d.push_back(std::abs(r.value - target));
    return d;
  };
  const auto small = distances({0.2, 0.1, 0.05, 0.02}, f(t));
  const auto large = distances({0.8, 0.9, 0.95, 0.98}, f.derivative(t));
  bool ok = true;
  for (std::size_t k = 1; k < 4; ++k) ok = ok && small[k] < small[k - 1] && large[k] < large[k - 1];
  return {ok, fmt("|D^s f - f|: %.3g %.3g %.3g %.3g; |D^s f - f'|: %.3g %.3g %.3g %.3g", small[0],
                  small[1], small[2], small[3], large[0], large[1], large[2], large[3])};
}

double pde_error(const HolderFunction& f, Order s, int N) {
  const auto grid = pde::Grid::graded(s, 20.0, N, 0.0, 2.0, N);
  pde::SolveOptions o;
  o.far = pde::FarBoundary::Convolution;
  const auto field = pde::solve_degenerate_heat(f, grid, o);
  double e = 0.0;
  for (int j = N / 10; j <= N; j += N / 10) {
    for (int i = N / 20; i < N; i += N / 20) {
      extension::ExtensionQuery q{field.x[i], field.t[j], s, f, {}};
      e = std::max(e, std::abs(field.at(i, j) - extension::extend(q).value));
    }
  }
  return e;
}

Outcome pde_solver() {
  double worst = 0.0, min_order = 1e300;
  const HolderFunction fs[] = {functions::sine(), functions::bump(1.0, 1.0)};
  for (const auto& f : fs) {
    for (double s : {0.25, 0.5, 0.8}) {
      const double coarse = pde_error(f, Order(s), 100), fine = pde_error(f, Order(s), 200);
      worst = std::max(worst, fine / f.bound_M);
      min_order = std::min(min_order, std::log2(coarse / fine));
    }
  }
  return {worst <= 1e-3 && min_order >= 1.5,
          fmt("max discrepancy/scale at 200x200 = %.2e (tol 1e-3); min order = %.2f (>= 1.5)", worst,
              min_order)};
}

Outcome weak_form() {
  const Order s(0.5);
  const auto st = harnack::solve_stationary({0.0, 1.0}, functions::bump(-1.0, 0.8), s, 400);
  const auto eta = pde::bump_test_function(2.0, 0.55, 0.3);
  pde::SolveOptions o;
  o.far = pde::FarBoundary::Convolution;
  std::vector<double> res;
  for (int N : {50, 100, 200}) {
    const auto grid = pde::Grid::graded(s, 20.0, N, 0.2, 0.9, N);
    res.push_back(std::abs(pde::weak_residual(pde::reflect(pde::solve_degenerate_heat(st.function, grid, o)), eta)));
  }
  const bool monotone = res[1] < res[0] && res[2] < res[1];

  const auto f = functions::sine();
  const auto grid = pde::Grid::graded(s, 20.0, 200, 0.0, 2.0, 200);
  const auto field = pde::solve_degenerate_heat(f, grid, o);
  const auto eta2 = pde::bump_test_function(2.0, 1.0, 0.8);
  std::vector<double> D;
  for (double t : field.t) D.push_back(quadrature::marchaud(f, t, s, Side::Left).value);
  const double got = pde::weak_residual(pde::reflect(field), eta2);
  const double want = pde::predicted_weak_residual(s, field.t, D, eta2);
  const double diff = std::abs(got - want);
  return {monotone && diff <= 1e-2,
          fmt("stationary residuals %.2e > %.2e > %.2e; sine %.6f vs pairing %.6f (diff %.1e, tol 1e-2)",
              res[0], res[1], res[2], got, want, diff)};
}

Outcome a2_weight() {
  const double half = pde::a2_constant(Order(0.5));
  const Order s(0.25);
  const double closed = pde::a2_closed_form(s);
  const double v64 = pde::a2_constant(s, 1.0, 64), v256 = pde::a2_constant(s, 1.0, 256);
  const double anchored = pde::a2_constant(s, 1.0, 256, pde::IntervalFamily::OriginAnchored);
  const bool ok = half == 1.0 && std::abs(v256 - closed) <= 1e-3;
  return {ok, fmt("s=0.5: %.17g; s=0.25 all subintervals n=64: %.6f, n=256: %.6f vs 4/3 "
                  "(origin-anchored intervals: %.6f)",
                  half, v64, v256, anchored)};
}

Outcome harnack_check() {
  const Order s(0.5);
  const harnack::Interval J{0.0, 1.0};
  const HolderFunction exteriors[] = {functions::bump(-1.0, 0.8),
                                      functions::shifted_bump(-0.6, 0.5, 1.0, 0.3),
                                      functions::power_stationary(-1.0, 0.5)};
  std::vector<double> t0s, deltas;
  harnack::window_grid(J, 5, 5, t0s, deltas);
  bool ok = true;
  std::string detail;
  for (const auto& ext : exteriors) {
    const auto st = harnack::solve_stationary(J, ext, s, 400);
    const bool stationary = st.residual <= 1e-3 * st.scale;
    const auto g = harnack::gamma_estimate(st, t0s, deltas, 64);
    const auto g2 = harnack::gamma_estimate(st, t0s, deltas, 128);
    bool finite = true, invariant = true;
    auto scaled_st = st;
    scaled_st.function = scaled(st.function, 3.7);
    const auto gs = harnack::gamma_estimate(scaled_st, t0s, deltas, 64);
    for (std::size_t k = 0; k < g.rows.size(); ++k) {
      finite = finite && std::isfinite(g.rows[k].ratio);
      invariant = invariant && std::abs(gs.rows[k].ratio - g.rows[k].ratio) <= 4e-16 * g.rows[k].ratio;
    }
    const double drift = std::abs(g2.gamma - g.gamma) / g.gamma;
    ok = ok && stationary && finite && invariant && drift <= 0.1;
    detail += fmt(" [resid/scale %.1e, gamma %.4f, drift %.1e%s%s]", st.residual / st.scale, g.gamma,
                  drift, finite ? "" : ", non-finite", invariant ? "" : ", not scale invariant");
  }
  return {ok, "3 stationary functions, 5x5 windows:" + detail};
}

Outcome backward_equation() {
  const auto f = functions::sine();
  double worst = 0.0;
  for (double s : {0.3, 0.7}) {
    for (double t : {-0.4, 0.0, 0.55}) {
      const double tr =
          extension::trace_limit(f, t, Order(s), extension::LimitSchedule::geometric(), {}, Side::Right).value;
      const double q = quadrature::marchaud(f, t, Order(s), Side::Right).value;
      worst = std::max(worst, std::abs(tr - q));
    }
  }
  std::mt19937_64 rng(2024);
  auto uniform = [&] { return static_cast<double>(rng() >> 11) * 0x1.0p-53; };
  const auto g = functions::bump(0.2, 0.9);
  const auto gr = reflected(g);
  double refl = 0.0;
  for (int k = 0; k < 20; ++k) {
    const double x = 0.05 + 2.95 * uniform(), t = -2.0 + 4.0 * uniform();
    const double s = 0.1 + 0.8 * uniform();
    const double back = extension::backward_extend(g, x, t, Order(s)).value;
    const double fwd = extension::extend({x, -t, Order(s), gr, {}}).value;
    refl = std::max(refl, std::abs(back - fwd));
  }
  return {worst <= 1e-4 && refl <= 1e-9,
          fmt("right trace vs right quad max diff = %.2e (tol 1e-4); reflection max diff = %.1e", worst, refl)};
}

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

Outcome determinism() {
  const std::string cli = FRACEXT_CLI;
  const std::vector<std::pair<std::string, std::vector<std::string>>> runs{
      {" extend --fn sine --s 0.3 --x 0.4 --t 0.2 --reflection_checks 6 --seed 11", {"_reflection.csv"}},
      {" trace --fn bump --s 0.45 --t 0.1", {"_trace.csv"}},
      {" a2 --sweep s=0.1:0.9:0.1 --sweep n=16,32", {"_sweep.csv"}}};
  int identical = 0, total = 0;
  for (std::size_t r = 0; r < runs.size(); ++r) {
    std::vector<std::string> outputs;
    for (int rep = 0; rep < 2; ++rep) {
      const std::string prefix = fmt("acceptance_det_%zu_%d", r, rep);
      const std::string threads = rep == 0 ? " --threads 1" : " --threads 3";
      if (std::system((cli + runs[r].first + threads + " --output " + prefix + " > /dev/null").c_str()) != 0) {
        return {false, "CLI run failed: " + runs[r].first};
      }
      auto record = nlohmann::json::parse(slurp(prefix + ".json"));
      record.erase("wall_time_ms");
      std::string bytes = record.dump(2);
      for (const auto& suffix : runs[r].second) bytes += slurp(prefix + suffix);
      outputs.push_back(bytes);
    }
    ++total;
    identical += outputs[0] == outputs[1] ? 1 : 0;
  }
  return {identical == total, fmt("%d/%d repeated runs byte-identical (records without timing, CSV tables)",
                                  identical, total)};
}

}  // namespace

int main() {
  criterion(1, "kernel mass", kernel_mass);
  criterion(2, "laplace-bessel", laplace_bessel);
  criterion(3, "trace route", trace_agreement);
  criterion(4, "flux/trace ratio", flux_ratio);
  criterion(5, "composition", composition);
  criterion(6, "order limits", limits);
  criterion(7, "pde vs convolution", pde_solver);
  criterion(8, "weak form", weak_form);
  criterion(9, "A2 constant", a2_weight);
  criterion(10, "harnack", harnack_check);
  criterion(11, "backward equation", backward_equation);
  criterion(12, "determinism", determinism);
  std::printf("%d of 12 criteria failed\n", failures);
  return failures;
}
