#include <doctest.h>

#include <cmath>
#include <limits>

#include "fracext/functions.hpp"
#include "fracext/harnack.hpp"
#include "fracext/quadrature.hpp"

using namespace fracext;
using namespace fracext::harnack;

TEST_CASE("window geometry") {
  const HarnackWindow w(1.0, 0.4);
  CHECK(w.sup_interval().hi < w.inf_interval().lo);
  CHECK(w.sup_interval().lo == doctest::Approx(0.7));
  CHECK(w.inf_interval().hi == doctest::Approx(1.4));
  CHECK(HarnackWindow::from_rho(0.0, 0.5).delta == doctest::Approx(0.25));
  CHECK_THROWS_AS(HarnackWindow(0.0, 0.0), Error);
  const RemarkWindow r(1.0, 0.8);
  CHECK(r.I_plus().lo == doctest::Approx(r.I().lo));
  CHECK(r.I_plus().hi < r.I_minus().lo);
  CHECK(r.I().contains(r.I_minus()));
}

TEST_CASE("Grunwald-Letnikov weights") {
  const auto g = gl_weights(Order(0.5), 5);
  CHECK(g[0] == 1.0);
  CHECK(g[1] == doctest::Approx(-0.5));
  CHECK(g[2] == doctest::Approx(-0.125));
  // Partial sums: Gamma(n - s) / (Gamma(1 - s) Gamma(n)).
  double sum = 0.0;
  const int n = 1000;
  for (double v : gl_weights(Order(0.3), n)) sum += v;
  CHECK(sum == doctest::Approx(std::exp(std::lgamma(n - 0.3) - std::lgamma(0.7) - std::lgamma(n))).epsilon(1e-10));
}

TEST_CASE("constant exterior gives a constant solution") {
  const auto st = solve_stationary({0.0, 1.0}, functions::constant(2.0), Order(0.4), 100);
  for (double v : st.values) CHECK(v == doctest::Approx(2.0).epsilon(1e-12));
  CHECK(st.residual < 1e-10);
}

TEST_CASE("stationary solutions are nonnegative and stationary") {
  const Order s(0.5);
  const auto st = solve_stationary({0.0, 1.0}, functions::bump(-1.0, 0.8), s, 200);
  CHECK(st.residual <= 1e-3 * st.scale);
  for (double v : st.values) CHECK(v >= 0.0);
  // Independent spot check of the derivative inside J.
  const double d = quadrature::marchaud(st.function, 0.6, s, Side::Left, true).value;
  CHECK(std::abs(d) <= 1e-3 * st.scale);
  CHECK(st(-1.0) == doctest::Approx(1.0));
}

TEST_CASE("a residual threshold that cannot be met is reported") {
  StationaryOptions o;
  o.threshold = 1e-9;
  try {
    solve_stationary({0.0, 1.0}, functions::bump(-1.0, 0.8), Order(0.5), 50, o);
    FAIL("expected ResidualTooLarge");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::ResidualTooLarge);
  }
}

TEST_CASE("Harnack ratios") {
  const Order s(0.5);
  const auto st = solve_stationary({0.0, 1.0}, functions::shifted_bump(-0.6, 0.5, 1.0, 0.3), s, 200);
  const HarnackWindow w(0.5, 0.2);
  const double r = harnack_ratio(st, w);
  CHECK(std::isfinite(r));
  CHECK(r >= 1.0 - 1e-12);
  CHECK_THROWS_AS(harnack_ratio(st, HarnackWindow(0.95, 0.2)), Error);

  // Scaling phi leaves every ratio unchanged.
  StationaryFunction scaled_st = st;
  scaled_st.function = scaled(st.function, 7.0);
  CHECK(harnack_ratio(scaled_st, w) == doctest::Approx(r).epsilon(1e-14));

  std::vector<double> t0s, deltas;
  window_grid(st.J, 5, 5, t0s, deltas);
  CHECK(t0s.size() == 5);
  CHECK(deltas.size() == 5);
  const auto g = gamma_estimate(st, t0s, deltas);
  CHECK(g.rows.size() == 25);
  for (const auto& row : g.rows) CHECK(row.ratio <= g.gamma);
  CHECK(std::isfinite(g.gamma));
  CHECK(std::isfinite(harnack_ratio_remark(st, RemarkWindow(0.9, 0.4))));
}

TEST_CASE("a vanishing inf gives an infinite ratio") {
  StationaryFunction st;
  st.J = {0.0, 1.0};
  st.function = functions::bump(0.3, 0.2);
  CHECK(harnack_ratio(st, HarnackWindow(0.5, 0.4)) == std::numeric_limits<double>::infinity());
}
