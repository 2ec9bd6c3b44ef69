#include <doctest.h>

#include <cmath>
#include <fstream>
#include <string>

#include "fracext/extension.hpp"
#include "fracext/functions.hpp"
#include "fracext/integrate.hpp"
#include "fracext/pde.hpp"

using namespace fracext;
using namespace fracext::pde;

namespace {

double max_error(const HolderFunction& f, Order s, int N, TimeScheme scheme) {
  const auto grid = Grid::graded(s, 20.0, N, 0.0, 2.0, N);
  SolveOptions o;
  o.far = FarBoundary::Convolution;
  o.scheme = scheme;
  const auto field = solve_degenerate_heat(f, grid, o);
  double e = 0.0;
  for (int j = N / 4; j <= N; j += N / 4) {
    for (int i = N / 10; i < N; i += N / 10) {
      extension::ExtensionQuery q{field.x[i], field.t[j], s, f, {}};
      e = std::max(e, std::abs(field.at(i, j) - extension::extend(q).value));
    }
  }
  return e;
}

}  // namespace

TEST_CASE("weight integrals") {
  const Weight w(Order(0.3));
  const auto num = integrate([&](double x) { return w(x); }, std::vector<double>{-0.7, 0.0, 1.3},
                             Tolerance{1e-13, 1e-12, 2000});
  CHECK(w.integral(-0.7, 1.3) == doctest::Approx(num.value).epsilon(1e-10));
  CHECK(w.inverse_integral(0.0, 2.0) == doctest::Approx(std::pow(2.0, 0.6) / 0.6).epsilon(1e-13));
}

TEST_CASE("grid construction and validation") {
  const auto g = Grid::graded(Order(0.5), 10.0, 40, 0.0, 1.0, 20);
  CHECK(g.x_nodes.front() == doctest::Approx(10.0 / 1600.0));
  CHECK(g.x_nodes.back() == doctest::Approx(10.0));
  CHECK(g.x_nodes[0] < g.x_nodes[1] - g.x_nodes[0]);
  CHECK(g.t_nodes.size() == 21);
  CHECK_THROWS_AS(Grid::graded(Order(0.5), 10.0, 1, 0.0, 1.0, 20), Error);
  CHECK_THROWS_AS(Grid::graded(Order(0.5), 10.0, 40, 1.0, 1.0, 20), Error);
}

TEST_CASE("constants are reproduced exactly") {
  const auto grid = Grid::graded(Order(0.3), 10.0, 30, 0.0, 1.0, 30);
  SolveOptions o;
  o.far = FarBoundary::Constant;
  o.far_value = 1.75;
  const auto field = solve_degenerate_heat(functions::constant(1.75), grid, o);
  for (double v : field.values) CHECK(v == doctest::Approx(1.75).epsilon(1e-12));
}

TEST_CASE("solver converges to the convolution solution") {
  const auto f = functions::sine();
  for (double s : {0.3, 0.7}) {
    const double coarse = max_error(f, Order(s), 40, TimeScheme::BDF2);
    const double fine = max_error(f, Order(s), 80, TimeScheme::BDF2);
    CHECK(fine < 5e-3);
    CHECK(std::log2(coarse / fine) > 1.5);
  }
  CHECK(max_error(f, Order(0.5), 80, TimeScheme::BDF2) <
        max_error(f, Order(0.5), 80, TimeScheme::BackwardEuler));
}

TEST_CASE("maximum principle") {
  const auto grid = Grid::graded(Order(0.4), 20.0, 60, -1.0, 2.0, 60);
  SolveOptions o;
  o.far = FarBoundary::Convolution;
  const auto field = solve_degenerate_heat(functions::bump(0.5, 0.7), grid, o);
  CHECK(field.max_principle_violation <= 1e-12);
}

TEST_CASE("zero far boundary too close is reported") {
  const auto grid = Grid::graded(Order(0.5), 2.0, 20, 0.0, 1.0, 20);
  CHECK_THROWS_AS(solve_degenerate_heat(functions::sine(), grid), Error);
  try {
    solve_degenerate_heat(functions::sine(), grid);
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::FarBoundaryTooClose);
  }
}

TEST_CASE("reflection is even and idempotent") {
  const auto grid = Grid::graded(Order(0.5), 10.0, 20, 0.0, 1.0, 10);
  SolveOptions o;
  o.far = FarBoundary::Convolution;
  const auto field = solve_degenerate_heat(functions::bump(), grid, o);
  const auto r = reflect(field);
  CHECK(r.reflected);
  CHECK(r.x.size() == 2 * field.x.size() - 1);
  const std::size_t z = r.zero_index();
  CHECK(r.x[z] == 0.0);
  for (std::size_t j = 0; j < r.t.size(); ++j) {
    for (std::size_t k = 1; k <= 5; ++k) CHECK(r.at(z - k, j) == r.at(z + k, j));
  }
  const auto rr = reflect(r);
  CHECK(rr.values == r.values);
  CHECK(positive_half(r).values == field.values);
}

TEST_CASE("weak residual of a constant vanishes") {
  const Order s(0.5);
  const auto grid = Grid::graded(s, 10.0, 40, 0.0, 1.0, 40);
  SolveOptions o;
  o.far = FarBoundary::Constant;
  o.far_value = 1.0;
  const auto field = solve_degenerate_heat(functions::constant(1.0), grid, o);
  const auto eta = bump_test_function(2.0, 0.5, 0.3);
  CHECK(std::abs(weak_residual(reflect(field), eta)) < 1e-12);
}

TEST_CASE("test function derivatives") {
  const auto eta = bump_test_function(2.0, 0.5, 0.3);
  const double h = 1e-6;
  for (double x : {-1.1, 0.3}) {
    CHECK(eta.space_dx(x) == doctest::Approx((eta.space(x + h) - eta.space(x - h)) / (2 * h)).epsilon(1e-6));
  }
  CHECK(eta.time_dt(0.6) == doctest::Approx((eta.time(0.6 + h) - eta.time(0.6 - h)) / (2 * h)).epsilon(1e-6));
  CHECK(eta.time(0.9) == 0.0);
  CHECK(eta.space(2.5) == 0.0);
}

TEST_CASE("A2 constant of the weight") {
  CHECK(a2_constant(Order(0.5)) == 1.0);
  double prev = 0.0;
  for (int n : {16, 32, 64, 128}) {
    const double v = a2_constant(Order(0.3), 1.0, n);
    CHECK(v >= prev - 1e-15);
    prev = v;
  }
  for (double s : {0.25, 0.8}) {
    CHECK(a2_constant(Order(s), 1.0, 64, IntervalFamily::OriginAnchored) ==
          doctest::Approx(a2_closed_form(Order(s))).epsilon(1e-12));
  }
  CHECK(a2_closed_form(Order(0.25)) == doctest::Approx(4.0 / 3.0));
  // Scale invariance of the weight.
  CHECK(a2_constant(Order(0.3), 5.0, 32) == doctest::Approx(a2_constant(Order(0.3), 1.0, 32)).epsilon(1e-12));
}

TEST_CASE("field csv") {
  const auto grid = Grid::graded(Order(0.5), 10.0, 4, 0.0, 1.0, 2);
  SolveOptions o;
  o.far = FarBoundary::Convolution;
  const auto field = solve_degenerate_heat(functions::bump(), grid, o);
  const std::string path = "fracext_field.csv";
  write_field_csv(field, path);
  std::ifstream in(path);
  std::string header;
  std::getline(in, header);
  CHECK(header == "x,t,U,w");
}
