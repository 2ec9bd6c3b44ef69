#include <doctest.h>

#include <cmath>
#include <fstream>
#include <numbers>

#include "fracext/functions.hpp"
#include "fracext/integrate.hpp"
#include "fracext/interpolation.hpp"

using namespace fracext;

TEST_CASE("order validation") {
  CHECK_THROWS_AS(Order(0.0), Error);
  CHECK_THROWS_AS(Order(1.0), Error);
  CHECK_THROWS_AS(Order(std::nan("")), Error);
  CHECK(Order(0.3).complement().value() == doctest::Approx(0.7));
  const GeneralOrder g(2.25);
  CHECK(g.integer_part() == 2);
  CHECK(g.fractional_part().value() == doctest::Approx(0.25));
  CHECK_THROWS_AS(GeneralOrder(2.0), Error);
}

TEST_CASE("error categories are named") {
  CHECK(to_string(ErrorKind::NonConvergent) == "NonConvergent");
  CHECK(to_string(ErrorKind::ConfigInvalid) == "ConfigInvalid");
  try {
    fail(ErrorKind::GridTooNarrow, "x");
  } catch (const Error& e) {
    CHECK(e.kind() == ErrorKind::GridTooNarrow);
  }
}

TEST_CASE("adaptive integration against closed forms") {
  const auto r = integrate([](double x) { return std::exp(-x * x); }, -6.0, 6.0,
                           Tolerance{1e-14, 1e-13, 1000});
  CHECK(std::abs(r.value - std::sqrt(std::numbers::pi)) < 1e-12);
  const auto s = integrate([](double x) { return 1.0 / std::sqrt(x); }, 0.0, 1.0,
                           Tolerance{1e-10, 1e-10, 5000});
  CHECK(std::abs(s.value - 2.0) < 1e-8);
}

TEST_CASE("increments are cancellation free") {
  const auto f = functions::sine();
  const double h = 1e-12, t = 0.7;
  const double exact = 2.0 * std::cos(t - 0.5 * h) * std::sin(0.5 * h);
  CHECK(std::abs(f.increment(t, h) - exact) < 1e-24);
  const auto b = functions::bump(0.0, 1.0);
  CHECK(b.increment(0.3, 0.0) == 0.0);
  // Bump increments against long double differences, including near the support edges.
  auto shape = [](long double u) { return std::abs(u) < 1 ? std::exp(1.0L - 1.0L / (1.0L - u * u)) : 0.0L; };
  for (double tb : {0.0, 0.4, -0.97, 0.999}) {
    for (double hb : {1e-9, 1e-5, 1e-2, 0.5}) {
      const double ref = static_cast<double>(shape(tb) - shape(static_cast<long double>(tb) - hb));
      CHECK(std::isfinite(b.increment(tb, hb)));
      CHECK(std::abs(b.increment(tb, hb) - ref) <= 1e-12 * std::abs(ref) + 1e-18);
    }
  }
  CHECK(functions::shifted_bump(0.0, 1.0, 1.0, 0.5).increment(0.2, 1e-7) ==
        doctest::Approx(b.increment(0.2, 1e-7)).epsilon(1e-12));
  CHECK(b(1.5) == 0.0);
  CHECK(b(0.0) == doctest::Approx(1.0));
}

TEST_CASE("function transformations") {
  const auto f = functions::bump(0.5, 1.0, 2.0);
  const auto g = reflected(f);
  const auto h = translated(f, 1.0);
  const auto c = linear_combination(2.0, f, -1.0, functions::constant(3.0));
  for (double t : {-1.2, -0.3, 0.1, 0.9}) {
    CHECK(g(t) == doctest::Approx(f(-t)));
    CHECK(h(t) == doctest::Approx(f(t - 1.0)));
    CHECK(c(t) == doctest::Approx(2.0 * f(t) - 3.0));
  }
  CHECK(scaled(f, 3.0).bound_M == doctest::Approx(3.0 * f.bound_M));
}

TEST_CASE("power stationary clamp") {
  const auto p = functions::power_stationary(-1.0, 0.5, 1e-4);
  CHECK(p(-2.0) == 0.0);
  CHECK(p(0.0) == doctest::Approx(1.0));
  CHECK(p(-1.0 + 5e-5) == doctest::Approx(std::pow(1e-4, -0.5)));
}

TEST_CASE("cubic interpolation reproduces cubics") {
  std::vector<double> t, v;
  for (int k = 0; k <= 20; ++k) {
    t.push_back(0.1 * k);
    v.push_back(std::sin(t.back()));
  }
  CubicInterpolant c(t, v);
  CHECK(std::abs(c(0.55) - std::sin(0.55)) < 1e-4);
  CHECK(std::abs(c.increment(1.0, 0.35) - (c(1.0) - c(0.65))) < 1e-14);
  CHECK(std::abs(c.derivative(1.05) - std::cos(1.05)) < 1e-3);
}

TEST_CASE("tables from csv") {
  const std::string path = "fracext_core_table.csv";
  {
    std::ofstream out(path);
    out << "t,value\n0,0\n1,1\n2,4\n3,9\n";
  }
  const auto f = functions::table_from_csv(path);
  CHECK(f(2.0) == doctest::Approx(4.0));
  CHECK(f(-5.0) == doctest::Approx(0.0));
  CHECK(f(10.0) == doctest::Approx(9.0));
  CHECK_THROWS_AS(functions::table_from_csv("does-not-exist.csv"), Error);
}

TEST_CASE("declared bounds are checked") {
  auto f = functions::sine();
  CHECK(f.check_samples(-5.0, 5.0).empty());
  f.bound_M = 0.5;
  CHECK_FALSE(f.check_samples(-5.0, 5.0).empty());
}
