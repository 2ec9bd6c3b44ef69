#pragma once

// Globally adaptive Gauss-Kronrod (7/15) quadrature on a finite interval
// partitioned by caller-supplied breakpoints.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <span>
#include <vector>

namespace fracext {

struct Tolerance {
  double abs = 1e-11;
  double rel = 1e-11;
  std::size_t max_segments = 400000;
};

struct Integral {
  double value = 0.0;
  double error = 0.0;
  std::size_t segments = 0;
  std::size_t evaluations = 0;
  bool converged = true;
};

namespace detail {

inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <class F>
Segment gauss_kronrod15(F& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);
  const double fc = f(center);
  double kronrod = fc * kKronrodWeights[7];
  double gauss = fc * kGaussWeights[3];
  double resabs = std::abs(kronrod);
  std::array<double, 7> f1{}, f2{};
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    f1[j] = f(center - dx);
    f2[j] = f(center + dx);
    const double sum = f1[j] + f2[j];
    kronrod += kKronrodWeights[j] * sum;
    resabs += kKronrodWeights[j] * (std::abs(f1[j]) + std::abs(f2[j]));
    if (j % 2 == 1) gauss += kGaussWeights[j / 2] * sum;
  }
  const double mean = 0.5 * kronrod;
  double resasc = kKronrodWeights[7] * std::abs(fc - mean);
  for (int j = 0; j < 7; ++j) {
    resasc += kKronrodWeights[j] * (std::abs(f1[j] - mean) + std::abs(f2[j] - mean));
  }
  const double scale = std::abs(half);
  double err = std::abs((kronrod - gauss) * half);
  resasc *= scale;
  resabs *= scale;
  if (resasc != 0.0 && err != 0.0) {
    err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
  }
  constexpr double eps = std::numeric_limits<double>::epsilon();
  if (resabs > std::numeric_limits<double>::min() / (50.0 * eps)) {
    err = std::max(50.0 * eps * resabs, err);
  }
  if (!std::isfinite(kronrod)) err = std::numeric_limits<double>::infinity();
  return {a, b, kronrod * half, err};
}

}  // namespace detail

/// Integrates f over [points.front(), points.back()], refining the segment
/// with the largest error estimate until err <= max(abs, rel |I|).
template <class F>
Integral integrate(F&& f, std::span<const double> points, const Tolerance& tol) {
  Integral out;
  if (points.size() < 2) return out;
  std::priority_queue<detail::Segment> heap;
  double value = 0.0, error = 0.0, frozen_value = 0.0, frozen_error = 0.0;
  for (std::size_t i = 0; i + 1 < points.size(); ++i) {
    if (!(points[i + 1] > points[i])) continue;
    auto seg = detail::gauss_kronrod15(f, points[i], points[i + 1]);
    out.evaluations += 15;
    value += seg.value;
    error += seg.error;
    heap.push(seg);
  }
  std::size_t segments = heap.size();
  auto target = [&] {
    return std::max(tol.abs, tol.rel * (std::abs(value + frozen_value) + 1e-30));
  };
  std::size_t since_resum = 0;
  while (!heap.empty() && error + frozen_error > target()) {
    if (segments >= tol.max_segments) {
      out.converged = false;
      break;
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b) ||
        (worst.b - worst.a) < 64.0 * std::numeric_limits<double>::epsilon() *
                                  std::max(std::abs(worst.a), std::abs(worst.b))) {
      // Cannot refine further in double precision.
      frozen_value += worst.value;
      frozen_error += worst.error;
      value -= worst.value;
      error -= worst.error;
      continue;
    }
    auto left = detail::gauss_kronrod15(f, worst.a, mid);
    auto right = detail::gauss_kronrod15(f, mid, worst.b);
    out.evaluations += 30;
    value += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++segments;
    if (++since_resum == 512) {
      since_resum = 0;
      auto copy = heap;
      double v = 0.0, e = 0.0;
      while (!copy.empty()) {
        v += copy.top().value;
        e += copy.top().error;
        copy.pop();
      }
      value = v;
      error = e;
    }
  }
  double v = frozen_value, e = frozen_error;
  while (!heap.empty()) {
    v += heap.top().value;
    e += heap.top().error;
    heap.pop();
  }
  out.value = v;
  out.error = e;
  out.segments = segments;
  return out;
}

template <class F>
Integral integrate(F&& f, double a, double b, const Tolerance& tol) {
  const std::array<double, 2> pts{a, b};
  return integrate(std::forward<F>(f), std::span<const double>(pts), tol);
}

/// Builds a sorted breakpoint list on [a, b] from `extra` points lying inside.
std::vector<double> breakpoints(double a, double b, std::vector<double> extra);

}  // namespace fracext
