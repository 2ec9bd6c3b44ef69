#include "fracext/interpolation.hpp"

#include <algorithm>
#include <cmath>

#include "fracext/error.hpp"

namespace fracext {

CubicInterpolant::CubicInterpolant(std::vector<double> nodes, std::vector<double> values,
                                   std::optional<double> period)
    : nodes_(std::move(nodes)), values_(std::move(values)), period_(period) {
  if (nodes_.size() != values_.size() || nodes_.size() < 2) {
    fail(ErrorKind::InvalidArgument, "interpolant needs matching node/value arrays (>= 2)");
  }
  for (std::size_t i = 1; i < nodes_.size(); ++i) {
    if (!(nodes_[i] > nodes_[i - 1])) {
      fail(ErrorKind::InvalidArgument, "interpolation nodes must be strictly increasing");
    }
  }
  if (period_) {
    const double h = nodes_[1] - nodes_[0];
    const double expected = h * static_cast<double>(nodes_.size());
    if (std::abs(expected - *period_) > 1e-9 * *period_ || nodes_.size() < 4) {
      fail(ErrorKind::InvalidArgument, "periodic interpolant needs >= 4 uniform nodes over one period");
    }
  }
}

double CubicInterpolant::node(long k) const {
  if (period_) {
    const double h = *period_ / static_cast<double>(nodes_.size());
    return nodes_.front() + static_cast<double>(k) * h;
  }
  return nodes_[static_cast<std::size_t>(k)];
}

double CubicInterpolant::value(long k) const {
  if (period_) {
    const long n = static_cast<long>(values_.size());
    return values_[static_cast<std::size_t>(((k % n) + n) % n)];
  }
  return values_[static_cast<std::size_t>(k)];
}

CubicInterpolant::Local CubicInterpolant::local(double t) const {
  const long n = static_cast<long>(nodes_.size());
  long cell = 0;
  long first = 0;
  int points = 4;
  if (period_) {
    const double h = *period_ / static_cast<double>(n);
    cell = static_cast<long>(std::floor((t - nodes_.front()) / h));
    first = cell - 1;
  } else {
    auto it = std::upper_bound(nodes_.begin(), nodes_.end(), t);
    cell = std::clamp<long>(static_cast<long>(it - nodes_.begin()) - 1, 0, n - 2);
    if (n < 4) {
      points = static_cast<int>(n);
      first = 0;
    } else {
      first = std::clamp<long>(cell - 1, 0, n - 4);
    }
  }
  const double anchor = node(cell);
  // Newton form through the stencil, then expand around the anchor.
  double x[4], dd[4];
  for (int k = 0; k < points; ++k) {
    x[k] = node(first + k) - anchor;
    dd[k] = value(first + k);
  }
  for (int level = 1; level < points; ++level) {
    for (int k = points - 1; k >= level; --k) {
      dd[k] = (dd[k] - dd[k - 1]) / (x[k] - x[k - level]);
    }
  }
  double poly[4] = {0, 0, 0, 0};
  double basis[4] = {1, 0, 0, 0};
  for (int k = 0; k < points; ++k) {
    for (int j = 0; j < 4; ++j) poly[j] += dd[k] * basis[j];
    // basis *= (d - x[k])
    for (int j = 3; j >= 1; --j) basis[j] = basis[j - 1] - x[k] * basis[j];
    basis[0] = -x[k] * basis[0];
  }
  return {poly[0], poly[1], poly[2], poly[3], anchor, static_cast<int>(cell)};
}

double CubicInterpolant::operator()(double t) const {
  if (!period_) {
    if (t <= nodes_.front()) return values_.front();
    if (t >= nodes_.back()) return values_.back();
  }
  const Local p = local(t);
  const double d = t - p.anchor;
  return p.c0 + d * (p.c1 + d * (p.c2 + d * p.c3));
}

double CubicInterpolant::derivative(double t, int order) const {
  if (!period_ && (t < nodes_.front() || t > nodes_.back())) return 0.0;
  const Local p = local(t);
  const double d = t - p.anchor;
  switch (order) {
    case 1: return p.c1 + d * (2.0 * p.c2 + 3.0 * d * p.c3);
    case 2: return 2.0 * p.c2 + 6.0 * d * p.c3;
    case 3: return 6.0 * p.c3;
    default: return 0.0;
  }
}

double CubicInterpolant::increment(double t, double h) const {
  const double s = t - h;
  const bool inside = period_ || (t > nodes_.front() && t < nodes_.back() &&
                                  s > nodes_.front() && s < nodes_.back());
  // Exact difference of one cubic between offsets d0 < d1 from its anchor.
  auto within = [](const Local& p, double d1, double d0, double len) {
    return len * (p.c1 + p.c2 * (d1 + d0) + p.c3 * (d1 * d1 + d1 * d0 + d0 * d0));
  };
  if (inside) {
    const Local p = local(t);
    const Local q = local(s);
    if (p.cell == q.cell) return within(p, t - p.anchor, s - p.anchor, h);
    if (p.cell == q.cell + 1) {
      // Chain through the shared node so small h keeps its relative accuracy.
      const double right = t - p.anchor;
      const double left = h - right;
      return within(p, right, 0.0, right) + within(q, p.anchor - q.anchor, s - q.anchor, left);
    }
  }
  return (*this)(t) - (*this)(s);
}

double CubicInterpolant::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

}  // namespace fracext
