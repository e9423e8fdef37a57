#pragma once

// Globally adaptive Gauss-Kronrod (G7/K15) quadrature for complex-valued
// integrands on finite intervals.

#include <array>
#include <queue>

#include "qwhydro/types.hpp"

namespace qwhydro::quadrature {

struct Result {
  Complex value{};
  double error = 0.0;
  std::size_t evaluations = 0;
  bool converged = false;
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

// Gauss weights for the odd-indexed Kronrod nodes (1, 3, 5, 7).
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

struct Segment {
  double a, b;
  Complex value;
  double error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

template <typename F>
Segment kronrod15(F& f, double a, double b) {
  const double c = 0.5 * (a + b);
  const double h = 0.5 * (b - a);
  const Complex fc = f(c);
  Complex kron = fc * kKronrodWeights[7];
  Complex gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = h * kKronrodNodes[j];
    const Complex pair = f(c - dx) + f(c + dx);
    kron += pair * kKronrodWeights[j];
    if (j % 2 == 1) gauss += pair * kGaussWeights[j / 2];
  }
  kron *= h;
  gauss *= h;
  return {a, b, kron, std::abs(kron - gauss)};
}

}  // namespace detail

/// Integrate f over [a, b] until the summed error estimate is below
/// max(abs_tol, rel_tol·|I|) or max_segments is reached. The interval is
/// pre-split into `initial_segments` equal pieces.
template <typename F>
Result integrate(F&& f, double a, double b, double abs_tol, double rel_tol = 0.0,
                 std::size_t initial_segments = 1, std::size_t max_segments = 20000) {
  std::priority_queue<detail::Segment> heap;
  Result r;
  Complex total{};
  double err = 0.0;
  const std::size_t n0 = std::max<std::size_t>(1, initial_segments);
  const double step = (b - a) / static_cast<double>(n0);
  for (std::size_t i = 0; i < n0; ++i) {
    const double lo = a + step * static_cast<double>(i);
    const double hi = (i + 1 == n0) ? b : lo + step;
    detail::Segment s = detail::kronrod15(f, lo, hi);
    r.evaluations += 15;
    total += s.value;
    err += s.error;
    heap.push(s);
  }
  while (err > std::max(abs_tol, rel_tol * std::abs(total)) && heap.size() < max_segments) {
    detail::Segment worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > worst.a && mid < worst.b)) {
      heap.push(worst);
      break;
    }
    detail::Segment left = detail::kronrod15(f, worst.a, mid);
    detail::Segment right = detail::kronrod15(f, mid, worst.b);
    r.evaluations += 30;
    total += left.value + right.value - worst.value;
    err += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
  }
  // Re-sum to shed the drift of the incremental updates.
  total = 0.0;
  err = 0.0;
  while (!heap.empty()) {
    total += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  r.value = total;
  r.error = err;
  r.converged = err <= std::max(abs_tol, rel_tol * std::abs(total));
  return r;
}

}  // namespace qwhydro::quadrature
