#pragma once

#include <cmath>
#include <cstddef>
#include <queue>
#include <stdexcept>
#include <vector>

namespace underlay::quad {

class QuadratureError : public std::runtime_error {
 public:
  explicit QuadratureError(const std::string& what)
      : std::runtime_error(what) {}
};

struct Result {
  double value = 0.0;
  double abs_error = 0.0;   // accumulated Kronrod error estimate
  int intervals = 0;        // subintervals in the final partition
};

namespace detail {

// 15-point Kronrod nodes on [-1, 1] (positive half) with the embedded
// 7-point Gauss rule on the odd-indexed nodes.
inline constexpr double kNodes[8] = {
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144838258730,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000};

inline constexpr double kWeightsKronrod[8] = {
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714};

inline constexpr double kWeightsGauss[4] = {
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327};

struct Interval {
  double a, b;
  double value;
  double error;

  bool operator<(const Interval& other) const { return error < other.error; }
};

template <class F>
Interval evaluate(F&& f, double a, double b) {
  const double center = 0.5 * (a + b);
  const double half = 0.5 * (b - a);

  double gauss = 0.0;
  double kronrod = 0.0;
  for (int i = 0; i < 8; ++i) {
    const double offset = half * kNodes[i];
    double fsum;
    if (i == 7) {
      fsum = f(center);
    } else {
      fsum = f(center - offset) + f(center + offset);
    }
    kronrod += kWeightsKronrod[i] * fsum;
    if (i % 2 == 1) {
      gauss += kWeightsGauss[i / 2] * fsum;
    }
  }
  gauss *= half;
  kronrod *= half;

  // |K - G| is a conservative error bound; it over-subdivides smooth
  // regions slightly but never claims convergence the rules cannot back.
  return {a, b, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

// Adaptive Gauss-Kronrod integration of f over the finite interval [a, b].
// Splits the worst interval until the summed error estimate drops below
// max(abs_tol, rel_tol * |integral|).  Throws QuadratureError when the
// budget of max_intervals subdivisions is exhausted first.
template <class F>
Result integrate(F&& f, double a, double b, double rel_tol = 1e-10,
                 double abs_tol = 0.0, int max_intervals = 20000) {
  if (!(rel_tol > 0.0) && !(abs_tol > 0.0)) {
    throw std::invalid_argument("integrate: need a positive tolerance");
  }
  if (!(b > a)) {
    if (b == a) return {0.0, 0.0, 0};
    throw std::invalid_argument("integrate: inverted interval");
  }

  std::priority_queue<detail::Interval> queue;
  queue.push(detail::evaluate(f, a, b));
  double total = queue.top().value;
  double total_error = queue.top().error;

  int used = 1;
  while (true) {
    if (!std::isfinite(total)) {
      throw QuadratureError("integrate: integrand produced non-finite values");
    }
    const double target = std::max(abs_tol, rel_tol * std::abs(total));
    if (total_error <= target) break;
    if (used >= max_intervals) {
      throw QuadratureError("integrate: no convergence within " +
                            std::to_string(max_intervals) + " subintervals");
    }

    detail::Interval worst = queue.top();
    queue.pop();
    const double mid = 0.5 * (worst.a + worst.b);
    if (mid <= worst.a || mid >= worst.b) {
      // Interval collapsed to machine resolution; accept its estimate.
      total_error -= worst.error;
      worst.error = 0.0;
      queue.push(worst);
      continue;
    }
    detail::Interval left = detail::evaluate(f, worst.a, mid);
    detail::Interval right = detail::evaluate(f, mid, worst.b);
    total += left.value + right.value - worst.value;
    total_error += left.error + right.error - worst.error;
    queue.push(left);
    queue.push(right);
    ++used;
  }

  return {total, total_error, used};
}

}  // namespace underlay::quad
