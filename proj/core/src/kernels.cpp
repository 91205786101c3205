#include "tapc/kernels.hpp"

#include <cassert>
#include <stdexcept>

namespace tapc {
namespace {

constexpr double residual_rtol = 1e-12;
constexpr int newton_max_iter = 100;

// Safeguarded Newton for an increasing function f on [lo, hi] with
// f(lo) <= 0 <= f(hi). Any step that leaves the bracket, or fails to be
// finite, falls back to the bracket midpoint, so progress is guaranteed.
template <class F, class DF>
double newton_increasing(F f, DF df, double lo, double hi, double x0, double f_stop) {
  double x = std::clamp(x0, lo, hi);
  for (int it = 0; it < newton_max_iter; ++it) {
    const double fx = f(x);
    if (std::abs(fx) <= f_stop) return x;
    if (fx < 0.0) {
      lo = x;
    } else {
      hi = x;
    }
    const double d = df(x);
    double next = x - fx / d;
    if (!std::isfinite(next) || next <= lo || next >= hi) next = 0.5 * (lo + hi);
    if (std::abs(next - x) <=
        4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(x), 1e-300)) {
      return next;
    }
    x = next;
  }
  return x;  // bracket is at machine width by now
}

// Power series of u around zero: sum_{n>=2} x^n (n-1)/n!. The closed form
// expm1(x)*(x-1)+x cancels catastrophically below x ~ 0.1.
double u_series(double x) {
  double term = 0.5 * x * x;  // n = 2
  double sum = term;
  for (int n = 3; n <= 40; ++n) {
    term *= x * (n - 1) / (static_cast<double>(n) * (n - 2));
    sum += term;
    if (term < sum * std::numeric_limits<double>::epsilon()) break;
  }
  return sum;
}

// Series of w around one: sum_{n>=2} (-1)^n t^n / (n(n-1)), t = x-1. The
// closed form loses all precision for t below ~1e-8.
double w_series(double t) {
  double term = 0.5 * t * t;  // n = 2
  double sum = term;
  for (int n = 3; n <= 80; ++n) {
    term *= -t * (n - 2) / static_cast<double>(n);
    sum += term;
    if (std::abs(term) < sum * std::numeric_limits<double>::epsilon()) break;
  }
  return sum;
}

// Solve x + ln(x-1) = ln y, the exact log-space form of u(x) = y for y > 1.
// Used when y is too large for u itself to stay finite.
double u_inv_log_space(double y) {
  const double target = std::log(y);
  double x = std::max(2.0, target - std::log(std::max(target, 2.0)));
  for (int it = 0; it < newton_max_iter; ++it) {
    const double g = x + std::log(x - 1.0) - target;
    if (std::abs(g) <= 1e-14 * std::max(1.0, std::abs(target))) break;
    x -= g * (x - 1.0) / x;  // g' = x / (x-1)
    if (x <= 1.0) x = 1.0 + 1e-12;
  }
  return x;
}

}  // namespace

double u_eval(double x) {
  assert(x >= 0.0);
  if (x < 0.1) return u_series(x);
  return std::expm1(x) * (x - 1.0) + x;
}

double u_inv(double y) {
  if (!(y > 0.0)) return 0.0;  // exact at the boundary
  if (std::isinf(y)) return y;
  if (y >= 1e280) return u_inv_log_space(y);

  double lo, hi, x0;
  if (y <= 1.5) {
    // u(x) >= x^2/2, so sqrt(2y) always sits at or above the root.
    lo = 0.0;
    hi = 1.5;
    x0 = std::min(std::sqrt(2.0 * y), hi);
  } else {
    // The root exceeds 1; x + ln(x-1) = ln(y-1) bounds it by ln(y-1) + 1.
    const double log_ym1 = std::log(y - 1.0);
    lo = 1.0;
    hi = std::max(2.0, log_ym1 + 1.0);
    x0 = hi;
  }
  const double f_stop = residual_rtol * y;
  const double root = newton_increasing(
      [y](double x) { return u_eval(x) - y; },
      [](double x) { return x * std::exp(x); }, lo, hi, x0, f_stop);
  if (std::abs(u_eval(root) - y) > 1e-8 * y) {
    throw std::runtime_error("u_inv: residual did not converge");
  }
  return root;
}

double w_eval(double x) {
  assert(x >= 1.0);
  const double t = x - 1.0;
  if (t < 0.25) return w_series(t);
  return x * (std::log(x) - 1.0) + 1.0;
}

double w_inv(double y) {
  if (!(y > 0.0)) return 1.0;  // exact at the boundary
  if (std::isinf(y)) return y;

  // Upper bracket: w(1+t) >= t^2/3 for t <= 1, and w(x) >= x once x >= 8.
  const double hi = (y < 1.0 / 3.0) ? 1.0 + std::sqrt(3.0 * y) : std::max(8.0, y);
  const double f_stop = residual_rtol * y;
  const double root = newton_increasing(
      [y](double x) { return w_eval(x) - y; },
      [](double x) { return std::log(x); }, 1.0, hi, hi, f_stop);
  // Arguments this close to one saturate double resolution; the argument is
  // still within one ulp even when the residual cannot be met.
  if (root > 1.0 + 1e-7 && std::abs(w_eval(root) - y) > 1e-8 * y) {
    throw std::runtime_error("w_inv: residual did not converge");
  }
  return root;
}

}  // namespace tapc
