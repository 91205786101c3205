#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <optional>

namespace tapc {

// Control block for the guarded bisection engine. The tolerances are
// deliberately two-sided: x_tol bounds the bracket width (absolute on the
// argument), f_rtol/f_tol_abs bound the residual. Both must hold before the
// engine stops early; a bracket narrowed to machine width always terminates.
struct Bracket {
  double lo = 0.0;
  double hi = 1.0;
  int f_lo_sign = 0;    // sign of f at lo, filled in once a sign change is found
  double x_tol = 1e-12; // absolute tolerance on the argument
  double f_rtol = 1e-10;      // residual tolerance relative to the endpoint values
  double f_tol_abs = 0.0;     // optional absolute residual tolerance (0 = unused)
  int max_iter = 200;
  int max_expansions = 60; // geometric bracket growth attempts before giving up
};

// Root of a monotone function. If f has the same sign at both ends, the
// bracket is expanded geometrically (lo halves toward zero, hi doubles) up to
// max_expansions times; exhaustion returns nullopt so the caller can map it to
// its own infeasibility verdict. Deterministic: identical inputs give
// bit-identical results.
template <class F>
std::optional<double> bisect_monotone(F&& f, Bracket b) {
  double f_lo = f(b.lo);
  double f_hi = f(b.hi);
  if (std::isnan(f_lo) || std::isnan(f_hi)) return std::nullopt;
  if (f_lo == 0.0) return b.lo;
  if (f_hi == 0.0) return b.hi;

  int expansions = 0;
  while (std::signbit(f_lo) == std::signbit(f_hi)) {
    if (expansions++ >= b.max_expansions) return std::nullopt;
    if (b.lo > 0.0) {
      b.lo *= 0.5;
      f_lo = f(b.lo);
      if (std::isnan(f_lo)) return std::nullopt;
      if (f_lo == 0.0) return b.lo;
      if (std::signbit(f_lo) != std::signbit(f_hi)) break;
    }
    b.hi *= 2.0;
    if (!std::isfinite(b.hi)) return std::nullopt;
    f_hi = f(b.hi);
    if (std::isnan(f_hi)) return std::nullopt;
    if (f_hi == 0.0) return b.hi;
  }
  b.f_lo_sign = std::signbit(f_lo) ? -1 : 1;

  const double f_scale = std::max(std::abs(f_lo), std::abs(f_hi));
  double mid = 0.5 * (b.lo + b.hi);
  for (int it = 0; it < b.max_iter; ++it) {
    mid = 0.5 * (b.lo + b.hi);
    const double f_mid = f(mid);
    if (f_mid == 0.0) return mid;
    if ((f_mid < 0.0) == (b.f_lo_sign < 0)) {
      b.lo = mid;
    } else {
      b.hi = mid;
    }
    const double width = b.hi - b.lo;
    const double eps_width =
        4.0 * std::numeric_limits<double>::epsilon() * std::max(std::abs(b.lo), std::abs(b.hi));
    const bool x_ok = width <= b.x_tol || width <= eps_width;
    const bool f_ok = std::abs(f_mid) <= std::max(b.f_rtol * f_scale, b.f_tol_abs);
    if (x_ok && (f_ok || width <= eps_width)) break;
  }
  return 0.5 * (b.lo + b.hi);
}

// Strictly increasing kernel x e^x - e^x + 1 on x >= 0 and its inverse.
// u_eval(0) = 0, u_eval(1) = 1; the inverse is exact at y = 0. Evaluation is
// cancellation-safe near zero (series) and overflow-safe in the inverse for
// arguments beyond the range of double exponentials (log-space solve).
double u_eval(double x);
double u_inv(double y);

// Strictly increasing kernel x (ln x - 1 + 1/x) on x >= 1 and its inverse.
// w_eval(1) = 0; the inverse is exact at y = 0.
double w_eval(double x);
double w_inv(double y);

}  // namespace tapc
