#pragma once

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "pointlike/errors.hpp"

namespace pointlike {

/// Bisection on a sign-changing bracket [lo, hi]; stops when the bracket is
/// narrower than `tol` or cannot shrink further in double precision.
template <class F>
double bisect(F&& f, double lo, double hi, double tol) {
  double flo = f(lo);
  if (flo == 0.0) return lo;
  const double fhi = f(hi);
  if (fhi == 0.0) return hi;
  if ((flo < 0) == (fhi < 0)) throw BracketError("bisect: endpoints do not bracket a root");
  while (std::abs(hi - lo) > tol) {
    const double mid = 0.5 * (lo + hi);
    if (mid <= std::min(lo, hi) || mid >= std::max(lo, hi)) break;
    const double fm = f(mid);
    if (fm == 0.0) return mid;
    if ((fm < 0) == (flo < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

/// Golden-section search for the maximizer of f on [lo, hi].
template <class F>
double golden_maximize(F&& f, double lo, double hi, double tol) {
  constexpr double r = 0.6180339887498949;
  double a = lo, b = hi;
  double x1 = b - r * (b - a), x2 = a + r * (b - a);
  double f1 = f(x1), f2 = f(x2);
  for (int it = 0; it < 200 && (b - a) > tol; ++it) {
    if (f1 < f2) {
      a = x1;
      x1 = x2;
      f1 = f2;
      x2 = a + r * (b - a);
      f2 = f(x2);
    } else {
      b = x2;
      x2 = x1;
      f2 = f1;
      x1 = b - r * (b - a);
      f1 = f(x1);
    }
  }
  return f1 > f2 ? x1 : x2;
}

struct ScannedRoot {
  double x;
  bool double_root = false;  // f touches zero without changing sign
};

/// Finds roots of f on a scan grid [start, start + step, ...] in increasing
/// order. Sign changes are bisected to `tol`. Interior scan points that are a
/// local extremum of f with the neighbours on the same side of zero are
/// refined by golden section: an extremum crossing zero yields two roots, one
/// within `touch_tol` of zero yields a double root. Stops after `count` roots
/// or when the grid passes `stop`.
template <class F>
std::vector<ScannedRoot> scan_roots(F&& f, double start, double step, double stop,
                                    std::size_t count, double tol, double touch_tol) {
  std::vector<ScannedRoot> out;
  double x0 = start, f0 = f(start);
  double xm = start, fm = f0;  // previous-previous sample
  bool have_prev = false;
  while (out.size() < count) {
    const double x1 = x0 + step;
    if (x1 > stop) break;
    const double f1 = f(x1);
    if (have_prev && (fm < 0) == (f0 < 0) && (f0 < 0) == (f1 < 0)) {
      const bool is_max = f0 >= fm && f0 >= f1 && f0 < 0;
      const bool is_min = f0 <= fm && f0 <= f1 && f0 > 0;
      if (is_max || is_min) {
        const double sgn = is_max ? 1.0 : -1.0;
        const double xe = golden_maximize([&](double x) { return sgn * f(x); }, xm, x1, tol);
        const double fe = f(xe);
        if ((fe < 0) != (f0 < 0)) {
          out.push_back({bisect(f, xm, xe, tol)});
          if (out.size() < count) out.push_back({bisect(f, xe, x1, tol)});
        } else if (std::abs(fe) <= touch_tol) {
          out.push_back({xe, true});
        }
      }
    }
    if (f1 == 0.0 || (f0 != 0.0 && (f0 < 0) != (f1 < 0))) {
      if (out.size() < count) out.push_back({bisect(f, x0, x1, tol)});
    }
    xm = x0;
    fm = f0;
    x0 = x1;
    f0 = f1;
    have_prev = true;
  }
  return out;
}

}  // namespace pointlike
