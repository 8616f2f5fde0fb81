#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <string>
#include <utility>

#include "pointlike/errors.hpp"

namespace pointlike {

template <std::size_t N>
using OdeState = std::array<double, N>;

struct OdeTolerances {
  double abs = 1e-12;
  double rel = 1e-10;
  double min_step = 1e-14;  // |h| below this raises StiffnessError
  double max_step = std::numeric_limits<double>::infinity();
};

/// Adaptive Dormand-Prince 5(4) stepper for small autonomous-in-size
/// systems y' = rhs(x, y). Integrates in either direction.
template <std::size_t N>
class DormandPrince {
 public:
  explicit DormandPrince(OdeTolerances tol = {}) : tol_(tol) {}

  /// Advances y from x0 to x1 exactly (last step is clipped). `h` carries the
  /// step-size guess across calls; it is updated with the last proposal.
  template <class Rhs>
  OdeState<N> advance(Rhs&& rhs, double x0, OdeState<N> y, double x1, double& h) {
    const double dir = x1 >= x0 ? 1.0 : -1.0;
    const double span = std::abs(x1 - x0);
    if (span == 0.0) return y;
    double habs = std::clamp(std::abs(h) > 0 ? std::abs(h) : span, tol_.min_step, tol_.max_step);
    double x = x0;
    while (dir * (x1 - x) > 0) {
      const double remaining = std::abs(x1 - x);
      const bool last = habs >= remaining;
      const double step = last ? remaining : habs;
      OdeState<N> y_new, err;
      single_step(rhs, x, y, dir * step, y_new, err);
      double norm = 0.0;
      for (std::size_t i = 0; i < N; ++i) {
        const double scale = tol_.abs + tol_.rel * std::max(std::abs(y[i]), std::abs(y_new[i]));
        norm = std::max(norm, std::abs(err[i]) / scale);
      }
      if (!std::isfinite(norm)) norm = 1e10;
      if (norm <= 1.0) {
        x = last ? x1 : x + dir * step;
        y = y_new;
        ++steps_;
      }
      const double factor = norm == 0.0 ? 5.0 : std::clamp(0.9 * std::pow(norm, -0.2), 0.2, 5.0);
      habs = std::min(step * factor, tol_.max_step);
      if (norm > 1.0 && habs < tol_.min_step) {
        throw StiffnessError("step size collapsed below " + std::to_string(tol_.min_step) +
                             " at x = " + std::to_string(x));
      }
    }
    h = dir * habs;
    return y;
  }

  std::size_t steps() const { return steps_; }

 private:
  template <class Rhs>
  static void single_step(Rhs& rhs, double x, const OdeState<N>& y, double h, OdeState<N>& out,
                          OdeState<N>& err) {
    OdeState<N> k1, k2, k3, k4, k5, k6, k7, tmp;
    auto stage = [&](const auto&... terms) {
      for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (0.0 + ... + (terms.first * (*terms.second)[i]));
      return tmp;
    };
    using P = std::pair<double, const OdeState<N>*>;
    k1 = rhs(x, y);
    k2 = rhs(x + h / 5.0, stage(P{1.0 / 5.0, &k1}));
    k3 = rhs(x + 3.0 * h / 10.0, stage(P{3.0 / 40.0, &k1}, P{9.0 / 40.0, &k2}));
    k4 = rhs(x + 4.0 * h / 5.0,
             stage(P{44.0 / 45.0, &k1}, P{-56.0 / 15.0, &k2}, P{32.0 / 9.0, &k3}));
    k5 = rhs(x + 8.0 * h / 9.0, stage(P{19372.0 / 6561.0, &k1}, P{-25360.0 / 2187.0, &k2},
                                      P{64448.0 / 6561.0, &k3}, P{-212.0 / 729.0, &k4}));
    k6 = rhs(x + h, stage(P{9017.0 / 3168.0, &k1}, P{-355.0 / 33.0, &k2},
                          P{46732.0 / 5247.0, &k3}, P{49.0 / 176.0, &k4},
                          P{-5103.0 / 18656.0, &k5}));
    out = stage(P{35.0 / 384.0, &k1}, P{500.0 / 1113.0, &k3}, P{125.0 / 192.0, &k4},
                P{-2187.0 / 6784.0, &k5}, P{11.0 / 84.0, &k6});
    k7 = rhs(x + h, out);
    for (std::size_t i = 0; i < N; ++i) {
      err[i] = h * (71.0 / 57600.0 * k1[i] - 71.0 / 16695.0 * k3[i] + 71.0 / 1920.0 * k4[i] -
                    17253.0 / 339200.0 * k5[i] + 22.0 / 525.0 * k6[i] - 1.0 / 40.0 * k7[i]);
    }
  }

  OdeTolerances tol_;
  std::size_t steps_ = 0;
};

}  // namespace pointlike
