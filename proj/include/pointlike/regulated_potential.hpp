#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <functional>
#include <memory>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pointlike/errors.hpp"
#include "pointlike/quadrature.hpp"

namespace pointlike {

enum class InteractionKind { BosonDelta, FermionEta };

inline const char* to_string(InteractionKind kind) {
  return kind == InteractionKind::BosonDelta ? "boson" : "fermion";
}

/// Value with first and second derivative.
struct Jet {
  double value = 0.0;
  double d1 = 0.0;
  double d2 = 0.0;
};

/// The odd step profile sigma and the even unit-mass bump Delta, both in the
/// scaled variable s = x / a. The built-in pair is sigma = tanh and
/// Delta = tanh' / 2 with analytic derivatives; user-supplied profiles are
/// differentiated by 5-point finite differences.
class ShapeFunctions {
 public:
  static ShapeFunctions tanh_pair() {
    ShapeFunctions s;
    s.label_ = "tanh";
    return s;
  }

  static ShapeFunctions sampled(std::function<double(double)> sigma,
                                std::function<double(double)> delta, std::string label) {
    ShapeFunctions s;
    s.label_ = std::move(label);
    s.user_ = std::make_shared<const UserProfiles>(UserProfiles{std::move(sigma), std::move(delta)});
    return s;
  }

  bool builtin() const { return user_ == nullptr; }
  const std::string& label() const { return label_; }

  Jet sigma(double s) const {
    if (builtin()) {
      const auto [t, h] = tanh_sech(s);
      return {t, h * h, -2.0 * h * h * t};
    }
    return finite_difference_jet(user_->sigma, s);
  }

  /// sqrt(Delta(s)) and its derivatives.
  Jet root_delta(double s) const {
    if (builtin()) {
      const auto [t, h] = tanh_sech(s);
      return {h / std::numbers::sqrt2, -h * t / std::numbers::sqrt2,
              h * (1.0 - 2.0 * h * h) / std::numbers::sqrt2};
    }
    const auto& d = user_->delta;
    return finite_difference_jet([&d](double x) { return std::sqrt(d(x)); }, s);
  }

  double delta(double s) const {
    if (builtin()) {
      const double h = tanh_sech(s).second;
      return 0.5 * h * h;
    }
    return user_->delta(s);
  }

  /// tanh(s) and sech(s); beyond |s| = 40 tanh is saturated to +-1 and sech
  /// is taken from its exponential asymptote, so cosh never overflows.
  static std::pair<double, double> tanh_sech(double s) {
    const double as = std::abs(s);
    if (as > 40.0) return {s > 0 ? 1.0 : -1.0, 2.0 * std::exp(-as)};
    const double e = std::exp(-as);
    return {std::tanh(s), 2.0 * e / (1.0 + e * e)};
  }

 private:
  struct UserProfiles {
    std::function<double(double)> sigma;
    std::function<double(double)> delta;
  };

  template <class F>
  static Jet finite_difference_jet(const F& f, double s) {
    constexpr double h = 1e-4;
    const double fp2 = f(s + 2 * h), fp1 = f(s + h), f0 = f(s), fm1 = f(s - h), fm2 = f(s - 2 * h);
    return {f0, (-fp2 + 8 * fp1 - 8 * fm1 + fm2) / (12 * h),
            (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h)};
  }

  std::string label_;
  std::shared_ptr<const UserProfiles> user_;
};

/// Checks the shape hypotheses on a sampled grid; throws DomainError.
inline void validate_shapes(const ShapeFunctions& shapes, InteractionKind kind) {
  for (double s = 0.0; s <= 40.0; s += 0.125) {
    const double sp = shapes.sigma(s).value, sm = shapes.sigma(-s).value;
    if (std::abs(sp + sm) > 1e-12) throw DomainError("sigma is not odd at s = " + std::to_string(s));
    const double dp = shapes.delta(s), dm = shapes.delta(-s);
    if (std::abs(dp - dm) > 1e-12 * std::max(1.0, std::abs(dp))) {
      throw DomainError("Delta is not even at s = " + std::to_string(s));
    }
    if (!(dp > 0.0) && s < 30.0) throw DomainError("Delta is not positive at s = " + std::to_string(s));
  }
  const std::array<double, 7> breaks{-60.0, -10.0, -1.0, 0.0, 1.0, 10.0, 60.0};
  const double mass =
      integrate_adaptive([&](double s) { return shapes.delta(s); }, std::span<const double>(breaks),
                         {.rel_tol = 1e-12})
          .value;
  if (std::abs(mass - 1.0) > 1e-8) {
    throw DomainError("Delta does not have unit integral (got " + std::to_string(mass) + ")");
  }
  if (kind == InteractionKind::FermionEta && !(shapes.sigma(0.0).d1 > 0.0)) {
    throw DomainError("fermionic construction requires sigma'(0) > 0");
  }
}

/// Parameters of the finite-range potential V_a = v_a'' / v_a.
class RegulatedPotentialSpec {
 public:
  RegulatedPotentialSpec(InteractionKind kind, double c, double nu, double a,
                         ShapeFunctions shapes = ShapeFunctions::tanh_pair())
      : kind_(kind), c_(c), nu_(nu), a_(a), shapes_(std::move(shapes)) {
    if (!(c >= 0.0) || !(nu >= 0.0) || !(a > 0.0) || !std::isfinite(c) || !std::isfinite(nu) ||
        !std::isfinite(a)) {
      throw DomainError("regulated potential requires c >= 0, nu >= 0, a > 0");
    }
    if (kind == InteractionKind::FermionEta && !(c > 0.0)) {
      throw DomainError("fermionic regulated potential requires c > 0");
    }
    if (!shapes_.builtin()) validate_shapes(shapes_, kind);
  }

  InteractionKind kind() const { return kind_; }
  double c() const { return c_; }
  double nu() const { return nu_; }
  double a() const { return a_; }
  const ShapeFunctions& shapes() const { return shapes_; }

  RegulatedPotentialSpec with_range(double a) const {
    return RegulatedPotentialSpec(kind_, c_, nu_, a, shapes_);
  }

  /// Half-width of the band around the fermionic node where V_a is not
  /// evaluated directly.
  double guard_band() const { return kind_ == InteractionKind::FermionEta ? 1e-3 * a_ : 0.0; }

 private:
  InteractionKind kind_;
  double c_, nu_, a_;
  ShapeFunctions shapes_;
};

/// v_a and its first two derivatives at x.
inline Jet eval_v_jet(const RegulatedPotentialSpec& spec, double x) {
  const double a = spec.a();
  const double s = x / a;
  const double ra = std::sqrt(a);
  const Jet sg = spec.shapes().sigma(s);
  const Jet rd = spec.shapes().root_delta(s);
  const double c = spec.c(), nu = spec.nu();
  if (spec.kind() == InteractionKind::BosonDelta) {
    return {1.0 + 0.5 * c * x * sg.value + nu * rd.value / ra,
            0.5 * c * (sg.value + s * sg.d1) + nu * rd.d1 / (a * ra),
            0.5 * c * (2.0 * sg.d1 + s * sg.d2) / a + nu * rd.d2 / (a * a * ra)};
  }
  const double prod = sg.value * rd.value;
  const double prod1 = sg.d1 * rd.value + sg.value * rd.d1;
  const double prod2 = sg.d2 * rd.value + 2.0 * sg.d1 * rd.d1 + sg.value * rd.d2;
  return {x + (2.0 / c) * sg.value + nu * prod / ra,
          1.0 + (2.0 / c) * sg.d1 / a + nu * prod1 / (a * ra),
          (2.0 / c) * sg.d2 / (a * a) + nu * prod2 / (a * a * ra)};
}

inline double eval_v(const RegulatedPotentialSpec& spec, double x) { return eval_v_jet(spec, x).value; }

/// V_a(x) = v_a''(x) / v_a(x).
inline double eval_potential(const RegulatedPotentialSpec& spec, double x) {
  if (std::abs(x) < spec.guard_band()) {
    throw DomainError("potential evaluated inside the node guard band at x = " + std::to_string(x));
  }
  const Jet v = eval_v_jet(spec, x);
  return v.d2 / v.value;
}

struct WValue {
  double value = 0.0;
  double slope = 0.0;
};

namespace detail {

inline std::vector<double> core_breakpoints(double a, double to) {
  std::vector<double> pts{0.0};
  const double sgn = to >= 0 ? 1.0 : -1.0;
  for (double m : {0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    if (m * a < std::abs(to)) pts.push_back(sgn * m * a);
  }
  pts.push_back(to);
  return pts;
}

/// Largest x = s*a (s <= 2) such that v_a' stays above a quarter of v_a'(0)
/// on [0, x]. Below it the fermionic w_a uses the 1/v' representation.
inline double fermion_match_point(const RegulatedPotentialSpec& spec) {
  const double a = spec.a();
  const double slope0 = eval_v_jet(spec, 0.0).d1;
  double last = 0.0;
  for (int i = 1; i <= 200; ++i) {
    const double x = 0.01 * i * a;
    if (eval_v_jet(spec, x).d1 < 0.25 * slope0) break;
    last = x;
  }
  return last;
}

}  // namespace detail

/// Second zero-energy solution w_a with Wronskian v w' - v' w = 1 (boson,
/// w odd) or -1 (fermion, w even), together with its slope.
inline WValue eval_w_jet(const RegulatedPotentialSpec& spec, double x,
                         const QuadratureOptions& quad = {.rel_tol = 1e-12, .abs_tol = 1e-300}) {
  const double a = spec.a();
  auto check = [](const auto& r) {
    if (!std::isfinite(std::abs(r.value))) throw QuadratureError("w_a quadrature produced a non-finite value");
    return r.value;
  };
  if (spec.kind() == InteractionKind::BosonDelta) {
    if (x == 0.0) return {0.0, 1.0 / eval_v(spec, 0.0)};
    const auto pts = detail::core_breakpoints(a, x);
    auto integrand = [&](double t) {
      const double v = eval_v(spec, t);
      return 1.0 / (v * v);
    };
    double integral;
    if (x > 0) {
      integral = check(integrate_adaptive(integrand, std::span<const double>(pts), quad));
    } else {
      std::vector<double> rev(pts.rbegin(), pts.rend());
      integral = -check(integrate_adaptive(integrand, std::span<const double>(rev), quad));
    }
    const Jet v = eval_v_jet(spec, x);
    return {v.value * integral, v.d1 * integral + 1.0 / v.value};
  }

  const double ax = std::abs(x);
  const double sgn = x < 0 ? -1.0 : 1.0;
  const double xm = detail::fermion_match_point(spec);
  if (!(xm > 0.0)) throw DomainError("fermionic w_a: v_a' is not positive near the node");
  auto inner = [&](double upto) -> double {
    if (upto == 0.0) return 0.0;
    auto integrand = [&](double t) {
      const Jet v = eval_v_jet(spec, t);
      return v.d2 / (v.value * v.d1 * v.d1);
    };
    const auto pts = detail::core_breakpoints(a, upto);
    return check(integrate_adaptive(integrand, std::span<const double>(pts), quad));
  };
  if (ax <= xm) {
    const double integral = inner(ax);
    const Jet v = eval_v_jet(spec, ax);
    return {1.0 / v.d1 + v.value * integral, sgn * v.d1 * integral};
  }
  const Jet vm = eval_v_jet(spec, xm);
  const double wm = 1.0 / vm.d1 + vm.value * inner(xm);
  std::vector<double> pts{xm};
  for (double m : {2.0, 4.0, 8.0, 16.0, 32.0, 64.0}) {
    if (m * a > xm && m * a < ax) pts.push_back(m * a);
  }
  pts.push_back(ax);
  const double tail = check(integrate_adaptive(
      [&](double t) {
        const double v = eval_v(spec, t);
        return 1.0 / (v * v);
      },
      std::span<const double>(pts), quad));
  const Jet v = eval_v_jet(spec, ax);
  const double u = wm / vm.value - tail;
  return {v.value * u, sgn * (v.d1 * u - 1.0 / v.value)};
}

inline double eval_w(const RegulatedPotentialSpec& spec, double x) { return eval_w_jet(spec, x).value; }

/// Relative residual of -f'' + V_a f = 0 for f in {v_a, w_a} on the grid,
/// with f'' from a 5-point stencil. Each function's residual is divided by
/// max(1, max |f''|) over the grid.
inline double zero_energy_residual(const RegulatedPotentialSpec& spec, std::span<const double> grid) {
  const double a = spec.a();
  const QuadratureOptions tight{.rel_tol = 1e-14, .abs_tol = 1e-300, .max_intervals = 20000};
  double worst = 0.0;
  for (int which = 0; which < 2; ++which) {
    auto f = [&](double x) { return which == 0 ? eval_v(spec, x) : eval_w_jet(spec, x, tight).value; };
    double scale = 1.0, resid = 0.0;
    for (double x : grid) {
      const double pot = eval_potential(spec, x);
      double h = 0.02 * std::max(a, std::abs(x) / 5.0);
      if (spec.kind() == InteractionKind::FermionEta) {
        // keep the stencil clear of the node
        h = std::min(h, std::max((std::abs(x) - spec.guard_band()) / 2.5, 1e-6 * a));
      }
      const double fp2 = f(x + 2 * h), fp1 = f(x + h), f0 = f(x), fm1 = f(x - h), fm2 = f(x - 2 * h);
      const double d2 = (-fp2 + 16 * fp1 - 30 * f0 + 16 * fm1 - fm2) / (12 * h * h);
      scale = std::max(scale, std::abs(d2));
      resid = std::max(resid, std::abs(-d2 + pot * f0));
    }
    worst = std::max(worst, resid / scale);
  }
  return worst;
}

}  // namespace pointlike
