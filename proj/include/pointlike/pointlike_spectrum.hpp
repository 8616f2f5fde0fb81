#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <string>
#include <vector>

#include "pointlike/errors.hpp"
#include "pointlike/quadrature.hpp"
#include "pointlike/regulated_potential.hpp"
#include "pointlike/roots.hpp"

namespace pointlike {

enum class Parity { Even, Odd };

inline const char* to_string(Parity p) { return p == Parity::Even ? "even" : "odd"; }

/// Zero-range model on the ring [-L/2, L/2] with the interaction at x = 0.
class PointlikeModel {
 public:
  PointlikeModel(InteractionKind kind, double c, double nu, double L) : kind_(kind), c_(c), nu_(nu), L_(L) {
    if (!(c >= 0.0) || !(nu >= 0.0) || !(L > 0.0) || !std::isfinite(c) || !std::isfinite(nu) ||
        !std::isfinite(L)) {
      throw DomainError("pointlike model requires c >= 0, nu >= 0, L > 0");
    }
    if (kind == InteractionKind::FermionEta && c == 0.0 && nu == 0.0) {
      throw DomainError("fermionic model with c = 0 requires nu > 0");
    }
  }

  InteractionKind kind() const { return kind_; }
  double c() const { return c_; }
  double nu() const { return nu_; }
  double L() const { return L_; }

  /// Parity of the sector the interaction acts on.
  Parity interacting_parity() const { return kind_ == InteractionKind::BosonDelta ? Parity::Even : Parity::Odd; }

 private:
  InteractionKind kind_;
  double c_, nu_, L_;
};

/// Energy-dependent connection matrix M(E), (psi, psi')(0+) = sign M (psi, psi')(0-).
struct ConnectionMatrix {
  double c = 0.0, nu = 0.0;
  double sign = 1.0;

  static ConnectionMatrix of(const PointlikeModel& m) {
    return {m.c(), m.nu(), m.kind() == InteractionKind::BosonDelta ? 1.0 : -1.0};
  }

  std::array<std::array<double, 2>, 2> at(double E) const {
    return {{{sign, 0.0}, {sign * (c - E * nu * nu), sign}}};
  }

  double determinant(double E) const {
    const auto m = at(E);
    return m[0][0] * m[1][1] - m[0][1] * m[1][0];
  }
};

inline double alpha(const PointlikeModel& m, double k) {
  if (!(k > 0.0)) throw DomainError("alpha(k) requires k > 0");
  return m.c() / (2.0 * k) - 0.5 * k * m.nu() * m.nu();
}

/// Pole-free quantization function of a sector. Interacting sectors:
/// boson 2k sin(kL/2) - (c - k^2 nu^2) cos(kL/2), fermion
/// (c - k^2 nu^2) sin(kL/2) + 2k cos(kL/2). Free sectors: sin(kL/2) for
/// bosons, cos(kL/2) for fermions.
inline double quantization_residual(const PointlikeModel& m, Parity parity, double k) {
  const double h = 0.5 * k * m.L();
  const double g = m.c() - k * k * m.nu() * m.nu();
  if (parity == m.interacting_parity()) {
    return m.kind() == InteractionKind::BosonDelta ? 2.0 * k * std::sin(h) - g * std::cos(h)
                                                   : g * std::sin(h) + 2.0 * k * std::cos(h);
  }
  return m.kind() == InteractionKind::BosonDelta ? std::sin(h) : std::cos(h);
}

/// The interacting residual divided by its natural magnitude 2k + c + k^2 nu^2.
inline double scaled_quantization_residual(const PointlikeModel& m, Parity parity, double k) {
  const double r = quantization_residual(m, parity, k);
  if (parity != m.interacting_parity()) return r;
  return r / (2.0 * k + m.c() + k * k * m.nu() * m.nu());
}

/// Interacting boson residual continued to k = i q; strictly negative for
/// c, nu >= 0, so no bound state exists. Diagnostic only.
inline double imaginary_axis_residual(const PointlikeModel& m, double q) {
  const double h = 0.5 * q * m.L();
  return -2.0 * q * std::sinh(h) - (m.c() + q * q * m.nu() * m.nu()) * std::cosh(h);
}

struct EigenMode {
  double k = 0.0;
  Parity parity = Parity::Even;
  double alpha = 0.0;  // zero in free sectors
  double Z = 1.0;
  double E = 0.0;
  bool interacting = true;
  bool degenerate = false;  // root where the quantization function only touches zero
  bool zero_mode = false;   // constant boson mode at c = 0, nu > 0
};

inline double normalization_squared(const PointlikeModel& m, double k, double a) {
  return 0.5 * m.L() * (1.0 + a * a) + a / k + m.nu() * m.nu();
}

inline EigenMode make_mode(const PointlikeModel& m, Parity parity, double k, bool degenerate = false) {
  EigenMode mode;
  mode.k = k;
  mode.parity = parity;
  mode.E = k * k;
  mode.degenerate = degenerate;
  mode.interacting = parity == m.interacting_parity();
  if (mode.interacting) {
    mode.alpha = alpha(m, k);
    mode.Z = std::sqrt(normalization_squared(m, k, mode.alpha));
  } else {
    mode.alpha = 0.0;
    mode.Z = std::sqrt(0.5 * m.L());
  }
  return mode;
}

/// First `count` modes of one parity sector in increasing k. Interacting
/// sectors are scanned with step pi/(10L) and bisected to 1e-13; free
/// sectors use their closed-form roots.
inline std::vector<EigenMode> solve_modes(const PointlikeModel& m, std::size_t count, Parity parity) {
  if (count == 0) throw DomainError("solve_modes requires count >= 1");
  const double L = m.L();
  std::vector<EigenMode> out;
  out.reserve(count);
  if (parity != m.interacting_parity()) {
    const double offset = m.kind() == InteractionKind::BosonDelta ? 2.0 : 1.0;
    for (std::size_t n = 0; n < count; ++n) {
      const double k = m.kind() == InteractionKind::BosonDelta ? 2.0 * std::numbers::pi * (n + 1) / L
                                                               : std::numbers::pi * (2.0 * n + offset) / L;
      out.push_back(make_mode(m, parity, k));
    }
    return out;
  }
  if (m.kind() == InteractionKind::BosonDelta && m.c() == 0.0 && m.nu() > 0.0) {
    EigenMode zero;
    zero.parity = Parity::Even;
    zero.Z = std::sqrt(L + m.nu() * m.nu());
    zero.zero_mode = true;
    out.push_back(zero);
    if (out.size() == count) return out;
  }
  const double step = std::numbers::pi / (10.0 * L);
  const double k_max = 2.0 * std::numbers::pi * (count + 10) / L * 4.0;
  auto G = [&](double k) { return quantization_residual(m, parity, k); };
  const auto roots = scan_roots(G, 1e-6 * step, step, k_max, count - out.size(), 1e-13, 1e-12);
  for (const auto& r : roots) {
    // A flat crossing (|G'| tiny) is reported as near-degenerate too.
    const double h = 1e-6 * std::max(r.x, 1.0 / L);
    const double slope = (G(r.x + h) - G(r.x - h)) / (2 * h);
    const double scale = 2.0 * r.x + m.c() + r.x * r.x * m.nu() * m.nu();
    const bool flat = std::abs(slope) < 1e-8 * r.x * L * scale;
    out.push_back(make_mode(m, parity, r.x, r.double_root || flat));
  }
  if (out.size() < count) {
    throw BracketError("scan ceiling k = " + std::to_string(k_max) + " reached after " + std::to_string(out.size()) +
                       " modes");
  }
  return out;
}

/// A ring function with one-sided limits at the origin.
struct RingFunction {
  std::function<cplx(double)> value;       // x != 0
  std::function<cplx(double)> derivative;  // x != 0; may be empty
  cplx at_plus{}, at_minus{};
  cplx slope_plus{}, slope_minus{};
  std::vector<double> breakpoints;  // interior points where value is not smooth
  double max_wavenumber = 0.0;      // hint for subdividing the quadrature
};

inline cplx eigenfunction_raw(const EigenMode& mode, InteractionKind kind, double x, double side) {
  const double k = mode.k, s = x == 0.0 ? side : (x > 0 ? 1.0 : -1.0);
  if (mode.zero_mode) return 1.0;
  if (kind == InteractionKind::BosonDelta) {
    if (mode.interacting) return std::cos(k * x) + mode.alpha * std::sin(k * std::abs(x));
    return std::sin(k * x);
  }
  if (mode.interacting) return s * std::cos(k * x) + mode.alpha * std::sin(k * x);
  return std::sin(k * std::abs(x));
}

inline cplx eigenfunction_slope_raw(const EigenMode& mode, InteractionKind kind, double x, double side) {
  const double k = mode.k, s = x == 0.0 ? side : (x > 0 ? 1.0 : -1.0);
  if (mode.zero_mode) return 0.0;
  if (kind == InteractionKind::BosonDelta) {
    if (mode.interacting) return -k * std::sin(k * x) + mode.alpha * k * s * std::cos(k * x);
    return k * std::cos(k * x);
  }
  if (mode.interacting) return -k * s * std::sin(k * x) + mode.alpha * k * std::cos(k * x);
  return k * s * std::cos(k * x);
}

/// Normalized eigenfunction at x; at x = 0 the right-sided limit.
inline double eigenfunction(const EigenMode& mode, const PointlikeModel& m, double x) {
  return eigenfunction_raw(mode, m.kind(), x, 1.0).real() / mode.Z;
}

inline RingFunction mode_function(const EigenMode& mode, const PointlikeModel& m) {
  const auto kind = m.kind();
  RingFunction f;
  f.value = [mode, kind](double x) { return eigenfunction_raw(mode, kind, x, 1.0) / mode.Z; };
  f.derivative = [mode, kind](double x) { return eigenfunction_slope_raw(mode, kind, x, 1.0) / mode.Z; };
  f.at_plus = eigenfunction_raw(mode, kind, 0.0, 1.0) / mode.Z;
  f.at_minus = eigenfunction_raw(mode, kind, 0.0, -1.0) / mode.Z;
  f.slope_plus = eigenfunction_slope_raw(mode, kind, 0.0, 1.0) / mode.Z;
  f.slope_minus = eigenfunction_slope_raw(mode, kind, 0.0, -1.0) / mode.Z;
  f.max_wavenumber = mode.k;
  return f;
}

namespace detail {

template <class F>
cplx ring_integral(F&& integrand, double L, double wavenumber, std::span<const double> extra = {}) {
  // Split each half ring into pieces of about half a period.
  const int pieces = 1 + static_cast<int>(std::ceil(wavenumber * L / (2.0 * std::numbers::pi)));
  std::vector<double> pts;
  for (int i = 0; i <= pieces; ++i) pts.push_back(-0.5 * L + 0.5 * L * i / pieces);
  for (int i = 1; i <= pieces; ++i) pts.push_back(0.5 * L * i / pieces);
  for (double x : extra) {
    if (x > -0.5 * L && x < 0.5 * L) pts.push_back(x);
  }
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return integrate_adaptive(std::forward<F>(integrand), std::span<const double>(pts),
                            {.rel_tol = 1e-12, .abs_tol = 1e-15, .max_intervals = 20000})
      .value;
}

}  // namespace detail

/// [f|g]: the ring integral of conj(f) g plus nu^2 conj(f(0)) g(0) (bosons,
/// with f(0) the mean of the one-sided limits) or
/// (nu^2/4) conj(jump f) jump g (fermions).
inline cplx inner_product(const PointlikeModel& m, const RingFunction& f, const RingFunction& g) {
  std::vector<double> extra = f.breakpoints;
  extra.insert(extra.end(), g.breakpoints.begin(), g.breakpoints.end());
  const cplx bulk = detail::ring_integral([&](double x) { return std::conj(f.value(x)) * g.value(x); }, m.L(),
                                          f.max_wavenumber + g.max_wavenumber, extra);
  const double nu2 = m.nu() * m.nu();
  if (m.kind() == InteractionKind::BosonDelta) {
    const cplx f0 = 0.5 * (f.at_plus + f.at_minus), g0 = 0.5 * (g.at_plus + g.at_minus);
    return bulk + nu2 * std::conj(f0) * g0;
  }
  return bulk + 0.25 * nu2 * std::conj(f.at_plus - f.at_minus) * (g.at_plus - g.at_minus);
}

/// Plain L2 product on the ring.
inline cplx standard_inner_product(const PointlikeModel& m, const RingFunction& f, const RingFunction& g) {
  std::vector<double> extra = f.breakpoints;
  extra.insert(extra.end(), g.breakpoints.begin(), g.breakpoints.end());
  return detail::ring_integral([&](double x) { return std::conj(f.value(x)) * g.value(x); }, m.L(),
                               f.max_wavenumber + g.max_wavenumber, extra);
}

/// H(f) = int |f'|^2 + c |f(0)|^2 (bosons) or + (c/4) |f(0+) - f(0-)|^2 (fermions).
inline double energy_functional(const PointlikeModel& m, const RingFunction& f) {
  if (!f.derivative) throw DomainError("energy_functional needs the derivative of f");
  const double kinetic =
      detail::ring_integral([&](double x) { return std::norm(f.derivative(x)); }, m.L(), 2.0 * f.max_wavenumber,
                            f.breakpoints)
          .real();
  if (m.kind() == InteractionKind::BosonDelta) return kinetic + m.c() * std::norm(0.5 * (f.at_plus + f.at_minus));
  return kinetic + 0.25 * m.c() * std::norm(f.at_plus - f.at_minus);
}

/// Relative-coordinate problem of two particles with total wavenumber K and
/// total energy E. The relative motion carries energy E - K^2 and the jump
/// coefficient c - nu^2 (E - K^2). The two-particle product acquires the
/// diagonal term nu^2 int conj(phi(x, x)) psi(x, x) dx.
struct RelativeProblem {
  PointlikeModel model;
  double E_rel;
  double jump_coefficient;
};

inline RelativeProblem two_particle_reduce(const PointlikeModel& m, double total_momentum, double E_total) {
  const double e_rel = E_total - total_momentum * total_momentum;
  return {m, e_rel, m.c() - m.nu() * m.nu() * e_rel};
}

/// Largest violation of the fermionic connection conditions by
/// phi = sgn(x) psi for an even interacting boson mode psi.
inline double duality_residual(const PointlikeModel& boson, const EigenMode& mode) {
  if (boson.kind() != InteractionKind::BosonDelta || !mode.interacting || mode.parity != Parity::Even) {
    throw ModelMismatch("duality_residual expects an even interacting boson mode");
  }
  const auto psi = mode_function(mode, boson);
  const cplx phi_p = psi.at_plus, phi_m = -psi.at_minus;
  const cplx dphi_p = psi.slope_plus, dphi_m = -psi.slope_minus;
  const double g = boson.c() - mode.E * boson.nu() * boson.nu();
  const double row1 = std::abs(phi_p + phi_m);
  const double row2 = std::abs(dphi_p + g * phi_m + dphi_m);
  return std::max(row1, row2);
}

}  // namespace pointlike
