#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "pointlike/errors.hpp"
#include "pointlike/ode.hpp"
#include "pointlike/quadrature.hpp"
#include "pointlike/regulated_potential.hpp"

namespace pointlike {

/// Data imposed at x = x_out; the solver sweeps from x_out to -x_out.
struct BoundaryCondition {
  cplx value{1.0, 0.0};
  cplx slope{0.5, 0.0};
  double x_out = 1.0;
};

/// Sampled solution of -psi'' + V_a psi = E psi with quintic Hermite dense
/// output built from (psi, psi', psi'') at each grid point.
class WaveSolution {
 public:
  WaveSolution(RegulatedPotentialSpec spec, double E, std::vector<double> grid, std::vector<cplx> values,
               std::vector<cplx> slopes, std::vector<cplx> second)
      : spec_(std::move(spec)),
        E_(E),
        grid_(std::move(grid)),
        values_(std::move(values)),
        slopes_(std::move(slopes)),
        second_(std::move(second)) {
    if (grid_.size() < 2 || values_.size() != grid_.size() || slopes_.size() != grid_.size() ||
        second_.size() != grid_.size()) {
      throw DomainError("WaveSolution: inconsistent sample arrays");
    }
    if (std::adjacent_find(grid_.begin(), grid_.end(), std::greater_equal<>()) != grid_.end()) {
      throw DomainError("WaveSolution: grid must be strictly increasing");
    }
  }

  const RegulatedPotentialSpec& spec() const { return spec_; }
  double energy() const { return E_; }
  std::span<const double> grid() const { return grid_; }
  std::span<const cplx> values() const { return values_; }
  std::span<const cplx> slopes() const { return slopes_; }
  std::span<const cplx> second_derivatives() const { return second_; }
  double x_min() const { return grid_.front(); }
  double x_max() const { return grid_.back(); }

  double sup_norm() const {
    double m = 0.0;
    for (const auto& v : values_) m = std::max(m, std::abs(v));
    return m;
  }

  cplx value(double x) const { return hermite(x).first; }
  cplx slope(double x) const { return hermite(x).second; }

  /// psi(x) and psi'(x) from the quintic Hermite interpolant.
  std::pair<cplx, cplx> hermite(double x) const {
    if (x < grid_.front() || x > grid_.back()) throw DomainError("WaveSolution: x outside the solved range");
    auto it = std::upper_bound(grid_.begin(), grid_.end(), x);
    std::size_t i = it == grid_.begin() ? 0 : static_cast<std::size_t>(it - grid_.begin()) - 1;
    if (i + 1 >= grid_.size()) i = grid_.size() - 2;
    const double h = grid_[i + 1] - grid_[i];
    const double t = (x - grid_[i]) / h;
    const double t2 = t * t, t3 = t2 * t, t4 = t3 * t, t5 = t4 * t;
    const double H0 = 1 - 10 * t3 + 15 * t4 - 6 * t5, H1 = t - 6 * t3 + 8 * t4 - 3 * t5,
                 H2 = 0.5 * (t2 - 3 * t3 + 3 * t4 - t5), H3 = 10 * t3 - 15 * t4 + 6 * t5,
                 H4 = -4 * t3 + 7 * t4 - 3 * t5, H5 = 0.5 * (t3 - 2 * t4 + t5);
    const double D0 = -30 * t2 + 60 * t3 - 30 * t4, D1 = 1 - 18 * t2 + 32 * t3 - 15 * t4,
                 D2 = 0.5 * (2 * t - 9 * t2 + 12 * t3 - 5 * t4), D3 = -D0,
                 D4 = -12 * t2 + 28 * t3 - 15 * t4, D5 = 0.5 * (3 * t2 - 8 * t3 + 5 * t4);
    const cplx y0 = values_[i], y1 = values_[i + 1], d0 = slopes_[i], d1 = slopes_[i + 1];
    const cplx s0 = second_[i], s1 = second_[i + 1];
    const cplx val = H0 * y0 + h * H1 * d0 + h * h * H2 * s0 + H3 * y1 + h * H4 * d1 + h * h * H5 * s1;
    const cplx der = (D0 * y0 + D3 * y1) / h + D1 * d0 + D4 * d1 + h * (D2 * s0 + D5 * s1);
    return {val, der};
  }

 private:
  RegulatedPotentialSpec spec_;
  double E_;
  std::vector<double> grid_;
  std::vector<cplx> values_, slopes_, second_;
};

/// Output grid: spacing a/50 for |x| <= 10a, then geometric growth (3%)
/// capped at 0.01, ending exactly at +-x_out. Contains 0 for the bosonic
/// kind and +-guard for the fermionic kind.
inline std::vector<double> solution_grid(const RegulatedPotentialSpec& spec, double x_out) {
  const double a = spec.a();
  const double h0 = a / 50.0;
  std::vector<double> half;
  for (int i = 1; i * h0 <= 10.0 * a * (1 + 1e-12) && i * h0 < x_out; ++i) half.push_back(i * h0);
  double x = half.empty() ? 0.0 : half.back();
  double h = h0;
  while (true) {
    h = std::min(h * 1.03, 0.01);
    x += h;
    if (x >= x_out - 0.25 * h) break;
    half.push_back(x);
  }
  half.push_back(x_out);
  std::vector<double> grid;
  grid.reserve(2 * half.size() + 2);
  for (auto it = half.rbegin(); it != half.rend(); ++it) grid.push_back(-*it);
  if (spec.kind() == InteractionKind::FermionEta) {
    grid.push_back(-spec.guard_band());
    grid.push_back(spec.guard_band());
  } else {
    grid.push_back(0.0);
  }
  grid.insert(grid.end(), half.begin(), half.end());
  return grid;
}

/// Adaptive Dormand-Prince integration of the stationary equation from
/// x_out toward -x_out. For the fermionic kind the sweep stops at the guard
/// band, matches onto the zero-energy pair (v_a, w_a) and resumes on the
/// other side; the neglected energy term over the band is O(E guard^2).
inline WaveSolution integrate(const RegulatedPotentialSpec& spec, double E, const BoundaryCondition& bc,
                              const OdeTolerances& tol = {}) {
  const double x_out = bc.x_out;
  if (!(x_out >= 100.0 * spec.a())) throw DomainError("integrate requires x_out >= 100 a");
  if (!std::isfinite(E)) throw DomainError("integrate requires finite E");
  const auto grid = solution_grid(spec, x_out);
  const std::size_t n = grid.size();
  std::vector<cplx> val(n), der(n), sec(n);

  const double guard = spec.guard_band();
  auto rhs = [&](double x, const OdeState<4>& y) {
    // stage abscissae may round to just inside the guard band
    const double xs = std::abs(x) < guard ? std::copysign(guard, x) : x;
    const double q = eval_potential(spec, xs) - E;
    return OdeState<4>{y[2], y[3], q * y[0], q * y[1]};
  };
  auto store = [&](std::size_t i, const OdeState<4>& y) {
    val[i] = {y[0], y[1]};
    der[i] = {y[2], y[3]};
    sec[i] = (eval_potential(spec, grid[i]) - E) * val[i];
  };

  DormandPrince<4> dp(tol);
  OdeState<4> y{bc.value.real(), bc.value.imag(), bc.slope.real(), bc.slope.imag()};
  double h = -std::min(0.01, 0.1 * spec.a());
  store(n - 1, y);
  for (std::size_t i = n - 1; i-- > 0;) {
    const bool across_node = spec.kind() == InteractionKind::FermionEta && grid[i + 1] > 0.0 && grid[i] < 0.0;
    if (across_node) {
      const double g = grid[i + 1];
      const Jet v = eval_v_jet(spec, g);
      const WValue w = eval_w_jet(spec, g);
      const double W = v.value * w.slope - v.d1 * w.value;
      const cplx psi = val[i + 1], dpsi = der[i + 1];
      const cplx alpha = (psi * w.slope - dpsi * w.value) / W;
      const cplx beta = (v.value * dpsi - v.d1 * psi) / W;
      if (!std::isfinite(std::abs(alpha)) || !std::isfinite(std::abs(beta)) || std::abs(W) < 1e-8) {
        throw GuardBandError("matching across the fermionic node failed");
      }
      // v is odd and w is even, so their values and slopes flip accordingly.
      const cplx psi_m = -alpha * v.value + beta * w.value;
      const cplx dpsi_m = alpha * v.d1 - beta * w.slope;
      y = {psi_m.real(), psi_m.imag(), dpsi_m.real(), dpsi_m.imag()};
      store(i, y);
      continue;
    }
    y = dp.advance(rhs, grid[i + 1], y, grid[i], h);
    store(i, y);
  }
  return WaveSolution(spec, E, grid, std::move(val), std::move(der), std::move(sec));
}

/// Effective connection data at x = 0 read off outer-region fits.
struct ConnectionEstimate {
  cplx psi_plus, psi_minus;
  cplx dpsi_plus, dpsi_minus;
  /// Bosonic: (psi'(0+) - psi'(0-)) / psi(0), with psi(0) the two-sided mean.
  /// Fermionic: (psi(0+) - psi(0-)) / psi'(0), whose zero-range value is
  /// 4 / (c - E nu^2).
  cplx jump_coefficient;
  double x_lo = 0.0, x_hi = 0.0;
  double fit_residual = 0.0;  // max misfit on both windows relative to sup |psi|
};

/// Default fit window [x_lo, x_hi] on each side of the origin.
inline std::pair<double, double> default_fit_window(double a, double x_out) {
  const double lo = 30.0 * a;
  const double hi = std::min(0.5 * x_out, std::max(200.0 * a, 3.0 * lo));
  return {lo, hi};
}

namespace detail {

struct SideFit {
  cplx value, slope;
  double misfit;
};

inline SideFit fit_outer(const WaveSolution& sol, double sign, double lo, double hi, int samples) {
  const double E = sol.energy();
  const double k = std::sqrt(std::abs(E));
  auto basis = [&](double x) -> std::pair<double, double> {
    if (E > 0) return {std::cos(k * x), std::sin(k * x)};
    if (E < 0) return {std::cosh(k * x), std::sinh(k * x)};
    return {1.0, x};
  };
  double g11 = 0, g12 = 0, g22 = 0;
  cplx r1 = 0, r2 = 0;
  std::vector<std::pair<double, cplx>> pts;
  pts.reserve(samples);
  for (int i = 0; i < samples; ++i) {
    const double x = sign * (lo + (hi - lo) * i / (samples - 1));
    const cplx psi = sol.value(x);
    const auto [b1, b2] = basis(x);
    g11 += b1 * b1;
    g12 += b1 * b2;
    g22 += b2 * b2;
    r1 += b1 * psi;
    r2 += b2 * psi;
    pts.emplace_back(x, psi);
  }
  const double tr = g11 + g22, det = g11 * g22 - g12 * g12;
  const double disc = std::sqrt(std::max(0.0, 0.25 * tr * tr - det));
  const double lmax = 0.5 * tr + disc, lmin = det / lmax;
  if (!(lmin > 0.0) || lmax / lmin > 1e12) {
    throw FitError("outer fit is ill-conditioned on [" + std::to_string(lo) + ", " + std::to_string(hi) + "]");
  }
  const cplx P = (g22 * r1 - g12 * r2) / det;
  const cplx Q = (g11 * r2 - g12 * r1) / det;
  double misfit = 0.0;
  for (const auto& [x, psi] : pts) {
    const auto [b1, b2] = basis(x);
    misfit = std::max(misfit, std::abs(psi - P * b1 - Q * b2));
  }
  const double dscale = E == 0.0 ? 1.0 : k;
  return {P, Q * dscale, misfit};
}

}  // namespace detail

/// Least-squares fit of the outer solution to {cos kx, sin kx} (E > 0),
/// {cosh, sinh} (E < 0) or {1, x} (E = 0) on [x_lo, x_hi] and its mirror,
/// extrapolated to x = 0 on each side.
inline ConnectionEstimate extract_connection(const WaveSolution& sol,
                                             std::optional<std::pair<double, double>> window = std::nullopt,
                                             int samples = 200) {
  const double x_out = std::min(-sol.x_min(), sol.x_max());
  const auto [lo, hi] = window.value_or(default_fit_window(sol.spec().a(), x_out));
  if (!(lo > 0.0) || !(hi > lo) || hi > x_out) throw FitError("empty or out-of-range fit window");
  const auto plus = detail::fit_outer(sol, 1.0, lo, hi, samples);
  const auto minus = detail::fit_outer(sol, -1.0, lo, hi, samples);
  ConnectionEstimate est;
  est.psi_plus = plus.value;
  est.psi_minus = minus.value;
  est.dpsi_plus = plus.slope;
  est.dpsi_minus = minus.slope;
  est.x_lo = lo;
  est.x_hi = hi;
  const double norm = sol.sup_norm();
  est.fit_residual = norm > 0 ? std::max(plus.misfit, minus.misfit) / norm : 0.0;
  if (sol.spec().kind() == InteractionKind::BosonDelta) {
    const cplx mean = 0.5 * (est.psi_plus + est.psi_minus);
    if (std::abs(mean) == 0.0) throw FitError("psi(0) vanishes; bosonic jump coefficient undefined");
    est.jump_coefficient = (est.dpsi_plus - est.dpsi_minus) / mean;
  } else {
    const cplx mean = 0.5 * (est.dpsi_plus + est.dpsi_minus);
    if (std::abs(mean) == 0.0) throw FitError("psi'(0) vanishes; fermionic discontinuity ratio undefined");
    est.jump_coefficient = (est.psi_plus - est.psi_minus) / mean;
  }
  return est;
}

/// Zero-range value of the jump coefficient reported by extract_connection.
inline double jump_target(InteractionKind kind, double c, double nu, double E) {
  const double g = c - E * nu * nu;
  return kind == InteractionKind::BosonDelta ? g : 4.0 / g;
}

/// W = int_0^inf sigma^2 Delta, the weight the fermionic core adds to int v^2
/// per unit nu^2. The tanh pair gives 1/6.
inline double fermion_core_weight(const ShapeFunctions& shapes) {
  const std::vector<double> breaks{0.0, 0.5, 1.0, 2.0, 4.0, 8.0, 16.0, 40.0};
  auto f = [&](double u) {
    const double s = shapes.sigma(u).value;
    return s * s * shapes.delta(u);
  };
  return integrate_adaptive(f, std::span<const double>(breaks), {.rel_tol = 1e-13, .abs_tol = 1e-15}).value;
}

/// Zero-range limit of the fermionic discontinuity ratio of the regulated
/// potential itself. With psi = v phi, first order in E gives
/// 4 / (c - E nu^2 c^2 W / 2), which coincides with jump_target only when
/// c^2 W = 2.
inline double regulated_fermion_limit(const RegulatedPotentialSpec& spec, double E) {
  if (spec.kind() != InteractionKind::FermionEta) throw ModelMismatch("regulated_fermion_limit needs the fermionic potential");
  const double W = fermion_core_weight(spec.shapes());
  return 4.0 / (spec.c() - E * spec.nu() * spec.nu() * spec.c() * spec.c() * W / 2.0);
}

struct ConvergenceRow {
  double a = 0.0;
  cplx jump{};
  double target = 0.0;
  double rel_error = 0.0;
  bool ok = false;
  std::string failure;  // error name when the row failed
};

/// Relative error of a jump estimate against its target. For a vanishing
/// target the absolute error is used; for the fermionic transparent point
/// (infinite target) the error is measured on the reciprocal 4 / jump.
inline double jump_error(cplx jump, double target) {
  if (!std::isfinite(target)) return std::abs(4.0 / jump);
  if (target == 0.0) return std::abs(jump);
  return std::abs(jump - target) / std::abs(target);
}

/// Solves and extracts the jump for each range in `a_list` (decreasing).
inline std::vector<ConvergenceRow> convergence_study(const RegulatedPotentialSpec& base, std::span<const double> a_list,
                                                     double E, const BoundaryCondition& bc = {}) {
  if (a_list.size() < 3) throw DomainError("convergence_study needs at least three ranges");
  for (std::size_t i = 1; i < a_list.size(); ++i) {
    if (!(a_list[i] < a_list[i - 1])) throw DomainError("convergence_study: a-list must be decreasing");
  }
  std::vector<ConvergenceRow> rows;
  const double target = jump_target(base.kind(), base.c(), base.nu(), E);
  for (double a : a_list) {
    ConvergenceRow row;
    row.a = a;
    row.target = target;
    try {
      const auto sol = integrate(base.with_range(a), E, bc);
      row.jump = extract_connection(sol).jump_coefficient;
      row.rel_error = jump_error(row.jump, target);
      row.ok = true;
    } catch (const Error& e) {
      row.failure = e.name();
      row.rel_error = std::numeric_limits<double>::quiet_NaN();
    }
    rows.push_back(row);
  }
  return rows;
}

/// True when every successful row's error is at most (1 + slack) times the
/// previous successful row's error.
inline bool errors_nonincreasing(std::span<const ConvergenceRow> rows, double slack = 0.2) {
  std::optional<double> prev;
  for (const auto& r : rows) {
    if (!r.ok) return false;
    if (prev && r.rel_error > (1.0 + slack) * *prev) return false;
    prev = r.rel_error;
  }
  return true;
}

/// Extrapolates the last two rows assuming jump(a) = J0 + C sqrt(a), the
/// leading correction observed for nu > 0 at E != 0.
inline cplx sqrt_extrapolated_jump(std::span<const ConvergenceRow> rows) {
  if (rows.size() < 2) throw DomainError("extrapolation needs two rows");
  const auto& r1 = rows[rows.size() - 2];
  const auto& r2 = rows[rows.size() - 1];
  const double s1 = std::sqrt(r1.a), s2 = std::sqrt(r2.a);
  return (r2.jump * s1 - r1.jump * s2) / (s1 - s2);
}

/// Panel layout for the Picard solver: width a/8 for |x| <= 40a, then
/// geometric growth by 1.3 capped at 0.05, ending at +-x_out.
inline std::vector<double> picard_breaks(double a, double x_out) {
  std::vector<double> half{0.0};
  const double w0 = a / 8.0;
  const double core = std::min(40.0 * a, x_out);
  for (int i = 1; i * w0 < core * (1 - 1e-12); ++i) half.push_back(i * w0);
  double x = half.back(), w = w0;
  while (true) {
    w = std::min(1.3 * w, 0.05);
    if (x + w >= x_out - 0.3 * w) break;
    x += w;
    half.push_back(x);
  }
  half.push_back(x_out);
  std::vector<double> breaks;
  for (auto it = half.rbegin(); it != half.rend() - 1; ++it) breaks.push_back(-*it);
  breaks.insert(breaks.end(), half.begin(), half.end());
  return breaks;
}

/// Fixed point of psi = A v + B w + E [v int_0^x psi w - w int_0^x psi v]
/// by Picard iteration with spectral panel quadrature. Bosonic kind only.
inline WaveSolution picard_solve(const RegulatedPotentialSpec& spec, double E, cplx A, cplx B, int max_iter = 200,
                                 double tol = 1e-13, double x_out = 1.0) {
  if (spec.kind() != InteractionKind::BosonDelta) {
    throw ModelMismatch("picard_solve is defined for the bosonic construction");
  }
  if (!(x_out > 0.0)) throw DomainError("picard_solve requires x_out > 0");
  const PanelGrid panels(picard_breaks(spec.a(), x_out));
  const auto nodes = panels.nodes();
  const std::size_t n = nodes.size();
  const std::size_t origin = panels.break_index(0.0);

  std::vector<double> v(n), dv(n), inv_v2(n), pot(n);
  for (std::size_t i = 0; i < n; ++i) {
    const Jet j = eval_v_jet(spec, nodes[i]);
    v[i] = j.value;
    dv[i] = j.d1;
    inv_v2[i] = 1.0 / (j.value * j.value);
    pot[i] = j.d2 / j.value;
  }
  const auto I0 = panels.cumulative<double>(inv_v2, origin);
  std::vector<double> w(n), dw(n);
  for (std::size_t i = 0; i < n; ++i) {
    w[i] = v[i] * I0[i];
    dw[i] = dv[i] * I0[i] + 1.0 / v[i];
  }

  std::vector<cplx> psi(n), dpsi(n), fw(n), fv(n);
  for (std::size_t i = 0; i < n; ++i) {
    psi[i] = A * v[i] + B * w[i];
    dpsi[i] = A * dv[i] + B * dw[i];
  }
  bool converged = E == 0.0;
  double change = 0.0;
  for (int it = 0; it < max_iter && !converged; ++it) {
    for (std::size_t i = 0; i < n; ++i) {
      fw[i] = psi[i] * w[i];
      fv[i] = psi[i] * v[i];
    }
    const auto Iw = panels.cumulative<cplx>(fw, origin);
    const auto Iv = panels.cumulative<cplx>(fv, origin);
    change = 0.0;
    double scale = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      const cplx next = A * v[i] + B * w[i] + E * (v[i] * Iw[i] - w[i] * Iv[i]);
      dpsi[i] = A * dv[i] + B * dw[i] + E * (dv[i] * Iw[i] - dw[i] * Iv[i]);
      change = std::max(change, std::abs(next - psi[i]));
      scale = std::max(scale, std::abs(next));
      psi[i] = next;
    }
    converged = change <= tol * std::max(scale, 1e-300);
  }
  if (!converged) {
    throw NoConvergence("Picard iteration stalled: last change " + std::to_string(change) + " after " +
                        std::to_string(max_iter) + " iterations");
  }
  std::vector<cplx> sec(n);
  for (std::size_t i = 0; i < n; ++i) sec[i] = (pot[i] - E) * psi[i];
  return WaveSolution(spec, E, std::vector<double>(nodes.begin(), nodes.end()), std::move(psi), std::move(dpsi),
                      std::move(sec));
}

}  // namespace pointlike
