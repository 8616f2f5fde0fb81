#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <string>
#include <vector>

#include <boost/math/special_functions/trigamma.hpp>

#include "pointlike/errors.hpp"
#include "pointlike/pointlike_spectrum.hpp"
#include "pointlike/quadrature.hpp"

namespace pointlike {

/// Initial condition of the evolution. A state is a ring function f plus a
/// point amplitude m carried by the interaction point, normalized as
/// int |f|^2 + |m|^2 = 1. CapturedAtOrigin is f = 0, m = 1.
struct InitialState {
  enum class Kind { CapturedAtOrigin, UserFunction };
  enum class Overlap { Modified, Standard };

  Kind kind = Kind::CapturedAtOrigin;
  Overlap overlap = Overlap::Modified;
  RingFunction function;
  cplx point_amplitude{1.0, 0.0};

  static InitialState captured() { return {}; }

  /// Regular ring function; under the modified product its point amplitude
  /// is nu f(0) (bosons) or (nu/2)(f(0+) - f(0-)) (fermions).
  static InitialState from_function(const PointlikeModel& m, RingFunction f, Overlap rule = Overlap::Modified) {
    InitialState s;
    s.kind = Kind::UserFunction;
    s.overlap = rule;
    s.point_amplitude = rule == Overlap::Modified ? point_value(m, f.at_plus, f.at_minus) : cplx{};
    s.function = std::move(f);
    return s;
  }

  static InitialState with_point_mass(RingFunction f, cplx amplitude) {
    InitialState s;
    s.kind = Kind::UserFunction;
    s.function = std::move(f);
    s.point_amplitude = amplitude;
    return s;
  }

  /// nu psi(0) for bosons, (nu/2)(psi(0+) - psi(0-)) for fermions.
  static cplx point_value(const PointlikeModel& m, cplx plus, cplx minus) {
    return m.kind() == InteractionKind::BosonDelta ? m.nu() * 0.5 * (plus + minus) : 0.5 * m.nu() * (plus - minus);
  }
};

inline double state_norm_squared(const PointlikeModel& m, const InitialState& s) {
  if (s.kind == InitialState::Kind::CapturedAtOrigin) return std::norm(s.point_amplitude);
  const double bulk = standard_inner_product(m, s.function, s.function).real();
  return bulk + (s.overlap == InitialState::Overlap::Modified ? std::norm(s.point_amplitude) : 0.0);
}

/// Point amplitude of a mode: nu / Z in the interacting sector, 0 otherwise.
inline double mode_point_value(const PointlikeModel& m, const EigenMode& mode) {
  return mode.interacting ? m.nu() / mode.Z : 0.0;
}

/// [psi_k | psi_ini] for each mode.
inline std::vector<cplx> overlaps(const PointlikeModel& m, const InitialState& s, std::span<const EigenMode> modes) {
  if (s.kind == InitialState::Kind::CapturedAtOrigin && m.nu() == 0.0) {
    throw ModelMismatch("a point-captured state cannot be normalized when nu = 0");
  }
  if (std::abs(state_norm_squared(m, s) - 1.0) > 1e-8) throw DomainError("initial state is not normalized");
  std::vector<cplx> out;
  out.reserve(modes.size());
  for (const auto& mode : modes) {
    cplx o = mode_point_value(m, mode) * s.point_amplitude;
    if (s.kind == InitialState::Kind::UserFunction) {
      const auto f = mode_function(mode, m);
      if (s.overlap == InitialState::Overlap::Standard) o = 0.0;
      o += standard_inner_product(m, f, s.function);
    }
    out.push_back(o);
  }
  return out;
}

namespace detail {

inline cplx pairwise_sum(std::span<const cplx> v) {
  if (v.size() <= 8) {
    cplx s{};
    for (const auto& x : v) s += x;
    return s;
  }
  const std::size_t h = v.size() / 2;
  return pairwise_sum(v.subspan(0, h)) + pairwise_sum(v.subspan(h));
}

}  // namespace detail

/// Sum over mode index n >= n0 of 8 / (L nu^2 k_n^2) with the asymptotic
/// roots k_n = 2 pi (n + shift) / L.
inline double completeness_tail(const PointlikeModel& m, double last_k) {
  if (m.nu() == 0.0) return 0.0;
  const double shift = m.kind() == InteractionKind::BosonDelta ? 0.5 : 0.0;
  const double L = m.L();
  const double n_last = std::round(last_k * L / (2.0 * std::numbers::pi) - shift);
  const double n0 = std::max(n_last + 1.0, 1.0);
  return 2.0 * L / (m.nu() * m.nu() * std::numbers::pi * std::numbers::pi) * boost::math::trigamma(n0 + shift);
}

struct CompletenessResult {
  double partial = 0.0;  // sum over the first M interacting modes of nu^2 / Z_k^2
  double tail = 0.0;     // analytic estimate of the remainder
  double total = 0.0;
  bool no_point_mass = false;
};

inline CompletenessResult completeness_check(const PointlikeModel& m, std::size_t M) {
  if (M == 0) throw DomainError("completeness_check requires M >= 1");
  CompletenessResult r;
  if (m.nu() == 0.0) {
    r.no_point_mass = true;
    return r;
  }
  const auto modes = solve_modes(m, M, m.interacting_parity());
  std::vector<cplx> terms;
  for (const auto& mode : modes) terms.emplace_back(std::pow(mode_point_value(m, mode), 2));
  r.partial = detail::pairwise_sum(terms).real();
  r.tail = completeness_tail(m, modes.back().k);
  r.total = r.partial + r.tail;
  return r;
}

/// Modes of the interacting sector, doubling M from 64 until the
/// completeness deficit 1 - sum nu^2/Z^2 drops below `deficit_target`.
inline std::vector<EigenMode> capture_modes(const PointlikeModel& m, double deficit_target = 1e-3,
                                            std::size_t max_modes = 10000) {
  if (m.nu() == 0.0) throw ModelMismatch("capture dynamics needs nu > 0");
  std::size_t M = std::min<std::size_t>(64, max_modes);
  while (true) {
    auto modes = solve_modes(m, M, m.interacting_parity());
    double sum = 0.0;
    for (const auto& mode : modes) sum += std::pow(mode_point_value(m, mode), 2);
    if (1.0 - sum < deficit_target) return modes;
    if (M >= max_modes) {
      throw TruncationError("completeness deficit " + std::to_string(1.0 - sum) + " above target after " +
                            std::to_string(M) + " modes");
    }
    M = std::min(2 * M, max_modes);
  }
}

/// Truncated eigenmode expansion psi(x, t) = sum_k psi_k(x) c_k e^{-i k^2 t}.
class FiniteEvolution {
 public:
  FiniteEvolution(PointlikeModel model, std::vector<EigenMode> modes, std::vector<cplx> coefficients)
      : model_(model), modes_(std::move(modes)), coeffs_(std::move(coefficients)) {
    if (modes_.size() != coeffs_.size()) throw DomainError("FiniteEvolution: size mismatch");
    double norm = 0.0;
    for (const auto& c : coeffs_) norm += std::norm(c);
    norm_ = norm;
  }

  const PointlikeModel& model() const { return model_; }
  std::span<const EigenMode> modes() const { return modes_; }
  std::span<const cplx> coefficients() const { return coeffs_; }

  /// Sum of |c_k|^2; time independent.
  double retained_norm() const { return norm_; }

  cplx psi(double x, double t) const {
    std::vector<cplx> terms(modes_.size());
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      terms[i] = eigenfunction(modes_[i], model_, x) * coeffs_[i] * std::exp(cplx(0.0, -modes_[i].E * t));
    }
    return detail::pairwise_sum(terms);
  }

  /// Amplitude carried by the interaction point at time t.
  cplx point_amplitude(double t) const {
    std::vector<cplx> terms(modes_.size());
    for (std::size_t i = 0; i < modes_.size(); ++i) {
      terms[i] = mode_point_value(model_, modes_[i]) * coeffs_[i] * std::exp(cplx(0.0, -modes_[i].E * t));
    }
    return detail::pairwise_sum(terms);
  }

  /// p(t) = nu^2 |psi(0, t)|^2 for bosons; (nu^2/4) |jump psi|^2 for fermions.
  double capture_probability(double t) const { return std::norm(point_amplitude(t)); }

 private:
  PointlikeModel model_;
  std::vector<EigenMode> modes_;
  std::vector<cplx> coeffs_;
  double norm_ = 0.0;
};

inline FiniteEvolution evolve_finite(const PointlikeModel& m, const InitialState& s, std::vector<EigenMode> modes) {
  auto c = overlaps(m, s, modes);
  return FiniteEvolution(m, std::move(modes), std::move(c));
}

struct EvolutionResult {
  std::vector<double> times;
  std::vector<double> p;
  std::size_t modes = 0;        // finite ring: number of modes kept
  double k_cutoff = 0.0;        // infinite line: contour cutoff at the last time
  double truncation_error = 0;  // bound on the missing probability weight
};

inline EvolutionResult capture_curve_finite(const PointlikeModel& m, std::span<const double> times,
                                            double deficit_target = 1e-3, std::size_t max_modes = 10000) {
  auto modes = capture_modes(m, deficit_target, max_modes);
  const auto evo = evolve_finite(m, InitialState::captured(), std::move(modes));
  EvolutionResult r;
  r.times.assign(times.begin(), times.end());
  for (double t : times) r.p.push_back(evo.capture_probability(t));
  r.modes = evo.modes().size();
  r.truncation_error = 1.0 - evo.retained_norm();
  return r;
}

namespace detail {

/// Poles of 1/(1 + alpha^2) in the fourth quadrant limit the contour angle.
inline double pole_angle(double c, double nu) {
  const double d = nu * nu * c - 1.0;
  if (d <= 0.0) return std::numbers::pi / 2;
  return std::atan(1.0 / std::sqrt(d));
}

}  // namespace detail

struct InfiniteLineOptions {
  double rel_tol = 1e-10;
  int max_intervals = 20000;
};

/// psi(x, t) = (nu/pi) int_0^inf e^{-i t k^2} (cos kx + alpha sin k|x|) / (1 + alpha^2) dk
/// for the point-captured state on the line. The path is rotated to
/// k = s e^{-i theta}, where e^{-i t k^2} decays like e^{-t s^2 sin 2theta};
/// theta stays below half the angle of the nearest pole and below
/// atan(24 t / x^2) so that the growth of the trigonometric factor is tame.
inline cplx evolve_infinite(double c, double nu, double t, double x, const InfiniteLineOptions& opts = {}) {
  if (!(c >= 0.0) || !(nu >= 0.0) || !(t >= 0.0)) throw DomainError("evolve_infinite requires c, nu, t >= 0");
  if (c == 0.0 && nu == 0.0) throw DomainError("evolve_infinite requires c > 0 or nu > 0");
  if (nu == 0.0) return 0.0;
  if (t == 0.0) return x == 0.0 ? cplx(1.0 / nu) : cplx(0.0);
  const double ax = std::abs(x);
  double theta = std::min(std::numbers::pi / 4, 0.5 * detail::pole_angle(c, nu));
  if (ax > 0.0) theta = std::min(theta, std::atan(24.0 * t / (ax * ax)));
  const cplx rot = std::polar(1.0, -theta);
  const double s_max = std::sqrt(40.0 / (t * std::sin(2.0 * theta)));
  const double nu2 = nu * nu;
  auto integrand = [&](double s) {
    const cplx k = s * rot;
    const cplx g = c - nu2 * k * k;
    const cplx den = 4.0 * k * k + g * g;
    cplx num = 4.0 * k * k;
    if (ax > 0.0) num = num * std::cos(k * ax) + 2.0 * k * g * std::sin(k * ax);
    return num / den * std::exp(cplx(0.0, -t) * k * k) * rot;
  };
  std::vector<double> pts{0.0};
  for (int j = 30; j >= 0; --j) pts.push_back(s_max * std::ldexp(1.0, -j));
  const auto r = integrate_adaptive(integrand, std::span<const double>(pts),
                                    {.rel_tol = opts.rel_tol, .abs_tol = 1e-300, .max_intervals = opts.max_intervals});
  return nu / std::numbers::pi * r.value;
}

inline double capture_probability_infinite(double c, double nu, double t, const InfiniteLineOptions& opts = {}) {
  return nu * nu * std::norm(evolve_infinite(c, nu, t, 0.0, opts));
}

inline EvolutionResult capture_curve_infinite(double c, double nu, std::span<const double> times,
                                              const InfiniteLineOptions& opts = {}) {
  EvolutionResult r;
  r.times.assign(times.begin(), times.end());
  for (double t : times) {
    r.p.push_back(capture_probability_infinite(c, nu, t, opts));
    if (t > 0.0) {
      const double theta = std::min(std::numbers::pi / 4, 0.5 * detail::pole_angle(c, nu));
      r.k_cutoff = std::sqrt(40.0 / (t * std::sin(2.0 * theta)));
    }
  }
  r.truncation_error = opts.rel_tol;
  return r;
}

/// Least-squares slope of log p against log t.
inline double decay_exponent(std::span<const double> times, std::span<const double> p) {
  if (times.size() != p.size() || times.size() < 5) throw FitError("decay_exponent needs at least five samples");
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  const double n = static_cast<double>(times.size());
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (!(p[i] > 0.0) || !(times[i] > 0.0)) throw FitError("decay_exponent needs positive samples");
    const double lx = std::log(times[i]), ly = std::log(p[i]);
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
  }
  const double den = n * sxx - sx * sx;
  if (!(std::abs(den) > 0.0)) throw FitError("decay_exponent: degenerate time grid");
  return (n * sxy - sx * sy) / den;
}

}  // namespace pointlike
