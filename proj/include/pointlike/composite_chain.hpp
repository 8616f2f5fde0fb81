#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <math.h>  // boost 1.74 pchip calls isnan unqualified

#include <boost/math/interpolators/pchip.hpp>

#include "pointlike/errors.hpp"
#include "pointlike/ode.hpp"
#include "pointlike/roots.hpp"

namespace pointlike {

using Mat2 = std::array<std::array<double, 2>, 2>;

inline Mat2 operator*(const Mat2& a, const Mat2& b) {
  return {{{a[0][0] * b[0][0] + a[0][1] * b[1][0], a[0][0] * b[0][1] + a[0][1] * b[1][1]},
           {a[1][0] * b[0][0] + a[1][1] * b[1][0], a[1][0] * b[0][1] + a[1][1] * b[1][1]}}};
}

inline double determinant(const Mat2& m) { return m[0][0] * m[1][1] - m[0][1] * m[1][0]; }
inline double trace(const Mat2& m) { return m[0][0] + m[1][1]; }

/// Smooth envelope V(x) on the ring [-L/2, L/2].
struct Envelope {
  std::string name;
  std::function<double(double)> value;
  std::string parameters;  // human readable, recorded in output headers

  double operator()(double x) const { return value(x); }

  static Envelope constant(double v0) {
    if (!std::isfinite(v0)) throw DomainError("constant envelope must be finite");
    return {"const", [v0](double) { return v0; }, "value=" + format(v0)};
  }

  /// offset + amplitude cos(2 pi x / L)
  static Envelope cosine(double L, double offset = 1.0, double amplitude = 1.0) {
    if (!(L > 0.0)) throw DomainError("cosine envelope needs L > 0");
    const double q = 2.0 * std::numbers::pi / L;
    return {"cosine", [=](double x) { return offset + amplitude * std::cos(q * x); },
            "offset=" + format(offset) + " amplitude=" + format(amplitude)};
  }

  /// Monotone piecewise-cubic (PCHIP) interpolation of samples; abscissae
  /// strictly increasing, at least four points. Evaluation outside the sample
  /// range raises DomainError.
  static Envelope samples(std::vector<double> x, std::vector<double> v, std::string label = "samples") {
    if (x.size() != v.size() || x.size() < 4) throw DomainError("envelope samples: need >= 4 (x, V) pairs");
    for (std::size_t i = 1; i < x.size(); ++i) {
      if (!(x[i] > x[i - 1])) throw DomainError("envelope samples: abscissae must be strictly increasing");
    }
    const double lo = x.front(), hi = x.back();
    boost::math::interpolators::pchip<std::vector<double>> spline(std::move(x), std::move(v));
    return {"file",
            [spline, lo, hi](double s) {
              if (s < lo - 1e-12 || s > hi + 1e-12) throw DomainError("envelope evaluated outside sample range");
              return spline(std::clamp(s, lo, hi));
            },
            "source=" + label};
  }

  /// Two whitespace-separated columns (x, V); blank lines and '#' comments skipped.
  static Envelope from_file(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw DomainError("cannot open envelope file " + path);
    std::vector<double> x, v;
    std::string line;
    while (std::getline(in, line)) {
      if (const auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
      std::istringstream ss(line);
      double a, b;
      if (!(ss >> a)) continue;
      if (!(ss >> b)) throw DomainError("envelope file " + path + ": malformed line '" + line + "'");
      x.push_back(a);
      v.push_back(b);
    }
    return samples(std::move(x), std::move(v), path);
  }

 private:
  static std::string format(double d) {
    std::ostringstream os;
    os.precision(17);
    os << d;
    return os.str();
  }
};

/// N equispaced energy-dependent point interactions discretizing V on a ring.
class ChainSpec {
 public:
  ChainSpec(std::size_t N, Envelope envelope, double nu, double L) : envelope_(std::move(envelope)), nu_(nu), L_(L) {
    if (N == 0) throw DomainError("chain needs N >= 1");
    if (!(nu >= 0.0) || !std::isfinite(nu)) throw DomainError("chain needs nu >= 0");
    if (!(L > 0.0) || !std::isfinite(L)) throw DomainError("chain needs L > 0");
    const double d = L / static_cast<double>(N);
    x_.resize(N);
    V_.resize(N);
    for (std::size_t n = 0; n < N; ++n) {
      x_[n] = -0.5 * L + (static_cast<double>(n) + 0.5) * d;
      V_[n] = envelope_(x_[n]);
      if (!(V_[n] >= 0.0) || !std::isfinite(V_[n])) {
        throw DomainError("envelope must be finite and nonnegative at every site (x = " + std::to_string(x_[n]) + ")");
      }
    }
  }

  std::size_t N() const { return x_.size(); }
  double nu() const { return nu_; }
  double L() const { return L_; }
  double spacing() const { return L_ / static_cast<double>(N()); }
  const Envelope& envelope() const { return envelope_; }
  const std::vector<double>& sites() const { return x_; }
  const std::vector<double>& envelope_at_sites() const { return V_; }
  double coupling(std::size_t n) const { return spacing() * V_[n]; }
  double nu_squared(std::size_t n) const { return spacing() * nu_ * nu_ * V_[n]; }

 private:
  Envelope envelope_;
  double nu_, L_;
  std::vector<double> x_, V_;
};

/// Propagation of (psi, psi') over a free segment of length d at energy E.
inline Mat2 free_propagator(double E, double d) {
  if (E > 0.0) {
    const double k = std::sqrt(E), c = std::cos(k * d), s = std::sin(k * d);
    return {{{c, s / k}, {-k * s, c}}};
  }
  if (E < 0.0) {
    const double q = std::sqrt(-E), c = std::cosh(q * d), s = std::sinh(q * d);
    return {{{c, s / q}, {q * s, c}}};
  }
  return {{{1.0, d}, {0.0, 1.0}}};
}

/// Derivative jump (c - E nu^2) psi at a site.
inline Mat2 jump_matrix(double c, double nu2, double E) { return {{{1.0, 0.0}, {c - E * nu2, 1.0}}}; }

namespace detail {
inline void check_overflow(const Mat2& m) {
  for (const auto& row : m) {
    for (double v : row) {
      if (!(std::abs(v) <= 1e300)) throw OverflowError("transfer matrix entries exceed 1e300");
    }
  }
}
}  // namespace detail

/// Ordered product of (propagate . jump) around the ring, starting just
/// before site `start` and composing left-to-right in site order.
inline Mat2 chain_monodromy(const ChainSpec& chain, double E, std::size_t start = 0) {
  const Mat2 P = free_propagator(E, chain.spacing());
  Mat2 m{{{1.0, 0.0}, {0.0, 1.0}}};
  for (std::size_t i = 0; i < chain.N(); ++i) {
    const std::size_t n = (start + i) % chain.N();
    m = P * (jump_matrix(chain.coupling(n), chain.nu_squared(n), E) * m);
    detail::check_overflow(m);
  }
  return m;
}

inline double ring_trace(const ChainSpec& chain, double E, std::size_t start = 0) {
  return trace(chain_monodromy(chain, E, start));
}

struct ContinuumOptions {
  double rel_tol = 1e-13;
  double abs_tol = 1e-15;
};

/// Monodromy of -psi'' + V(x)(1 - E nu^2) psi = E psi over one period, from
/// the fundamental solutions started at -L/2.
inline Mat2 continuum_monodromy(const Envelope& V, double nu, double L, double E, ContinuumOptions opts = {}) {
  const double coupling = 1.0 - E * nu * nu;
  auto rhs = [&](double x, const OdeState<4>& y) {
    const double u = V(x) * coupling - E;
    return OdeState<4>{y[1], u * y[0], y[3], u * y[2]};
  };
  OdeTolerances tol;
  tol.rel = opts.rel_tol;
  tol.abs = opts.abs_tol;
  tol.min_step = 1e-12 * L;
  tol.max_step = L / 16;
  DormandPrince<4> dp(tol);
  double h = L / 64;
  const auto y = dp.advance(rhs, -0.5 * L, OdeState<4>{1.0, 0.0, 0.0, 1.0}, 0.5 * L, h);
  const Mat2 m{{{y[0], y[2]}, {y[1], y[3]}}};
  detail::check_overflow(m);
  return m;
}

/// Scan policy for trace(E) = 2 cos(twist). twist = 0 is periodic, pi antiperiodic.
struct ScanOptions {
  double twist = 0.0;
  std::optional<double> e_min;  // default -10 / L^2
  std::optional<double> e_max;  // default (2 pi (count + 5) / L)^2
  std::optional<double> step;   // default (pi / L)^2 / 40
};

struct ChainSpectrum {
  std::vector<double> energies;
  std::vector<bool> degenerate;       // member of a closed-gap pair
  bool coupling_sign_flip = false;    // 1 - E nu^2 changed sign inside the scanned window
  std::vector<std::string> warnings;
};

namespace detail {

/// Roots of trace(M(E)) - 2 cos(twist), with closed gaps (M = cos(twist) I)
/// reported twice.
template <class Monodromy>
ChainSpectrum periodic_spectrum(Monodromy&& monodromy, std::size_t count, double L, double nu, const ScanOptions& o) {
  if (count == 0) throw DomainError("count must be >= 1");
  const double target = 2.0 * std::cos(o.twist);
  const double e_min = o.e_min.value_or(-10.0 / (L * L));
  const double two_pi_over_L = 2.0 * std::numbers::pi / L;
  const double e_max = o.e_max.value_or(std::pow(two_pi_over_L * static_cast<double>(count + 5), 2));
  const double step = o.step.value_or(std::pow(std::numbers::pi / L, 2) / 40.0);
  if (!(e_max > e_min) || !(step > 0.0)) throw DomainError("empty energy scan window");

  auto f = [&](double E) { return trace(monodromy(E)) - target; };
  const double tol = 1e-13 * std::max({1.0, std::abs(e_min)});
  const auto raw = scan_roots(f, e_min, step, e_max, count, tol, 1e-9);

  const double ct = std::cos(o.twist);
  auto closed_gap = [&](double E) {
    const Mat2 m = monodromy(E);
    const double s = std::max(std::sqrt(std::abs(E)), 1.0 / L);
    return std::abs(m[0][1]) * s + std::abs(m[1][0]) / s + std::abs(m[0][0] - ct) + std::abs(m[1][1] - ct) < 1e-6;
  };

  ChainSpectrum out;
  for (const auto& r : raw) {
    double E = r.x;
    if (!out.energies.empty() && std::abs(E - out.energies.back()) <= 1e-9 * std::max(1.0, std::abs(E))) continue;
    if (closed_gap(E)) {
      // a touch that rounds above zero is bisected into two nearly equal roots
      if (!out.degenerate.empty() && out.degenerate.back() && std::abs(E - out.energies.back()) < step) continue;
      // sharpen on the sign change of the upper off-diagonal entry
      auto m12 = [&](double e) { return monodromy(e)[0][1]; };
      const double lo = E - 0.5 * step, hi = E + 0.5 * step;
      if ((m12(lo) < 0) != (m12(hi) < 0)) {
        const double refined = bisect(m12, lo, hi, tol);
        if (closed_gap(refined)) E = refined;
      }
      out.energies.insert(out.energies.end(), {E, E});
      out.degenerate.insert(out.degenerate.end(), {true, true});
    } else {
      out.energies.push_back(E);
      out.degenerate.push_back(false);
    }
  }
  if (out.energies.size() < count) {
    throw BracketError("found " + std::to_string(out.energies.size()) + " of " + std::to_string(count) +
                       " levels below the scan ceiling E = " + std::to_string(e_max));
  }
  out.energies.resize(count);
  out.degenerate.resize(count);

  if (nu > 0.0) {
    const double flip = 1.0 / (nu * nu);
    if (flip > e_min && flip < out.energies.back()) {
      out.coupling_sign_flip = true;
      out.warnings.push_back("NonMonotone: coupling factor 1 - E nu^2 changes sign at E = " + std::to_string(flip));
    }
  }
  return out;
}

}  // namespace detail

inline ChainSpectrum solve_chain_spectrum(const ChainSpec& chain, std::size_t count, const ScanOptions& opts = {}) {
  return detail::periodic_spectrum([&](double E) { return chain_monodromy(chain, E); }, count, chain.L(), chain.nu(),
                                   opts);
}

inline ChainSpectrum solve_continuum(const Envelope& V, double nu, double L, std::size_t count,
                                     const ScanOptions& opts = {}, ContinuumOptions ode = {}) {
  if (!(L > 0.0)) throw DomainError("continuum needs L > 0");
  if (!(nu >= 0.0)) throw DomainError("continuum needs nu >= 0");
  return detail::periodic_spectrum([&](double E) { return continuum_monodromy(V, nu, L, E, ode); }, count, L, nu,
                                   opts);
}

struct ChainConvergenceRow {
  std::size_t N;
  std::vector<double> E_chain;
  double max_error;
  double observed_order;  // NaN on the first row
};

struct ChainConvergenceTable {
  std::vector<double> E_continuum;
  std::vector<ChainConvergenceRow> rows;

  bool shrinking() const {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      if (!(rows[i].max_error < rows[i - 1].max_error)) return false;
    }
    return true;
  }

  /// Every error ratio under refinement lies in factor * [1 - slack, 1 + slack].
  bool ratios_within(double factor, double slack) const {
    for (std::size_t i = 1; i < rows.size(); ++i) {
      const double r = rows[i - 1].max_error / rows[i].max_error;
      if (!(r >= factor * (1 - slack) && r <= factor * (1 + slack))) return false;
    }
    return rows.size() >= 2;
  }
};

inline ChainConvergenceTable convergence_table(const Envelope& V, double nu, double L,
                                               const std::vector<std::size_t>& N_list, std::size_t count,
                                               const ScanOptions& opts = {}) {
  for (std::size_t i = 1; i < N_list.size(); ++i) {
    if (N_list[i] <= N_list[i - 1]) throw DomainError("N_list must be strictly increasing");
  }
  ChainConvergenceTable t;
  t.E_continuum = solve_continuum(V, nu, L, count, opts).energies;
  for (std::size_t i = 0; i < N_list.size(); ++i) {
    ChainConvergenceRow row{N_list[i], solve_chain_spectrum(ChainSpec(N_list[i], V, nu, L), count, opts).energies,
                            0.0, std::numeric_limits<double>::quiet_NaN()};
    for (std::size_t j = 0; j < count; ++j) row.max_error = std::max(row.max_error, std::abs(row.E_chain[j] - t.E_continuum[j]));
    if (i > 0 && row.max_error > 0.0 && t.rows.back().max_error > 0.0) {
      row.observed_order = std::log(t.rows.back().max_error / row.max_error) /
                           std::log(static_cast<double>(N_list[i]) / static_cast<double>(N_list[i - 1]));
    }
    t.rows.push_back(std::move(row));
  }
  return t;
}

}  // namespace pointlike
