#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numbers>
#include <queue>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "pointlike/errors.hpp"

namespace pointlike {

using cplx = std::complex<double>;

template <class T>
struct QuadratureResult {
  T value{};
  double error = 0.0;
  int intervals = 0;
};

struct QuadratureOptions {
  double rel_tol = 1e-10;
  double abs_tol = 0.0;
  int max_intervals = 4000;
};

namespace detail {

// 15-point Kronrod rule with embedded 7-point Gauss rule (QUADPACK qk15).
inline constexpr std::array<double, 8> kKronrodNodes = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kKronrodWeights = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kGaussWeights = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <class T>
struct Segment {
  double lo, hi;
  T value;
  double error;
  bool operator<(const Segment& other) const { return error < other.error; }
};

template <class T, class F>
Segment<T> kronrod15(F& f, double lo, double hi) {
  const double center = 0.5 * (lo + hi);
  const double half = 0.5 * (hi - lo);
  const T fc = f(center);
  T kronrod = fc * kKronrodWeights[7];
  T gauss = fc * kGaussWeights[3];
  for (int j = 0; j < 7; ++j) {
    const double dx = half * kKronrodNodes[j];
    const T sum = f(center - dx) + f(center + dx);
    kronrod += sum * kKronrodWeights[j];
    if (j % 2 == 1) gauss += sum * kGaussWeights[j / 2];
  }
  kronrod *= half;
  gauss *= half;
  return {lo, hi, kronrod, std::abs(kronrod - gauss)};
}

}  // namespace detail

/// Globally adaptive Gauss-Kronrod integration over consecutive breakpoints.
/// The interval with the largest error estimate is bisected until the summed
/// estimate is below max(abs_tol, rel_tol * |value|). Works for real and
/// complex integrands.
template <class F>
auto integrate_adaptive(F&& f, std::span<const double> breakpoints,
                        const QuadratureOptions& opts = {}) {
  using T = std::decay_t<decltype(f(breakpoints[0]))>;
  if (breakpoints.size() < 2) throw DomainError("integrate_adaptive: need at least two breakpoints");
  std::priority_queue<detail::Segment<T>> heap;
  T total{};
  double error = 0.0;
  for (std::size_t i = 0; i + 1 < breakpoints.size(); ++i) {
    if (breakpoints[i + 1] == breakpoints[i]) continue;
    auto seg = detail::kronrod15<T>(f, breakpoints[i], breakpoints[i + 1]);
    total += seg.value;
    error += seg.error;
    heap.push(seg);
  }
  int intervals = static_cast<int>(heap.size());
  auto target = [&] { return std::max(opts.abs_tol, opts.rel_tol * std::abs(total)); };
  while (!heap.empty() && error > target()) {
    if (intervals >= opts.max_intervals) {
      throw QuadratureError("adaptive quadrature did not reach tolerance: error estimate " +
                            std::to_string(error) + " after " + std::to_string(intervals) +
                            " intervals");
    }
    auto worst = heap.top();
    heap.pop();
    const double mid = 0.5 * (worst.lo + worst.hi);
    if (mid <= worst.lo || mid >= worst.hi) {
      throw QuadratureError("adaptive quadrature: interval collapsed at x = " +
                            std::to_string(worst.lo));
    }
    auto left = detail::kronrod15<T>(f, worst.lo, mid);
    auto right = detail::kronrod15<T>(f, mid, worst.hi);
    total += left.value + right.value - worst.value;
    error += left.error + right.error - worst.error;
    heap.push(left);
    heap.push(right);
    ++intervals;
  }
  // Re-sum to shed accumulated cancellation from the running updates.
  T resummed{};
  double err = 0.0;
  while (!heap.empty()) {
    resummed += heap.top().value;
    err += heap.top().error;
    heap.pop();
  }
  return QuadratureResult<T>{resummed, err, intervals};
}

template <class F>
auto integrate_adaptive(F&& f, double lo, double hi, const QuadratureOptions& opts = {}) {
  const std::array<double, 2> pts{lo, hi};
  return integrate_adaptive(std::forward<F>(f), std::span<const double>(pts), opts);
}

/// Piecewise polynomial representation on panels with Chebyshev-Lobatto
/// nodes. Adjacent panels share their endpoint node. Used for spectrally
/// accurate cumulative integrals of sampled functions.
class PanelGrid {
 public:
  PanelGrid(std::vector<double> breaks, int degree = 12)
      : breaks_(std::move(breaks)), degree_(degree) {
    if (breaks_.size() < 2 || degree_ < 2) throw DomainError("PanelGrid: invalid layout");
    if (!std::is_sorted(breaks_.begin(), breaks_.end()) ||
        std::adjacent_find(breaks_.begin(), breaks_.end()) != breaks_.end()) {
      throw DomainError("PanelGrid: breaks must be strictly increasing");
    }
    const int m = degree_;
    ref_.resize(m + 1);
    bary_.resize(m + 1);
    for (int j = 0; j <= m; ++j) {
      ref_[j] = -std::cos(std::numbers::pi * j / m);
      bary_[j] = ((j % 2) ? -1.0 : 1.0) * ((j == 0 || j == m) ? 0.5 : 1.0);
    }
    // integ_[i][j] = int_{-1}^{t_i} l_j(t) dt, by 7-point Gauss on [-1, t_i]
    // (exact for the degree <= 13 Lagrange basis).
    static constexpr std::array<double, 7> gx = {
        -detail::kKronrodNodes[1], -detail::kKronrodNodes[3], -detail::kKronrodNodes[5], 0.0,
        detail::kKronrodNodes[5],  detail::kKronrodNodes[3],  detail::kKronrodNodes[1]};
    static constexpr std::array<double, 7> gw = {
        detail::kGaussWeights[0], detail::kGaussWeights[1], detail::kGaussWeights[2],
        detail::kGaussWeights[3], detail::kGaussWeights[2], detail::kGaussWeights[1],
        detail::kGaussWeights[0]};
    if (m > 13) throw DomainError("PanelGrid: degree above 13 not supported");
    integ_.assign((m + 1) * (m + 1), 0.0);
    std::vector<double> basis(m + 1);
    for (int i = 1; i <= m; ++i) {
      const double half = 0.5 * (ref_[i] + 1.0);
      for (int q = 0; q < 7; ++q) {
        const double t = -1.0 + half * (gx[q] + 1.0);
        lagrange_basis(t, basis);
        for (int j = 0; j <= m; ++j) integ_[i * (m + 1) + j] += half * gw[q] * basis[j];
      }
    }
    nodes_.reserve(panels() * m + 1);
    for (std::size_t p = 0; p < panels(); ++p) {
      const double lo = breaks_[p], hi = breaks_[p + 1];
      for (int j = (p == 0 ? 0 : 1); j <= m; ++j) {
        nodes_.push_back(j == 0 ? lo : j == m ? hi : 0.5 * (lo + hi) + 0.5 * (hi - lo) * ref_[j]);
      }
    }
  }

  std::size_t panels() const { return breaks_.size() - 1; }
  int degree() const { return degree_; }
  std::span<const double> nodes() const { return nodes_; }
  std::span<const double> breaks() const { return breaks_; }

  /// Index of the node located exactly at x (which must be a break).
  std::size_t break_index(double x) const {
    auto it = std::find(breaks_.begin(), breaks_.end(), x);
    if (it == breaks_.end()) throw DomainError("PanelGrid: origin is not a break point");
    return static_cast<std::size_t>(it - breaks_.begin()) * degree_;
  }

  /// I[i] = integral of f from node `origin` (a break) to node i.
  template <class T>
  std::vector<T> cumulative(std::span<const T> f, std::size_t origin) const {
    const int m = degree_;
    std::vector<T> out(nodes_.size(), T{});
    // Forward from origin panel by panel, then backward.
    const std::size_t p0 = origin / m;
    for (std::size_t p = p0; p < panels(); ++p) {
      const double half = 0.5 * (breaks_[p + 1] - breaks_[p]);
      const std::size_t base = p * m;
      for (int i = 1; i <= m; ++i) {
        T acc{};
        for (int j = 0; j <= m; ++j) acc += integ_[i * (m + 1) + j] * f[base + j];
        out[base + i] = out[base] + half * acc;
      }
    }
    for (std::size_t p = p0; p-- > 0;) {
      const double half = 0.5 * (breaks_[p + 1] - breaks_[p]);
      const std::size_t base = p * m;
      T total{};
      for (int j = 0; j <= m; ++j) total += integ_[m * (m + 1) + j] * f[base + j];
      const T left = out[base + m] - half * total;
      out[base] = left;
      for (int i = 1; i < m; ++i) {
        T acc{};
        for (int j = 0; j <= m; ++j) acc += integ_[i * (m + 1) + j] * f[base + j];
        out[base + i] = left + half * acc;
      }
    }
    return out;
  }

  /// Barycentric interpolation of nodal values at x.
  template <class T>
  T interpolate(std::span<const T> f, double x) const {
    if (x < breaks_.front() || x > breaks_.back()) throw DomainError("PanelGrid: x outside grid");
    auto it = std::upper_bound(breaks_.begin(), breaks_.end(), x);
    std::size_t p = static_cast<std::size_t>(std::max<std::ptrdiff_t>(it - breaks_.begin() - 1, 0));
    if (p >= panels()) p = panels() - 1;
    const double lo = breaks_[p], hi = breaks_[p + 1];
    const double t = (2.0 * x - lo - hi) / (hi - lo);
    const std::size_t base = p * degree_;
    T num{};
    double den = 0.0;
    for (int j = 0; j <= degree_; ++j) {
      const double d = t - ref_[j];
      if (d == 0.0) return f[base + j];
      const double w = bary_[j] / d;
      num += w * f[base + j];
      den += w;
    }
    return num / den;
  }

 private:
  void lagrange_basis(double t, std::vector<double>& out) const {
    double den = 0.0;
    for (int j = 0; j <= degree_; ++j) {
      const double d = t - ref_[j];
      if (d == 0.0) {
        std::fill(out.begin(), out.end(), 0.0);
        out[j] = 1.0;
        return;
      }
      out[j] = bary_[j] / d;
      den += out[j];
    }
    for (auto& v : out) v /= den;
  }

  std::vector<double> breaks_;
  int degree_;
  std::vector<double> ref_, bary_, integ_, nodes_;
};

}  // namespace pointlike
