#pragma once

#include <cmath>
#include <fstream>
#include <functional>
#include <limits>
#include <optional>
#include <ostream>
#include <string>
#include <vector>

#include "pointlike/composite_chain.hpp"
#include "pointlike/config.hpp"
#include "pointlike/dynamics.hpp"
#include "pointlike/finite_range_solver.hpp"
#include "pointlike/pointlike_spectrum.hpp"
#include "pointlike/regulated_potential.hpp"

namespace pointlike {

/// CSV table with a '#' metadata block holding the artifact version, the full
/// configuration and free-form notes. Rows are written in shortest
/// round-trip form so identical inputs give identical bytes.
class CsvTable {
 public:
  explicit CsvTable(std::vector<std::string> columns) : columns_(std::move(columns)) {}

  void note(std::string line) { notes_.push_back(std::move(line)); }

  void row(const std::vector<std::string>& cells) {
    if (cells.size() != columns_.size()) throw DomainError("CsvTable: row width mismatch");
    rows_.push_back(cells);
  }

  void write(std::ostream& out, const ExperimentConfig& cfg) const {
    out << "# pointlike " << kVersion << '\n';
    for (const auto& line : split_lines(cfg.to_text())) out << "# " << line << '\n';
    for (const auto& n : notes_) out << "# " << n << '\n';
    write_line(out, columns_);
    for (const auto& r : rows_) write_line(out, r);
  }

 private:
  static std::vector<std::string> split_lines(const std::string& s) {
    std::vector<std::string> out;
    std::size_t start = 0;
    while (start < s.size()) {
      const auto nl = s.find('\n', start);
      out.push_back(s.substr(start, nl - start));
      if (nl == std::string::npos) break;
      start = nl + 1;
    }
    return out;
  }

  static void write_line(std::ostream& out, const std::vector<std::string>& cells) {
    for (std::size_t i = 0; i < cells.size(); ++i) out << (i ? "," : "") << cells[i];
    out << '\n';
  }

  std::vector<std::string> columns_;
  std::vector<std::string> notes_;
  std::vector<std::vector<std::string>> rows_;
};

inline std::string cell(double v) { return format_real(v); }
inline std::string cell(std::size_t v) { return std::to_string(v); }

inline InteractionKind config_kind(const ExperimentConfig& cfg) {
  return cfg.text("model.kind") == "boson" ? InteractionKind::BosonDelta : InteractionKind::FermionEta;
}

inline RegulatedPotentialSpec config_potential(const ExperimentConfig& cfg) {
  return {config_kind(cfg), cfg.real("model.c"), cfg.real("model.nu"), cfg.real("model.a")};
}

inline PointlikeModel config_ring(const ExperimentConfig& cfg) {
  return {config_kind(cfg), cfg.real("model.c"), cfg.real("model.nu"), cfg.real("model.L")};
}

/// x, V_a(x), v_a(x), w_a(x) on a uniform grid. Fermionic grids skip the
/// guard band around the node of v_a.
inline CsvTable run_potential(const ExperimentConfig& cfg) {
  const auto spec = config_potential(cfg);
  const double lo = cfg.real("potential.x_min"), hi = cfg.real("potential.x_max");
  const std::size_t n = cfg.integer("potential.points");
  if (!(hi > lo) || n < 2) throw ConfigError("potential grid needs x_max > x_min and at least two points");
  CsvTable t({"x", "V", "v", "w"});
  std::size_t skipped = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double x = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(n - 1);
    if (std::abs(x) < spec.guard_band()) {
      ++skipped;
      continue;
    }
    t.row({cell(x), cell(eval_potential(spec, x)), cell(eval_v(spec, x)), cell(eval_w(spec, x))});
  }
  if (skipped) t.note("skipped " + std::to_string(skipped) + " points inside the guard band |x| < " + format_real(spec.guard_band()));
  return t;
}

inline CsvTable run_converge(const ExperimentConfig& cfg) {
  const auto spec = config_potential(cfg);
  const auto a_list = cfg.reals("converge.a_list");
  const auto rows = convergence_study(spec, a_list, cfg.real("converge.E"));
  CsvTable t({"a", "jump_re", "jump_im", "target", "rel_error"});
  for (const auto& r : rows) {
    if (!r.ok) t.note("a = " + format_real(r.a) + " failed: " + r.failure);
    t.row({cell(r.a), cell(r.jump.real()), cell(r.jump.imag()), cell(r.target), cell(r.rel_error)});
  }
  t.note(std::string("errors nonincreasing: ") + (errors_nonincreasing(rows) ? "yes" : "no"));
  if (spec.kind() == InteractionKind::FermionEta) {
    t.note("first-order zero-range limit of this regularization: " +
           format_real(regulated_fermion_limit(spec, cfg.real("converge.E"))));
  }
  return t;
}

inline std::vector<Parity> config_parities(const ExperimentConfig& cfg, const PointlikeModel& m) {
  const auto& p = cfg.text("spectrum.parity");
  if (p == "even") return {Parity::Even};
  if (p == "odd") return {Parity::Odd};
  if (p == "both") return {Parity::Even, Parity::Odd};
  return {m.interacting_parity()};
}

inline CsvTable run_spectrum(const ExperimentConfig& cfg) {
  const auto m = config_ring(cfg);
  const std::size_t count = cfg.integer("spectrum.count");
  CsvTable t({"sector", "n", "k", "alpha", "Z", "E"});
  for (Parity p : config_parities(cfg, m)) {
    const auto modes = solve_modes(m, count, p);
    for (std::size_t i = 0; i < modes.size(); ++i) {
      const auto& md = modes[i];
      t.row({to_string(p), cell(i), cell(md.k), cell(md.alpha), cell(md.Z), cell(md.E)});
    }
  }
  return t;
}

inline std::vector<double> config_times(const ExperimentConfig& cfg) {
  const double t0 = cfg.real("evolve.t_min"), t1 = cfg.real("evolve.t_max");
  const std::size_t n = cfg.integer("evolve.points");
  const bool log = cfg.text("evolve.spacing") == "log";
  if (n < 2 || !(t1 > t0) || t0 < 0.0 || (log && !(t0 > 0.0))) {
    throw ConfigError("time grid needs 0 <= t_min < t_max (t_min > 0 for log spacing) and >= 2 points");
  }
  std::vector<double> out(n);
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    out[i] = log ? t0 * std::pow(t1 / t0, s) : t0 + (t1 - t0) * s;
  }
  return out;
}

/// p(t) on the configured grid. L = inf uses the contour integral on the
/// line; a finite L sums the captured state's mode expansion. The optional
/// profile table holds psi(x, t) at evolve.profile_t.
inline CsvTable run_evolve(const ExperimentConfig& cfg, CsvTable* profile = nullptr) {
  const auto times = config_times(cfg);
  const double c = cfg.real("model.c"), nu = cfg.real("model.nu"), L = cfg.real("model.L");
  const bool line = std::isinf(L);
  if (line && config_kind(cfg) != InteractionKind::BosonDelta) {
    throw ModelMismatch("the infinite-line evolution is implemented for the bosonic interaction only");
  }
  CsvTable t({"t", "p"});
  std::function<cplx(double, double)> psi;
  std::optional<FiniteEvolution> ring;
  if (line) {
    InfiniteLineOptions opts;
    opts.rel_tol = cfg.real("evolve.rel_tol");
    const auto r = capture_curve_infinite(c, nu, times, opts);
    for (std::size_t i = 0; i < times.size(); ++i) t.row({cell(times[i]), cell(r.p[i])});
    t.note("L = inf, contour cutoff k = " + format_real(r.k_cutoff) + " at the last time");
    psi = [=](double x, double tt) { return evolve_infinite(c, nu, tt, x, opts); };
  } else {
    const auto m = config_ring(cfg);
    ring.emplace(evolve_finite(m, InitialState::captured(),
                               capture_modes(m, cfg.real("evolve.deficit_target"), cfg.integer("evolve.max_modes"))));
    for (double tt : times) t.row({cell(tt), cell(ring->capture_probability(tt))});
    t.note("modes = " + std::to_string(ring->modes().size()) +
           ", missing weight = " + format_real(1.0 - ring->retained_norm()));
    psi = [&ring](double x, double tt) { return ring->psi(x, tt); };
  }
  if (profile) {
    const double tp = cfg.real("evolve.profile_t"), xm = cfg.real("evolve.profile_x_max");
    const std::size_t n = cfg.integer("evolve.profile_points");
    if (n < 2 || !(xm > 0.0)) throw ConfigError("profile needs x_max > 0 and at least two points");
    if (!line && xm > 0.5 * L) throw ConfigError("profile x_max exceeds the half ring");
    *profile = CsvTable({"x", "re_psi", "im_psi"});
    profile->note("t = " + format_real(tp));
    for (std::size_t i = 0; i < n; ++i) {
      const double x = -xm + 2 * xm * static_cast<double>(i) / static_cast<double>(n - 1);
      const cplx v = psi(x, tp);
      profile->row({cell(x), cell(v.real()), cell(v.imag())});
    }
  }
  return t;
}

inline Envelope config_envelope(const ExperimentConfig& cfg) {
  const auto& kind = cfg.text("chain.envelope");
  if (kind == "const") return Envelope::constant(cfg.real("chain.value"));
  if (kind == "cosine") return Envelope::cosine(cfg.real("model.L"), cfg.real("chain.offset"), cfg.real("chain.amplitude"));
  if (cfg.text("chain.file").empty()) throw ConfigError("chain.envelope = file needs chain.file");
  return Envelope::from_file(cfg.text("chain.file"));
}

inline CsvTable run_chain(const ExperimentConfig& cfg) {
  const double L = cfg.real("model.L"), nu = cfg.real("model.nu");
  if (!std::isfinite(L)) throw ConfigError("chain needs a finite model.L");
  ScanOptions scan;
  scan.twist = cfg.real("chain.twist");
  const auto env = config_envelope(cfg);
  const std::size_t count = cfg.integer("chain.count");
  const auto table = convergence_table(env, nu, L, cfg.integers("chain.N_list"), count, scan);
  CsvTable t({"N", "level", "E_chain", "E_continuum", "abs_error"});
  t.note("envelope " + env.name + " " + env.parameters);
  for (const auto& r : table.rows) {
    t.note("N = " + std::to_string(r.N) + ": max error " + format_real(r.max_error) + ", observed order " +
           format_real(r.observed_order));
    for (std::size_t j = 0; j < count; ++j) {
      t.row({cell(r.N), cell(j), cell(r.E_chain[j]), cell(table.E_continuum[j]),
             cell(std::abs(r.E_chain[j] - table.E_continuum[j]))});
    }
  }
  if (nu > 0.0 && 1.0 / (nu * nu) < table.E_continuum.back()) {
    t.note("NonMonotone: coupling factor 1 - E nu^2 changes sign at E = " + format_real(1.0 / (nu * nu)));
  }
  return t;
}

inline CsvTable run_duality(const ExperimentConfig& cfg) {
  const auto m = config_ring(cfg);
  CsvTable t({"n", "k", "residual"});
  const auto modes = solve_modes(m, cfg.integer("duality.count"), Parity::Even);
  for (std::size_t i = 0; i < modes.size(); ++i) {
    t.row({cell(i), cell(modes[i].k), cell(duality_residual(m, modes[i]))});
  }
  return t;
}

struct PropertyResult {
  std::string module;
  std::string property;
  bool pass = false;
  double value = 0.0;
  double threshold = 0.0;
  std::string error;  // name of the error raised, if any
};

/// Invariant suites of every module, each reduced to one measured value
/// compared against a threshold (value <= threshold passes).
inline std::vector<PropertyResult> run_selftest() {
  struct Check {
    const char* module;
    const char* property;
    double threshold;
    std::function<double()> measure;
  };
  const RegulatedPotentialSpec bos(InteractionKind::BosonDelta, 1, 1, 1e-2);
  const RegulatedPotentialSpec fer(InteractionKind::FermionEta, 1, 1, 1e-2);
  const PointlikeModel ring_b(InteractionKind::BosonDelta, 1, 1, 1);
  const PointlikeModel ring_f(InteractionKind::FermionEta, 1, 1, 1);

  auto wronskian = [](const RegulatedPotentialSpec& s, double sign) {
    double worst = 0.0;
    for (double x : {-0.7, -0.05, -0.004, 0.003, 0.02, 0.4}) {
      // w' by central differences, so the identity is not built in
      const double h = 1e-3 * std::max(s.a(), std::abs(x));
      const auto v = eval_v_jet(s, x);
      const double dw = (eval_w(s, x + h) - eval_w(s, x - h)) / (2 * h);
      worst = std::max(worst, std::abs(v.value * dw - v.d1 * eval_w(s, x) - sign));
    }
    return worst;
  };
  auto gram = [](const PointlikeModel& m) {
    const auto modes = solve_modes(m, 30, m.interacting_parity());
    std::vector<RingFunction> fs;
    for (const auto& md : modes) fs.push_back(mode_function(md, m));
    double worst = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      for (std::size_t j = i; j < fs.size(); ++j) {
        worst = std::max(worst, std::abs(inner_product(m, fs[i], fs[j]) - (i == j ? 1.0 : 0.0)));
      }
    }
    return worst;
  };
  auto variational = [](const PointlikeModel& m) {
    double worst = 0.0;
    for (Parity p : {Parity::Even, Parity::Odd}) {
      for (const auto& md : solve_modes(m, 30, p)) {
        worst = std::max(worst, std::abs(energy_functional(m, mode_function(md, m)) - md.E) / std::max(1.0, md.E));
      }
    }
    return worst;
  };

  const std::vector<Check> checks{
      {"regulated_potential", "boson Wronskian v w' - v' w = 1", 1e-5, [&] { return wronskian(bos, 1.0); }},
      {"regulated_potential", "fermion Wronskian v w' - v' w = -1", 1e-5, [&] { return wronskian(fer, -1.0); }},
      {"regulated_potential", "zero-energy residual of v and w", 1e-6,
       [&] {
         std::vector<double> g;
         for (double x = -0.5; x <= 0.5; x += 0.0173) g.push_back(x);
         return zero_energy_residual(bos, g);
       }},
      {"finite_range_solver", "zero-energy jump equals c at a = 1e-3", 1e-3,
       [&] { return std::abs(extract_connection(integrate(bos.with_range(1e-3), 0.0, {})).jump_coefficient - 1.0); }},
      {"finite_range_solver", "Picard iteration agrees with shooting", 1e-6,
       [&] {
         const auto pic = picard_solve(bos, 1.5, cplx(1.0, 0.3), cplx(-0.4, 0.2));
         const auto shot = integrate(bos, 1.5, {pic.value(1.0), pic.slope(1.0), 1.0});
         double d = 0.0;
         for (double x : pic.grid()) d = std::max(d, std::abs(pic.value(x) - shot.value(x)));
         return d / pic.sup_norm();
       }},
      {"pointlike_spectrum", "boson Gram matrix is the identity (30 modes)", 1e-8, [&] { return gram(ring_b); }},
      {"pointlike_spectrum", "fermion Gram matrix is the identity (30 modes)", 1e-8, [&] { return gram(ring_f); }},
      {"pointlike_spectrum", "boson energy functional equals k^2", 1e-8, [&] { return variational(ring_b); }},
      {"pointlike_spectrum", "fermion energy functional equals k^2", 1e-8, [&] { return variational(ring_f); }},
      {"pointlike_spectrum", "Girardeau-mapped modes meet the fermionic conditions", 1e-12,
       [&] {
         double worst = 0.0;
         for (const auto& md : solve_modes(ring_b, 10, Parity::Even)) worst = std::max(worst, duality_residual(ring_b, md));
         return worst;
       }},
      {"dynamics", "completeness with tail (200 modes)", 1e-3,
       [&] { return std::abs(completeness_check(ring_b, 200).total - 1.0); }},
      {"dynamics", "p(0) = 1 on the line", 1e-12, [] { return std::abs(capture_probability_infinite(1, 1, 0.0) - 1.0); }},
      {"composite_chain", "monodromy determinant after 1000 sites", 1e-10,
       [] {
         const ChainSpec ch(1000, Envelope::cosine(1.0), 0.5, 1.0);
         return std::abs(determinant(chain_monodromy(ch, 33.0)) - 1.0);
       }},
      {"composite_chain", "trace independent of starting site", 1e-10,
       [] {
         const ChainSpec ch(17, Envelope::cosine(1.0), 0.5, 1.0);
         return std::abs(ring_trace(ch, 20.0, 0) - ring_trace(ch, 20.0, 9));
       }},
      {"composite_chain", "one-site chain reproduces pointlike roots", 1e-9,
       [] {
         const auto chain = solve_chain_spectrum(ChainSpec(1, Envelope::constant(1.3), 0.7, 1.0), 6).energies;
         const PointlikeModel m(InteractionKind::BosonDelta, 1.3, 0.7 * std::sqrt(1.3), 1.0);
         std::vector<double> ref;
         for (Parity p : {Parity::Even, Parity::Odd}) {
           for (const auto& md : solve_modes(m, 6, p)) ref.push_back(md.E);
         }
         std::sort(ref.begin(), ref.end());
         double worst = 0.0;
         for (std::size_t j = 0; j < chain.size(); ++j) worst = std::max(worst, std::abs(chain[j] - ref[j]) / std::max(1.0, ref[j]));
         return worst;
       }},
  };

  std::vector<PropertyResult> out;
  for (const auto& c : checks) {
    PropertyResult r{c.module, c.property, false, std::numeric_limits<double>::quiet_NaN(), c.threshold, ""};
    try {
      r.value = c.measure();
      r.pass = r.value <= c.threshold;
    } catch (const Error& e) {
      r.error = e.name();
    }
    out.push_back(r);
  }
  return out;
}

inline CsvTable selftest_table(const std::vector<PropertyResult>& results) {
  CsvTable t({"module", "property", "status", "value", "threshold"});
  for (const auto& r : results) {
    t.row({r.module, r.property, r.pass ? "pass" : (r.error.empty() ? "fail" : "error:" + r.error), cell(r.value),
           cell(r.threshold)});
  }
  return t;
}

}  // namespace pointlike
