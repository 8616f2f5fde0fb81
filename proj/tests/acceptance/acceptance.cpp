// Acceptance checks. `acceptance 3 7` runs criteria 3 and 7; no arguments runs
// all of them. One line per criterion; exit status 0 only if all pass.
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <functional>
#include <map>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "pointlike/pointlike.hpp"

using namespace pointlike;

namespace {

struct Outcome {
  bool pass = false;
  std::string detail;
};

std::string fmt(double v, int digits = 4) {
  std::ostringstream os;
  os.precision(digits);
  os << v;
  return os.str();
}

const double kAs[] = {1e-2, 3e-3, 1e-3};

Outcome zero_range_convergence() {
  Outcome o{true, ""};
  for (auto [kind, label] : {std::pair{InteractionKind::BosonDelta, "boson"}, {InteractionKind::FermionEta, "fermion"}}) {
    const auto rows = convergence_study(RegulatedPotentialSpec(kind, 1, 1, 1.0), kAs, 4.0);
    bool monotone = true;
    for (std::size_t i = 1; i < rows.size(); ++i) monotone = monotone && rows[i].ok && rows[i].rel_error < rows[i - 1].rel_error;
    const bool ok = rows.back().ok && rows.back().rel_error < 0.05 && monotone;
    o.pass = o.pass && ok;
    o.detail += std::string(label) + " target " + fmt(rows.back().target) + " errors";
    for (const auto& r : rows) o.detail += " " + fmt(r.rel_error, 3);
    o.detail += monotone ? " (monotone)" : " (not monotone)";
    if (kind == InteractionKind::FermionEta) {
      o.detail += ", regularization limit " + fmt(regulated_fermion_limit(RegulatedPotentialSpec(kind, 1, 1, 1.0), 4.0)) +
                  " last estimate " + fmt(rows.back().jump.real());
    }
    o.detail += "; ";
  }
  return o;
}

Outcome energy_dependence() {
  const RegulatedPotentialSpec spec(InteractionKind::BosonDelta, 1, 1, 1e-3);
  const double j0 = extract_connection(integrate(spec, 0.0, {})).jump_coefficient.real();
  const double j4 = extract_connection(integrate(spec, 4.0, {})).jump_coefficient.real();
  const double d = j0 - j4;
  return {std::abs(d - 4.0) <= 0.4, "jump(E=0) - jump(E=4) = " + fmt(d, 6) + " (want 4 +- 0.4)"};
}

Outcome spectrum_gram() {
  // standard-product overlap of the first two boson modes, mpmath at 50 digits
  constexpr double kStdOverlap12 = -0.40728254852506047109;
  Outcome o{true, ""};
  for (const auto& m : {PointlikeModel(InteractionKind::BosonDelta, 1, 1, 1), PointlikeModel(InteractionKind::FermionEta, 1, 1, 1)}) {
    const auto modes = solve_modes(m, 30, m.interacting_parity());
    std::vector<RingFunction> fs;
    for (const auto& md : modes) fs.push_back(mode_function(md, m));
    double worst = 0.0, largest = 0.0;
    for (std::size_t i = 0; i < fs.size(); ++i) {
      for (std::size_t j = i; j < fs.size(); ++j) {
        worst = std::max(worst, std::abs(inner_product(m, fs[i], fs[j]) - (i == j ? 1.0 : 0.0)));
        if (i != j) largest = std::max(largest, std::abs(standard_inner_product(m, fs[i], fs[j])));
      }
    }
    o.pass = o.pass && worst < 1e-8 && largest > 1e-3;
    o.detail += std::string(to_string(m.kind())) + ": |G-I| " + fmt(worst, 3) + ", max standard off-diagonal " + fmt(largest, 4) + "; ";
    if (m.kind() == InteractionKind::BosonDelta) {
      const double g12 = standard_inner_product(m, fs[0], fs[1]).real();
      o.pass = o.pass && std::abs(g12 - kStdOverlap12) < 1e-12;
      o.detail += "<1|2> = " + fmt(g12, 17) + "; ";
    }
  }
  return o;
}

Outcome variational() {
  double worst = 0.0;
  for (const auto& m : {PointlikeModel(InteractionKind::BosonDelta, 1, 1, 1), PointlikeModel(InteractionKind::FermionEta, 1, 1, 1)}) {
    for (const auto& md : solve_modes(m, 30, m.interacting_parity())) {
      worst = std::max(worst, std::abs(energy_functional(m, mode_function(md, m)) - md.E));
    }
  }
  return {worst < 1e-8, "max |functional - k^2| over 2 x 30 modes = " + fmt(worst, 3)};
}

Outcome completeness() {
  const auto r = completeness_check(PointlikeModel(InteractionKind::BosonDelta, 1, 1, 1), 200);
  return {std::abs(r.total - 1.0) < 1e-3,
          "partial " + fmt(r.partial, 10) + " + tail " + fmt(r.tail, 4) + " = " + fmt(r.total, 10)};
}

Outcome capture_curves() {
  std::vector<double> times;
  for (int i = 0; i <= 40; ++i) times.push_back(0.2 * i / 40);
  const auto ring = capture_curve_finite(PointlikeModel(InteractionKind::BosonDelta, 1, 1, 1), times, 1e-4);
  const auto line = capture_curve_infinite(1, 1, times);
  const auto big = capture_curve_finite(PointlikeModel(InteractionKind::BosonDelta, 1, 1, 50), times, 1e-3, 40000);
  double worst = 0.0;
  for (std::size_t i = 0; i < times.size(); ++i) {
    if (times[i] <= 0.05) worst = std::max(worst, std::abs(big.p[i] - line.p[i]) / line.p[i]);
  }
  const bool ok = std::abs(ring.p[0] - 1) < 1e-3 && std::abs(line.p[0] - 1) < 1e-3 && worst < 0.02;
  return {ok, "p(0): L=1 " + fmt(ring.p[0], 8) + ", L=inf " + fmt(line.p[0], 8) + "; L=50 (" + std::to_string(big.modes) +
                  " modes) vs L=inf max rel diff for t <= 0.05 = " + fmt(worst, 3) + "; p(0.2): L=1 " + fmt(ring.p.back()) +
                  ", L=inf " + fmt(line.p.back())};
}

Outcome decay_law() {
  std::vector<double> t, p;
  for (int i = 0; i <= 20; ++i) {
    t.push_back(std::pow(10.0, 1.0 + 2.0 * i / 20));
    p.push_back(capture_probability_infinite(1, 1, t.back()));
  }
  const double s = decay_exponent(t, p);
  return {std::abs(s + 3.0) <= 0.15, "fitted exponent on [10, 1000] = " + fmt(s, 6)};
}

Outcome duality() {
  const PointlikeModel m(InteractionKind::BosonDelta, 1, 1, 1);
  double worst = 0.0;
  for (const auto& md : solve_modes(m, 10, Parity::Even)) worst = std::max(worst, duality_residual(m, md));
  return {worst < 1e-12, "max residual over 10 modes = " + fmt(worst, 3)};
}

Outcome chain_convergence() {
  const auto t = convergence_table(Envelope::cosine(1.0), 0.5, 1.0, {16, 32, 64, 128}, 5);
  std::string d = "errors";
  for (const auto& r : t.rows) d += " N=" + std::to_string(r.N) + ":" + fmt(r.max_error, 3);
  d += "; ratios";
  for (std::size_t i = 1; i < t.rows.size(); ++i) d += " " + fmt(t.rows[i - 1].max_error / t.rows[i].max_error, 3);
  d += " (want 2 +- 30%)";
  return {t.shrinking() && t.ratios_within(2.0, 0.3), d};
}

Outcome cross_solver() {
  std::mt19937_64 rng(20240610);
  std::uniform_real_distribution<double> uE(-4.0, 4.0), ulog(std::log(1e-3), std::log(1e-2)), uc(0.0, 2.0);
  double worst = 0.0;
  for (int draw = 0; draw < 10; ++draw) {
    const RegulatedPotentialSpec spec(InteractionKind::BosonDelta, uc(rng), uc(rng), std::exp(ulog(rng)));
    const double E = uE(rng);
    const auto pic = picard_solve(spec, E, cplx(1.0, 0.3), cplx(-0.4, 0.2));
    const auto shot = integrate(spec, E, {pic.value(1.0), pic.slope(1.0), 1.0});
    double diff = 0.0;
    for (double x : pic.grid()) diff = std::max(diff, std::abs(pic.value(x) - shot.value(x)));
    worst = std::max(worst, diff / pic.sup_norm());
  }
  const double v0 = 1.3, nu = 0.7;
  const auto chain = solve_chain_spectrum(ChainSpec(1, Envelope::constant(v0), nu, 1.0), 10).energies;
  const PointlikeModel m(InteractionKind::BosonDelta, v0, nu * std::sqrt(v0), 1.0);
  std::vector<double> ref;
  for (Parity p : {Parity::Even, Parity::Odd}) {
    for (const auto& md : solve_modes(m, 10, p)) ref.push_back(md.E);
  }
  std::sort(ref.begin(), ref.end());
  double chain_err = 0.0;
  for (std::size_t j = 0; j < chain.size(); ++j) chain_err = std::max(chain_err, std::abs(chain[j] - ref[j]) / std::max(1.0, ref[j]));
  return {worst < 1e-6 && chain_err < 1e-9,
          "Picard vs shooting max rel diff " + fmt(worst, 3) + " over 10 draws; 1-site chain vs roots " + fmt(chain_err, 3)};
}

struct Criterion {
  const char* title;
  double budget_s;
  std::function<Outcome()> run;
};

}  // namespace

int main(int argc, char** argv) {
  const std::map<int, Criterion> criteria{
      {1, {"zero-range convergence of the jump", 60, zero_range_convergence}},
      {2, {"energy dependence of the jump at a = 1e-3", 60, energy_dependence}},
      {3, {"Gram matrices under both inner products", 30, spectrum_gram}},
      {4, {"variational identity", 60, variational}},
      {5, {"completeness", 60, completeness}},
      {6, {"capture probability curves", 120, capture_curves}},
      {7, {"t^-3 decay law", 60, decay_law}},
      {8, {"boson-fermion duality", 60, duality}},
      {9, {"chain convergence to the continuum", 120, chain_convergence}},
      {10, {"cross-solver oracles", 60, cross_solver}},
  };
  std::vector<int> selected;
  for (int i = 1; i < argc; ++i) selected.push_back(std::atoi(argv[i]));
  if (selected.empty()) {
    for (const auto& [id, c] : criteria) selected.push_back(id);
  }

  int failed = 0;
  for (int id : selected) {
    const auto it = criteria.find(id);
    if (it == criteria.end()) {
      std::printf("criterion %d: unknown\n", id);
      ++failed;
      continue;
    }
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
      o = it->second.run();
    } catch (const Error& e) {
      o = {false, std::string(e.name()) + ": " + e.what()};
    }
    const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (secs > it->second.budget_s) {
      o.pass = false;
      o.detail += " runtime over budget";
    }
    std::printf("criterion %d %s: %s | %s | %.2f s\n", id, o.pass ? "PASS" : "FAIL", it->second.title, o.detail.c_str(), secs);
    failed += o.pass ? 0 : 1;
  }
  return failed == 0 ? 0 : 1;
}
