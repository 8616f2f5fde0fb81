#include <gtest/gtest.h>

#include <cmath>
#include <random>
#include <vector>

#include "pointlike/finite_range_solver.hpp"

using namespace pointlike;

namespace {

RegulatedPotentialSpec boson(double c, double nu, double a) { return {InteractionKind::BosonDelta, c, nu, a}; }
RegulatedPotentialSpec fermion(double c, double nu, double a) { return {InteractionKind::FermionEta, c, nu, a}; }

double max_rel_diff(const WaveSolution& ref, const WaveSolution& other) {
  double diff = 0.0;
  for (double x : ref.grid()) {
    if (x < other.x_min() || x > other.x_max()) continue;
    diff = std::max(diff, std::abs(ref.value(x) - other.value(x)));
  }
  return diff / ref.sup_norm();
}

}  // namespace

TEST(FiniteRange, GridLayout) {
  const auto spec = boson(1, 1, 1e-3);
  const auto g = solution_grid(spec, 1.0);
  EXPECT_EQ(g.front(), -1.0);
  EXPECT_EQ(g.back(), 1.0);
  for (std::size_t i = 1; i < g.size(); ++i) {
    ASSERT_GT(g[i], g[i - 1]);
    if (std::max(std::abs(g[i]), std::abs(g[i - 1])) <= 10e-3) {
      EXPECT_LE(g[i] - g[i - 1], 1e-3 / 50 * (1 + 1e-9));
    }
    EXPECT_LE(g[i] - g[i - 1], 0.01 + 1e-12);
  }
}

TEST(FiniteRange, FreeParticle) {
  const double k = 3.0;
  const auto sol = integrate(boson(0, 0, 1e-2), k * k, {std::cos(k), -k * std::sin(k), 1.0});
  for (double x = -1.0; x <= 1.0; x += 0.0137) EXPECT_NEAR(std::abs(sol.value(x) - std::cos(k * x)), 0.0, 1e-8);
  const auto est = extract_connection(sol);
  EXPECT_NEAR(std::abs(est.jump_coefficient), 0.0, 1e-8);
  EXPECT_NEAR(est.psi_plus.real(), 1.0, 1e-8);
  EXPECT_NEAR(est.psi_minus.real(), 1.0, 1e-8);
  EXPECT_LT(est.fit_residual, 1e-8);
}

TEST(FiniteRange, Linearity) {
  const auto spec = boson(1, 1, 1e-2);
  const auto s1 = integrate(spec, 2.0, {1.0, 0.5, 1.0});
  const auto s2 = integrate(spec, 2.0, {2.0, 1.0, 1.0});
  for (std::size_t i = 0; i < s1.grid().size(); i += 37) {
    EXPECT_NEAR(std::abs(s2.values()[i] - 2.0 * s1.values()[i]), 0.0, 1e-13 * std::abs(s2.values()[i]) + 1e-300);
  }
}

TEST(FiniteRange, SchroedingerResidual) {
  for (auto spec : {boson(1, 1, 1e-2), fermion(1, 1, 1e-2)}) {
    const double E = 4.0;
    const auto sol = integrate(spec, E, {});
    const double norm = sol.sup_norm();
    double worst = 0.0;
    const auto g = sol.grid();
    for (std::size_t i = 2; i + 2 < g.size(); i += 3) {
      const double x = g[i];
      if (std::abs(x) < 20 * spec.guard_band()) continue;
      const double h = std::min(g[i + 1] - g[i], g[i] - g[i - 1]) / 4.0;
      const cplx d2 = (-sol.value(x + 2 * h) + 16.0 * sol.value(x + h) - 30.0 * sol.value(x) +
                       16.0 * sol.value(x - h) - sol.value(x - 2 * h)) / (12 * h * h);
      worst = std::max(worst, std::abs(-d2 + (eval_potential(spec, x) - E) * sol.value(x)) / norm);
    }
    // scale of psi'' in the core is ~ |V| ~ 1/a^2
    EXPECT_LT(worst, 1e-6 / (spec.a() * spec.a()));
  }
}

TEST(FiniteRange, PlainDeltaAtZeroEnergy) {
  const auto sol = integrate(boson(1, 0, 1e-3), 0.0, {1.0, 0.5, 1.0});
  EXPECT_NEAR(extract_connection(sol).jump_coefficient.real(), 1.0, 1e-3);
}

TEST(FiniteRange, ZeroEnergyJumpIsExactlyC) {
  const auto sol = integrate(boson(1, 1, 1e-3), 0.0, {1.0, 0.5, 1.0});
  EXPECT_NEAR(extract_connection(sol).jump_coefficient.real(), 1.0, 1e-3);
}

TEST(FiniteRange, EnergyDependenceAtSmallRange) {
  // The finite-range correction for nu > 0 decays like sqrt(a); at a = 1e-4 the
  // E = 4 estimate is within 6% of c - E nu^2.
  const auto spec = boson(1, 1, 1e-4);
  const double j0 = extract_connection(integrate(spec, 0.0, {})).jump_coefficient.real();
  const double j4 = extract_connection(integrate(spec, 4.0, {})).jump_coefficient.real();
  EXPECT_NEAR(j0, 1.0, 1e-3);
  EXPECT_NEAR(j4, -3.0, 0.06 * 3.0);
  EXPECT_NEAR(j0 - j4, 4.0, 0.4);
}

TEST(FiniteRange, ConvergenceOfPlainDelta) {
  const std::vector<double> as{1e-2, 1e-3, 1e-4};
  const auto rows = convergence_study(boson(1, 0, 1.0), as, 1.0);
  ASSERT_TRUE(errors_nonincreasing(rows));
  EXPECT_LT(rows.back().rel_error, 1e-3);
}

TEST(FiniteRange, SqrtRateForEnergyDependentJump) {
  const std::vector<double> as{1e-2, 1e-3, 1e-4};
  const auto rows = convergence_study(boson(1, 1, 1.0), as, 4.0);
  ASSERT_TRUE(errors_nonincreasing(rows, 0.0));
  // Error ratio per decade close to sqrt(10).
  for (std::size_t i = 1; i < rows.size(); ++i) {
    const double ratio = rows[i - 1].rel_error / rows[i].rel_error;
    EXPECT_GT(ratio, 2.0);
    EXPECT_LT(ratio, 4.5);
  }
  EXPECT_NEAR(sqrt_extrapolated_jump(rows).real(), -3.0, 0.05);
}

TEST(FiniteRange, TransparentPoint) {
  const std::vector<double> as{1e-2, 1e-3, 1e-4};
  const auto rows = convergence_study(boson(2, 1, 1.0), as, 2.0);
  ASSERT_TRUE(rows.back().ok);
  EXPECT_LT(std::abs(rows.back().jump), std::abs(rows.front().jump));
}

TEST(FiniteRange, FermionDiscontinuity) {
  const std::vector<double> as{1e-2, 1e-3, 1e-4};
  const auto rows = convergence_study(fermion(1, 1, 1.0), as, 4.0);
  for (const auto& r : rows) ASSERT_TRUE(r.ok) << r.failure;
  EXPECT_NEAR(rows.back().target, -4.0 / 3.0, 1e-15);
  const auto zero = convergence_study(fermion(1, 0, 1.0), as, 4.0);
  EXPECT_LT(zero.back().rel_error, 1e-2);
  EXPECT_TRUE(errors_nonincreasing(zero));
}

TEST(FiniteRange, FermionCoreWeight) {
  EXPECT_NEAR(fermion_core_weight(ShapeFunctions::tanh_pair()), 1.0 / 6.0, 1e-12);
  EXPECT_DOUBLE_EQ(regulated_fermion_limit(fermion(1, 1, 1e-3), 0.0), 4.0);
  EXPECT_THROW(regulated_fermion_limit(boson(1, 1, 1e-3), 0.0), ModelMismatch);
}

TEST(FiniteRange, FermionLimitFollowsCoreWeight) {
  // With nu > 0 and E != 0 the regulated ratio heads to
  // 4 / (c - E nu^2 c^2 W / 2) rather than 4 / (c - E nu^2).
  for (auto [c, E] : {std::pair{1.0, 4.0}, {1.0, -3.0}, {2.0, 4.0}}) {
    const double limit = regulated_fermion_limit(fermion(c, 1, 1.0), E);
    const double naive = jump_target(InteractionKind::FermionEta, c, 1, E);
    double prev = 1e300;
    for (double a : {1e-3, 1e-4, 1e-5}) {
      const double J = extract_connection(integrate(fermion(c, 1, a), E, {})).jump_coefficient.real();
      const double err = std::abs(J - limit) / std::abs(limit);
      EXPECT_LT(err, prev) << "c=" << c << " E=" << E << " a=" << a;
      prev = err;
    }
    EXPECT_LT(prev, 0.06) << "c=" << c << " E=" << E;
    EXPECT_GT(std::abs(limit - naive), 0.5);
  }
}

TEST(Picard, ZeroEnergyIsClosedForm) {
  const auto spec = boson(1, 1, 1e-2);
  const auto sol = picard_solve(spec, 0.0, 1.0, 0.5);
  for (double x : {-0.7, -0.01, 0.0, 0.003, 0.4}) {
    EXPECT_NEAR(std::abs(sol.value(x) - (eval_v(spec, x) + 0.5 * eval_w(spec, x))), 0.0, 1e-9);
  }
}

TEST(Picard, OddSeedStaysOdd) {
  const auto sol = picard_solve(boson(1, 1, 1e-2), -1.0, 0.0, 1.0);
  EXPECT_EQ(std::abs(sol.value(0.0)), 0.0);
  for (double x : {0.01, 0.2, 0.9}) EXPECT_NEAR(std::abs(sol.value(x) + sol.value(-x)), 0.0, 1e-12);
}

TEST(Picard, RejectsFermion) { EXPECT_THROW(picard_solve(fermion(1, 1, 1e-2), 1.0, 1.0, 0.0), ModelMismatch); }

TEST(Picard, AgreesWithShooting) {
  std::mt19937_64 rng(2024);
  std::uniform_real_distribution<double> uE(-4.0, 4.0), ulog(std::log(1e-3), std::log(1e-2)), uc(0.0, 2.0);
  for (int draw = 0; draw < 4; ++draw) {
    const auto spec = boson(uc(rng), uc(rng), std::exp(ulog(rng)));
    const double E = uE(rng);
    const auto pic = picard_solve(spec, E, cplx(1.0, 0.3), cplx(-0.4, 0.2));
    const auto shot = integrate(spec, E, {pic.value(1.0), pic.slope(1.0), 1.0});
    EXPECT_LT(max_rel_diff(pic, shot), 1e-6);
  }
}
