#include <gtest/gtest.h>

#include <algorithm>
#include <cmath>
#include <random>
#include <vector>

#include "pointlike/regulated_potential.hpp"

using namespace pointlike;

namespace {

RegulatedPotentialSpec boson(double c, double nu, double a) {
  return {InteractionKind::BosonDelta, c, nu, a};
}
RegulatedPotentialSpec fermion(double c, double nu, double a) {
  return {InteractionKind::FermionEta, c, nu, a};
}

std::vector<double> symmetric_grid(double half, int n, double gap = 0.0) {
  std::vector<double> g;
  for (int i = 0; i < n; ++i) {
    const double x = -half + 2.0 * half * (i + 0.5) / n;
    if (std::abs(x) > gap) g.push_back(x);
  }
  return g;
}

}  // namespace

TEST(RegulatedPotential, SpecValidation) {
  EXPECT_THROW(boson(-1.0, 1.0, 0.1), DomainError);
  EXPECT_THROW(boson(1.0, -1.0, 0.1), DomainError);
  EXPECT_THROW(boson(1.0, 1.0, 0.0), DomainError);
  EXPECT_THROW(fermion(0.0, 1.0, 0.1), DomainError);
  EXPECT_NO_THROW(fermion(1.0, 0.0, 0.1));
}

TEST(RegulatedPotential, PointValues) {
  EXPECT_DOUBLE_EQ(eval_v(boson(0, 0, 0.3), 1.7), 1.0);
  EXPECT_NEAR(eval_v(boson(1, 1, 0.01), 0.0), 1.0 + std::sqrt(50.0), 1e-12);
  EXPECT_EQ(eval_v(fermion(1, 1, 0.01), 0.0), 0.0);
  EXPECT_EQ(eval_potential(boson(0, 0, 0.01), 0.25), 0.0);
  EXPECT_DOUBLE_EQ(eval_w(boson(0, 0, 0.01), 0.37), 0.37);
}

TEST(RegulatedPotential, AnalyticSecondDerivativeMatchesDifferences) {
  std::mt19937_64 rng(7);
  for (auto spec : {boson(1, 1, 0.01), boson(2.5, 0.3, 0.05), fermion(1, 1, 0.01), fermion(3, 0.5, 0.1)}) {
    std::uniform_real_distribution<double> dist(-8 * spec.a(), 8 * spec.a());
    for (int i = 0; i < 100; ++i) {
      double x = dist(rng);
      if (std::abs(x) < 2 * spec.guard_band()) x += 0.01 * spec.a();
      const double h = 2e-3 * spec.a();
      // Stencil roundoff grows like |v| / h^2, so the scale includes |v| / a^2.
      const double scale = std::max({1.0, std::abs(eval_v(spec, x)) / (spec.a() * spec.a())});
      const double fd = (-eval_v(spec, x + 2 * h) + 16 * eval_v(spec, x + h) - 30 * eval_v(spec, x) +
                         16 * eval_v(spec, x - h) - eval_v(spec, x - 2 * h)) / (12 * h * h);
      const double analytic = eval_potential(spec, x) * eval_v(spec, x);
      EXPECT_NEAR(analytic, fd, 1e-9 * scale) << "x = " << x;
    }
  }
}

TEST(RegulatedPotential, ParityAndPositivity) {
  const auto b = boson(1, 1, 0.01);
  const auto f = fermion(1, 1, 0.01);
  for (double x : symmetric_grid(0.5, 400)) {
    EXPECT_NEAR(eval_v(b, x), eval_v(b, -x), 1e-12);
    EXPECT_GE(eval_v(b, x), 1.0);
    EXPECT_NEAR(eval_w(b, x), -eval_w(b, -x), 1e-12);
    EXPECT_NEAR(eval_v(f, x), -eval_v(f, -x), 1e-12);
    EXPECT_NEAR(eval_w(f, x), eval_w(f, -x), 1e-12);
  }
}

TEST(RegulatedPotential, TailDecay) {
  // Exponentially small beyond the core: the core dip is ~1e4 at a = 0.01.
  const auto wide = boson(1, 1, 1.0);
  for (double x : {20.0, 25.0, 40.0, 100.0, 1e3}) EXPECT_LT(std::abs(eval_potential(wide, x)), 1e-8);
  const auto narrow = boson(1, 1, 0.01);
  for (double m : {40.0, 60.0, 1e3}) EXPECT_LT(std::abs(eval_potential(narrow, m * 0.01)), 1e-8);
  EXPECT_LT(eval_potential(narrow, 0.0), -1e3);
  EXPECT_TRUE(std::isfinite(eval_potential(narrow, 1e6)));
}

TEST(RegulatedPotential, PointlikeProperty) {
  double prev = std::abs(eval_potential(boson(1, 1, 1e-2), 0.1));
  for (double a : {1e-3, 1e-4}) {
    const double now = std::abs(eval_potential(boson(1, 1, a), 0.1));
    EXPECT_LE(now, prev / 10.0);
    prev = now;
  }
}

TEST(RegulatedPotential, FermionGuardBand) {
  const auto f = fermion(1, 1, 0.01);
  EXPECT_THROW(eval_potential(f, 0.0), DomainError);
  EXPECT_THROW(eval_potential(f, 5e-6), DomainError);
  EXPECT_NO_THROW(eval_potential(f, 2e-5));
}

TEST(RegulatedPotential, WronskianIsConstant) {
  std::mt19937_64 rng(11);
  for (auto spec : {boson(1, 1, 0.01), boson(0.5, 2, 0.02), fermion(1, 1, 0.01), fermion(2, 0, 0.01)}) {
    const double target = spec.kind() == InteractionKind::BosonDelta ? 1.0 : -1.0;
    std::uniform_real_distribution<double> dist(-0.8, 0.8);
    for (int i = 0; i < 20; ++i) {
      const double x = i < 10 ? dist(rng) : dist(rng) * 0.05;
      const Jet v = eval_v_jet(spec, x);
      const WValue w = eval_w_jet(spec, x);
      EXPECT_NEAR(v.value * w.slope - v.d1 * w.value, target, 1e-8) << "x = " << x;
    }
  }
}

TEST(RegulatedPotential, WApproachesIdentity) {
  double prev = 1.0;
  for (double a : {1e-2, 1e-3, 1e-4}) {
    const double err = std::abs(eval_w(boson(1, 1, a), 0.2) - 0.2);
    EXPECT_LT(err, prev);
    prev = err;
  }
  EXPECT_LT(prev, 0.05);
}

TEST(RegulatedPotential, ZeroEnergyResidual) {
  const auto grid = symmetric_grid(0.5, 1000);
  EXPECT_LT(zero_energy_residual(boson(0, 0, 0.01), grid), 1e-8);
  EXPECT_LT(zero_energy_residual(boson(1, 1, 0.01), grid), 1e-6);
  const auto fgrid = symmetric_grid(0.5, 1000, 2e-5);
  EXPECT_LT(zero_energy_residual(fermion(1, 0, 0.01), fgrid), 1e-6);
  EXPECT_LT(zero_energy_residual(fermion(1, 1, 0.01), fgrid), 1e-6);
}

TEST(RegulatedPotential, UserShapesMatchBuiltin) {
  auto shapes = ShapeFunctions::sampled([](double s) { return std::tanh(s); },
                                        [](double s) { return 0.5 / std::pow(std::cosh(s), 2); },
                                        "user-tanh");
  RegulatedPotentialSpec user(InteractionKind::BosonDelta, 1, 1, 0.1, shapes);
  const auto builtin = boson(1, 1, 0.1);
  for (double x : {-0.3, -0.05, 0.0, 0.02, 0.4}) {
    EXPECT_NEAR(eval_v(user, x), eval_v(builtin, x), 1e-12);
    EXPECT_NEAR(eval_potential(user, x), eval_potential(builtin, x),
                1e-5 * std::max(1.0, std::abs(eval_potential(builtin, x))));
  }
  auto bad = ShapeFunctions::sampled([](double s) { return std::tanh(s); },
                                     [](double s) { return 1.0 / std::pow(std::cosh(s), 2); }, "bad");
  EXPECT_THROW(RegulatedPotentialSpec(InteractionKind::BosonDelta, 1, 1, 0.1, bad), DomainError);
}
