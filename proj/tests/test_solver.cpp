#include <gtest/gtest.h>

#include <chrono>

#include "support.hpp"

using namespace contagion;
using namespace testing_support;

namespace {

double bisect(const std::function<double(double)>& h, double lo, double hi) {
  for (int i = 0; i < 200; ++i) {
    const double mid = 0.5 * (lo + hi);
    if ((h(lo) > 0) == (h(mid) > 0))
      lo = mid;
    else
      hi = mid;
  }
  return 0.5 * (lo + hi);
}

std::pair<double, double> reduced(const std::string& name, const RootVector& z) {
  return bundled_reduction(name).axes.project(z);
}

}  // namespace

TEST(LeastFixedPoint, NoInitialDefaultsStaysAtZero) {
  const ModelSpec s = homogeneous(2, 1.5, 1.5, Capital(2));
  const FixedPointSolution sol = least_fixed_point(s, 0.0, nullptr);
  EXPECT_EQ(sol.z.sup_norm(), 0.0);
  EXPECT_LE(sol.iterations, 2u);
}

TEST(LeastFixedPoint, ScalarBisectionOracle) {
  const double q = 0.1;
  const ModelSpec s = apply_shock(homogeneous(1, 1.0, 1.0, Capital(1), q));
  SolverOptions o;
  o.tol = 1e-13;
  const FixedPointSolution sol = smallest_root(s, o);
  const double ref = bisect([&](double z) { return q + (1 - q) * (1 - std::exp(-z)) - z; }, 1e-9, 1.0);
  EXPECT_NEAR(sol.z[0], ref, 1e-10);
  EXPECT_TRUE(sol.monotone);
}

TEST(LeastFixedPoint, UniqueJointRootWithTwentyPercentDefaults) {
  const ModelSpec s = apply_shock(bundled("unique_root"));
  const FixedPointSolution sol = smallest_root(s);
  const CoordArray f = f_eval(s, sol.z);
  EXPECT_LT(std::abs(f[(Coord{0, 0, 0})]), 1e-9);
  EXPECT_LT(std::abs(f[(Coord{1, 0, 0})]), 1e-9);
  const EpsilonLimit lim = z_star(s);
  EXPECT_TRUE(lim.converged);
  EXPECT_LE(sup_distance(lim.z, sol.z), 1e-6);
}

TEST(LeastFixedPoint, TouchingRootsAreSeparated) {
  const ModelSpec s = apply_shock(bundled("touching_roots"));
  const EpsilonLimit lim = z_star(s);
  EXPECT_GT(sup_distance(lim.z, lim.smallest), 0.05);
  EXPECT_TRUE(componentwise_leq(lim.smallest, lim.z, 1e-9));
  EXPECT_LT(f_eval(s, lim.z).sup_norm(), 1e-8);
}

TEST(LeastFixedPoint, Errors) {
  const ModelSpec s = apply_shock(homogeneous(1, 1.0, 1.0, Capital(1), 0.1));
  SolverOptions o;
  o.tol = 0.0;
  try {
    smallest_root(s, o);
    FAIL();
  } catch (const ContagionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InvalidTolerance);
  }
  o.tol = 1e-14;
  o.max_iterations = 3;
  try {
    smallest_root(s, o);
    FAIL();
  } catch (const SolverError& e) {
    EXPECT_EQ(e.code(), ErrorCode::MaxIterations);
    EXPECT_EQ(e.partial().iterations, 3u);
    EXPECT_GT(e.partial().residual, 0.0);
  }
}

TEST(ZStar, ResilientSystemIsZero) {
  const EpsilonLimit lim = z_star(bundled("resilient_uniform"));
  EXPECT_TRUE(lim.converged);
  EXPECT_LT(lim.z.sup_norm(), 1e-6);
}

TEST(ZStar, NonResilientSystemIsLarge) {
  const EpsilonLimit lim = z_star(bundled("nonresilient_uniform"));
  EXPECT_TRUE(lim.converged);
  EXPECT_GT(lim.z.sup_norm(), 0.1);
}

TEST(ZStar, CorePeripheryValues) {
  const auto t0 = std::chrono::steady_clock::now();
  const ModelSpec s = without_shocks(bundled("core_periphery"));
  const EpsilonLimit lim = z_star(s);
  const double secs = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  const auto [u1, u2] = reduced("core_periphery", lim.z);
  EXPECT_NEAR(u1, 0.601, 5e-3);
  EXPECT_NEAR(u2, 1.153, 5e-3);
  EXPECT_NEAR(g_eval(s, lim.z), 0.877, 5e-3);
  EXPECT_LT(secs, 5.0);
}

TEST(ZStar, MonotoneInEps) {
  const ModelSpec s = bundled("nonresilient_uniform");
  const EpsilonLimit lim = z_star(s);
  EXPECT_TRUE(lim.monotone_in_eps);
  // Levels end exactly at the floor.
  EXPECT_EQ(lim.trace.back().eps, 1e-10);
  EXPECT_EQ(lim.trace.front().eps, 1e-2);
}

TEST(ZZero, EqualsZStarOnSupportNonResilient) {
  const ModelSpec s = bundled("nonresilient_uniform");
  const EpsilonLimit a = z_star(s);
  const EpsilonLimit b = z_zero(s, support(s));
  EXPECT_LE(sup_distance(a.z, b.z), 1e-6);
}

TEST(ZZero, EqualsZStarOnAllBundledSpecs) {
  for (const auto& name : bundled_names()) {
    for (bool shocked : {false, true}) {
      const ModelSpec raw = bundled(name);
      const ModelSpec s = shocked ? apply_shock(raw) : without_shocks(raw);
      if (support(s).empty()) continue;
      const EpsilonLimit a = z_star(s);
      const EpsilonLimit b = z_zero(s, support(s));
      EXPECT_LE(sup_distance(a.z, b.z), 1e-6) << name << (shocked ? " shocked" : "");
    }
  }
}

TEST(ZZero, ShockOnNonResilientSubsystemSpreads) {
  const double w1 = 2.0;
  const ModelSpec s = bundled("subsystems_a");
  CoordinateSet I(1, 2);
  I.insert({0, 0, 0});
  const EpsilonLimit lim = z_zero(s, I);
  const EpsilonLimit own = z_star(homogeneous(1, w1, w1, Capital(1)));
  EXPECT_GT(own.z[0], 0.0);
  EXPECT_GE(lim.z[(Coord{0, 0, 0})], own.z[0] - 1e-6);
  // The resilient subsystem is dragged along.
  EXPECT_GT(lim.z[(Coord{0, 1, 1})], 0.0);
  EXPECT_GT(g_eval(s, lim.z, Weighting::per_type(1)), 0.0);
}

TEST(ZZero, InfiniteCapitalGivesZero) {
  const ModelSpec s = homogeneous(2, 1.0, 1.0, Capital::infinite());
  CoordinateSet I(2, 1);
  I.insert({1, 0, 0});
  EXPECT_LE(z_zero(s, I).z.sup_norm(), 1e-9);
  EXPECT_LE(z_zero(s, support(s)).z.sup_norm(), 1e-9);
}

TEST(ZZero, Errors) {
  const ModelSpec s = bundled("core_periphery");
  try {
    z_zero(s, CoordinateSet(2, 2));
    FAIL();
  } catch (const ContagionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::EmptyShockSet);
  }
  CoordinateSet outside(2, 2);
  outside.insert({1, 1, 1});  // zeta = 0 there
  try {
    z_zero(s, outside);
    FAIL();
  } catch (const ContagionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ShockSetOutsideSupport);
  }
}

TEST(ScheduleNotConverged, RequireConvergedThrows) {
  EpsilonLimit lim;
  lim.converged = false;
  lim.cauchy_gap = 0.3;
  try {
    require_converged(lim);
    FAIL();
  } catch (const ContagionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::ScheduleNotConverged);
  }
}

TEST(LargestRoot, ThreeRootSystem) {
  const ModelSpec s = apply_shock(bundled("subsystems_shocked_c"));
  const FixedPointSolution hi = largest_root(s);
  const FixedPointSolution lo = smallest_root(s);
  EXPECT_NEAR(g_eval(s, hi.z), 0.9263, 2e-3);
  EXPECT_NEAR(g_eval(s, lo.z), 0.5002, 2e-3);
  EXPECT_TRUE(componentwise_leq(lo.z, hi.z, 1e-9));
}

TEST(SolverProperty, OrderingAndResiduals) {
  std::mt19937_64 rng(21);
  RandomSpecOptions o;
  o.shocks = true;
  o.max_weight = 2.0;
  SolverOptions so;
  so.max_iterations = 2'000'000;
  int checked = 0;
  for (int k = 0; k < 40; ++k) {
    const ModelSpec base = random_spec(rng, o);
    const ModelSpec s = apply_shock(base);
    FixedPointSolution hat;
    EpsilonLimit star;
    try {
      hat = smallest_root(s, so);
      star = z_star(s, so);
    } catch (const SolverError&) {
      continue;  // critical random instance
    }
    ++checked;
    EXPECT_TRUE(hat.monotone);
    EXPECT_LE(f_eval(s, hat.z).sup_norm(), 10 * so.tol);
    EXPECT_TRUE(componentwise_leq(hat.z, star.z, 1e-8));
    EXPECT_TRUE(componentwise_leq(star.z, zeta(s), 1e-9));
    // zhat(eps) is nondecreasing in eps.
    const FixedPointSolution e1 = least_fixed_point(s, 1e-3, nullptr, so);
    const FixedPointSolution e2 = least_fixed_point(s, 1e-2, nullptr, so);
    EXPECT_TRUE(componentwise_leq(e1.z, e2.z, 1e-9));
    // z_0(I) grows with I.
    const CoordinateSet V = support(s);
    if (V.size() >= 2) {
      CoordinateSet I(s.impacts(), s.types());
      I.insert(V.members().front());
      const EpsilonLimit small = z_zero(s, I, so);
      const EpsilonLimit big = z_zero(s, V, so);
      EXPECT_TRUE(componentwise_leq(small.z, big.z, 1e-6));
    }
  }
  EXPECT_GE(checked, 30);
}
