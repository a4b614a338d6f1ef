#include <gtest/gtest.h>

#include "support.hpp"

using namespace contagion;
using namespace testing_support;

namespace {

// Reduced derivative d f^{row} / d u_k along a reduction axis.
double reduced_partial(const ModelSpec& spec, const ReducedAxes& ax, const RootVector& z, const Coord& row, int k) {
  const std::vector<double> J = jacobian(spec, z);
  const std::size_t D = spec.dimension();
  const std::size_t i = flat_index(row, spec.types());
  double s = 0.0;
  for (const auto& t : ax.axes[static_cast<std::size_t>(k)]) s += J[i * D + flat_index(t.coord, spec.types())] * t.coef;
  return s;
}

}  // namespace

TEST(Zeta, SingleAtom) {
  SpecDraft d;
  d.impacts = 2;
  d.types = 2;
  d.atoms.push_back(make_atom(1.0, 0, WeightMatrix(2, 2, 1), WeightMatrix(2, 2, 2), Capital(1)));
  const ModelSpec s = validate_spec(d);
  const RootVector z = zeta(s);
  for (int r = 0; r < 2; ++r)
    for (int a = 0; a < 2; ++a) {
      EXPECT_EQ(z(r, a, 0), 2.0);
      EXPECT_EQ(z(r, a, 1), 0.0);
    }
  EXPECT_EQ(support(s).size(), 4u);
}

TEST(Zeta, CorePeripheryOriginal) {
  const ModelSpec s = bundled("core_periphery");
  const RootVector z = zeta(s);
  const double p = 1.0 / 3.0;
  EXPECT_NEAR(z[(Coord{1, 0, 0})], 2 * p, 1e-15);
  EXPECT_NEAR(z[(Coord{0, 1, 0})], 2 * p, 1e-15);
  EXPECT_NEAR(z[(Coord{0, 0, 1})], 2 * (1 - p), 1e-15);
  EXPECT_NEAR(z[(Coord{0, 1, 1})], 2 * (1 - p), 1e-15);
  EXPECT_EQ(support(s).size(), 4u);
  double others = 0.0;
  for (std::size_t i = 0; i < z.size(); ++i) others += z[i];
  EXPECT_NEAR(others, 4 * p + 4 * (1 - p), 1e-14);
}

TEST(Zeta, ZeroWeightsGiveEmptySupport) {
  const ModelSpec s = homogeneous(2, 1.0, 0.0, Capital(1));
  EXPECT_EQ(zeta(s).sup_norm(), 0.0);
  EXPECT_TRUE(support(s).empty());
}

TEST(FEval, VanishesAtOriginWithoutInitialDefaults) {
  std::mt19937_64 rng(3);
  for (int k = 0; k < 20; ++k) {
    const ModelSpec s = random_spec(rng);
    EXPECT_EQ(f_eval(s, RootVector::like(s)).sup_norm(), 0.0);
  }
}

TEST(FEval, CorePeripheryReducedForm) {
  const ModelSpec s = bundled("core_periphery");
  const ReducedAxes ax = bundled_reduction("core_periphery").axes;
  const double p = 1.0 / 3.0;
  for (auto [u1, u2] : {std::pair{0.0, 0.0}, std::pair{0.5, 0.5}, std::pair{0.2, 1.1}}) {
    const CoordArray f = f_eval(s, ax.embed(s, u1, u2));
    // Poi(2 u2) + 2 Poi(2 u1) >= 2, by enumeration.
    const double tail1 = 1.0 - brute_compound({2 * u2, 2 * u1}, 0) - brute_compound({2 * u2, 2 * u1}, 1);
    const double lam = 2 * (u1 + u2);
    const double tail2 = 1.0 - std::exp(-lam) * (1.0 + lam);
    EXPECT_NEAR(f[(Coord{1, 0, 0})], 2 * p * tail1 - u1, 1e-12);
    EXPECT_NEAR(f[(Coord{0, 0, 1})], 2 * (1 - p) * tail2 - u2, 1e-12);
    // Tied coordinates carry the same reduced function.
    EXPECT_NEAR(f[(Coord{0, 1, 0})], f[(Coord{1, 0, 0})], 1e-12);
    EXPECT_NEAR(f[(Coord{0, 1, 1})], f[(Coord{0, 0, 1})], 1e-12);
  }
}

TEST(FEval, TwoSubsystemReducedForm) {
  std::mt19937_64 rng(17);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  struct W { const char* name; double w1, w2, w3; };
  for (const W w : {W{"subsystems_a", 2, 1, 2}, W{"subsystems_b", 2, 2, 0.75}, W{"subsystems_c", 2, 2, 0.5}}) {
    const ModelSpec s = bundled(w.name);
    const ReducedAxes ax = bundled_reduction(w.name).axes;
    for (int k = 0; k < 10; ++k) {
      const double z1 = w.w1 * U(rng), z2 = w.w2 * U(rng);
      const CoordArray f = f_eval(s, ax.embed(s, z1, z2));
      const double f1 = w.w1 * (1 - std::exp(-w.w1 * z1 - w.w3 * w.w3 * z2 / (2 * w.w2))) - z1;
      const double x = w.w3 * w.w3 * z1 / (2 * w.w1) + w.w2 * z2;
      const double f2 = w.w2 * (1 - std::exp(-x) * (1 + x)) - z2;
      EXPECT_NEAR(f[(Coord{0, 0, 0})], f1, 1e-12) << w.name;
      EXPECT_NEAR(f[(Coord{0, 1, 1})], f2, 1e-12) << w.name;
      // The dependent coordinates are proportional to the free ones.
      EXPECT_NEAR(f[(Coord{0, 1, 0})] + ax.embed(s, z1, z2)[(Coord{0, 1, 0})],
                  w.w3 / (2 * w.w1) * (f1 + z1), 1e-12);
    }
  }
}

TEST(GEval, OriginGivesInitialDefaultMass) {
  std::mt19937_64 rng(4);
  RandomSpecOptions o;
  o.allow_zero_capital = true;
  for (int k = 0; k < 20; ++k) {
    const ModelSpec s = random_spec(rng, o);
    EXPECT_NEAR(g_eval(s, RootVector::like(s)), initial_default_mass(s), 1e-15);
  }
}

TEST(GEval, WeightingsAreConsistent) {
  std::mt19937_64 rng(8);
  for (int k = 0; k < 10; ++k) {
    SpecDraft d = random_spec(rng).draft();
    for (auto& a : d.atoms) a.importance = 1.0;
    const ModelSpec s = validate_spec(d);
    const RootVector z = random_point(s, rng);
    const double g = g_eval(s, z);
    EXPECT_NEAR(g_eval(s, z, Weighting::importance()), g, 1e-15);
    double by_type = 0.0;
    for (int b = 0; b < s.types(); ++b) by_type += g_eval(s, z, Weighting::per_type(b));
    EXPECT_NEAR(by_type, g, 1e-14);
    EXPECT_GE(g, 0.0);
    EXPECT_LE(g, 1.0);
  }
}

TEST(GEvalProperty, MonotoneAlongIncreasingPaths) {
  std::mt19937_64 rng(9);
  for (int k = 0; k < 30; ++k) {
    const ModelSpec s = random_spec(rng);
    RootVector z = RootVector::like(s);
    const RootVector step = random_point(s, rng, 0.1);
    double prev = g_eval(s, z);
    for (int i = 0; i < 10; ++i) {
      for (std::size_t c = 0; c < z.size(); ++c) z[c] += step[c];
      const double g = g_eval(s, z);
      EXPECT_GE(g, prev - 1e-15);
      EXPECT_LE(g, 1.0);
      prev = g;
    }
  }
}

TEST(FEvalProperty, MonotoneOffDiagonal) {
  std::mt19937_64 rng(10);
  std::uniform_real_distribution<double> U(0.0, 1.0);
  for (int k = 0; k < 50; ++k) {
    const ModelSpec s = random_spec(rng);
    for (int rep = 0; rep < 5; ++rep) {
      const RootVector z = random_point(s, rng);
      RootVector zp = z;
      const std::size_t keep = static_cast<std::size_t>(U(rng) * static_cast<double>(z.size())) % z.size();
      for (std::size_t c = 0; c < z.size(); ++c)
        if (c != keep) zp[c] += U(rng);
      const CoordArray f = f_eval(s, z);
      const CoordArray fp = f_eval(s, zp);
      EXPECT_LE(f[keep], fp[keep] + 1e-14);
    }
  }
}

TEST(Derivative, MatchesFiniteDifferences) {
  std::mt19937_64 rng(12);
  std::uniform_real_distribution<double> U(0.1, 1.0);
  const double h = 1e-6;
  double worst = 0.0;
  for (int k = 0; k < 20; ++k) {
    const ModelSpec s = random_spec(rng);
    const RootVector z = random_point(s, rng);
    CoordArray v = CoordArray::like(s);
    for (std::size_t i = 0; i < v.size(); ++i) v[i] = U(rng);
    RootVector zp = z, zm = z;
    for (std::size_t i = 0; i < z.size(); ++i) {
      zp[i] += h * v[i];
      zm[i] -= h * v[i];
    }
    const CoordArray fp = f_eval(s, zp), fm = f_eval(s, zm);
    const DerivativeVector d = directional_derivative(s, z, v);
    for (std::size_t i = 0; i < d.size(); ++i) worst = std::max(worst, std::abs(d[i] - (fp[i] - fm[i]) / (2 * h)));
    // The Jacobian applied to v gives the same vector.
    const std::vector<double> J = jacobian(s, z);
    const std::size_t D = s.dimension();
    for (std::size_t i = 0; i < D; ++i) {
      double jv = 0.0;
      for (std::size_t j = 0; j < D; ++j) jv += J[i * D + j] * v[j];
      EXPECT_NEAR(jv, d[i], 1e-12);
    }
  }
  EXPECT_LE(worst, 1e-5);
}

TEST(Derivative, CreditorOnlyWeightsAtOrigin) {
  const ModelSpec s = bundled("core_periphery_modified");
  const DerivativeVector d = directional_derivative(s, RootVector::like(s), CoordArray::like(s, 1.0));
  for (const Coord c : {Coord{0, 0, 0}, Coord{1, 0, 0}, Coord{0, 1, 0}}) EXPECT_NEAR(d[c], -1.0 / 9.0, 1e-12);
  for (const Coord c : {Coord{0, 0, 1}, Coord{1, 0, 1}, Coord{0, 1, 1}}) EXPECT_NEAR(d[c], -1.0, 1e-12);
}

TEST(Derivative, CorePeripheryPartialAtOrigin) {
  const ModelSpec s = bundled("core_periphery");
  const ReducedAxes ax = bundled_reduction("core_periphery").axes;
  const double p = 1.0 / 3.0;
  EXPECT_NEAR(reduced_partial(s, ax, RootVector::like(s), {1, 0, 0}, 0), 4 * p - 1, 1e-12);
}

TEST(Derivative, CreditorOnlyReducedPartials) {
  const ModelSpec s = bundled("core_periphery_modified");
  const ReducedAxes ax = bundled_reduction("core_periphery_modified").axes;
  const RootVector o = RootVector::like(s);
  EXPECT_NEAR(reduced_partial(s, ax, o, {0, 0, 0}, 0), -5.0 / 9.0, 1e-12);
  EXPECT_NEAR(reduced_partial(s, ax, o, {0, 0, 0}, 1), 4.0 / 9.0, 1e-12);
  EXPECT_NEAR(reduced_partial(s, ax, o, {0, 0, 1}, 0), 0.0, 1e-12);
  EXPECT_NEAR(reduced_partial(s, ax, o, {0, 0, 1}, 1), -1.0, 1e-12);
}

TEST(Derivative, RejectsNonPositiveDirection) {
  const ModelSpec s = homogeneous(2, 1, 1, Capital(2));
  CoordArray v = CoordArray::like(s, 1.0);
  v[0] = 0.0;
  try {
    directional_derivative(s, RootVector::like(s), v);
    FAIL();
  } catch (const ContagionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveDirection);
  }
}
