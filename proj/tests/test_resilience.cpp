#include <gtest/gtest.h>

#include "support.hpp"

using namespace contagion;
using namespace testing_support;

namespace {

ModelSpec two_type(double w_int, double w_ext, Capital c1, Capital c2) {
  SpecDraft d;
  d.impacts = 1;
  d.types = 2;
  d.atoms.push_back(make_atom(0.5, 0, matrix(1, 2, {w_int, w_ext}), matrix(1, 2, {w_int, w_ext}), c1));
  d.atoms.push_back(make_atom(0.5, 1, matrix(1, 2, {w_ext, w_int}), matrix(1, 2, {w_ext, w_int}), c2));
  return validate_spec(d);
}

}  // namespace

TEST(Certificate, ModifiedCorePeripheryHasDirection) {
  const ModelSpec s = without_shocks(bundled("core_periphery_modified"));
  const auto v = search_certificate_direction(s);
  ASSERT_TRUE(v.has_value());
  for (std::size_t i = 0; i < v->size(); ++i) EXPECT_GT((*v)[i], 0.0);
  const RootCertificate c = check_root_is_zstar(s, RootVector::like(s), *v, CertificateMode::Derivative);
  EXPECT_TRUE(c.holds);
  EXPECT_LT(c.score, 0.0);
}

TEST(Certificate, OriginalCorePeripheryHasNone) {
  const ModelSpec s = without_shocks(bundled("core_periphery"));
  EXPECT_FALSE(search_certificate_direction(s).has_value());
  const CoordArray ones = CoordArray::like(s, 1.0);
  EXPECT_FALSE(check_root_is_zstar(s, RootVector::like(s), ones, CertificateMode::Derivative).holds);
}

TEST(Certificate, TouchingRootFailsBothModes) {
  const ModelSpec s = apply_shock(bundled("touching_roots"));
  const RootVector zhat = smallest_root(s).z;
  const CoordArray ones = CoordArray::like(s, 1.0);
  EXPECT_FALSE(check_root_is_zstar(s, zhat, ones, CertificateMode::Derivative).holds);
  EXPECT_FALSE(check_root_is_zstar(s, zhat, ones, CertificateMode::Integral).holds);
}

TEST(Certificate, TransversalRootPassesDerivativeMode) {
  const ModelSpec s = apply_shock(bundled("unique_root"));
  const RootVector zhat = smallest_root(s).z;
  const CoordArray ones = CoordArray::like(s, 1.0);
  EXPECT_TRUE(check_root_is_zstar(s, zhat, ones, CertificateMode::Derivative).holds);
}

TEST(Certificate, Errors) {
  const ModelSpec s = bundled("resilient_uniform");
  RootVector bad = RootVector::like(s);
  bad[0] = 0.5;
  try {
    check_root_is_zstar(s, bad, CoordArray::like(s, 1.0), CertificateMode::Derivative);
    FAIL();
  } catch (const ContagionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NotARoot);
  }
  try {
    check_root_is_zstar(s, RootVector::like(s), CoordArray::like(s, 0.0), CertificateMode::Derivative);
    FAIL();
  } catch (const ContagionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::NonPositiveDirection);
  }
}

TEST(Classify, Verdicts) {
  const ResilienceReport r4 = classify_resilience(bundled("resilient_uniform"));
  EXPECT_EQ(r4.verdict, Verdict::Resilient);
  EXPECT_TRUE(r4.certificate.has_value());
  EXPECT_LT(r4.g_star, 1e-6);

  const ResilienceReport r5 = classify_resilience(bundled("nonresilient_uniform"));
  EXPECT_EQ(r5.verdict, Verdict::NonResilient);
  ASSERT_FALSE(r5.lower_bounds.empty());
  EXPECT_NEAR(r5.lower_bounds.front().lower_bound, r5.g_star, 1e-6);

  const ResilienceReport ro = classify_resilience(bundled("core_periphery"));
  EXPECT_EQ(ro.verdict, Verdict::NonResilient);
  EXPECT_NEAR(ro.g_star, 0.877, 5e-3);
  EXPECT_FALSE(ro.certificate.has_value());

  const ResilienceReport rm = classify_resilience(bundled("core_periphery_modified"));
  EXPECT_EQ(rm.verdict, Verdict::Resilient);
  EXPECT_TRUE(rm.certificate.has_value());
}

TEST(Classify, ExtraShockSetsAreBoundedByVTilde) {
  const ModelSpec s = bundled("subsystems_a");
  CoordinateSet I(1, 2);
  I.insert({0, 0, 0});
  const ResilienceReport r = classify_resilience(s, {I});
  ASSERT_EQ(r.lower_bounds.size(), 2u);
  EXPECT_LE(r.lower_bounds[1].lower_bound, r.lower_bounds[0].lower_bound + 1e-6);
  EXPECT_GT(r.lower_bounds[1].lower_bound, 0.0);
}

TEST(Classify, InitialDefaultsRejected) {
  SpecDraft d;
  d.atoms.push_back(make_atom(0.9, 0, matrix(1, 1, {1}), matrix(1, 1, {1}), Capital(2)));
  d.atoms.push_back(make_atom(0.1, 0, matrix(1, 1, {1}), matrix(1, 1, {1}), Capital(0)));
  try {
    classify_resilience(validate_spec(d));
    FAIL();
  } catch (const ContagionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::InitialDefaults);
  }
}

TEST(Subsystem, MarginClosedForms) {
  EXPECT_EQ(subsystem_margin(homogeneous(1, 2.0, 2.0, Capital::infinite()), 0, 0.3), 0.0);
  for (double w : {0.5, 1.0, 2.5})
    for (double z : {1e-3, 0.1, 0.7}) {
      const double m = subsystem_margin(homogeneous(1, w, w, Capital(2)), 0, z);
      EXPECT_NEAR(m, w * w * w * z * std::exp(-w * z), 1e-14);
    }
}

TEST(Subsystem, TwoSubsystemMargins) {
  const ModelSpec s = bundled("subsystems_a");
  // Capital 2 block vanishes at 0, capital 1 block does not.
  EXPECT_LT(subsystem_margin(s, 1, 1e-8), 1e-6);
  EXPECT_NEAR(subsystem_margin(s, 0, 1e-12), 4.0, 1e-9);
  const SubsystemCriterion c = subsystem_resilience_criterion(s);
  EXPECT_FALSE(c.satisfied);
}

TEST(Subsystem, CriterionImpliesResilience) {
  const ModelSpec s = two_type(2.0, 0.5, Capital(2), Capital(3));
  const SubsystemCriterion c = subsystem_resilience_criterion(s);
  EXPECT_DOUBLE_EQ(c.cross_bound, 0.25);
  EXPECT_TRUE(c.satisfied);
  EXPECT_EQ(classify_resilience(s).verdict, Verdict::Resilient);
}

TEST(Subsystem, MultiImpactRejected) {
  try {
    subsystem_margin(bundled("unique_root"), 0, 0.1);
    FAIL();
  } catch (const ContagionError& e) {
    EXPECT_EQ(e.code(), ErrorCode::MultiImpactUnsupported);
  }
}

TEST(Subsystem, CrossWeightBound) {
  EXPECT_EQ(cross_weight_bound(homogeneous(1, 1.0, 2.0, Capital(1))), 0.0);
  EXPECT_DOUBLE_EQ(cross_weight_bound(two_type(2.0, 3.0, Capital(1), Capital(1))), 1.5);
  EXPECT_TRUE(std::isinf(cross_weight_bound(bundled("core_periphery"))));
}
