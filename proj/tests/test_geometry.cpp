#include <gtest/gtest.h>

#include "kstar/geometry.hpp"
#include "kstar/presets.hpp"
#include "kstar/verification.hpp"
#include "support.hpp"

namespace {

using namespace kstar;

ChartContext chart(const char* phi, int n, std::vector<Complex> z, int order = 10) {
  return build_chart(parse(phi, n), ChartPoint::from_holomorphic(std::move(z)), order);
}

double dist(Complex a, Complex b) { return std::abs(a - b); }

TEST(BuildChart, FlatIsTrivial) {
  const auto ctx = chart("z1*zb1", 1, {Complex(0.4, -0.7)});
  EXPECT_EQ(max_abs_difference(ctx.g_dn(0, 0), Jet::constant(1, ctx.g_dn(0, 0).order(), 1.0)), 0.0);
  EXPECT_LT(max_abs_difference(ctx.g_up(0, 0), Jet::constant(1, ctx.g_up(0, 0).order(), 1.0)), 1e-15);
  EXPECT_EQ(ctx.gamma_hol(0, 0, 0).max_abs(), 0.0);
  EXPECT_EQ(ctx.gamma_anti(0, 0, 0).max_abs(), 0.0);
}

TEST(BuildChart, FubiniStudyAtOrigin) {
  const auto ctx = chart("log(1+z1*zb1)", 1, {0.0});
  EXPECT_EQ(ctx.metric()(0, 0), Complex(1.0));
  EXPECT_EQ(ctx.christoffel_hol()(0, 0, 0), Complex(0.0));
}

TEST(BuildChart, FubiniStudyChristoffelAtOne) {
  const auto ctx = chart("log(1+z1*zb1)", 1, {1.0});
  // closed form d log g = -2 zb / (1 + z zb)
  EXPECT_LT(dist(ctx.christoffel_hol()(0, 0, 0), -1.0), 1e-14);
  EXPECT_LT(dist(ctx.christoffel_anti()(0, 0, 0), -1.0), 1e-14);
}

TEST(BuildChart, FrozenValuesOfAPolynomialChart) {
  // reference values from an independent symbolic computation
  const auto ctx = chart("z1*zb1 + 0.1*(z1^2*zb1 + z1*zb1^2) + 0.05*z1^2*zb1^2", 1, {Complex(0.2, 0.1)});
  EXPECT_LT(dist(ctx.metric()(0, 0), 1.09), 1e-14);
  EXPECT_LT(dist(ctx.christoffel_hol()(0, 0, 0), Complex(0.22018348623853212, -0.01834862385321101)), 1e-14);
  EXPECT_LT(dist(ctx.curv.mixed(0, 0, 0, 0), -0.12354935680977028), 1e-13);
}

TEST(BuildChart, FrozenInverseMetricTwoDimensional) {
  const auto ctx = chart("z1*zb1 + z2*zb2 + 0.1*(z1*zb2 + z2*zb1) + 0.2*z1*z2*zb1*zb2", 2,
                         {Complex(0.1, 0.2), Complex(-0.2, 0.05)});
  const auto h = ctx.inverse_metric();
  EXPECT_LT(dist(h(0, 0), 1.001090296362375), 1e-14);
  EXPECT_LT(dist(h(0, 1), Complex(-0.09713549410248785, -0.008920606601248885)), 1e-14);
  EXPECT_LT(dist(h(1, 0), Complex(-0.09713549410248785, 0.008920606601248885)), 1e-14);
  EXPECT_LT(dist(h(1, 1), 0.9996035285955001), 1e-14);
}

TEST(BuildChart, Preconditions) {
  EXPECT_THROW(chart("z1^2*zb1^2", 1, {0.0}), SingularMetricError);
  EXPECT_THROW(chart("z1*zb1", 1, {0.0}, 5), InsufficientOrderError);
  EXPECT_THROW(chart("-z1*zb1", 1, {0.0}), SingularMetricError);
  EXPECT_THROW(chart("log(z1*zb1)", 1, {0.0}), PoleError);
  EXPECT_THROW(build_chart(parse("z1*zb1 + z2*zb2", 2), ChartPoint::from_holomorphic({0.0}), 8), UsageError);
  EXPECT_THROW(build_chart(eval_jet(parse("z1*zb1", 1), ChartPoint::from_holomorphic({0.0}), 8), ChartPoint::from_holomorphic({0.0, 0.0})),
               UsageError);
}

TEST(BuildChart, MetricInverseDuality) {
  const auto spec = RandomChartSpec{2, 3, 0.1, 9};
  const auto rc = random_chart(spec);
  const auto ctx = build_chart(rc.phi, rc.point, 9);
  for (int k = 0; k < 2; ++k)
    for (int m = 0; m < 2; ++m) {
      Jet acc = ctx.g_dn(k, 0) * ctx.g_up(0, m) + ctx.g_dn(k, 1) * ctx.g_up(1, m);
      EXPECT_EQ(acc.order(), 7);
      const Jet id = Jet::constant(2, acc.order(), k == m ? 1.0 : 0.0);
      EXPECT_LT(max_abs_difference(acc, id), 1e-12);
    }
}

TEST(BuildChart, HermitianMetricForRealPotentials) {
  for (std::uint64_t seed = 0; seed < 5; ++seed) {
    const auto rc = random_chart({2, 3, 0.2, seed});
    const auto ctx = build_chart(rc.phi, rc.point, 6);
    const auto g = ctx.metric();
    for (int k = 0; k < 2; ++k)
      for (int l = 0; l < 2; ++l) EXPECT_LT(dist(g(k, l), std::conj(g(l, k))), 1e-14);
  }
}

TEST(Curvature, FlatVanishes) {
  const auto ctx = chart("z1*zb1 + z2*zb2", 2, {Complex(0.3, 0.1), Complex(-0.2, 0.4)});
  for (const auto& c : ctx.curv.lowered) EXPECT_EQ(c, Complex(0.0));
  for (const auto& c : ctx.curv.mixed) EXPECT_EQ(c, Complex(0.0));
  for (const auto& c : ctx.curv.raised) EXPECT_EQ(c, Complex(0.0));
}

TEST(Curvature, FubiniStudyIsConstant) {
  const auto at0 = chart("log(1+z1*zb1)", 1, {0.0});
  EXPECT_LT(dist(at0.curv.mixed(0, 0, 0, 0), 2.0), 1e-14);
  EXPECT_LT(dist(at0.curv.lowered(0, 0, 0, 0), 2.0), 1e-14);
  const auto at1 = chart("log(1+z1*zb1)", 1, {1.0});
  EXPECT_LT(dist(at1.curv.mixed(0, 0, 0, 0), 2.0), 1e-12);
}

TEST(Curvature, PoincareDiskHasOppositeSign) {
  const auto ctx = chart("-log(1-z1*zb1)", 1, {0.0});
  EXPECT_LT(dist(ctx.curv.mixed(0, 0, 0, 0), -2.0), 1e-14);
}

TEST(Curvature, SymmetriesAndRaising) {
  for (std::uint64_t seed = 20; seed < 24; ++seed) {
    const auto rc = random_chart({2, 3, 0.15, seed});
    const auto ctx = build_chart(rc.phi, rc.point, 8);
    const auto& R = ctx.curv.lowered;
    for (int p = 0; p < 2; ++p)
      for (int q = 0; q < 2; ++q)
        for (int k = 0; k < 2; ++k)
          for (int l = 0; l < 2; ++l) {
            EXPECT_LT(dist(R(p, q, k, l), R(k, q, p, l)), 1e-13);
            EXPECT_LT(dist(R(p, q, k, l), R(p, l, k, q)), 1e-13);
          }
    EXPECT_LT(curvature_raising_residual(ctx, ctx.curv), 1e-10);
  }
}

TEST(CovariantDerivatives, FlatThirdDerivative) {
  const auto ctx = chart("z1*zb1", 1, {Complex(0.5, 0.5)});
  const auto cd = covariant_derivatives(ctx.function_jet(parse("z1^3", 1)), ctx, 3);
  EXPECT_LT(dist(cd.hol3(0, 0, 0).value(), 6.0), 1e-14);
}

TEST(CovariantDerivatives, FubiniStudyExamples) {
  const auto at0 = chart("log(1+z1*zb1)", 1, {0.0});
  EXPECT_LT(dist(covariant_derivatives(at0.function_jet(parse("z1^2", 1)), at0, 2).hol2(0, 0).value(), 2.0), 1e-14);
  const auto at1 = chart("log(1+z1*zb1)", 1, {1.0});
  EXPECT_LT(dist(covariant_derivatives(at1.function_jet(parse("z1", 1)), at1, 2).hol2(0, 0).value(), 1.0), 1e-14);
  EXPECT_THROW(covariant_derivatives(at1.function_jet(parse("z1", 1)), at1, 4), UsageError);
}

TEST(CovariantDerivatives, TensorsAreSymmetric) {
  const auto rc = random_chart({2, 3, 0.1, 77});
  const auto ctx = build_chart(rc.phi, rc.point, 8);
  std::mt19937_64 rng(77);
  const Expr f = random_polynomial(2, 0, 3, Variables::all, rng);
  const auto cd = covariant_derivatives(ctx.function_jet(f), ctx, 3);
  EXPECT_LT(symmetry_defect(values(cd.hol2)), 1e-10);
  EXPECT_LT(symmetry_defect(values(cd.anti2)), 1e-10);
  EXPECT_LT(symmetry_defect(values(cd.hol3)), 1e-10);
  EXPECT_LT(symmetry_defect(values(cd.anti3)), 1e-10);
}

TEST(Jacobi, Residuals) {
  EXPECT_EQ(jacobi_residual(chart("z1*zb1 + z2*zb2", 2, {0.1, 0.2})), 0.0);
  EXPECT_LE(jacobi_residual(chart("log(1+z1*zb1)", 1, {0.5})), 1e-12);
  const auto rc = random_chart({2, 3, 0.1, 5});
  EXPECT_LE(jacobi_residual(build_chart(rc.phi, rc.point, 8)), 1e-12);
}

}  // namespace
