#include <gtest/gtest.h>

#include "kstar/presets.hpp"
#include "kstar/star.hpp"
#include "kstar/verification.hpp"

namespace {

using namespace kstar;

ChartContext preset(const char* name, std::vector<Complex> z, int order = 10) {
  const int n = static_cast<int>(z.size());
  return build_chart(preset_potential(name, n), ChartPoint::from_holomorphic(std::move(z)), order);
}

Expr e1(const char* s) { return parse(s, 1); }

double dist(Complex a, Complex b) { return std::abs(a - b); }

TEST(NuPolynomial, TruncatingProduct) {
  NuPolynomial a{1.0, 2.0, 0.0, 1.0}, b{0.0, 1.0, 1.0, 1.0};
  const NuPolynomial c = a * b;
  EXPECT_EQ(c, (NuPolynomial{0.0, 1.0, 3.0, 3.0}));
  EXPECT_EQ(a + b, (NuPolynomial{1.0, 3.0, 1.0, 2.0}));
  EXPECT_EQ(a - a, NuPolynomial{});
}

TEST(C1, Examples) {
  EXPECT_EQ(c1(e1("zb1"), e1("z1"), preset("flat", {0.0})), Complex(1.0));
  EXPECT_EQ(c1(e1("zb1^2"), e1("z1^2"), preset("flat", {1.0})), Complex(4.0));
  EXPECT_LT(dist(c1(e1("zb1"), e1("z1"), preset("fubini-study", {1.0})), 4.0), 1e-13);
}

TEST(C2, Examples) {
  EXPECT_EQ(c2(e1("zb1^2"), e1("z1^2"), preset("flat", {Complex(0.3, -0.8)})), Complex(2.0));
  const auto fs = preset("fubini-study", {Complex(0.2, 0.4)});
  EXPECT_EQ(c2(e1("z1^3 + z1"), e1("z1*zb1^2"), fs), Complex(0.0));
  EXPECT_LT(dist(c2(e1("zb1^2"), e1("z1^2"), preset("fubini-study", {0.0})), 2.0), 1e-14);
}

TEST(C3, Examples) {
  EXPECT_LT(dist(c3(e1("zb1^3"), e1("z1^3"), preset("flat", {0.0})), 6.0), 1e-14);
  EXPECT_LT(dist(c3(e1("zb1^2"), e1("z1^2"), preset("fubini-study", {0.0})), 2.0), 1e-14);
  // first-order arguments still have second covariant derivatives -Gamma, so C3(zb1, z1)
  // vanishes only where the Christoffel symbols do
  EXPECT_EQ(c3(e1("zb1"), e1("z1"), preset("flat", {Complex(0.1, 0.3)})), Complex(0.0));
  EXPECT_LT(std::abs(c3(e1("zb1"), e1("z1"), preset("fubini-study", {0.0}))), 1e-15);
  EXPECT_LT(std::abs(c3(e1("zb1"), e1("z1"), preset("poincare-disk", {0.0}))), 1e-15);
  EXPECT_GT(std::abs(c3(e1("zb1"), e1("z1"), preset("fubini-study", {Complex(0.1, 0.3)}))), 0.1);
}

TEST(C3, FrozenValuesAgainstSymbolicRecursion) {
  // Fubini-Study at 1 and the Poincare disk at 0, from an independent symbolic run of the recursion
  const auto fs1 = preset("fubini-study", {1.0});
  EXPECT_LT(dist(c1(e1("zb1"), e1("z1"), fs1), 4.0), 1e-13);
  EXPECT_LT(dist(c2(e1("zb1"), e1("z1"), fs1), 8.0), 1e-12);
  EXPECT_LT(dist(c3(e1("zb1"), e1("z1"), fs1), 32.0), 1e-11);
  EXPECT_LT(dist(c3(e1("zb1^2"), e1("z1^2"), preset("poincare-disk", {0.0})), -2.0), 1e-14);

  const auto poly = build_chart(e1("z1*zb1 + 0.1*(z1^2*zb1 + z1*zb1^2) + 0.05*z1^2*zb1^2"),
                                ChartPoint::from_holomorphic({Complex(0.2, 0.1)}), 10);
  const Expr f = e1("zb1^2 + z1*zb1"), g = e1("z1^3 + zb1*z1");
  const NuPolynomial s = star_product(f, g, poly, StarVariant::standard);
  EXPECT_LT(dist(s[0], Complex(0.0046, -0.0012)), 1e-15);
  EXPECT_LT(dist(s[1], Complex(0.1614678899082569, -0.015596330275229359)), 1e-13);
  EXPECT_LT(dist(s[2], Complex(0.8891558172113053, 0.477169010440707)), 1e-13);
  EXPECT_LT(dist(s[3], Complex(-0.8868039712824942, -0.05029760301788424)), 1e-13);
  EXPECT_LT(dist(op_PQRS(e1("zb1"), e1("z1"), poly).R, 0.014004076667988927), 1e-14);
}

TEST(OpPQRS, Flat) {
  const auto ctx = preset("flat", {Complex(0.25, 0.5)});
  const auto aux = op_PQRS(e1("zb1^3 + zb1^2"), e1("z1^3 + 2*z1^2"), ctx);
  // only the third-order part survives: P = 6 * 6 = 36
  EXPECT_LT(dist(aux.P, 36.0), 1e-13);
  EXPECT_EQ(aux.Q, Complex(0.0));
  EXPECT_EQ(aux.R, Complex(0.0));
  EXPECT_EQ(aux.S, Complex(0.0));
  EXPECT_EQ(aux.S_tilde, Complex(0.0));
}

TEST(OpPQRS, FubiniStudyAtOrigin) {
  const auto aux = op_PQRS(e1("zb1"), e1("z1"), preset("fubini-study", {0.0}));
  EXPECT_LT(dist(aux.R, 4.0), 1e-13);
  EXPECT_LT(std::abs(aux.S), 1e-14);
  EXPECT_LT(std::abs(aux.S_tilde), 1e-14);
}

TEST(OpPQRS, SEqualsSTilde) {
  for (std::uint64_t seed = 0; seed < 6; ++seed) {
    const auto rc = random_chart({1 + static_cast<int>(seed % 2), 3, 0.1, seed});
    const auto ctx = build_chart(rc.phi, rc.point, 10);
    std::mt19937_64 rng(seed);
    const int n = ctx.n;
    const auto aux = op_PQRS(random_polynomial(n, 0, 3, Variables::all, rng), random_polynomial(n, 0, 3, Variables::all, rng), ctx);
    EXPECT_LT(std::abs(aux.S - aux.S_tilde), 1e-10);
  }
}

TEST(C3Tilde, Examples) {
  const auto flat = preset("flat", {Complex(0.1, 0.1)});
  EXPECT_EQ(c3_tilde(e1("zb1^3*z1"), e1("z1^3+zb1"), flat), c3(e1("zb1^3*z1"), e1("z1^3+zb1"), flat));
  const auto fs = preset("fubini-study", {0.0});
  EXPECT_LT(dist(c3_tilde(e1("zb1"), e1("z1"), fs), 1.0 / 3.0), 1e-14);
  const auto pd = preset("poincare-disk", {Complex(0.3, -0.2)});
  EXPECT_EQ(c3_tilde(e1("2.5"), e1("z1^3*zb1"), pd), Complex(0.0));
  EXPECT_EQ(c3_tilde(e1("z1*zb1^2"), e1("1"), pd), Complex(0.0));
}

TEST(StarProduct, Examples) {
  const auto fs = preset("fubini-study", {Complex(0.3, 0.1)});
  const Expr g = e1("z1^2*zb1 + 3");
  const auto unit = star_product(e1("1"), g, fs, StarVariant::standard);
  EXPECT_LT(dist(unit[0], evaluate(g, fs.point)), 1e-15);
  EXPECT_EQ(unit[1], Complex(0.0));
  EXPECT_EQ(unit[2], Complex(0.0));
  EXPECT_EQ(unit[3], Complex(0.0));

  EXPECT_EQ(star_product(e1("zb1"), e1("z1"), preset("flat", {0.0}), StarVariant::standard), (NuPolynomial{0.0, 1.0, 0.0, 0.0}));
  const auto mod = star_product(e1("zb1"), e1("z1"), preset("fubini-study", {0.0}), StarVariant::modified);
  EXPECT_LT(dist(mod[1], 1.0), 1e-15);
  EXPECT_LT(std::abs(mod[2]), 1e-15);
  EXPECT_LT(dist(mod[3], 1.0 / 3.0), 1e-14);
}

TEST(PoissonAntisymmetry, Examples) {
  const auto flat = preset("flat", {0.0});
  const auto pc = poisson_antisymmetry(e1("zb1"), e1("z1"), flat);
  EXPECT_EQ(pc.antisym, Complex(1.0));
  EXPECT_EQ(pc.antisym, pc.bracket);
  const auto fs = preset("fubini-study", {Complex(0.2, 0.3)});
  const Expr f = e1("z1*zb1^2 + zb1");
  EXPECT_EQ(poisson_antisymmetry(f, f, fs).antisym, Complex(0.0));
  EXPECT_EQ(poisson_antisymmetry(e1("z1^2"), e1("z1^3+z1"), fs).antisym, Complex(0.0));
  const auto general = poisson_antisymmetry(f, e1("z1^2*zb1 - 3*z1"), fs);
  EXPECT_LT(dist(general.antisym, general.bracket), 1e-14);
}

TEST(Structure, DecompositionAndExpandedForm) {
  for (std::uint64_t seed = 40; seed < 46; ++seed) {
    const auto rc = random_chart({1 + static_cast<int>(seed % 2), 3, 0.1, seed});
    const auto ctx = build_chart(rc.phi, rc.point, 10);
    std::mt19937_64 rng(seed);
    const Expr f = random_polynomial(ctx.n, 0, 3, Variables::all, rng);
    const Expr g = random_polynomial(ctx.n, 0, 3, Variables::all, rng);
    const auto aux = op_PQRS(f, g, ctx);
    EXPECT_LT(std::abs(c3(f, g, ctx) - (aux.P / 6.0 - aux.Q / 4.0)), 1e-11);
    EXPECT_LT(std::abs(c2(f, g, ctx) - c2_expanded(f, g, ctx)), 1e-10);
    EXPECT_LT(std::abs(c3_tilde(f, g, ctx) - c3(f, g, ctx) - aux.R / 12.0), 1e-13);
  }
}

TEST(Structure, ProofIdentities) {
  EXPECT_EQ(first_identity_residual(preset("flat", {0.1, 0.2})), 0.0);
  EXPECT_EQ(second_identity_residual(preset("flat", {0.1, 0.2})), 0.0);
  EXPECT_LE(first_identity_residual(preset("fubini-study", {0.7})), 1e-10);
  EXPECT_LE(second_identity_residual(preset("fubini-study", {0.7})), 1e-10);
  const auto rc = random_chart({2, 3, 0.1, 3});
  const auto ctx = build_chart(rc.phi, rc.point, 10);
  EXPECT_LE(first_identity_residual(ctx), 1e-9);
  EXPECT_LE(second_identity_residual(ctx), 1e-9);
}

TEST(Separation, HolomorphicLeftAntiholomorphicRight) {
  const auto rc = random_chart({2, 3, 0.1, 8});
  const auto ctx = build_chart(rc.phi, rc.point, 10);
  std::mt19937_64 rng(8);
  const Expr a = random_polynomial(2, 0, 3, Variables::holomorphic, rng);
  const Expr b = random_polynomial(2, 0, 3, Variables::antiholomorphic, rng);
  const Expr f = random_polynomial(2, 0, 3, Variables::all, rng);
  for (auto v : {StarVariant::standard, StarVariant::modified}) {
    const auto left = star_product(a, f, ctx, v);
    const auto right = star_product(f, b, ctx, v);
    for (std::size_t r = 1; r < NuPolynomial::kTerms; ++r) {
      EXPECT_LE(std::abs(left[r]), 1e-10);
      EXPECT_LE(std::abs(right[r]), 1e-10);
    }
  }
}

}  // namespace
