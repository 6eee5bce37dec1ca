#include <gtest/gtest.h>

#include <random>

#include "kstar/expr.hpp"
#include "kstar/jet.hpp"
#include "support.hpp"

namespace {

using namespace kstar;
using kstar::testing::all_index_pairs;
using kstar::testing::random_jet;

Jet z1(int order) { return Jet::coordinate(1, order, 0, 0.0); }
Jet zb1(int order) { return Jet::coordinate(1, order, 1, 0.0); }

const MultiIndex k0{0}, k1{1}, k2{2}, k3{3};

TEST(MultiIndex, OrderAndFactorial) {
  MultiIndex a{2, 1, 0};
  EXPECT_EQ(a.order(), 3);
  EXPECT_DOUBLE_EQ(a.factorial(), 2.0);
  EXPECT_EQ((a + MultiIndex{0, 1, 3}), (MultiIndex{2, 2, 3}));
  EXPECT_THROW(MultiIndex({1, -1}), UsageError);
}

TEST(Jet, ProductOfLinearFactors) {
  const Jet a = (1.0 + z1(2)) * (1.0 + zb1(2));
  EXPECT_EQ(a.coefficient(k1, k1), Complex(1.0));
  EXPECT_EQ(a.coefficient(k1, k0), Complex(1.0));
  EXPECT_EQ(a.coefficient(k0, k1), Complex(1.0));
  EXPECT_EQ(a.coefficient(k0, k0), Complex(1.0));
}

TEST(Jet, UnitIsNeutral) {
  std::mt19937_64 rng(7);
  const Jet a = random_jet(2, 5, rng);
  const Jet prod = a * Jet::constant(2, 5, 1.0);
  EXPECT_EQ(max_abs_difference(prod, a), 0.0);
}

TEST(Jet, ProductDropsDegreesAboveOrder) {
  const Jet zz = z1(3) * zb1(3);
  const Jet sq = zz * zz;
  EXPECT_EQ(sq.max_abs(), 0.0);
  EXPECT_EQ(sq.coefficient(k2, k2), Complex(0.0));
}

TEST(Jet, ReciprocalGeometricSeries) {
  const Jet r = recip(1.0 + z1(4) * zb1(4));
  EXPECT_EQ(r.coefficient(k0, k0), Complex(1.0));
  EXPECT_EQ(r.coefficient(k1, k1), Complex(-1.0));
  EXPECT_EQ(r.coefficient(k2, k2), Complex(1.0));
  EXPECT_EQ(r.coefficient(k1, k0), Complex(0.0));
}

TEST(Jet, ReciprocalOfConstant) {
  const Jet r = recip(Jet::constant(1, 3, 2.0));
  EXPECT_EQ(r.value(), Complex(0.5));
  EXPECT_EQ((r - r.value()).max_abs(), 0.0);
}

TEST(Jet, ReciprocalDefiningProperty) {
  std::mt19937_64 rng(11);
  for (int trial = 0; trial < 5; ++trial) {
    const Jet a = random_jet(2, 6, rng, Complex(1.0));
    const Jet one = a * recip(a);
    EXPECT_LT(max_abs_difference(one, Jet::constant(2, 6, 1.0)), 1e-10);
  }
}

TEST(Jet, ReciprocalRejectsZeroConstant) { EXPECT_THROW(recip(z1(3)), PoleError); }

TEST(Jet, LogSeries) {
  const Jet l = log(1.0 + z1(6) * zb1(6));
  EXPECT_NEAR(std::abs(l.coefficient(k1, k1) - 1.0), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(l.coefficient(k2, k2) + 0.5), 0.0, 1e-15);
  EXPECT_NEAR(std::abs(l.coefficient(k3, k3) - 1.0 / 3.0), 0.0, 1e-15);
  EXPECT_EQ(l.value(), Complex(0.0));
}

TEST(Jet, LogBranchCutAndZero) {
  EXPECT_THROW(log(Jet::constant(1, 2, -1.0) + z1(2)), BranchError);
  EXPECT_THROW(log(z1(2)), PoleError);
  EXPECT_NO_THROW(log(Jet::constant(1, 2, Complex(-1.0, 0.1))));
}

TEST(Jet, ExpSeries) {
  const Jet e = exp(z1(3));
  EXPECT_NEAR(std::abs(e.coefficient(k3, k0) - 1.0 / 6.0), 0.0, 1e-15);
  EXPECT_EQ(e.value(), Complex(1.0));
}

TEST(Jet, ExpInvertsLog) {
  std::mt19937_64 rng(13);
  for (int trial = 0; trial < 5; ++trial) {
    const Jet a = random_jet(1, 8, rng, Complex(1.0));
    EXPECT_LT(max_abs_difference(exp(log(a)), a), 1e-10);
  }
}

TEST(Jet, IntegerPowers) {
  std::mt19937_64 rng(17);
  const Jet a = random_jet(1, 5, rng, Complex(1.5, 0.5));
  EXPECT_LT(max_abs_difference(pow(a, 3), a * a * a), 1e-12);
  EXPECT_LT(max_abs_difference(pow(a, -2) * a * a, Jet::constant(1, 5, 1.0)), 1e-12);
  EXPECT_EQ(max_abs_difference(pow(a, 0), Jet::constant(1, 5, 1.0)), 0.0);
  EXPECT_THROW(pow(z1(3), -1), PoleError);
  EXPECT_LT(max_abs_difference(analytic(a, Analytic::power, 2), a * a), 1e-13);
}

TEST(Jet, DerivativeExtraction) {
  const Jet a = z1(4) * z1(4) * zb1(4);
  EXPECT_EQ(a.partial(k2, k1), Complex(2.0));
  const Jet b = 3.0 + z1(2);
  EXPECT_EQ(b.partial(k0, k0), Complex(3.0));
  EXPECT_THROW(a.partial(k3, k2), InsufficientOrderError);
}

TEST(Jet, LogMixedFourthDerivative) {
  const Jet l = log(1.0 + z1(6) * zb1(6));
  EXPECT_NEAR(std::abs(l.partial(k2, k2) + 2.0), 0.0, 1e-14);
  // independent: contour integral of the scalar function
  const auto F = [](const std::vector<Complex>& x) { return std::log(1.0 + x[0] * x[1]); };
  EXPECT_NEAR(std::abs(kstar::testing::cauchy_derivative(F, {0.0, 0.0}, {2, 2}) + 2.0), 0.0, 1e-10);
}

TEST(Jet, MatchesContourOracleAwayFromOrigin) {
  const ChartPoint p = ChartPoint::from_holomorphic({Complex(0.3, 0.2)});
  const Expr e = parse("exp(z1*zb1)/(1+z1^2) + log(2+zb1)", 1);
  const Jet j = eval_jet(e, p, 6);
  const auto F = [](const std::vector<Complex>& x) { return std::exp(x[0] * x[1]) / (1.0 + x[0] * x[0]) + std::log(2.0 + x[1]); };
  const std::vector<Complex> base = {p.z[0], p.zb[0]};
  for (const auto& [hol, anti] : all_index_pairs(1, 6)) {
    const Complex oracle = kstar::testing::cauchy_derivative(F, base, {hol[0], anti[0]});
    const Complex got = j.partial(hol, anti);
    EXPECT_LT(std::abs(got - oracle), 1e-8 * (1.0 + std::abs(oracle))) << "hol=" << hol[0] << " anti=" << anti[0];
  }
}

TEST(Jet, RingAxioms) {
  std::mt19937_64 rng(19);
  for (int n = 1; n <= 2; ++n) {
    const Jet a = random_jet(n, 5, rng), b = random_jet(n, 5, rng), c = random_jet(n, 5, rng);
    EXPECT_LT(max_abs_difference((a * b) * c, a * (b * c)), 1e-13);
    EXPECT_LT(max_abs_difference(a * b, b * a), 1e-14);
    EXPECT_LT(max_abs_difference(a * (b + c), a * b + a * c), 1e-13);
    EXPECT_LT(max_abs_difference((a + b) + c, a + (b + c)), 1e-15);
    EXPECT_EQ(max_abs_difference(a + b, b + a), 0.0);
    EXPECT_EQ((a - a).max_abs(), 0.0);
  }
}

TEST(Jet, LeibnizRule) {
  std::mt19937_64 rng(23);
  const int order = 5;
  const Jet a = random_jet(2, order, rng), b = random_jet(2, order, rng);
  const Jet ab = a * b;
  for (const auto& [hol, anti] : all_index_pairs(2, order)) {
    Complex expected{};
    for (const auto& [h2, a2] : all_index_pairs(2, order)) {
      bool below = true;
      for (std::size_t k = 0; k < 2; ++k) below = below && h2[k] <= hol[k] && a2[k] <= anti[k];
      if (!below) continue;
      double binom = 1.0;
      MultiIndex hr(2), ar(2);
      for (std::size_t k = 0; k < 2; ++k) {
        binom *= std::tgamma(hol[k] + 1) / (std::tgamma(h2[k] + 1) * std::tgamma(hol[k] - h2[k] + 1));
        binom *= std::tgamma(anti[k] + 1) / (std::tgamma(a2[k] + 1) * std::tgamma(anti[k] - a2[k] + 1));
        hr[k] = hol[k] - h2[k];
        ar[k] = anti[k] - a2[k];
      }
      expected += binom * a.partial(h2, a2) * b.partial(hr, ar);
    }
    EXPECT_LT(std::abs(ab.partial(hol, anti) - expected), 1e-9 * (1.0 + std::abs(expected)));
  }
}

TEST(Jet, TruncationCoherence) {
  const ChartPoint p = ChartPoint::from_holomorphic({Complex(0.1, 0.2), Complex(-0.2, 0.05)});
  const Expr e = parse("log(1+z1*zb1+z2*zb2) * exp(z1*zb2) / (2 - z2)^2", 2);
  for (int J = 2; J <= 7; ++J) {
    const Jet hi = eval_jet(e, p, J);
    const Jet lo = eval_jet(e, p, J - 1);
    EXPECT_LT(max_abs_difference(hi.truncated(J - 1), lo), 1e-13) << "J=" << J;
  }
}

TEST(Jet, DerivativeLowersOrder) {
  std::mt19937_64 rng(29);
  const Jet a = random_jet(2, 4, rng);
  const Jet d = a.d(1);
  EXPECT_EQ(d.order(), 3);
  for (const auto& [hol, anti] : all_index_pairs(2, 3))
    EXPECT_EQ(d.partial(hol, anti), a.partial(hol + MultiIndex{0, 1}, anti));
  EXPECT_THROW(Jet::constant(1, 0, 1.0).d(0), InsufficientOrderError);
}

TEST(Jet, MismatchedDimensionIsRejected) {
  EXPECT_THROW(Jet::constant(1, 3, 1.0) * Jet::constant(2, 3, 1.0), JetMismatchError);
  EXPECT_THROW(Jet::constant(1, 3, 1.0) + Jet::constant(2, 3, 1.0), JetMismatchError);
}

TEST(Jet, MixedOrdersTruncateToTheSmaller) {
  std::mt19937_64 rng(31);
  const Jet a = random_jet(1, 6, rng), b = random_jet(1, 4, rng);
  EXPECT_EQ((a * b).order(), 4);
  EXPECT_EQ((a + b).order(), 4);
  EXPECT_LT(max_abs_difference(a * b, a.truncated(4) * b), 1e-15);
}

TEST(Jet, FirstDerivativesMatchFiniteDifferences) {
  const Expr e = parse("log(1+z1*zb1) + exp(zb1)*z1^3", 1);
  const ChartPoint p = ChartPoint::from_holomorphic({Complex(0.4, -0.3)});
  const Jet j = eval_jet(e, p, 1);
  const double h = 1e-5;
  for (int anti = 0; anti < 2; ++anti) {
    ChartPoint plus = p, minus = p;
    (anti ? plus.zb : plus.z)[0] += h;
    (anti ? minus.zb : minus.z)[0] -= h;
    const Complex fd = (evaluate(e, plus) - evaluate(e, minus)) / (2.0 * h);
    const Complex exact = anti ? j.partial(k0, k1) : j.partial(k1, k0);
    EXPECT_LT(std::abs(exact - fd) / std::abs(exact), 1e-6);
  }
}

}  // namespace
