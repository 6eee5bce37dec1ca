#pragma once

// Bidifferential operators of the standard star-product with separation of
// variables, evaluated in covariant form on one chart.
//
// C1 and C2 are returned as jets so they can be fed back into outer operators
// (nested associativity checks). C3, the auxiliary operators P, Q, R, S, S~ and
// the modified C3~ are only ever needed at the base point and return values.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <string>

#include "kstar/expr.hpp"
#include "kstar/geometry.hpp"
#include "kstar/jet.hpp"
#include "kstar/tensor.hpp"

namespace kstar {

/// c0 + nu c1 + nu^2 c2 + nu^3 c3 with nu^4 = 0.
class NuPolynomial {
public:
  static constexpr std::size_t kTerms = 4;

  NuPolynomial() = default;
  NuPolynomial(Complex c0, Complex c1, Complex c2, Complex c3) : c_{c0, c1, c2, c3} {}

  Complex& operator[](std::size_t r) { return c_.at(r); }
  const Complex& operator[](std::size_t r) const { return c_.at(r); }
  const std::array<Complex, kTerms>& coefficients() const noexcept { return c_; }

  friend NuPolynomial operator+(NuPolynomial a, const NuPolynomial& b) {
    for (std::size_t r = 0; r < kTerms; ++r) a.c_[r] += b.c_[r];
    return a;
  }
  friend NuPolynomial operator-(NuPolynomial a, const NuPolynomial& b) {
    for (std::size_t r = 0; r < kTerms; ++r) a.c_[r] -= b.c_[r];
    return a;
  }
  friend NuPolynomial operator*(const NuPolynomial& a, const NuPolynomial& b) {
    NuPolynomial out;
    for (std::size_t i = 0; i < kTerms; ++i)
      for (std::size_t j = 0; i + j < kTerms; ++j) out.c_[i + j] += a.c_[i] * b.c_[j];
    return out;
  }
  friend bool operator==(const NuPolynomial&, const NuPolynomial&) = default;

  double max_abs() const {
    double m = 0.0;
    for (const auto& c : c_) m = std::max(m, std::abs(c));
    return m;
  }

private:
  std::array<Complex, kTerms> c_{};
};

/// standard uses C3, modified uses C3~ = C3 + R/12.
enum class StarVariant { standard, modified };

inline const char* to_string(StarVariant v) { return v == StarVariant::standard ? "standard" : "modified"; }

template <typename T>
struct AuxiliaryOperators {
  T P{}, Q{}, R{}, S{}, S_tilde{};
};

/// Point values of the covariant derivatives of a function up to order 3.
struct CovariantValues {
  ValueTensor<1> hol1, anti1;
  ValueTensor<2> hol2, anti2;
  ValueTensor<3> hol3, anti3;
};

/// Jet of an operand, truncated to what point-valued operators need.
inline Jet operand_jet(const Expr& f, const ChartContext& ctx) { return eval_jet(f, ctx.point, std::min(ctx.order, 3)); }

inline CovariantValues covariant_values(const Jet& f, const ChartContext& ctx) {
  const auto cd = covariant_derivatives(f.truncated(std::min(f.order(), 3)), ctx, 3);
  return {values(cd.hol1), values(cd.anti1), values(cd.hol2), values(cd.anti2), values(cd.hol3), values(cd.anti3)};
}

// ---------------------------------------------------------------------------
// C1, C2 (jet-valued)
// ---------------------------------------------------------------------------

/// C1(f,g) = g^{lk} f_{/l} g_{/k}.
inline Jet c1(const Jet& f, const Jet& g, const ChartContext& ctx) {
  const int n = ctx.n;
  Jet out(n, std::min({f.order(), g.order()}) - 1);
  for (int l = 0; l < n; ++l) {
    const Jet fl = f.dbar(l);
    for (int k = 0; k < n; ++k) out += ctx.g_up(l, k) * fl * g.d(k);
  }
  return out;
}

/// C2(f,g) = 1/2 g^{lk} g^{qp} f_{/lq} g_{/kp}.
inline Jet c2(const Jet& f, const Jet& g, const ChartContext& ctx) {
  const int n = ctx.n;
  const auto F = covariant_derivatives(f, ctx, 2);
  const auto G = covariant_derivatives(g, ctx, 2);
  Jet out(n, std::min(F.anti2(0, 0).order(), G.hol2(0, 0).order()));
  for (int k = 0; k < n; ++k)
    for (int p = 0; p < n; ++p) {
      // raise both antiholomorphic indices of f_{/lq}
      Jet raised(n, out.order());
      for (int l = 0; l < n; ++l)
        for (int q = 0; q < n; ++q) raised += ctx.g_up(l, k) * ctx.g_up(q, p) * F.anti2(l, q);
      out += raised * G.hol2(k, p);
    }
  return out * 0.5;
}

/// C2 in its non-covariant form, written with raw partial derivatives of f, g and g^{lk}.
inline Jet c2_expanded(const Jet& f, const Jet& g, const ChartContext& ctx) {
  const int n = ctx.n;
  Jet out(n, std::min(f.order(), g.order()) - 2);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int q = 0; q < n; ++q)
        for (int p = 0; p < n; ++p) {
          const Jet& hqp = ctx.g_up(q, p);
          const Jet& hlk = ctx.g_up(l, k);
          const Jet fq = f.dbar(q);
          const Jet gk = g.d(k);
          out += hqp * hlk * fq.dbar(l) * gk.d(p);
          out += hqp * hlk.d(p) * fq.dbar(l) * gk;
          out += hqp.dbar(l) * hlk * fq * gk.d(p);
          out += hqp.dbar(l) * hlk.d(p) * fq * gk;
        }
  return out * 0.5;
}

// ---------------------------------------------------------------------------
// C3 and the auxiliary operators (point-valued)
// ---------------------------------------------------------------------------

/// C3(f,g) = 1/6 g^{lk} g^{qp} g^{ts} f_{/lqt} g_{/kps} + 1/4 R^{lkqp} f_{/lq} g_{/kp}.
inline Complex c3(const CovariantValues& F, const CovariantValues& G, const ChartContext& ctx) {
  const int n = ctx.n;
  const auto h = ctx.inverse_metric();
  Complex third{}, curv{};
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int q = 0; q < n; ++q)
        for (int p = 0; p < n; ++p) {
          curv += ctx.curv.raised(l, k, q, p) * F.anti2(l, q) * G.hol2(k, p);
          for (int t = 0; t < n; ++t)
            for (int s = 0; s < n; ++s) third += h(l, k) * h(q, p) * h(t, s) * F.anti3(l, q, t) * G.hol3(k, p, s);
        }
  return third / 6.0 + curv / 4.0;
}

inline Complex c3(const Jet& f, const Jet& g, const ChartContext& ctx) {
  return c3(covariant_values(f, ctx), covariant_values(g, ctx), ctx);
}

/// Chart part of R(f,g) = g^{nm} R^{lp}_{mq} R^{qk}_{pn} f_{/l} g_{/k}, indexed (l,k).
inline ValueTensor<2> r_kernel(const ChartContext& ctx) {
  const int n = ctx.n;
  const auto h = ctx.inverse_metric();
  const auto& mixed = ctx.curv.mixed;  // (q,p,k,l) = R^{qp}_{kl}
  ValueTensor<2> K(n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      Complex acc{};
      for (int nb = 0; nb < n; ++nb)
        for (int m = 0; m < n; ++m)
          for (int p = 0; p < n; ++p)
            for (int q = 0; q < n; ++q) acc += h(nb, m) * mixed(l, p, m, q) * mixed(q, k, p, nb);
      K(l, k) = acc;
    }
  return K;
}

/// Chart part of S (the locally defined operator), indexed (l,k).
inline ValueTensor<2> s_kernel(const ChartContext& ctx) {
  const int n = ctx.n;
  const auto g = ctx.metric();
  const auto& dh = ctx.inverse_d;     // (a,b,j) = d_j g^{ab}
  const auto& dbh = ctx.inverse_dbar;  // (a,b,j) = dbar_j g^{ab}
  ValueTensor<2> K(n);
  // g_{mn} (dbar_q g^{ls}) (d_s g^{np}) (dbar_t g^{qm}) (d_p g^{tk})
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      Complex acc{};
      for (int m = 0; m < n; ++m)
        for (int nb = 0; nb < n; ++nb)
          for (int q = 0; q < n; ++q)
            for (int s = 0; s < n; ++s)
              for (int p = 0; p < n; ++p)
                for (int t = 0; t < n; ++t) acc += g(m, nb) * dbh(l, s, q) * dh(nb, p, s) * dbh(q, m, t) * dh(t, k, p);
      K(l, k) = acc;
    }
  return K;
}

/// Chart part of S~ (the intermediate form in the proof), indexed (l,k).
inline ValueTensor<2> s_tilde_kernel(const ChartContext& ctx) {
  const int n = ctx.n;
  const auto g = ctx.metric();
  const auto& dh = ctx.inverse_d;
  const auto& dbh = ctx.inverse_dbar;
  ValueTensor<2> K(n);
  // (dbar_q g^{lm}) (d_m g^{np}) (dbar_n g^{qs}) (d_p g^{tk}) g_{st}
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k) {
      Complex acc{};
      for (int q = 0; q < n; ++q)
        for (int m = 0; m < n; ++m)
          for (int nb = 0; nb < n; ++nb)
            for (int p = 0; p < n; ++p)
              for (int s = 0; s < n; ++s)
                for (int t = 0; t < n; ++t) acc += dbh(l, m, q) * dh(nb, p, m) * dbh(q, s, nb) * dh(t, k, p) * g(s, t);
      K(l, k) = acc;
    }
  return K;
}

inline Complex contract_first_order(const ValueTensor<2>& kernel, const CovariantValues& F, const CovariantValues& G) {
  Complex acc{};
  for (int l = 0; l < kernel.dimension(); ++l)
    for (int k = 0; k < kernel.dimension(); ++k) acc += kernel(l, k) * F.anti1(l) * G.hol1(k);
  return acc;
}

inline AuxiliaryOperators<Complex> op_PQRS(const CovariantValues& F, const CovariantValues& G, const ChartContext& ctx) {
  const int n = ctx.n;
  const auto h = ctx.inverse_metric();
  AuxiliaryOperators<Complex> out;

  // P: raise the three antiholomorphic indices of f_{/lqt} one at a time.
  ValueTensor<3> r1(n), r2(n), r3(n);
  for (int k = 0; k < n; ++k)
    for (int q = 0; q < n; ++q)
      for (int t = 0; t < n; ++t)
        for (int l = 0; l < n; ++l) r1(k, q, t) += h(l, k) * F.anti3(l, q, t);
  for (int k = 0; k < n; ++k)
    for (int p = 0; p < n; ++p)
      for (int t = 0; t < n; ++t)
        for (int q = 0; q < n; ++q) r2(k, p, t) += h(q, p) * r1(k, q, t);
  for (int k = 0; k < n; ++k)
    for (int p = 0; p < n; ++p)
      for (int s = 0; s < n; ++s)
        for (int t = 0; t < n; ++t) r3(k, p, s) += h(t, s) * r2(k, p, t);
  for (int k = 0; k < n; ++k)
    for (int p = 0; p < n; ++p)
      for (int s = 0; s < n; ++s) out.P += r3(k, p, s) * G.hol3(k, p, s);

  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int q = 0; q < n; ++q)
        for (int p = 0; p < n; ++p) out.Q -= ctx.curv.raised(l, k, q, p) * F.anti2(l, q) * G.hol2(k, p);

  out.R = contract_first_order(r_kernel(ctx), F, G);
  out.S = contract_first_order(s_kernel(ctx), F, G);
  out.S_tilde = contract_first_order(s_tilde_kernel(ctx), F, G);
  return out;
}

inline AuxiliaryOperators<Complex> op_PQRS(const Jet& f, const Jet& g, const ChartContext& ctx) {
  return op_PQRS(covariant_values(f, ctx), covariant_values(g, ctx), ctx);
}

/// R(f,g) alone.
inline Complex op_R(const CovariantValues& F, const CovariantValues& G, const ChartContext& ctx) {
  return contract_first_order(r_kernel(ctx), F, G);
}

/// C3~ = C3 + R/12.
inline Complex c3_tilde(const CovariantValues& F, const CovariantValues& G, const ChartContext& ctx) {
  return c3(F, G, ctx) + op_R(F, G, ctx) / 12.0;
}

inline Complex c3_tilde(const Jet& f, const Jet& g, const ChartContext& ctx) {
  return c3_tilde(covariant_values(f, ctx), covariant_values(g, ctx), ctx);
}

/// The order-3 operator of the chosen variant.
inline Complex c3_variant(const Jet& f, const Jet& g, const ChartContext& ctx, StarVariant v) {
  return v == StarVariant::standard ? c3(f, g, ctx) : c3_tilde(f, g, ctx);
}

/// f * g at the base point, truncated at nu^3.
inline NuPolynomial star_product(const Jet& f, const Jet& g, const ChartContext& ctx, StarVariant v) {
  return {f.value() * g.value(), c1(f, g, ctx).value(), c2(f, g, ctx).value(), c3_variant(f, g, ctx, v)};
}

struct PoissonCheck {
  Complex antisym;  // C1(f,g) - C1(g,f)
  Complex bracket;  // g^{lk} (f_{/l} g_{/k} - g_{/l} f_{/k})
};

inline PoissonCheck poisson_antisymmetry(const Jet& f, const Jet& g, const ChartContext& ctx) {
  const int n = ctx.n;
  const auto h = ctx.inverse_metric();
  Complex bracket{};
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      bracket += h(l, k) * (f.dbar(l).value() * g.d(k).value() - g.dbar(l).value() * f.d(k).value());
  return {c1(f, g, ctx).value() - c1(g, f, ctx).value(), bracket};
}

// ---------------------------------------------------------------------------
// Identities used in the proof that R and S agree modulo regular operators
// ---------------------------------------------------------------------------

/// max over (n,q,l,p) of |g^{nm}(dbar_q g^{la})(d_m g^{bp}) g_{ab} - (dbar_q g^{lm})(d_m g^{np})|.
inline double first_identity_residual(const ChartContext& ctx) {
  const int n = ctx.n;
  const auto h = ctx.inverse_metric();
  const auto g = ctx.metric();
  const auto& dh = ctx.inverse_d;
  const auto& dbh = ctx.inverse_dbar;
  double worst = 0.0;
  for (int nb = 0; nb < n; ++nb)
    for (int q = 0; q < n; ++q)
      for (int l = 0; l < n; ++l)
        for (int p = 0; p < n; ++p) {
          Complex lhs{}, rhs{};
          for (int m = 0; m < n; ++m) {
            rhs += dbh(l, m, q) * dh(nb, p, m);
            for (int a = 0; a < n; ++a)
              for (int b = 0; b < n; ++b) lhs += h(nb, m) * dbh(l, a, q) * dh(b, p, m) * g(a, b);
          }
          worst = std::max(worst, std::abs(lhs - rhs));
        }
  return worst;
}

/// max over (m,q,p,k) of |g^{nm}(dbar_n g^{qs})(d_p g^{tk}) g_{st} - (dbar_n g^{qm})(d_p g^{nk})|.
inline double second_identity_residual(const ChartContext& ctx) {
  const int n = ctx.n;
  const auto h = ctx.inverse_metric();
  const auto g = ctx.metric();
  const auto& dh = ctx.inverse_d;
  const auto& dbh = ctx.inverse_dbar;
  double worst = 0.0;
  for (int m = 0; m < n; ++m)
    for (int q = 0; q < n; ++q)
      for (int p = 0; p < n; ++p)
        for (int k = 0; k < n; ++k) {
          Complex lhs{}, rhs{};
          for (int nb = 0; nb < n; ++nb) {
            rhs += dbh(q, m, nb) * dh(nb, k, p);
            for (int s = 0; s < n; ++s)
              for (int t = 0; t < n; ++t) lhs += h(nb, m) * dbh(q, s, nb) * dh(t, k, p) * g(s, t);
          }
          worst = std::max(worst, std::abs(lhs - rhs));
        }
  return worst;
}

// ---------------------------------------------------------------------------
// Expression front ends
// ---------------------------------------------------------------------------

inline Complex c1(const Expr& f, const Expr& g, const ChartContext& ctx) { return c1(operand_jet(f, ctx), operand_jet(g, ctx), ctx).value(); }
inline Complex c2(const Expr& f, const Expr& g, const ChartContext& ctx) { return c2(operand_jet(f, ctx), operand_jet(g, ctx), ctx).value(); }
inline Complex c2_expanded(const Expr& f, const Expr& g, const ChartContext& ctx) {
  return c2_expanded(operand_jet(f, ctx), operand_jet(g, ctx), ctx).value();
}
inline Complex c3(const Expr& f, const Expr& g, const ChartContext& ctx) { return c3(operand_jet(f, ctx), operand_jet(g, ctx), ctx); }
inline Complex c3_tilde(const Expr& f, const Expr& g, const ChartContext& ctx) {
  return c3_tilde(operand_jet(f, ctx), operand_jet(g, ctx), ctx);
}
inline AuxiliaryOperators<Complex> op_PQRS(const Expr& f, const Expr& g, const ChartContext& ctx) {
  return op_PQRS(operand_jet(f, ctx), operand_jet(g, ctx), ctx);
}
inline NuPolynomial star_product(const Expr& f, const Expr& g, const ChartContext& ctx, StarVariant v) {
  return star_product(operand_jet(f, ctx), operand_jet(g, ctx), ctx, v);
}
inline PoissonCheck poisson_antisymmetry(const Expr& f, const Expr& g, const ChartContext& ctx) {
  return poisson_antisymmetry(operand_jet(f, ctx), operand_jet(g, ctx), ctx);
}

}  // namespace kstar
