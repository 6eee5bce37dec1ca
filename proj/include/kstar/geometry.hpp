#pragma once

// Kähler geometry of a single holomorphic chart, computed from the jet of a
// potential Phi at a base point.
//
// Index conventions (all 0-based):
//   g_dn(k, l)          = d_k dbar_l Phi                 g_{k lbar}
//   g_up(l, k)          = inverse metric                 g^{lbar k},  sum_l g_dn(k,l) g_up(l,m) = delta_km
//   gamma_hol(s, k, p)  = g_{k p tbar} g^{tbar s}        Gamma^s_{kp}
//   gamma_anti(t, l, q) = g^{tbar s} g_{s qbar lbar}     Gamma^tbar_{lbar qbar}

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <string>

#include "kstar/errors.hpp"
#include "kstar/expr.hpp"
#include "kstar/jet.hpp"
#include "kstar/tensor.hpp"

namespace kstar {

/// Smallest jet order a chart may be built with.
inline constexpr int kMinChartOrder = 6;

/// Eigenvalue floor for positive-definiteness of the metric at the base point.
inline constexpr double kMetricFloor = 1e-8;

/// Curvature components at the base point.
struct CurvatureData {
  ValueTensor<4> lowered;  // (p,q,k,l): R_{p qbar k lbar}
  ValueTensor<4> mixed;    // (q,p,k,l): R^{qbar p}_{k lbar}
  ValueTensor<4> raised;   // (l,k,q,p): R^{lbar k qbar p}
};

struct ChartContext {
  int n = 0;
  ChartPoint point;
  int order = 0;
  Jet phi;
  JetTensor<2> g_dn;
  JetTensor<2> g_up;
  JetTensor<3> gamma_hol;
  JetTensor<3> gamma_anti;

  // Point data derived at build time.
  ValueTensor<3> inverse_d;     // (l,k,j): d_j g^{lbar k}
  ValueTensor<3> inverse_dbar;  // (l,k,j): dbar_j g^{lbar k}
  CurvatureData curv;

  ValueTensor<2> metric() const { return values(g_dn); }
  ValueTensor<2> inverse_metric() const { return values(g_up); }
  ValueTensor<3> christoffel_hol() const { return values(gamma_hol); }
  ValueTensor<3> christoffel_anti() const { return values(gamma_anti); }

  /// Jet of a function at this chart's base point and order.
  Jet function_jet(const Expr& f) const { return eval_jet(f, point, order); }
};

namespace detail {

inline Eigen::MatrixXcd to_matrix(const ValueTensor<2>& t) {
  const int n = t.dimension();
  Eigen::MatrixXcd m(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j) m(i, j) = t(i, j);
  return m;
}

inline void check_metric(const Eigen::MatrixXcd& g) {
  if (!g.allFinite()) throw SingularMetricError("metric at the base point is not finite");
  const double scale = 1.0 + g.norm();
  if ((g - g.adjoint()).norm() <= 1e-10 * scale) {
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es((g + g.adjoint()) / 2.0, Eigen::EigenvaluesOnly);
    const double lo = es.eigenvalues().minCoeff();
    if (lo < kMetricFloor)
      throw SingularMetricError("metric at the base point is not positive-definite (smallest eigenvalue " + std::to_string(lo) + ")");
  } else {
    // Complex potentials give non-Hermitian metrics; only invertibility is required there.
    Eigen::JacobiSVD<Eigen::MatrixXcd> svd(g);
    if (svd.singularValues().minCoeff() < kMetricFloor) throw SingularMetricError("metric at the base point is singular");
  }
}

}  // namespace detail

inline CurvatureData curvature(const ChartContext& ctx) {
  const int n = ctx.n;
  if (ctx.order < 4) throw InsufficientOrderError("curvature needs jet order >= 4");
  const auto hinv = ctx.inverse_metric();
  const auto g = ctx.metric();

  // Third and fourth mixed derivatives of Phi, and first and second ones of g_up.
  ValueTensor<3> hol3(n), anti3(n);  // (p,k,nbar) d_p d_k dbar_n Phi; (m,qbar,lbar) d_m dbar_q dbar_l Phi
  ValueTensor<4> mixed4(n);          // (p,q,k,l) d_p d_k dbar_q dbar_l Phi
  JetTensor<3> dup(n), dbup(n);      // (l,k,j): d_j g^{lk}; dbar_j g^{lk}
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        hol3(a, b, c) = ctx.g_dn(a, c).d(b).value();
        anti3(a, b, c) = ctx.g_dn(a, b).dbar(c).value();
        dup(a, b, c) = ctx.g_up(a, b).d(c);
        dbup(a, b, c) = ctx.g_up(a, b).dbar(c);
        for (int d = 0; d < n; ++d) mixed4(a, b, c, d) = ctx.g_dn(a, b).d(c).dbar(d).value();
      }

  CurvatureData out{ValueTensor<4>(n), ValueTensor<4>(n), ValueTensor<4>(n)};
  for (int p = 0; p < n; ++p)
    for (int q = 0; q < n; ++q)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Complex lowered = -mixed4(p, q, k, l);
          for (int nb = 0; nb < n; ++nb)
            for (int m = 0; m < n; ++m) lowered += hinv(nb, m) * anti3(m, q, l) * hol3(p, k, nb);
          out.lowered(p, q, k, l) = lowered;

          // mixed(q,p,k,l) = d_k dbar_l g^{qp} - (dbar_l g^{qm})(d_k g^{np}) g_{mn}
          Complex mixed = dup(q, p, k).dbar(l).value();
          for (int m = 0; m < n; ++m)
            for (int nb = 0; nb < n; ++nb) mixed -= dbup(q, m, l).value() * dup(nb, p, k).value() * g(m, nb);
          out.mixed(q, p, k, l) = mixed;
        }

  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int q = 0; q < n; ++q)
        for (int p = 0; p < n; ++p) {
          Complex acc{};
          for (int a = 0; a < n; ++a)
            for (int b = 0; b < n; ++b) acc += hinv(l, a) * hinv(b, k) * out.mixed(q, p, a, b);
          out.raised(l, k, q, p) = acc;
        }
  return out;
}

/// Metric, inverse metric (as jets) and Christoffel symbols from the jet of Phi.
inline ChartContext build_chart(const Jet& phi, const ChartPoint& point) {
  if (phi.order() < kMinChartOrder)
    throw InsufficientOrderError("chart needs jet order >= " + std::to_string(kMinChartOrder) + ", got " + std::to_string(phi.order()));
  const int n = phi.dimension();
  if (point.dimension() != n) throw UsageError("base point dimension does not match the potential jet");

  ChartContext ctx;
  ctx.n = n;
  ctx.point = point;
  ctx.order = phi.order();
  ctx.phi = phi;

  ctx.g_dn = JetTensor<2>(n);
  for (int k = 0; k < n; ++k) {
    const Jet dk = phi.d(k);
    for (int l = 0; l < n; ++l) ctx.g_dn(k, l) = dk.dbar(l);
  }

  const Eigen::MatrixXcd g0 = detail::to_matrix(ctx.metric());
  detail::check_metric(g0);
  const Eigen::MatrixXcd h0 = g0.inverse();

  // g_up solves g_dn * g_up = 1 degree by degree: with E = g_dn - g_dn(p),
  // iterate H <- H0 - H0 E H; each pass fixes one more Taylor degree.
  const int jorder = ctx.g_dn(0, 0).order();
  JetTensor<2> e(n), h(n), h0j(n);
  for (int k = 0; k < n; ++k)
    for (int l = 0; l < n; ++l) {
      e(k, l) = ctx.g_dn(k, l) - ctx.g_dn(k, l).value();
      h0j(l, k) = Jet::constant(n, jorder, h0(l, k));
      h(l, k) = h0j(l, k);
    }
  for (int pass = 0; pass < jorder; ++pass) {
    JetTensor<2> eh(n);  // (k, m) = sum_l E(k,l) H(l,m)
    for (int k = 0; k < n; ++k)
      for (int m = 0; m < n; ++m) {
        Jet acc(n, jorder);
        for (int l = 0; l < n; ++l) acc += e(k, l) * h(l, m);
        eh(k, m) = std::move(acc);
      }
    JetTensor<2> next(n);
    for (int l = 0; l < n; ++l)
      for (int m = 0; m < n; ++m) {
        Jet acc = h0j(l, m);
        for (int k = 0; k < n; ++k) acc -= eh(k, m) * h0(l, k);
        next(l, m) = std::move(acc);
      }
    h = std::move(next);
  }
  ctx.g_up = std::move(h);

  ctx.gamma_hol = JetTensor<3>(n);
  ctx.gamma_anti = JetTensor<3>(n);
  for (int k = 0; k < n; ++k)
    for (int p = 0; p < n; ++p) {
      for (int s = 0; s < n; ++s) {
        Jet acc(n, jorder - 1);
        for (int t = 0; t < n; ++t) acc += ctx.g_dn(k, t).d(p) * ctx.g_up(t, s);
        ctx.gamma_hol(s, k, p) = std::move(acc);
      }
    }
  for (int l = 0; l < n; ++l)
    for (int q = 0; q < n; ++q)
      for (int t = 0; t < n; ++t) {
        Jet acc(n, jorder - 1);
        for (int s = 0; s < n; ++s) acc += ctx.g_up(t, s) * ctx.g_dn(s, q).dbar(l);
        ctx.gamma_anti(t, l, q) = std::move(acc);
      }

  ctx.inverse_d = ValueTensor<3>(n);
  ctx.inverse_dbar = ValueTensor<3>(n);
  for (int l = 0; l < n; ++l)
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j) {
        ctx.inverse_d(l, k, j) = ctx.g_up(l, k).d(j).value();
        ctx.inverse_dbar(l, k, j) = ctx.g_up(l, k).dbar(j).value();
      }
  ctx.curv = curvature(ctx);
  return ctx;
}

inline ChartContext build_chart(const Expr& phi, const ChartPoint& point, int order) {
  if (order < kMinChartOrder)
    throw InsufficientOrderError("chart needs jet order >= " + std::to_string(kMinChartOrder) + ", got " + std::to_string(order));
  return build_chart(eval_jet(phi, point, order), point);
}

/// max |R^{qp}_{kl} - g^{qc} g^{bp} R_{cbkl}|: the two curvature formulas against each other.
inline double curvature_raising_residual(const ChartContext& ctx, const CurvatureData& curv) {
  const int n = ctx.n;
  const auto h = ctx.inverse_metric();
  double worst = 0.0;
  for (int q = 0; q < n; ++q)
    for (int p = 0; p < n; ++p)
      for (int k = 0; k < n; ++k)
        for (int l = 0; l < n; ++l) {
          Complex acc{};
          for (int c = 0; c < n; ++c)
            for (int b = 0; b < n; ++b) acc += h(q, c) * h(b, p) * curv.lowered(c, b, k, l);
          worst = std::max(worst, std::abs(acc - curv.mixed(q, p, k, l)));
        }
  return worst;
}

/// Holomorphic and antiholomorphic covariant derivatives of a function, as jets.
struct CovariantDerivatives {
  int depth = 0;
  JetTensor<1> hol1, anti1;  // f_{/k}, f_{/lbar}
  JetTensor<2> hol2, anti2;  // f_{/kp}, f_{/lbar qbar}
  JetTensor<3> hol3, anti3;  // f_{/kps}, f_{/lbar qbar tbar}
};

inline CovariantDerivatives covariant_derivatives(const Jet& f, const ChartContext& ctx, int up_to = 3) {
  if (up_to < 1 || up_to > 3) throw UsageError("covariant derivatives are supported up to order 3");
  if (f.dimension() != ctx.n) throw JetMismatchError("function jet and chart differ in dimension");
  if (f.order() < up_to) throw InsufficientOrderError("function jet too short for covariant derivatives of order " + std::to_string(up_to));
  const int n = ctx.n;
  const auto& G = ctx.gamma_hol;
  const auto& Gb = ctx.gamma_anti;
  CovariantDerivatives out;
  out.depth = up_to;
  out.hol1 = JetTensor<1>(n);
  out.anti1 = JetTensor<1>(n);
  for (int k = 0; k < n; ++k) {
    out.hol1(k) = f.d(k);
    out.anti1(k) = f.dbar(k);
  }
  if (up_to < 2) return out;

  out.hol2 = JetTensor<2>(n);
  out.anti2 = JetTensor<2>(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b) {
      Jet h = out.hol1(a).d(b);
      Jet w = out.anti1(a).dbar(b);
      for (int s = 0; s < n; ++s) {
        h -= G(s, a, b) * out.hol1(s);
        w -= Gb(s, a, b) * out.anti1(s);
      }
      out.hol2(a, b) = std::move(h);
      out.anti2(a, b) = std::move(w);
    }
  if (up_to < 3) return out;

  out.hol3 = JetTensor<3>(n);
  out.anti3 = JetTensor<3>(n);
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int c = 0; c < n; ++c) {
        Jet h = out.hol2(a, b).d(c);
        Jet w = out.anti2(a, b).dbar(c);
        for (int s = 0; s < n; ++s) {
          h -= G(s, a, c) * out.hol2(s, b) + G(s, b, c) * out.hol2(a, s);
          w -= Gb(s, a, c) * out.anti2(s, b) + Gb(s, b, c) * out.anti2(a, s);
        }
        out.hol3(a, b, c) = std::move(h);
        out.anti3(a, b, c) = std::move(w);
      }
  return out;
}

/// Largest violation of the two Jacobi identities for g^{lbar k} at the base point.
inline double jacobi_residual(const ChartContext& ctx) {
  const int n = ctx.n;
  const auto h = ctx.inverse_metric();
  ValueTensor<3> dh(n), dbh(n);  // (l,k,j): d_j g^{lk}, dbar_j g^{lk}
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      for (int j = 0; j < n; ++j) {
        dh(a, b, j) = ctx.g_up(a, b).d(j).value();
        dbh(a, b, j) = ctx.g_up(a, b).dbar(j).value();
      }
  double worst = 0.0;
  for (int l = 0; l < n; ++l)
    for (int nb = 0; nb < n; ++nb)
      for (int m = 0; m < n; ++m) {
        // g^{lk} d_k g^{nm} = g^{nk} d_k g^{lm}
        Complex lhs{}, rhs{};
        for (int k = 0; k < n; ++k) {
          lhs += h(l, k) * dh(nb, m, k);
          rhs += h(nb, k) * dh(l, m, k);
        }
        worst = std::max(worst, std::abs(lhs - rhs));
      }
  for (int nb = 0; nb < n; ++nb)
    for (int m = 0; m < n; ++m)
      for (int k = 0; k < n; ++k) {
        // g^{lk} dbar_l g^{nm} = g^{lm} dbar_l g^{nk}
        Complex lhs{}, rhs{};
        for (int l = 0; l < n; ++l) {
          lhs += h(l, k) * dbh(nb, m, l);
          rhs += h(l, m) * dbh(nb, k, l);
        }
        worst = std::max(worst, std::abs(lhs - rhs));
      }
  return worst;
}

}  // namespace kstar
