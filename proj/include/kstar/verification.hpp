#pragma once

// Residual checks for every computable identity of the construction, run on
// preset charts and on seeded random charts.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstdio>
#include <future>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "kstar/errors.hpp"
#include "kstar/expr.hpp"
#include "kstar/geometry.hpp"
#include "kstar/oracle.hpp"
#include "kstar/presets.hpp"
#include "kstar/star.hpp"

namespace kstar {

struct CheckResult {
  std::string name;
  double residual = 0.0;
  double tolerance = 0.0;
  bool pass = false;
  std::string context;
};

inline CheckResult make_check(std::string name, double residual, double tolerance, std::string context) {
  // NaN residuals fail.
  const bool pass = residual <= tolerance;
  return {std::move(name), residual, tolerance, pass, std::move(context)};
}

struct Tolerances {
  double oracle = 1e-8;          // relative
  double associativity = 1e-8;
  double separation = 1e-10;
  double pointwise = 1e-10;      // tensor identities at the base point
  double decomposition = 1e-11;  // C3 = P/6 - Q/4
  double gauge = 1e-8;           // relative
  double covariance = 1e-7;
  double spot = 1e-10;
  double finite_difference = 1e-6;  // relative

  void override_all(double t) {
    oracle = associativity = separation = pointwise = decomposition = gauge = covariance = spot = finite_difference = t;
  }
};

inline std::string format_complex(Complex c) {
  char buf[96];
  if (c.imag() == 0.0) std::snprintf(buf, sizeof buf, "%.10g", c.real());
  else std::snprintf(buf, sizeof buf, "%.10g%+.10gi", c.real(), c.imag());
  return buf;
}

inline std::string describe(const ChartPoint& p) {
  std::string s = "(";
  for (std::size_t k = 0; k < p.z.size(); ++k) s += (k ? ", " : "") + format_complex(p.z[k]);
  return s + ")";
}

// ---------------------------------------------------------------------------
// Random charts and test functions
// ---------------------------------------------------------------------------

struct RandomChartSpec {
  int n = 1;
  int degree = 3;
  double epsilon = 0.1;
  std::uint64_t seed = 0;
};

struct RandomChart {
  Expr phi;
  ChartPoint point;
};

inline constexpr int kResampleLimit = 100;

/// Uniform draw from the closed unit disk.
inline Complex unit_disk(std::mt19937_64& rng) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (;;) {
    const Complex c(u(rng), u(rng));
    if (std::norm(c) <= 1.0) return c;
  }
}

inline std::vector<MultiIndex> multi_indices_up_to(int n, int lo, int hi) {
  std::vector<MultiIndex> out;
  for (int d = lo; d <= hi; ++d)
    for (auto& m : detail::multi_indices_of_order(n, d)) out.push_back(std::move(m));
  return out;
}

/// Phi = sum z_k zb_k + eps sum_{1<=|A|,|B|<=d} (c z^A zb^B + conj(c) z^B zb^A), and a base point
/// with |z_k| <= 0.3 where the metric is positive-definite. Deterministic in the seed.
inline RandomChart random_chart(const RandomChartSpec& spec) {
  if (spec.n < 1 || spec.degree < 1) throw UsageError("random chart needs n >= 1 and degree >= 1");
  std::mt19937_64 rng(spec.seed);
  const auto un = static_cast<std::size_t>(spec.n);
  const auto indices = multi_indices_up_to(spec.n, 1, spec.degree);
  for (int attempt = 0; attempt < kResampleLimit; ++attempt) {
    Expr phi = preset_potential("flat", spec.n);
    if (spec.epsilon != 0.0) {
      Expr pert;
      bool first = true;
      for (const auto& A : indices)
        for (const auto& B : indices) {
          const Complex c = unit_disk(rng);
          Expr term = monomial(c, A, B) + monomial(std::conj(c), B, A);
          pert = first ? term : pert + term;
          first = false;
        }
      phi = phi + Expr::constant(spec.epsilon) * pert;
    }
    std::vector<Complex> z(un);
    for (auto& c : z) c = 0.3 * unit_disk(rng);
    ChartPoint point = ChartPoint::from_holomorphic(std::move(z));

    const Jet j = eval_jet(phi, point, 2);
    ValueTensor<2> g(spec.n);
    for (std::size_t k = 0; k < un; ++k)
      for (std::size_t l = 0; l < un; ++l) g(k, l) = j.partial(MultiIndex::unit(un, k), MultiIndex::unit(un, l));
    try {
      detail::check_metric(detail::to_matrix(g));
    } catch (const SingularMetricError&) {
      continue;
    }
    return {phi, point};
  }
  throw NumericalError("no positive-definite random chart after " + std::to_string(kResampleLimit) + " draws");
}

inline Expr random_potential(const RandomChartSpec& spec) { return random_chart(spec).phi; }

enum class Variables { all, holomorphic, antiholomorphic };

/// Sum of c_m m over monomials m with min_degree <= deg m <= max_degree, c_m in the unit disk.
inline Expr random_polynomial(int n, int min_degree, int max_degree, Variables vars, std::mt19937_64& rng) {
  const auto un = static_cast<std::size_t>(n);
  Expr out;
  bool first = true;
  auto add = [&](const MultiIndex& hol, const MultiIndex& anti) {
    Expr term = monomial(unit_disk(rng), hol, anti);
    out = first ? term : out + term;
    first = false;
  };
  const MultiIndex none(un);
  if (vars == Variables::all) {
    // monomials in 2n variables, split into holomorphic and antiholomorphic halves
    for (const auto& m : multi_indices_up_to(2 * n, min_degree, max_degree)) {
      std::vector<int> hol(m.entries().begin(), m.entries().begin() + n);
      std::vector<int> anti(m.entries().begin() + n, m.entries().end());
      add(MultiIndex(hol), MultiIndex(anti));
    }
  } else {
    for (const auto& m : multi_indices_up_to(n, min_degree, max_degree))
      vars == Variables::holomorphic ? add(m, none) : add(none, m);
  }
  return out;
}

// ---------------------------------------------------------------------------
// Individual checks
// ---------------------------------------------------------------------------

namespace detail {

/// C_i(x, y) at the base point.
inline Complex outer_operator(int i, const Jet& x, const Jet& y, const ChartContext& ctx, StarVariant v) {
  if (x.order() < i || y.order() < i)
    throw InsufficientOrderError("nested star evaluation: C" + std::to_string(i) + " needs operands of order >= " + std::to_string(i));
  switch (i) {
    case 0: return x.value() * y.value();
    case 1: return c1(x, y, ctx).value();
    case 2: return c2(x, y, ctx).value();
    default: return c3_variant(x, y, ctx, v);
  }
}

/// C_j(x, y) as a function jet.
inline Jet inner_operator(int j, const Jet& x, const Jet& y, const ChartContext& ctx, StarVariant v) {
  switch (j) {
    case 0: return x * y;
    case 1: return c1(x, y, ctx);
    case 2: return c2(x, y, ctx);
    default: return Jet::constant(ctx.n, 0, c3_variant(x, y, ctx, v));
  }
}

}  // namespace detail

/// Residuals of sum_{i+j=r} [C_i(C_j(f,g),h) - C_i(f,C_j(g,h))] for r = 0..3.
inline std::vector<CheckResult> check_associativity(const ChartContext& ctx, StarVariant v, const Jet& f, const Jet& g, const Jet& h,
                                                    double tol, const std::string& context) {
  // Inner results are differentiated at most 3 - j times by the outer operator.
  const int keep = std::min({ctx.order, f.order(), g.order(), h.order(), 6});
  const Jet F = f.truncated(keep), G = g.truncated(keep), H = h.truncated(keep);
  std::vector<CheckResult> out;
  for (int r = 0; r <= 3; ++r) {
    Complex acc{};
    for (int i = 0; i <= r; ++i) {
      const int j = r - i;
      acc += detail::outer_operator(i, detail::inner_operator(j, F, G, ctx, v), H, ctx, v);
      acc -= detail::outer_operator(i, F, detail::inner_operator(j, G, H, ctx, v), ctx, v);
    }
    out.push_back(make_check(std::string("assoc.") + to_string(v) + ".nu" + std::to_string(r), std::abs(acc), tol, context));
  }
  return out;
}

/// a * f = a f and f * b = b f at nu orders 1..3, for holomorphic a and antiholomorphic b.
inline CheckResult check_separation(const ChartContext& ctx, StarVariant v, const Expr& a, const Expr& b, const Expr& f, double tol,
                                    const std::string& context) {
  const auto ca = classify(a), cb = classify(b);
  if (ca != HolomorphyClass::holomorphic && ca != HolomorphyClass::constant) throw UsageError("separation check: a must be holomorphic");
  if (cb != HolomorphyClass::antiholomorphic && cb != HolomorphyClass::constant)
    throw UsageError("separation check: b must be antiholomorphic");
  const NuPolynomial left = star_product(a, f, ctx, v);
  const NuPolynomial right = star_product(f, b, ctx, v);
  double worst = std::max(std::abs(left[0] - evaluate(a, ctx.point) * evaluate(f, ctx.point)),
                          std::abs(right[0] - evaluate(f, ctx.point) * evaluate(b, ctx.point)));
  for (std::size_t r = 1; r < NuPolynomial::kTerms; ++r) worst = std::max({worst, std::abs(left[r]), std::abs(right[r])});
  return make_check(std::string("separation.") + to_string(v), worst, tol, context);
}

/// C3 decomposition, C2 expanded form, curvature raising, Jacobi identity, symmetry of covariant derivatives.
inline std::vector<CheckResult> check_structure(const ChartContext& ctx, const Expr& f, const Expr& g, const Tolerances& tol,
                                                const std::string& context) {
  const Jet fj = operand_jet(f, ctx), gj = operand_jet(g, ctx);
  const auto F = covariant_values(fj, ctx), G = covariant_values(gj, ctx);
  const auto aux = op_PQRS(F, G, ctx);
  const Complex c3v = c3(F, G, ctx);
  std::vector<CheckResult> out;
  out.push_back(make_check("structure.C3=P/6-Q/4", std::abs(c3v - (aux.P / 6.0 - aux.Q / 4.0)), tol.decomposition, context));
  out.push_back(make_check("structure.C2-expanded", std::abs(c2(fj, gj, ctx).value() - c2_expanded(fj, gj, ctx).value()), tol.pointwise, context));
  out.push_back(make_check("structure.curvature-raising", curvature_raising_residual(ctx, ctx.curv), tol.pointwise, context));
  out.push_back(make_check("structure.jacobi", jacobi_residual(ctx), tol.pointwise, context));
  const double sym = std::max({symmetry_defect(F.anti2), symmetry_defect(F.anti3), symmetry_defect(G.hol2), symmetry_defect(G.hol3)});
  out.push_back(make_check("structure.covariant-symmetry", sym, tol.pointwise, context));
  return out;
}

/// The two index identities of the proof and S = S~.
inline std::vector<CheckResult> check_prop1(const ChartContext& ctx, const Expr& f, const Expr& g, double tol, const std::string& context) {
  const auto aux = op_PQRS(f, g, ctx);
  return {make_check("prop1.first-identity", first_identity_residual(ctx), tol, context),
          make_check("prop1.second-identity", second_identity_residual(ctx), tol, context),
          make_check("prop1.S=S~", std::abs(aux.S - aux.S_tilde), tol, context)};
}

/// On a flat chart Q, R, S, S~ vanish and P reduces to the plain third-derivative contraction.
inline CheckResult check_flat_operators(const ChartContext& ctx, const Expr& f, const Expr& g, const std::string& context) {
  const Jet fj = operand_jet(f, ctx), gj = operand_jet(g, ctx);
  const auto aux = op_PQRS(fj, gj, ctx);
  const auto h = ctx.inverse_metric();
  const int n = ctx.n;
  const auto un = static_cast<std::size_t>(n);
  Complex plain{};
  for (int l = 0; l < n; ++l)
    for (int q = 0; q < n; ++q)
      for (int t = 0; t < n; ++t) {
        MultiIndex anti(un);
        ++anti[static_cast<std::size_t>(l)];
        ++anti[static_cast<std::size_t>(q)];
        ++anti[static_cast<std::size_t>(t)];
        const Complex fd = fj.partial(MultiIndex(un), anti);
        for (int k = 0; k < n; ++k)
          for (int p = 0; p < n; ++p)
            for (int s = 0; s < n; ++s) {
              MultiIndex hol(un);
              ++hol[static_cast<std::size_t>(k)];
              ++hol[static_cast<std::size_t>(p)];
              ++hol[static_cast<std::size_t>(s)];
              plain += h(l, k) * h(q, p) * h(t, s) * fd * gj.partial(hol, MultiIndex(un));
            }
      }
  const double worst = std::max({std::abs(aux.P - plain), std::abs(aux.Q), std::abs(aux.R), std::abs(aux.S), std::abs(aux.S_tilde)});
  // exact: every curvature and metric-derivative term is a literal zero on a flat chart
  return make_check("flat.PQRS-vanish", worst, 0.0, context);
}

/// Relative agreement |C_r - oracle_r| / (1 + |oracle_r|) for r = 1..3.
inline std::vector<CheckResult> check_oracle_agreement(const ChartContext& ctx, const Expr& f, const Expr& g, double tol,
                                                       const std::string& context) {
  const Jet fj = operand_jet(f, ctx), gj = operand_jet(g, ctx);
  const auto F = covariant_values(fj, ctx), G = covariant_values(gj, ctx);
  const auto ops = build_left_mult(fj, ctx, 3);
  const Complex covariant[3] = {c1(fj, gj, ctx).value(), c2(fj, gj, ctx).value(), c3(F, G, ctx)};
  std::vector<CheckResult> out;
  for (int r = 1; r <= 3; ++r) {
    const Complex oracle = ops[static_cast<std::size_t>(r)].apply(gj);
    const double rel = std::abs(covariant[r - 1] - oracle) / (1.0 + std::abs(oracle));
    out.push_back(make_check("oracle.C" + std::to_string(r), rel, tol, context));
  }
  return out;
}

/// Oracle agreement on `trials` random charts with seeds spec.seed + t.
inline std::vector<CheckResult> check_oracle_agreement(const RandomChartSpec& spec, int trials, int order, double tol) {
  std::vector<CheckResult> out;
  for (int t = 0; t < trials; ++t) {
    RandomChartSpec s = spec;
    s.seed = spec.seed + static_cast<std::uint64_t>(t);
    const auto chart = random_chart(s);
    const auto ctx = build_chart(chart.phi, chart.point, order);
    std::mt19937_64 rng(s.seed ^ 0x9e3779b97f4a7c15ULL);
    const Expr f = random_polynomial(s.n, 0, 3, Variables::all, rng);
    const Expr g = random_polynomial(s.n, 0, 3, Variables::all, rng);
    const std::string context = "random seed=" + std::to_string(s.seed) + " n=" + std::to_string(s.n) + " J=" + std::to_string(order);
    for (auto& c : check_oracle_agreement(ctx, f, g, tol, context)) out.push_back(std::move(c));
  }
  return out;
}

/// Oracle values are unchanged by Phi -> Phi + h + k (h holomorphic, k antiholomorphic).
inline CheckResult check_gauge(const Expr& phi, const Expr& h, const Expr& k, const ChartPoint& point, const Expr& f, const Expr& g,
                               int order, double tol, const std::string& context) {
  const auto ch = classify(h), ck = classify(k);
  if (ch != HolomorphyClass::holomorphic && ch != HolomorphyClass::constant) throw UsageError("gauge check: h must be holomorphic");
  if (ck != HolomorphyClass::antiholomorphic && ck != HolomorphyClass::constant) throw UsageError("gauge check: k must be antiholomorphic");
  const auto ctx = build_chart(phi, point, order);
  const auto gauged = build_chart(phi + h + k, point, order);
  double worst = 0.0;
  for (int r = 1; r <= 3; ++r) {
    const Complex a = oracle_cr(f, g, ctx, r);
    const Complex b = oracle_cr(f, g, gauged, r);
    worst = std::max(worst, std::abs(a - b) / (1.0 + std::abs(a)));
  }
  return make_check("gauge", worst, tol, context);
}

/// C_r (r = 1..3, both variants) agree between the z-chart and the chart w = map(z).
/// `map` and `inverse` each hold 2n expressions: holomorphic components, then antiholomorphic ones.
inline CheckResult check_covariance(const Expr& phi, const std::vector<Expr>& map, const std::vector<Expr>& inverse, const ChartPoint& point,
                                    const Expr& f, const Expr& g, int order, double tol, const std::string& context,
                                    const std::string& name = "covariance") {
  const int n = point.dimension();
  const auto un = static_cast<std::size_t>(n);
  if (map.size() != 2 * un || inverse.size() != 2 * un) throw UsageError("coordinate maps need 2n component expressions");

  ChartPoint wpoint;
  for (std::size_t k = 0; k < un; ++k) {
    wpoint.z.push_back(evaluate(map[k], point));
    wpoint.zb.push_back(evaluate(map[un + k], point));
  }
  for (std::size_t k = 0; k < un; ++k) {
    const double err = std::max(std::abs(evaluate(inverse[k], wpoint) - point.z[k]), std::abs(evaluate(inverse[un + k], wpoint) - point.zb[k]));
    if (err > 1e-10) throw UsageError("inverse coordinate map does not undo the map at the base point");
  }
  Eigen::MatrixXcd jac(n, n);
  for (std::size_t k = 0; k < un; ++k) {
    const Jet mk = eval_jet(map[k], point, 1);
    for (std::size_t j = 0; j < un; ++j) {
      if (std::abs(mk.partial(MultiIndex(un), MultiIndex::unit(un, j))) > 1e-12)
        throw UsageError("holomorphic map components must not depend on zb");
      jac(static_cast<Eigen::Index>(k), static_cast<Eigen::Index>(j)) = mk.partial(MultiIndex::unit(un, j), MultiIndex(un));
    }
  }
  if (Eigen::JacobiSVD<Eigen::MatrixXcd>(jac).singularValues().minCoeff() < 1e-10)
    throw SingularMapError("coordinate map has a singular Jacobian at the base point");

  const auto zctx = build_chart(phi, point, order);
  const auto wctx = build_chart(substitute(phi, inverse), wpoint, order);
  const Expr fw = substitute(f, inverse), gw = substitute(g, inverse);
  const Jet fz = operand_jet(f, zctx), gz = operand_jet(g, zctx);
  const Jet fwj = operand_jet(fw, wctx), gwj = operand_jet(gw, wctx);

  double worst = std::max(std::abs(c1(fz, gz, zctx).value() - c1(fwj, gwj, wctx).value()),
                          std::abs(c2(fz, gz, zctx).value() - c2(fwj, gwj, wctx).value()));
  worst = std::max(worst, std::abs(c3(fz, gz, zctx) - c3(fwj, gwj, wctx)));
  worst = std::max(worst, std::abs(c3_tilde(fz, gz, zctx) - c3_tilde(fwj, gwj, wctx)));
  return make_check(name, worst, tol, context);
}

/// w_k = z_k / (1 - z_k) and its inverse z_k = w_k / (1 + w_k), for every coordinate.
inline std::pair<std::vector<Expr>, std::vector<Expr>> mobius_map(int n) {
  std::vector<Expr> map, inverse;
  for (int anti = 0; anti < 2; ++anti)
    for (int k = 1; k <= n; ++k) {
      const Expr x = Expr::variable(anti == 1, k);
      map.push_back(x / (Expr::constant(1.0) - x));
      inverse.push_back(x / (Expr::constant(1.0) + x));
    }
  return {map, inverse};
}

/// w = s z.
inline std::pair<std::vector<Expr>, std::vector<Expr>> scaling_map(int n, double s) {
  std::vector<Expr> map, inverse;
  for (int anti = 0; anti < 2; ++anti)
    for (int k = 1; k <= n; ++k) {
      const Expr x = Expr::variable(anti == 1, k);
      map.push_back(Expr::constant(s) * x);
      inverse.push_back(x / Expr::constant(s));
    }
  return {map, inverse};
}

/// First derivatives from jets against central differences with step 1e-5.
inline CheckResult check_finite_differences(const Expr& phi, const ChartPoint& point, double tol, const std::string& context) {
  constexpr double step = 1e-5;
  const int n = point.dimension();
  const auto un = static_cast<std::size_t>(n);
  const Jet j = eval_jet(phi, point, 1);
  double worst = 0.0;
  for (int var = 0; var < 2 * n; ++var) {
    const bool anti = var >= n;
    const auto k = static_cast<std::size_t>(anti ? var - n : var);
    ChartPoint plus = point, minus = point;
    (anti ? plus.zb : plus.z)[k] += step;
    (anti ? minus.zb : minus.z)[k] -= step;
    const Complex fd = (evaluate(phi, plus) - evaluate(phi, minus)) / (2.0 * step);
    const Complex exact = anti ? j.partial(MultiIndex(un), MultiIndex::unit(un, k)) : j.partial(MultiIndex::unit(un, k), MultiIndex(un));
    worst = std::max(worst, std::abs(exact - fd) / std::max(1.0, std::abs(exact)));
  }
  return make_check("jet.finite-difference", worst, tol, context);
}

/// Hand-derived values: Fubini-Study at 0 and the flat plane.
inline std::vector<CheckResult> check_spot_values(double tol) {
  std::vector<CheckResult> out;
  const auto origin = ChartPoint::from_holomorphic({0.0});
  const auto fs = build_chart(preset_potential("fubini-study", 1), origin, 10);
  const auto flat = build_chart(preset_potential("flat", 1), origin, 10);
  const std::string fs_ctx = "preset fubini-study, point (0), J=10";
  out.push_back(make_check("spot.fubini-study.R^11_11", std::abs(fs.curv.mixed(0, 0, 0, 0) - 2.0), tol, fs_ctx));
  out.push_back(make_check("spot.fubini-study.C3(zb1^2,z1^2)", std::abs(c3(parse("zb1^2", 1), parse("z1^2", 1), fs) - 2.0), tol, fs_ctx));
  out.push_back(make_check("spot.fubini-study.C3~(zb1,z1)", std::abs(c3_tilde(parse("zb1", 1), parse("z1", 1), fs) - 1.0 / 3.0), tol, fs_ctx));
  out.push_back(make_check("spot.flat.C3(zb1^3,z1^3)", std::abs(c3(parse("zb1^3", 1), parse("z1^3", 1), flat) - 6.0), tol,
                           "preset flat, point (0), J=10"));
  return out;
}

// ---------------------------------------------------------------------------
// Full suite
// ---------------------------------------------------------------------------

struct ChartCase {
  std::string label;
  Expr phi;
  ChartPoint point;
  bool flat = false;
  std::uint64_t seed = 0;  // drives the random test functions
};

struct SuiteConfig {
  int trials = 20;
  std::uint64_t seed = 1;
  int order = 10;
  double epsilon = 0.1;
  int degree = 3;
  std::optional<double> tolerance;  // overrides every tolerance
  bool parallel = true;
  std::vector<ChartCase> extra;  // user-supplied charts, checked alongside the presets
};

inline std::vector<ChartCase> suite_charts(const SuiteConfig& cfg) {
  std::vector<ChartCase> charts;
  charts.push_back({"flat-1", preset_potential("flat", 1), ChartPoint::from_holomorphic({{0.3, 0.2}}), true, 101});
  charts.push_back({"flat-2", preset_potential("flat", 2), ChartPoint::from_holomorphic({{0.1, -0.2}, {0.25, 0.1}}), true, 102});
  charts.push_back({"fubini-study@0", preset_potential("fubini-study", 1), ChartPoint::from_holomorphic({0.0}), false, 103});
  charts.push_back({"fubini-study", preset_potential("fubini-study", 1), ChartPoint::from_holomorphic({{0.3, 0.1}}), false, 104});
  charts.push_back({"poincare-disk", preset_potential("poincare-disk", 1), ChartPoint::from_holomorphic({{0.2, 0.1}}), false, 105});
  for (const auto& cc : cfg.extra) charts.push_back(cc);
  for (int t = 0; t < cfg.trials; ++t) {
    RandomChartSpec spec{1 + t % 2, cfg.degree, cfg.epsilon, cfg.seed + static_cast<std::uint64_t>(t)};
    auto chart = random_chart(spec);
    charts.push_back({"random-" + std::to_string(spec.seed) + "-n" + std::to_string(spec.n), chart.phi, chart.point, cfg.epsilon == 0.0,
                      spec.seed});
  }
  return charts;
}

/// Every per-chart check.
inline std::vector<CheckResult> check_chart(const ChartCase& cc, int order, const Tolerances& tol) {
  const int n = cc.point.dimension();
  const std::string context = cc.label + " point " + describe(cc.point) + " J=" + std::to_string(order);
  const auto ctx = build_chart(cc.phi, cc.point, order);
  std::mt19937_64 rng(cc.seed ^ 0x9e3779b97f4a7c15ULL);
  const Expr f = random_polynomial(n, 0, 3, Variables::all, rng);
  const Expr g = random_polynomial(n, 0, 3, Variables::all, rng);
  const Expr h = random_polynomial(n, 0, 3, Variables::all, rng);
  const Expr a = random_polynomial(n, 0, 3, Variables::holomorphic, rng);
  const Expr b = random_polynomial(n, 0, 3, Variables::antiholomorphic, rng);
  const Expr gauge_h = random_polynomial(n, 1, 3, Variables::holomorphic, rng);
  const Expr gauge_k = random_polynomial(n, 1, 3, Variables::antiholomorphic, rng);

  std::vector<CheckResult> out;
  auto append = [&](std::vector<CheckResult> v) {
    for (auto& c : v) out.push_back(std::move(c));
  };
  append(check_oracle_agreement(ctx, f, g, tol.oracle, context));
  const Jet fj = ctx.function_jet(f), gj = ctx.function_jet(g), hj = ctx.function_jet(h);
  for (auto v : {StarVariant::standard, StarVariant::modified}) {
    append(check_associativity(ctx, v, fj, gj, hj, tol.associativity, context));
    out.push_back(check_separation(ctx, v, a, b, f, tol.separation, context));
  }
  append(check_structure(ctx, f, g, tol, context));
  append(check_prop1(ctx, f, g, tol.pointwise, context));
  if (cc.flat) out.push_back(check_flat_operators(ctx, f, g, context));
  out.push_back(check_gauge(cc.phi, gauge_h, gauge_k, cc.point, f, g, order, tol.gauge, context));
  const auto [mob, mob_inv] = mobius_map(n);
  out.push_back(check_covariance(cc.phi, mob, mob_inv, cc.point, f, g, order, tol.covariance, context, "covariance.mobius"));
  if (cc.flat) {
    const auto [sc, sc_inv] = scaling_map(n, 2.0);
    out.push_back(check_covariance(cc.phi, sc, sc_inv, cc.point, f, g, order, tol.covariance, context, "covariance.scaling"));
  }
  for (auto& c : out) c.name = cc.label + "/" + c.name;
  return out;
}

struct SuiteReport {
  std::vector<CheckResult> checks;

  bool all_pass() const {
    return std::all_of(checks.begin(), checks.end(), [](const CheckResult& c) { return c.pass; });
  }
  std::size_t failures() const {
    return static_cast<std::size_t>(std::count_if(checks.begin(), checks.end(), [](const CheckResult& c) { return !c.pass; }));
  }
};

inline SuiteReport run_suite(const SuiteConfig& cfg) {
  if (cfg.order < oracle_min_order(3))
    throw InsufficientOrderError("the verification suite needs jet order >= " + std::to_string(oracle_min_order(3)));
  Tolerances tol;
  if (cfg.tolerance) tol.override_all(*cfg.tolerance);

  SuiteReport report;
  const auto charts = suite_charts(cfg);
  std::vector<std::vector<CheckResult>> per_chart(charts.size());
  if (cfg.parallel) {
    std::vector<std::future<std::vector<CheckResult>>> jobs;
    for (const auto& cc : charts) jobs.push_back(std::async(std::launch::async, [&cc, &cfg, &tol] { return check_chart(cc, cfg.order, tol); }));
    for (std::size_t i = 0; i < jobs.size(); ++i) per_chart[i] = jobs[i].get();
  } else {
    for (std::size_t i = 0; i < charts.size(); ++i) per_chart[i] = check_chart(charts[i], cfg.order, tol);
  }
  for (auto& v : per_chart)
    for (auto& c : v) report.checks.push_back(std::move(c));

  for (auto& c : check_spot_values(tol.spot)) report.checks.push_back(std::move(c));
  for (const auto& name : preset_names()) {
    const int n = name == "flat" ? 2 : 1;
    const auto point = n == 2 ? ChartPoint::from_holomorphic({{0.1, -0.2}, {0.25, 0.1}}) : ChartPoint::from_holomorphic({{0.3, 0.1}});
    auto c = check_finite_differences(preset_potential(name, n), point, tol.finite_difference, "preset " + name + " point " + describe(point));
    c.name = name + "/" + c.name;
    report.checks.push_back(std::move(c));
  }
  std::sort(report.checks.begin(), report.checks.end(), [](const CheckResult& x, const CheckResult& y) { return x.name < y.name; });
  return report;
}

}  // namespace kstar
