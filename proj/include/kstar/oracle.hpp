#pragma once

// Independent construction of the left star-multiplication operator
// L_f = A_0 + nu A_1 + nu^2 A_2 + ... by the commutator recursion
//
//   [A_r, dbar_l Phi] = [dbar_l, A_{r-1}],   A_0 = f,
//
// followed by C_r(f, g) = A_r g. Nothing here uses Christoffel symbols or
// curvature, so agreement with the covariant formulas is a genuine cross-check.

#include <algorithm>
#include <cmath>
#include <map>
#include <string>
#include <utility>
#include <vector>

#include "kstar/errors.hpp"
#include "kstar/expr.hpp"
#include "kstar/geometry.hpp"
#include "kstar/jet.hpp"

namespace kstar {

/// Relative tolerance for the agreement of redundant determinations of one coefficient.
inline constexpr double kOracleConsistencyTol = 1e-8;

/// sum_alpha a_alpha d^alpha, with holomorphic derivatives only and jet coefficients.
class FormalOperator {
public:
  FormalOperator() = default;
  FormalOperator(int n, int level) : n_(n), level_(level) {}

  int dimension() const noexcept { return n_; }
  int level() const noexcept { return level_; }
  const std::map<MultiIndex, Jet>& terms() const noexcept { return terms_; }
  std::map<MultiIndex, Jet>& terms() noexcept { return terms_; }

  /// Highest derivative order carried.
  int max_order() const {
    int m = 0;
    for (const auto& [alpha, a] : terms_) m = std::max(m, alpha.order());
    return m;
  }

  /// Coefficient jet of d^alpha, or nullptr.
  const Jet* coefficient(const MultiIndex& alpha) const {
    auto it = terms_.find(alpha);
    return it == terms_.end() ? nullptr : &it->second;
  }

  /// (A g) at the base point.
  Complex apply(const Jet& g) const {
    Complex acc{};
    const MultiIndex none(static_cast<std::size_t>(n_));
    for (const auto& [alpha, a] : terms_) acc += a.value() * g.partial(alpha, none);
    return acc;
  }

  /// A g as a jet.
  Jet apply_jet(const Jet& g) const {
    const MultiIndex none(static_cast<std::size_t>(n_));
    Jet out;
    for (const auto& [alpha, a] : terms_) {
      Jet term = a * g.differentiate(alpha, none);
      out = out.empty() ? std::move(term) : out + term;
    }
    return out.empty() ? Jet(n_, g.order()) : out;
  }

private:
  int n_ = 0;
  int level_ = 0;
  std::map<MultiIndex, Jet> terms_;
};

namespace detail {

inline void multi_indices_of_order(int n, int order, std::vector<int>& cur, int pos, std::vector<MultiIndex>& out) {
  if (pos == n - 1) {
    cur[static_cast<std::size_t>(pos)] = order;
    out.emplace_back(cur);
    return;
  }
  for (int e = order; e >= 0; --e) {
    cur[static_cast<std::size_t>(pos)] = e;
    multi_indices_of_order(n, order - e, cur, pos + 1, out);
  }
}

inline std::vector<MultiIndex> multi_indices_of_order(int n, int order) {
  std::vector<MultiIndex> out;
  std::vector<int> cur(static_cast<std::size_t>(n), 0);
  multi_indices_of_order(n, order, cur, 0, out);
  return out;
}

inline double binomial(int a, int b) {
  double r = 1.0;
  for (int i = 1; i <= b; ++i) r = r * (a - b + i) / i;
  return r;
}

/// prod_k binom(alpha_k, beta_k), or 0 unless beta <= alpha.
inline double multi_binomial(const MultiIndex& alpha, const MultiIndex& beta) {
  double r = 1.0;
  for (std::size_t k = 0; k < alpha.size(); ++k) {
    if (beta[k] > alpha[k]) return 0.0;
    r *= binomial(alpha[k], beta[k]);
  }
  return r;
}

inline MultiIndex difference(const MultiIndex& alpha, const MultiIndex& beta) {
  MultiIndex d(alpha.size());
  for (std::size_t k = 0; k < alpha.size(); ++k) d[k] = alpha[k] - beta[k];
  return d;
}

/// d^gamma dbar_l Phi, memoized.
class PotentialDerivatives {
public:
  explicit PotentialDerivatives(const ChartContext& ctx) : ctx_(ctx) {}

  const Jet& get(const MultiIndex& gamma, int l) {
    auto key = std::make_pair(gamma, l);
    auto it = cache_.find(key);
    if (it != cache_.end()) return it->second;
    const MultiIndex none(gamma.size());
    return cache_.emplace(key, ctx_.phi.dbar(l).differentiate(gamma, none)).first->second;
  }

private:
  const ChartContext& ctx_;
  std::map<std::pair<MultiIndex, int>, Jet> cache_;
};

}  // namespace detail

/// Smallest chart order the recursion accepts for levels up to r_max.
inline constexpr int oracle_min_order(int r_max) { return 2 * r_max + 4; }

/// A_0 .. A_{r_max} of the left multiplication operator by f.
inline std::vector<FormalOperator> build_left_mult(const Jet& f, const ChartContext& ctx, int r_max = 3) {
  if (r_max < 0 || r_max > 3) throw UsageError("the recursion is supported for r <= 3");
  if (ctx.order < oracle_min_order(r_max))
    throw InsufficientOrderError("recursion up to r=" + std::to_string(r_max) + " needs chart order >= " +
                                 std::to_string(oracle_min_order(r_max)) + ", got " + std::to_string(ctx.order));
  if (f.dimension() != ctx.n) throw JetMismatchError("function jet and chart differ in dimension");
  if (f.order() < r_max) throw InsufficientOrderError("function jet order below recursion depth");

  const int n = ctx.n;
  const auto un = static_cast<std::size_t>(n);
  detail::PotentialDerivatives phi_derivs(ctx);

  std::vector<FormalOperator> ops;
  ops.emplace_back(n, 0);
  ops.back().terms().emplace(MultiIndex(un), f);

  for (int r = 1; r <= r_max; ++r) {
    const FormalOperator& prev = ops.back();
    FormalOperator cur(n, r);
    auto& a = cur.terms();
    const int top = prev.max_order() + 1;

    for (int m = top; m >= 1; --m) {
      for (const auto& beta : detail::multi_indices_of_order(n, m - 1)) {
        // rhs_l = dbar_l a^{(r-1)}_beta - sum_{alpha > beta, |alpha - beta| >= 2} binom(alpha, beta) d^{alpha-beta} dbar_l Phi a_alpha
        std::vector<Jet> rhs(un);
        const Jet* prev_coeff = prev.coefficient(beta);
        for (int l = 0; l < n; ++l) {
          Jet acc = prev_coeff ? prev_coeff->dbar(l) : Jet(n, f.order() - r);
          for (const auto& [alpha, coeff] : a) {
            if (alpha.order() - beta.order() < 2) continue;
            const double b = detail::multi_binomial(alpha, beta);
            if (b == 0.0) continue;
            acc -= phi_derivs.get(detail::difference(alpha, beta), l) * coeff * b;
          }
          rhs[static_cast<std::size_t>(l)] = std::move(acc);
        }
        // sum_k (beta_k + 1) g_{kl} a_{beta+e_k} = rhs_l  =>  a_{beta+e_k} = g^{lk} rhs_l / (beta_k + 1)
        for (int k = 0; k < n; ++k) {
          Jet sol;
          for (int l = 0; l < n; ++l) {
            Jet term = ctx.g_up(l, k) * rhs[static_cast<std::size_t>(l)];
            sol = sol.empty() ? std::move(term) : sol + term;
          }
          sol = sol / static_cast<double>(beta[static_cast<std::size_t>(k)] + 1);
          const MultiIndex gamma = beta + MultiIndex::unit(un, static_cast<std::size_t>(k));
          auto it = a.find(gamma);
          if (it == a.end()) {
            a.emplace(gamma, std::move(sol));
            continue;
          }
          const double diff = max_abs_difference(it->second, sol);
          const double scale = std::max(it->second.max_abs(), sol.max_abs());
          if (diff > kOracleConsistencyTol * (1.0 + scale))
            throw OracleInconsistencyError("recursion level " + std::to_string(r) + ": redundant determinations of a coefficient differ by " +
                                           std::to_string(diff));
        }
      }
    }
    ops.push_back(std::move(cur));
  }
  return ops;
}

/// C_r(f, g) = A_r g at the base point, for jets.
inline Complex oracle_cr(const Jet& f, const Jet& g, const ChartContext& ctx, int r) {
  if (r < 0 || r > 3) throw UsageError("oracle supports 0 <= r <= 3");
  const auto ops = build_left_mult(f.truncated(std::min(f.order(), std::max(r, 1))), ctx, r);
  return ops[static_cast<std::size_t>(r)].apply(g);
}

inline Complex apply(const FormalOperator& A, const Expr& g, const ChartContext& ctx) {
  return A.apply(eval_jet(g, ctx.point, std::max(A.max_order(), 0)));
}

inline Complex oracle_cr(const Expr& f, const Expr& g, const ChartContext& ctx, int r) {
  return oracle_cr(eval_jet(f, ctx.point, 3), eval_jet(g, ctx.point, 3), ctx, r);
}

}  // namespace kstar
