#pragma once

// Truncated multivariate Taylor expansions ("jets") in the 2n polarized
// variables z_1..z_n, zb_1..zb_n of a holomorphic chart.
//
// A jet of order J at a base point (z0, zb0) stores the Taylor coefficients
// c_{ab} of  sum c_{ab} (z - z0)^a (zb - zb0)^b  for |a| + |b| <= J.
// Coefficients live in a dense graded array; the monomial ordering within a
// degree does not depend on J, so the layout of order J-1 is a prefix of the
// layout of order J. Binary arithmetic on jets of different order is exact to
// the smaller order and yields a jet of that order.

#include <algorithm>
#include <compare>
#include <complex>
#include <cstdint>
#include <initializer_list>
#include <map>
#include <memory>
#include <mutex>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "kstar/errors.hpp"

namespace kstar {

using Complex = std::complex<double>;

/// Holomorphic or antiholomorphic multi-index (non-negative entries).
class MultiIndex {
public:
  MultiIndex() = default;
  explicit MultiIndex(std::size_t n) : entries_(n, 0) {}
  MultiIndex(std::initializer_list<int> entries) : entries_(entries) { validate(); }
  explicit MultiIndex(std::vector<int> entries) : entries_(std::move(entries)) { validate(); }

  /// e_k, the k-th unit multi-index of length n.
  static MultiIndex unit(std::size_t n, std::size_t k) {
    MultiIndex m(n);
    m.entries_.at(k) = 1;
    return m;
  }

  std::size_t size() const noexcept { return entries_.size(); }
  int operator[](std::size_t k) const { return entries_[k]; }
  int& operator[](std::size_t k) { return entries_[k]; }
  const std::vector<int>& entries() const noexcept { return entries_; }

  int order() const noexcept {
    int s = 0;
    for (int e : entries_) s += e;
    return s;
  }

  /// a! = prod_k a_k!
  double factorial() const noexcept {
    double f = 1.0;
    for (int e : entries_)
      for (int i = 2; i <= e; ++i) f *= i;
    return f;
  }

  friend MultiIndex operator+(MultiIndex a, const MultiIndex& b) {
    if (a.size() != b.size()) throw JetMismatchError("multi-index length mismatch");
    for (std::size_t k = 0; k < a.size(); ++k) a.entries_[k] += b.entries_[k];
    return a;
  }

  friend auto operator<=>(const MultiIndex&, const MultiIndex&) = default;

private:
  void validate() const {
    for (int e : entries_)
      if (e < 0) throw UsageError("multi-index entries must be non-negative");
  }

  std::vector<int> entries_;
};

namespace detail {

/// Monomial table shared by all jets with the same (n, order).
struct JetLayout {
  int n = 0;
  int order = 0;
  int nvars = 0;
  std::int64_t radix = 1;
  std::vector<std::int64_t> stride;        // radix^v
  std::vector<std::uint8_t> exponents;     // size() * nvars
  std::vector<int> degrees;                // per monomial
  std::vector<std::size_t> degree_end;     // number of monomials of degree <= d
  std::vector<std::int64_t> keys;          // packed exponents, base radix
  std::vector<std::int32_t> key_to_index;  // radix^nvars, -1 when unused

  std::size_t size() const noexcept { return degrees.size(); }
  std::size_t count_upto(int d) const noexcept { return d < 0 ? 0 : degree_end[static_cast<std::size_t>(d)]; }
  int exponent(std::size_t i, int v) const noexcept { return exponents[i * static_cast<std::size_t>(nvars) + static_cast<std::size_t>(v)]; }

  std::int64_t pack(std::span<const int> e) const noexcept {
    std::int64_t key = 0;
    for (int v = 0; v < nvars; ++v) key += e[static_cast<std::size_t>(v)] * stride[static_cast<std::size_t>(v)];
    return key;
  }

  std::int32_t index_of(std::span<const int> e) const noexcept {
    int d = 0;
    for (int x : e) d += x;
    if (d > order) return -1;
    return key_to_index[static_cast<std::size_t>(pack(e))];
  }
};

inline void enumerate_degree(int nvars, int degree, std::vector<int>& current, int var, std::vector<std::vector<int>>& out) {
  if (var == nvars - 1) {
    current[static_cast<std::size_t>(var)] = degree;
    out.push_back(current);
    return;
  }
  for (int e = degree; e >= 0; --e) {
    current[static_cast<std::size_t>(var)] = e;
    enumerate_degree(nvars, degree - e, current, var + 1, out);
  }
}

inline std::unique_ptr<JetLayout> make_layout(int n, int order) {
  auto L = std::make_unique<JetLayout>();
  L->n = n;
  L->order = order;
  L->nvars = 2 * n;
  L->radix = order + 1;
  std::int64_t table = 1;
  for (int v = 0; v < L->nvars; ++v) {
    L->stride.push_back(table);
    table *= L->radix;
    if (table > (std::int64_t{1} << 26))
      throw UsageError("jet layout too large for n=" + std::to_string(n) + ", order=" + std::to_string(order));
  }
  L->key_to_index.assign(static_cast<std::size_t>(table), -1);
  std::vector<int> current(static_cast<std::size_t>(L->nvars), 0);
  for (int d = 0; d <= order; ++d) {
    std::vector<std::vector<int>> monos;
    enumerate_degree(L->nvars, d, current, 0, monos);
    for (const auto& m : monos) {
      const auto idx = static_cast<std::int32_t>(L->degrees.size());
      for (int e : m) L->exponents.push_back(static_cast<std::uint8_t>(e));
      L->degrees.push_back(d);
      const auto key = L->pack(m);
      L->keys.push_back(key);
      L->key_to_index[static_cast<std::size_t>(key)] = idx;
    }
    L->degree_end.push_back(L->degrees.size());
  }
  return L;
}

inline const JetLayout& layout(int n, int order) {
  if (n < 1) throw UsageError("chart dimension must be at least 1");
  if (order < 0) throw InsufficientOrderError("jet order must be non-negative");
  static std::mutex mutex;
  static std::map<std::pair<int, int>, std::unique_ptr<JetLayout>> cache;
  std::lock_guard lock(mutex);
  auto& slot = cache[{n, order}];
  if (!slot) slot = make_layout(n, order);
  return *slot;
}

}  // namespace detail

/// Truncated Taylor expansion in z_1..z_n, zb_1..zb_n. Variable v < n is z_{v+1};
/// variable n + l is zb_{l+1}.
class Jet {
public:
  Jet() = default;

  Jet(int n, int order) : layout_(&detail::layout(n, order)), coeffs_(layout_->size(), Complex{}) {}

  static Jet constant(int n, int order, Complex value) {
    Jet j(n, order);
    j.coeffs_[0] = value;
    return j;
  }

  /// The coordinate function x_var expanded around `base`.
  static Jet coordinate(int n, int order, int var, Complex base) {
    Jet j = constant(n, order, base);
    if (var < 0 || var >= 2 * n) throw UsageError("coordinate index out of range");
    if (order >= 1) {
      std::vector<int> e(static_cast<std::size_t>(2 * n), 0);
      e[static_cast<std::size_t>(var)] = 1;
      j.coeffs_[static_cast<std::size_t>(j.layout_->index_of(e))] = 1.0;
    }
    return j;
  }

  bool empty() const noexcept { return layout_ == nullptr; }
  int dimension() const noexcept { return layout_ ? layout_->n : 0; }
  int order() const noexcept { return layout_ ? layout_->order : -1; }
  std::size_t size() const noexcept { return coeffs_.size(); }
  std::span<const Complex> coefficients() const noexcept { return coeffs_; }

  /// Value at the base point.
  Complex value() const {
    require_valid();
    return coeffs_[0];
  }

  /// Taylor coefficient c_{ab}.
  Complex coefficient(const MultiIndex& hol, const MultiIndex& anti) const {
    const auto idx = index_for(hol, anti);
    return idx < 0 ? Complex{} : coeffs_[static_cast<std::size_t>(idx)];
  }

  void set_coefficient(const MultiIndex& hol, const MultiIndex& anti, Complex c) {
    const auto idx = index_for(hol, anti);
    if (idx < 0) throw InsufficientOrderError("coefficient degree exceeds jet order");
    coeffs_[static_cast<std::size_t>(idx)] = c;
  }

  /// Value of d^a dbar^b f at the base point: a! b! c_{ab}.
  Complex partial(const MultiIndex& hol, const MultiIndex& anti) const {
    require_valid();
    if (hol.order() + anti.order() > order())
      throw InsufficientOrderError("derivative of order " + std::to_string(hol.order() + anti.order()) +
                                   " requested from a jet of order " + std::to_string(order()));
    return hol.factorial() * anti.factorial() * coefficient(hol, anti);
  }

  /// Partial derivative in variable `var` (0..2n-1); the result has one order less.
  Jet derivative(int var) const {
    require_valid();
    if (order() < 1) throw InsufficientOrderError("cannot differentiate a jet of order 0");
    if (var < 0 || var >= layout_->nvars) throw UsageError("derivative variable out of range");
    const auto& src = *layout_;
    Jet out(src.n, src.order - 1);
    const auto step = src.stride[static_cast<std::size_t>(var)];
    for (std::size_t i = 0; i < out.size(); ++i) {
      const auto from = src.key_to_index[static_cast<std::size_t>(src.keys[i] + step)];
      out.coeffs_[i] = static_cast<double>(src.exponent(i, var) + 1) * coeffs_[static_cast<std::size_t>(from)];
    }
    return out;
  }

  /// d/dz_k, k in 0..n-1.
  Jet d(int k) const { return derivative(k); }
  /// d/dzb_l, l in 0..n-1.
  Jet dbar(int l) const { return derivative(dimension() + l); }

  /// d^a dbar^b as a jet of order J - |a| - |b|.
  Jet differentiate(const MultiIndex& hol, const MultiIndex& anti) const {
    Jet out = *this;
    for (std::size_t k = 0; k < hol.size(); ++k)
      for (int t = 0; t < hol[k]; ++t) out = out.d(static_cast<int>(k));
    for (std::size_t l = 0; l < anti.size(); ++l)
      for (int t = 0; t < anti[l]; ++t) out = out.dbar(static_cast<int>(l));
    return out;
  }

  /// Drop all coefficients of total degree above `new_order`.
  Jet truncated(int new_order) const {
    require_valid();
    if (new_order > order()) throw InsufficientOrderError("cannot raise the order of a jet");
    Jet out(dimension(), new_order);
    std::copy_n(coeffs_.begin(), out.size(), out.coeffs_.begin());
    return out;
  }

  /// Largest coefficient modulus.
  double max_abs() const noexcept {
    double m = 0.0;
    for (const auto& c : coeffs_) m = std::max(m, std::abs(c));
    return m;
  }

  Jet operator-() const {
    Jet out = *this;
    for (auto& c : out.coeffs_) c = -c;
    return out;
  }

  Jet& operator*=(Complex s) {
    for (auto& c : coeffs_) c *= s;
    return *this;
  }

  friend Jet operator*(Jet a, Complex s) { return a *= s; }
  friend Jet operator*(Complex s, Jet a) { return a *= s; }
  friend Jet operator/(Jet a, Complex s) { return a *= (1.0 / s); }

  friend Jet operator+(const Jet& a, const Jet& b) { return combine(a, b, 1.0); }
  friend Jet operator-(const Jet& a, const Jet& b) { return combine(a, b, -1.0); }
  friend Jet operator+(Jet a, Complex s) {
    a.require_valid();
    a.coeffs_[0] += s;
    return a;
  }
  friend Jet operator+(Complex s, Jet a) { return std::move(a) + s; }
  friend Jet operator-(Jet a, Complex s) { return std::move(a) + (-s); }
  friend Jet operator-(Complex s, const Jet& a) { return (-a) + s; }

  Jet& operator+=(const Jet& b) { return *this = *this + b; }
  Jet& operator-=(const Jet& b) { return *this = *this - b; }

  /// Cauchy product truncated at the smaller of the two orders.
  friend Jet operator*(const Jet& a, const Jet& b) {
    check_compatible(a, b);
    const int ord = std::min(a.order(), b.order());
    const auto& L = detail::layout(a.dimension(), ord);
    Jet out(a.dimension(), ord);
    for (std::size_t i = 0; i < L.size(); ++i) {
      const Complex ai = a.coeffs_[i];
      if (ai == Complex{}) continue;
      const auto ki = L.keys[i];
      const auto jend = L.count_upto(ord - L.degrees[i]);
      for (std::size_t j = 0; j < jend; ++j) {
        const Complex bj = b.coeffs_[j];
        if (bj == Complex{}) continue;
        out.coeffs_[static_cast<std::size_t>(L.key_to_index[static_cast<std::size_t>(ki + L.keys[j])])] += ai * bj;
      }
    }
    return out;
  }

  Jet& operator*=(const Jet& b) { return *this = *this * b; }

private:
  void require_valid() const {
    if (!layout_) throw UsageError("operation on an empty jet");
  }

  std::int32_t index_for(const MultiIndex& hol, const MultiIndex& anti) const {
    require_valid();
    const auto n = static_cast<std::size_t>(dimension());
    if (hol.size() != n || anti.size() != n) throw JetMismatchError("multi-index length does not match chart dimension");
    std::vector<int> e(hol.entries());
    e.insert(e.end(), anti.entries().begin(), anti.entries().end());
    return layout_->index_of(e);
  }

  static void check_compatible(const Jet& a, const Jet& b) {
    a.require_valid();
    b.require_valid();
    if (a.dimension() != b.dimension())
      throw JetMismatchError("jets of dimension " + std::to_string(a.dimension()) + " and " +
                             std::to_string(b.dimension()) + " cannot be combined");
  }

  static Jet combine(const Jet& a, const Jet& b, double sign) {
    check_compatible(a, b);
    Jet out = a.order() <= b.order() ? a : a.truncated(b.order());
    for (std::size_t i = 0; i < out.size(); ++i) out.coeffs_[i] += sign * b.coeffs_[i];
    return out;
  }

  const detail::JetLayout* layout_ = nullptr;
  std::vector<Complex> coeffs_;
};

namespace detail {

/// sum_k series[k] * v^k by Horner's rule; v must have zero constant term.
inline Jet compose_series(const Jet& v, std::span<const Complex> series) {
  Jet acc = Jet::constant(v.dimension(), v.order(), series.back());
  for (std::size_t k = series.size() - 1; k-- > 0;) acc = acc * v + series[k];
  return acc;
}

inline Jet nonconstant_part(const Jet& a) { return a - a.value(); }

inline constexpr double kPoleThreshold = 1e-13;

}  // namespace detail

/// Multiplicative inverse; requires a nonzero constant term.
inline Jet recip(const Jet& a) {
  const Complex c0 = a.value();
  if (std::abs(c0) <= detail::kPoleThreshold) throw PoleError("reciprocal of a jet with vanishing constant term");
  const Jet v = detail::nonconstant_part(a) / c0;
  std::vector<Complex> series(static_cast<std::size_t>(a.order()) + 1);
  for (std::size_t k = 0; k < series.size(); ++k) series[k] = (k % 2 == 0 ? 1.0 : -1.0) / c0;
  return detail::compose_series(v, series);
}

inline Jet operator/(const Jet& a, const Jet& b) { return a * recip(b); }
inline Jet operator/(Complex s, const Jet& b) { return recip(b) * s; }

/// Principal-branch logarithm; the constant term must lie off (-inf, 0].
inline Jet log(const Jet& a) {
  const Complex c0 = a.value();
  if (std::abs(c0) <= detail::kPoleThreshold) throw PoleError("logarithm of a jet with vanishing constant term");
  if (c0.real() < 0.0 && std::abs(c0.imag()) <= 1e-14 * std::abs(c0.real()))
    throw BranchError("logarithm argument lies on the branch cut (-inf, 0]");
  const Jet v = detail::nonconstant_part(a) / c0;
  std::vector<Complex> series(static_cast<std::size_t>(a.order()) + 1);
  series[0] = std::log(c0);
  for (std::size_t k = 1; k < series.size(); ++k) series[k] = (k % 2 == 1 ? 1.0 : -1.0) / static_cast<double>(k);
  return detail::compose_series(v, series);
}

inline Jet exp(const Jet& a) {
  const Complex c0 = a.value();
  const Jet v = detail::nonconstant_part(a);
  std::vector<Complex> series(static_cast<std::size_t>(a.order()) + 1);
  Complex term = std::exp(c0);
  for (std::size_t k = 0; k < series.size(); ++k) {
    series[k] = term;
    term /= static_cast<double>(k + 1);
  }
  return detail::compose_series(v, series);
}

/// Integer power; negative exponents require a nonzero constant term.
inline Jet pow(const Jet& a, int exponent) {
  if (exponent < 0) return pow(recip(a), -exponent);
  Jet result = Jet::constant(a.dimension(), a.order(), 1.0);
  Jet base = a;
  for (unsigned e = static_cast<unsigned>(exponent); e != 0; e >>= 1) {
    if (e & 1u) result *= base;
    if (e > 1) base *= base;
  }
  return result;
}

/// The scalar analytic functions a jet can be composed with.
enum class Analytic { log, exp, power };

inline Jet analytic(const Jet& a, Analytic func, int exponent = 1) {
  switch (func) {
    case Analytic::log: return log(a);
    case Analytic::exp: return exp(a);
    case Analytic::power: return pow(a, exponent);
  }
  return a;
}

/// max |a - b| over shared coefficients.
inline double max_abs_difference(const Jet& a, const Jet& b) { return (a - b).max_abs(); }

}  // namespace kstar
