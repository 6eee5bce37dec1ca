#pragma once

// Shared test helpers. The Taylor oracle here knows nothing about jets: it
// integrates a plain std::complex lambda over a product of circles.

#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <random>
#include <vector>

#include "kstar/jet.hpp"

namespace kstar::testing {

using Function = std::function<Complex(const std::vector<Complex>&)>;

/// Taylor coefficient of F at `base` for the exponent vector `e` (one entry per variable),
/// by the trapezoidal rule on circles of radius `radius` with `nodes` points each.
inline Complex cauchy_coefficient(const Function& F, const std::vector<Complex>& base, const std::vector<int>& e, double radius = 0.25,
                                  int nodes = 48) {
  const std::size_t m = base.size();
  std::vector<int> idx(m, 0);
  std::vector<Complex> x(m);
  Complex acc{};
  long total = 1;
  for (std::size_t v = 0; v < m; ++v) total *= nodes;
  for (long t = 0; t < total; ++t) {
    long rem = t;
    Complex weight = 1.0;
    for (std::size_t v = 0; v < m; ++v) {
      idx[v] = static_cast<int>(rem % nodes);
      rem /= nodes;
      const double theta = 2.0 * std::numbers::pi * idx[v] / nodes;
      const Complex unit = std::polar(1.0, theta);
      x[v] = base[v] + radius * unit;
      weight *= std::polar(1.0, -theta * e[v]);
    }
    acc += F(x) * weight;
  }
  double scale = static_cast<double>(total);
  for (std::size_t v = 0; v < m; ++v) scale *= std::pow(radius, e[v]);
  return acc / scale;
}

/// d^hol dbar^anti F at the base point: hol! anti! times the Taylor coefficient.
inline Complex cauchy_derivative(const Function& F, const std::vector<Complex>& base, const std::vector<int>& e, double radius = 0.25,
                                 int nodes = 48) {
  double fact = 1.0;
  for (int k : e)
    for (int i = 2; i <= k; ++i) fact *= i;
  return fact * cauchy_coefficient(F, base, e, radius, nodes);
}

/// Random jet with coefficients in [-1, 1]^2 and an optional fixed constant term.
inline Jet random_jet(int n, int order, std::mt19937_64& rng, std::optional<Complex> constant = std::nullopt) {
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  Jet j(n, order);
  const auto& L = detail::layout(n, order);
  for (std::size_t i = 0; i < L.size(); ++i) {
    std::vector<int> hol, anti;
    for (int v = 0; v < n; ++v) hol.push_back(L.exponent(i, v));
    for (int v = 0; v < n; ++v) anti.push_back(L.exponent(i, n + v));
    j.set_coefficient(MultiIndex(hol), MultiIndex(anti), Complex(u(rng), u(rng)));
  }
  if (constant) j.set_coefficient(MultiIndex(static_cast<std::size_t>(n)), MultiIndex(static_cast<std::size_t>(n)), *constant);
  return j;
}

/// Every (hol, anti) pair with total degree <= order.
inline std::vector<std::pair<MultiIndex, MultiIndex>> all_index_pairs(int n, int order) {
  std::vector<std::pair<MultiIndex, MultiIndex>> out;
  const auto& L = detail::layout(n, order);
  for (std::size_t i = 0; i < L.size(); ++i) {
    std::vector<int> hol, anti;
    for (int v = 0; v < n; ++v) hol.push_back(L.exponent(i, v));
    for (int v = 0; v < n; ++v) anti.push_back(L.exponent(i, n + v));
    out.emplace_back(MultiIndex(hol), MultiIndex(anti));
  }
  return out;
}

}  // namespace kstar::testing
