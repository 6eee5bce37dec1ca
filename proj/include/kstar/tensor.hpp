#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <cstddef>
#include <numeric>
#include <vector>

#include "kstar/jet.hpp"

namespace kstar {

/// Dense rank-R tensor over a chart of dimension n, row-major in its indices.
template <typename T, std::size_t Rank>
class Tensor {
public:
  Tensor() = default;
  explicit Tensor(int n, const T& fill = T{}) : n_(n), data_(extent(n), fill) {}

  int dimension() const noexcept { return n_; }
  std::size_t size() const noexcept { return data_.size(); }

  template <typename... I>
    requires(sizeof...(I) == Rank)
  T& operator()(I... idx) {
    return data_[flat(idx...)];
  }

  template <typename... I>
    requires(sizeof...(I) == Rank)
  const T& operator()(I... idx) const {
    return data_[flat(idx...)];
  }

  T& at_flat(std::size_t i) { return data_[i]; }
  const T& at_flat(std::size_t i) const { return data_[i]; }

  /// Index tuple of flat position i.
  std::array<int, Rank> unflatten(std::size_t i) const {
    std::array<int, Rank> idx{};
    for (std::size_t r = Rank; r-- > 0;) {
      idx[r] = static_cast<int>(i % static_cast<std::size_t>(n_));
      i /= static_cast<std::size_t>(n_);
    }
    return idx;
  }

  std::size_t flat_of(const std::array<int, Rank>& idx) const {
    std::size_t f = 0;
    for (int v : idx) f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(v);
    return f;
  }

  auto begin() const { return data_.begin(); }
  auto end() const { return data_.end(); }

private:
  static std::size_t extent(int n) {
    std::size_t e = 1;
    for (std::size_t r = 0; r < Rank; ++r) e *= static_cast<std::size_t>(n);
    return e;
  }

  template <typename... I>
  std::size_t flat(I... idx) const {
    std::size_t f = 0;
    ((f = f * static_cast<std::size_t>(n_) + static_cast<std::size_t>(idx)), ...);
    return f;
  }

  int n_ = 0;
  std::vector<T> data_;
};

template <std::size_t Rank>
using JetTensor = Tensor<Jet, Rank>;

template <std::size_t Rank>
using ValueTensor = Tensor<Complex, Rank>;

/// Point values of a jet tensor.
template <std::size_t Rank>
ValueTensor<Rank> values(const JetTensor<Rank>& t) {
  ValueTensor<Rank> out(t.dimension());
  for (std::size_t i = 0; i < t.size(); ++i) out.at_flat(i) = t.at_flat(i).value();
  return out;
}

/// max |a - b| componentwise.
template <std::size_t Rank>
double max_abs_difference(const ValueTensor<Rank>& a, const ValueTensor<Rank>& b) {
  double m = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) m = std::max(m, std::abs(a.at_flat(i) - b.at_flat(i)));
  return m;
}

/// Largest deviation from full symmetry under index permutations.
template <std::size_t Rank>
double symmetry_defect(const ValueTensor<Rank>& t) {
  double m = 0.0;
  for (std::size_t i = 0; i < t.size(); ++i) {
    auto idx = t.unflatten(i);
    auto perm = idx;
    std::sort(perm.begin(), perm.end());
    do {
      m = std::max(m, std::abs(t.at_flat(i) - t.at_flat(t.flat_of(perm))));
    } while (std::next_permutation(perm.begin(), perm.end()));
  }
  return m;
}

}  // namespace kstar
