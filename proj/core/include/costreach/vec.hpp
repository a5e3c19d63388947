#pragma once

#include <algorithm>
#include <array>
#include <cassert>
#include <cstddef>
#include <initializer_list>
#include <span>

namespace costreach {

/// Hard cap on state/control dimension. States stay inline on the stack so
/// the solver's inner loops never allocate.
inline constexpr int kMaxDim = 8;

/// Fixed-capacity numeric vector used for states and controls.
class Vec {
public:
  Vec() = default;

  Vec(std::initializer_list<double> xs) : n_(static_cast<int>(xs.size())) {
    assert(xs.size() <= static_cast<std::size_t>(kMaxDim));
    std::copy(xs.begin(), xs.end(), v_.begin());
  }

  explicit Vec(std::span<const double> xs) : n_(static_cast<int>(xs.size())) {
    assert(xs.size() <= static_cast<std::size_t>(kMaxDim));
    std::copy(xs.begin(), xs.end(), v_.begin());
  }

  static Vec zeros(int n) {
    assert(n >= 0 && n <= kMaxDim);
    Vec v;
    v.n_ = n;
    return v;
  }

  int size() const { return n_; }

  double& operator[](int i) {
    assert(i >= 0 && i < n_);
    return v_[static_cast<std::size_t>(i)];
  }
  double operator[](int i) const {
    assert(i >= 0 && i < n_);
    return v_[static_cast<std::size_t>(i)];
  }

  double* data() { return v_.data(); }
  const double* data() const { return v_.data(); }
  std::span<const double> span() const { return {v_.data(), static_cast<std::size_t>(n_)}; }

  bool operator==(const Vec& other) const {
    return n_ == other.n_ && std::equal(v_.begin(), v_.begin() + n_, other.v_.begin());
  }

private:
  std::array<double, kMaxDim> v_{};
  int n_ = 0;
};

}  // namespace costreach
