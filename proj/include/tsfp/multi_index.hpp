#pragma once

#include <compare>
#include <cstdint>
#include <numeric>
#include <vector>

namespace tsfp {

// Per-mode exponent tuple m = (m_1,...,m_N) for phase-space monomials and
// derivative stacks.
class MultiIndex {
 public:
  MultiIndex() = default;
  explicit MultiIndex(std::vector<int> e) : e_(std::move(e)) {}

  static MultiIndex zeros(std::size_t n) { return MultiIndex(std::vector<int>(n, 0)); }

  std::size_t size() const { return e_.size(); }
  int operator[](std::size_t i) const { return e_[i]; }
  int& operator[](std::size_t i) { return e_[i]; }
  const std::vector<int>& exponents() const { return e_; }

  // |m| = sum of exponents
  int order() const { return std::accumulate(e_.begin(), e_.end(), 0); }

  // m! = prod m_i!  (orders here are small; fits easily)
  double factorial() const {
    double f = 1.0;
    for (int m : e_)
      for (int k = 2; k <= m; ++k) f *= k;
    return f;
  }

  MultiIndex raised(std::size_t i, int by = 1) const {
    MultiIndex r = *this;
    r.e_[i] += by;
    return r;
  }

  friend auto operator<=>(const MultiIndex& a, const MultiIndex& b) = default;

 private:
  std::vector<int> e_;
};

// Enumerates all m with given mode count and 1 <= |m| <= cap (used by the
// derivative-series evaluation).
inline std::vector<MultiIndex> multi_indices_up_to(std::size_t modes, int cap) {
  std::vector<MultiIndex> out;
  MultiIndex m = MultiIndex::zeros(modes);
  // odometer over exponents bounded by cap; filter on |m|
  while (true) {
    int total = m.order();
    if (total >= 1 && total <= cap) out.push_back(m);
    std::size_t j = 0;
    for (; j < modes; ++j) {
      if (m[j] < cap) {
        ++m[j];
        for (std::size_t k = 0; k < j; ++k) m[k] = 0;
        break;
      }
    }
    if (j == modes) break;
  }
  return out;
}

}  // namespace tsfp
