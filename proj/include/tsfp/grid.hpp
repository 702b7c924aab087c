#pragma once

#include <complex>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "tsfp/real_poly.hpp"

namespace tsfp {

// Uniform periodic grid over [-R, R)^{2N} in dimensionless coordinates
// z = (Q_1..Q_N, P_1..P_N); axis a carries z component a, points are
// x_i = -R + i h with h = 2R/n. kappa fixes the alpha <-> z map and the
// integration measure prod_k (kappa/2) dQ_k dP_k.
class PhaseGrid {
 public:
  PhaseGrid(int modes, double extent, int npts, double kappa = 1.0)
      : modes_(modes), extent_(extent), npts_(npts), kappa_(kappa) {
    if (modes <= 0) throw std::invalid_argument("PhaseGrid: modes must be positive");
    if (!(extent > 0)) throw std::invalid_argument("PhaseGrid: extent must be positive");
    if (npts < 4 || (npts & (npts - 1)) != 0)
      throw std::invalid_argument("PhaseGrid: point count must be a power of two");
    if (!(kappa > 0)) throw std::invalid_argument("PhaseGrid: kappa must be positive");
    axes_ = 2 * modes;
    total_ = 1;
    for (int a = 0; a < axes_; ++a) total_ *= npts_;
    strides_.assign(static_cast<std::size_t>(axes_), 1);
    for (int a = axes_ - 2; a >= 0; --a)
      strides_[static_cast<std::size_t>(a)] = strides_[static_cast<std::size_t>(a + 1)] * npts_;
  }

  int modes() const { return modes_; }
  int axes() const { return axes_; }
  int npts() const { return npts_; }
  double extent() const { return extent_; }
  double kappa() const { return kappa_; }
  double spacing() const { return 2.0 * extent_ / npts_; }
  long total() const { return total_; }
  long stride(int axis) const { return strides_[static_cast<std::size_t>(axis)]; }

  double coordinate(int index_on_axis) const { return -extent_ + index_on_axis * spacing(); }

  // quadrature weight of one cell under the fixed measure convention
  double cell_weight() const {
    double w = 1.0;
    for (int a = 0; a < axes_; ++a) w *= spacing();
    for (int j = 0; j < modes_; ++j) w *= kappa_ / 2.0;
    return w;
  }

  int digit(long flat, int axis) const {
    return static_cast<int>((flat / strides_[static_cast<std::size_t>(axis)]) % npts_);
  }

  std::vector<double> point(long flat) const {
    std::vector<double> z(static_cast<std::size_t>(axes_));
    for (int a = 0; a < axes_; ++a) z[static_cast<std::size_t>(a)] = coordinate(digit(flat, a));
    return z;
  }

  std::complex<double> alpha(long flat, int mode) const {
    double s = std::sqrt(kappa_ / 2.0);
    return {s * coordinate(digit(flat, mode)), s * coordinate(digit(flat, modes_ + mode))};
  }

  friend bool operator==(const PhaseGrid& a, const PhaseGrid& b) {
    return a.modes_ == b.modes_ && a.extent_ == b.extent_ && a.npts_ == b.npts_ && a.kappa_ == b.kappa_;
  }

 private:
  int modes_, npts_;
  double extent_, kappa_;
  int axes_;
  long total_;
  std::vector<long> strides_;
};

// Deterministic chunked sum: fixed chunk partition, serial combine, so the
// result is bit-identical no matter how many threads computed the chunks.
inline double deterministic_sum(const double* v, long n) {
  constexpr long chunk = 4096;
  const long nchunks = (n + chunk - 1) / chunk;
  std::vector<double> partial(static_cast<std::size_t>(nchunks));
#pragma omp parallel for schedule(static)
  for (long c = 0; c < nchunks; ++c) {
    double s = 0.0;
    const long hi = std::min(n, (c + 1) * chunk);
    for (long i = c * chunk; i < hi; ++i) s += v[i];
    partial[static_cast<std::size_t>(c)] = s;
  }
  double s = 0.0;
  for (long c = 0; c < nchunks; ++c) s += partial[static_cast<std::size_t>(c)];
  return s;
}

// Evaluates a polynomial in the grid coordinates at every grid point.
inline std::vector<double> evaluate_on_grid(const RealPolynomial& p, const PhaseGrid& g) {
  if (static_cast<int>(p.vars()) != g.axes())
    throw std::invalid_argument("evaluate_on_grid: polynomial arity does not match grid");
  const int n = g.npts();
  const int axes = g.axes();
  // per-axis power tables up to the max exponent appearing on that axis
  std::vector<int> maxe(static_cast<std::size_t>(axes), 0);
  for (const auto& [m, c] : p.terms())
    for (int a = 0; a < axes; ++a)
      maxe[static_cast<std::size_t>(a)] = std::max(maxe[static_cast<std::size_t>(a)], m[static_cast<std::size_t>(a)]);
  std::vector<std::vector<double>> pow_table(static_cast<std::size_t>(axes));
  for (int a = 0; a < axes; ++a) {
    auto& t = pow_table[static_cast<std::size_t>(a)];
    t.assign(static_cast<std::size_t>(n) * (maxe[static_cast<std::size_t>(a)] + 1), 1.0);
    for (int i = 0; i < n; ++i) {
      double x = g.coordinate(i);
      for (int e = 1; e <= maxe[static_cast<std::size_t>(a)]; ++e)
        t[static_cast<std::size_t>(e * n + i)] = t[static_cast<std::size_t>((e - 1) * n + i)] * x;
    }
  }
  std::vector<double> out(static_cast<std::size_t>(g.total()), 0.0);
  // terms flattened for the hot loop
  struct Term {
    double c;
    std::vector<std::pair<int, int>> powers;  // (axis, exponent), exponent > 0
  };
  std::vector<Term> terms;
  for (const auto& [m, c] : p.terms()) {
    Term t{c, {}};
    for (int a = 0; a < axes; ++a)
      if (m[static_cast<std::size_t>(a)] > 0) t.powers.emplace_back(a, m[static_cast<std::size_t>(a)]);
    terms.push_back(std::move(t));
  }
  const long total = g.total();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < total; ++i) {
    double acc = 0.0;
    for (const Term& t : terms) {
      double v = t.c;
      for (auto [a, e] : t.powers)
        v *= pow_table[static_cast<std::size_t>(a)][static_cast<std::size_t>(e * n + g.digit(i, a))];
      acc += v;
    }
    out[static_cast<std::size_t>(i)] = acc;
  }
  return out;
}

}  // namespace tsfp
