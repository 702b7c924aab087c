#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "tsfp/operator_algebra.hpp"

namespace tsfp {

// Truncated multi-mode number basis; per-mode occupations run 0..cutoff-1.
// Basis index is mixed-radix with mode 0 slowest.
class FockBasis {
 public:
  FockBasis(int modes, std::vector<int> cutoffs) : cutoffs_(std::move(cutoffs)) {
    if (modes <= 0 || static_cast<int>(cutoffs_.size()) != modes)
      throw std::invalid_argument("FockBasis: need one cutoff per mode");
    dim_ = 1;
    for (int c : cutoffs_) {
      if (c < 2) throw std::invalid_argument("FockBasis: cutoff must be at least 2");
      dim_ *= c;
    }
  }
  FockBasis(int modes, int cutoff) : FockBasis(modes, std::vector<int>(modes, cutoff)) {}

  int modes() const { return static_cast<int>(cutoffs_.size()); }
  int cutoff(int mode) const { return cutoffs_[static_cast<std::size_t>(mode)]; }
  long dim() const { return dim_; }

  std::vector<int> occupations(long index) const {
    std::vector<int> occ(cutoffs_.size());
    for (int j = modes() - 1; j >= 0; --j) {
      occ[static_cast<std::size_t>(j)] = static_cast<int>(index % cutoffs_[static_cast<std::size_t>(j)]);
      index /= cutoffs_[static_cast<std::size_t>(j)];
    }
    return occ;
  }
  long index(const std::vector<int>& occ) const {
    long idx = 0;
    for (int j = 0; j < modes(); ++j) idx = idx * cutoffs_[static_cast<std::size_t>(j)] + occ[static_cast<std::size_t>(j)];
    return idx;
  }

  friend bool operator==(const FockBasis& a, const FockBasis& b) { return a.cutoffs_ == b.cutoffs_; }

 private:
  std::vector<int> cutoffs_;
  long dim_ = 0;
};

// Normalized complex state over a FockBasis.
struct FockVector {
  FockBasis basis;
  Eigen::VectorXcd amps;

  double norm() const { return amps.norm(); }
  void normalize() {
    double n = norm();
    if (n == 0.0) throw std::runtime_error("FockVector: cannot normalize zero vector");
    amps /= n;
  }

  // probability carried by the top 10% of occupations in any mode
  double tail_mass() const {
    double mass = 0.0;
    for (long i = 0; i < basis.dim(); ++i) {
      auto occ = basis.occupations(i);
      bool tail = false;
      for (int j = 0; j < basis.modes(); ++j)
        if (occ[static_cast<std::size_t>(j)] >= (9 * basis.cutoff(j)) / 10) tail = true;
      if (tail) mass += std::norm(amps[i]);
    }
    return mass;
  }
};

struct OperatorMatrix {
  FockBasis basis;
  Eigen::MatrixXcd mat;
  bool hermitian = false;
};

inline double hermiticity_defect(const Eigen::MatrixXcd& m) {
  return (m - m.adjoint()).cwiseAbs().maxCoeff();
}

// Standard ladder matrix elements a|n> = sqrt(n)|n-1>, adag|n> = sqrt(n+1)|n+1>,
// tensor-product assembly; words act right-to-left. States raised past the
// cutoff are dropped (truncation).
inline OperatorMatrix build_operator(const OperatorPolynomial& p, const FockBasis& basis) {
  if (p.modes() != basis.modes()) throw std::invalid_argument("build_operator: mode count mismatch");
  Eigen::MatrixXcd m = Eigen::MatrixXcd::Zero(basis.dim(), basis.dim());
  for (const auto& [word, coeff] : p.terms()) {
    for (long col = 0; col < basis.dim(); ++col) {
      std::vector<int> occ = basis.occupations(col);
      double amp = 1.0;
      bool dead = false;
      for (auto it = word.rbegin(); it != word.rend(); ++it) {
        int& n = occ[static_cast<std::size_t>(it->mode)];
        if (it->create) {
          amp *= std::sqrt(static_cast<double>(n + 1));
          if (++n >= basis.cutoff(it->mode)) {
            dead = true;
            break;
          }
        } else {
          if (n == 0) {
            dead = true;
            break;
          }
          amp *= std::sqrt(static_cast<double>(n));
          --n;
        }
      }
      if (!dead) m(basis.index(occ), col) += coeff.to_std() * amp;
    }
  }
  OperatorMatrix out{basis, std::move(m), false};
  out.hermitian = hermiticity_defect(out.mat) <= 1e-12 * std::max(1.0, out.mat.cwiseAbs().maxCoeff());
  return out;
}

// Rows/cols whose occupations stay clear of the cutoff edge by the reach of
// the polynomial's words; truncated matrix products are exact there.
inline std::vector<long> interior_indices(const FockBasis& basis, int reach) {
  std::vector<long> idx;
  for (long i = 0; i < basis.dim(); ++i) {
    auto occ = basis.occupations(i);
    bool ok = true;
    for (int j = 0; j < basis.modes(); ++j)
      if (occ[static_cast<std::size_t>(j)] > basis.cutoff(j) - 1 - reach) ok = false;
    if (ok) idx.push_back(i);
  }
  return idx;
}

inline double max_interior_difference(const Eigen::MatrixXcd& a, const Eigen::MatrixXcd& b,
                                      const std::vector<long>& interior) {
  double d = 0.0;
  for (long r : interior)
    for (long c : interior) d = std::max(d, std::abs(a(r, c) - b(r, c)));
  return d;
}

// psi(t) = exp(-i H t / hbar) psi via dense Hermitian eigendecomposition.
class Propagator {
 public:
  Propagator(const OperatorMatrix& h, double hbar = 1.0) : basis_(h.basis), hbar_(hbar) {
    if (!h.hermitian)
      throw std::invalid_argument("Propagator: Hamiltonian matrix failed the Hermiticity check");
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h.mat);
    if (es.info() != Eigen::Success) throw std::runtime_error("Propagator: eigendecomposition failed");
    evals_ = es.eigenvalues();
    evecs_ = es.eigenvectors();
  }

  FockVector evolve(const FockVector& psi, double t) const {
    if (!(psi.basis == basis_)) throw std::invalid_argument("Propagator::evolve: basis mismatch");
    Eigen::VectorXcd c = evecs_.adjoint() * psi.amps;
    for (long k = 0; k < c.size(); ++k)
      c[k] *= std::exp(std::complex<double>(0.0, -evals_[k] * t / hbar_));
    return {basis_, evecs_ * c};
  }

 private:
  FockBasis basis_;
  double hbar_;
  Eigen::VectorXd evals_;
  Eigen::MatrixXcd evecs_;
};

inline FockVector evolve_state(const FockVector& psi, const OperatorMatrix& h, double t, double hbar = 1.0) {
  return Propagator(h, hbar).evolve(psi, t);
}

inline FockVector fock_state(const FockBasis& basis, const std::vector<int>& occ) {
  Eigen::VectorXcd v = Eigen::VectorXcd::Zero(basis.dim());
  v[basis.index(occ)] = 1.0;
  return {basis, std::move(v)};
}

// Coherent-state amplitudes beta^n e^{-|beta|^2/2}/sqrt(n!), truncated and
// renormalized; the discarded tail is available through tail_mass().
inline FockVector coherent_state(const FockBasis& basis, const std::vector<std::complex<double>>& beta) {
  if (static_cast<int>(beta.size()) != basis.modes())
    throw std::invalid_argument("coherent_state: one amplitude per mode required");
  Eigen::VectorXcd v(basis.dim());
  for (long i = 0; i < basis.dim(); ++i) {
    auto occ = basis.occupations(i);
    std::complex<double> amp = 1.0;
    for (int j = 0; j < basis.modes(); ++j) {
      int n = occ[static_cast<std::size_t>(j)];
      std::complex<double> b = beta[static_cast<std::size_t>(j)];
      double ab = std::abs(b);
      if (ab == 0.0) {
        if (n > 0) amp = 0.0;
        continue;
      }
      // log space keeps |beta|^n / sqrt(n!) finite for large arguments
      double logmag = -0.5 * ab * ab + n * std::log(ab) - 0.5 * std::lgamma(n + 1.0);
      amp *= std::polar(std::exp(logmag), n * std::arg(b));
    }
    v[i] = amp;
  }
  FockVector psi{basis, std::move(v)};
  psi.normalize();
  return psi;
}

}  // namespace tsfp
