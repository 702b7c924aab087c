#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

#include "tsfp/phase_space_poly.hpp"
#include "tsfp/real_poly.hpp"
#include "tsfp/scales.hpp"

namespace tsfp {

// Exact second-derivative matrix of a Hamiltonian polynomial in dimensionless
// coordinates; evaluation returns a symmetric matrix by construction (only
// the upper triangle is differentiated and mirrored).
class HessianField {
 public:
  explicit HessianField(const RealPolynomial& h) : vars_(h.vars()) {
    if (vars_ == 0 || vars_ % 2 != 0) throw std::invalid_argument("HessianField: need 2N variables");
    std::vector<RealPolynomial> grad;
    grad.reserve(vars_);
    for (std::size_t a = 0; a < vars_; ++a) grad.push_back(h.derivative(a));
    entries_.reserve(vars_ * (vars_ + 1) / 2);
    for (std::size_t a = 0; a < vars_; ++a)
      for (std::size_t b = a; b < vars_; ++b) entries_.push_back(grad[a].derivative(b));
  }

  std::size_t vars() const { return vars_; }

  const RealPolynomial& entry(std::size_t a, std::size_t b) const {
    if (a > b) std::swap(a, b);
    return entries_[a * vars_ - a * (a + 1) / 2 + b];
  }

  Eigen::MatrixXd evaluate(const std::vector<double>& z) const {
    Eigen::MatrixXd m(vars_, vars_);
    for (std::size_t a = 0; a < vars_; ++a)
      for (std::size_t b = a; b < vars_; ++b) m(a, b) = m(b, a) = entry(a, b).evaluate(z);
    return m;
  }

 private:
  std::size_t vars_;
  std::vector<RealPolynomial> entries_;  // upper triangle, row-major
};

// Position-dependent diffusion matrix D(z) = (C / 2 kappa^2) [H''(z), J],
// held as exact polynomial entries. Symmetric, traceless, anticommutes with J.
class DiffusionField {
 public:
  DiffusionField(const RealPolynomial& h, const ModeScales& scales)
      : vars_(h.vars()), hessian_(h) {
    scales.validate();
    if (static_cast<int>(vars_) != 2 * scales.modes)
      throw std::invalid_argument("DiffusionField: Hamiltonian arity does not match mode count");
    const std::size_t n = vars_ / 2;
    const double pref = scales.C / (2.0 * scales.kappa * scales.kappa);

    // (H''J)_{ab} - (J H'')_{ab} written out through J's block action
    auto hj = [&](std::size_t a, std::size_t b) {
      return (b < n) ? hessian_.entry(a, n + b) * -1.0 : hessian_.entry(a, b - n);
    };
    auto jh = [&](std::size_t a, std::size_t b) {
      return (a < n) ? hessian_.entry(n + a, b) : hessian_.entry(a - n, b) * -1.0;
    };
    entries_.reserve(vars_ * vars_);
    for (std::size_t a = 0; a < vars_; ++a)
      for (std::size_t b = 0; b < vars_; ++b) entries_.push_back((hj(a, b) - jh(a, b)) * pref);
  }

  std::size_t vars() const { return vars_; }
  const HessianField& hessian() const { return hessian_; }
  const RealPolynomial& entry(std::size_t a, std::size_t b) const { return entries_[a * vars_ + b]; }

  // all commutator entries are identically zero polynomials
  bool is_identically_zero() const {
    for (const RealPolynomial& e : entries_)
      if (!e.is_zero()) return false;
    return true;
  }

  Eigen::MatrixXd evaluate(const std::vector<double>& z) const {
    Eigen::MatrixXd m(vars_, vars_);
    for (std::size_t a = 0; a < vars_; ++a)
      for (std::size_t b = 0; b < vars_; ++b) m(a, b) = entry(a, b).evaluate(z);
    return m;
  }

 private:
  std::size_t vars_;
  HessianField hessian_;
  std::vector<RealPolynomial> entries_;  // row-major full matrix
};

inline Eigen::MatrixXd diffusion_matrix(const RealPolynomial& h, const ModeScales& scales,
                                        const std::vector<double>& z) {
  return DiffusionField(h, scales).evaluate(z);
}

// C * d^2 h / d alpha_i* d alpha_j*, exact.
inline PhaseSpacePolynomial complex_diffusion_block(const PhaseSpacePolynomial& h, int i, int j,
                                                    const ExactComplex& C = ExactComplex(1)) {
  if (!h.is_real_valued())
    throw std::invalid_argument("complex_diffusion_block: Hamiltonian symbol must be real-valued");
  return differentiate(differentiate(h, i, Slot::Antiholomorphic), j, Slot::Antiholomorphic) * C;
}

struct SpectrumReport {
  Eigen::VectorXd eigenvalues;  // ascending
  double pairing_residual = 0.0;
  double trace = 0.0;
};

// Eigenvalues sorted ascending plus max_k |lambda_k + lambda_{2N+1-k}|.
inline SpectrumReport spectrum_report(const Eigen::MatrixXd& d) {
  double scale = std::max(1.0, d.cwiseAbs().maxCoeff());
  if ((d - d.transpose()).cwiseAbs().maxCoeff() > 1e-12 * scale)
    throw std::invalid_argument("spectrum_report: matrix is not symmetric within 1e-12");
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(d);
  SpectrumReport rep;
  rep.eigenvalues = es.eigenvalues();
  rep.trace = d.trace();
  const long n = rep.eigenvalues.size();
  for (long k = 0; k < n; ++k)
    rep.pairing_residual = std::max(rep.pairing_residual,
                                    std::abs(rep.eigenvalues[k] + rep.eigenvalues[n - 1 - k]));
  return rep;
}

// Assembles D(z) along two independent routes and returns the largest
// entrywise discrepancy:
//  (a) commutator of the real-coordinate Hessian with J,
//  (b) complex blocks C d^2h/dalpha* dalpha* mapped into real blocks through
//      the chain rule (QQ block from -Im, QP from Re, PP from +Im).
inline double consistency_check_appendix_routes(const PhaseSpacePolynomial& h, const ModeScales& scales,
                                                const std::vector<double>& z) {
  scales.validate();
  const int n = h.modes();
  if (static_cast<int>(z.size()) != 2 * n)
    throw std::invalid_argument("consistency_check_appendix_routes: point arity mismatch");

  RealPolynomial hr = to_real_polynomial(h, scales.kappa);
  Eigen::MatrixXd route_a = DiffusionField(hr, scales).evaluate(z);

  // alpha_j from the grid point
  std::vector<std::complex<double>> alpha(static_cast<std::size_t>(n));
  const double s = std::sqrt(scales.kappa / 2.0);
  for (int j = 0; j < n; ++j)
    alpha[static_cast<std::size_t>(j)] = s * std::complex<double>(z[static_cast<std::size_t>(j)],
                                                                  z[static_cast<std::size_t>(n + j)]);

  Eigen::MatrixXcd block(n, n);
  for (int i = 0; i < n; ++i)
    for (int j = 0; j < n; ++j)
      block(i, j) = complex_diffusion_block(h, i, j, ExactComplex::from_double(scales.C)).evaluate(alpha);

  // D^{aa} = (C/2kappa)(A + iB) with A = H_QQ - H_PP, B = H_QP + H_PQ
  Eigen::MatrixXd A = (2.0 * scales.kappa / scales.C) * block.real();
  Eigen::MatrixXd B = (2.0 * scales.kappa / scales.C) * block.imag();
  const double pref = scales.C / (2.0 * scales.kappa * scales.kappa);
  Eigen::MatrixXd route_b(2 * n, 2 * n);
  route_b.topLeftCorner(n, n) = -pref * B;
  route_b.topRightCorner(n, n) = pref * A;
  route_b.bottomLeftCorner(n, n) = pref * A;
  route_b.bottomRightCorner(n, n) = pref * B;

  return (route_a - route_b).cwiseAbs().maxCoeff();
}

}  // namespace tsfp
