#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <stdexcept>
#include <vector>

namespace tsfp {

// Action scale kappa, per-mode length scales, and the global diffusion
// constant C. Defaults are natural units (hbar = kappa = C = 1).
struct ModeScales {
  int modes = 1;
  std::vector<double> lengths;  // one per mode, positive
  double kappa = 1.0;
  double C = 1.0;
  double hbar = 1.0;

  static ModeScales natural(int modes) { return {modes, std::vector<double>(modes, 1.0), 1.0, 1.0, 1.0}; }

  void validate() const {
    if (modes <= 0 || static_cast<int>(lengths.size()) != modes)
      throw std::invalid_argument("ModeScales: one length per mode required");
    for (double l : lengths)
      if (!(l > 0)) throw std::invalid_argument("ModeScales: lengths must be positive");
    if (!(kappa > 0)) throw std::invalid_argument("ModeScales: kappa must be positive");
  }
};

// L = diag(l_1..l_N, kappa/l_1..kappa/l_N); xi = L z maps dimensionless to
// physical coordinates.
inline Eigen::MatrixXd build_scaling(const ModeScales& s) {
  s.validate();
  const int n = s.modes;
  Eigen::MatrixXd L = Eigen::MatrixXd::Zero(2 * n, 2 * n);
  for (int j = 0; j < n; ++j) {
    L(j, j) = s.lengths[static_cast<std::size_t>(j)];
    L(n + j, n + j) = s.kappa / s.lengths[static_cast<std::size_t>(j)];
  }
  return L;
}

// The standard symplectic matrix [[0, I], [-I, 0]].
inline Eigen::MatrixXd symplectic_matrix(int modes) {
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(2 * modes, 2 * modes);
  for (int j = 0; j < modes; ++j) {
    J(j, modes + j) = 1.0;
    J(modes + j, j) = -1.0;
  }
  return J;
}

// Harmonic-oscillator lengths l_k = sqrt(kappa/omega_k). With these scales a
// quadratic Hamiltonian sum_k omega_k |alpha_k|^2 has a scaled Hessian that is
// a per-mode multiple of the identity, so its commutator with J vanishes.
inline ModeScales fix_free_lengths(const std::vector<double>& frequencies, double kappa,
                                   double C = 1.0, double hbar = 1.0) {
  if (frequencies.empty()) throw std::invalid_argument("fix_free_lengths: need at least one frequency");
  ModeScales s;
  s.modes = static_cast<int>(frequencies.size());
  s.kappa = kappa;
  s.C = C;
  s.hbar = hbar;
  for (double w : frequencies) {
    if (!(w > 0)) throw std::invalid_argument("fix_free_lengths: frequencies must be positive");
    s.lengths.push_back(std::sqrt(kappa / w));
  }
  s.validate();
  return s;
}

}  // namespace tsfp
