#pragma once

#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "tsfp/diffusion.hpp"
#include "tsfp/phase_space_poly.hpp"
#include "tsfp/scales.hpp"

namespace tsfp {

// Random real-valued symbol of bounded total degree: coefficients are placed
// in conjugate pairs c_{m,n} / conj(c)_{n,m} so reality holds exactly.
inline PhaseSpacePolynomial random_real_symbol(std::mt19937_64& rng, int modes, int max_degree,
                                               int pair_count = 6) {
  std::uniform_int_distribution<int> num(-6, 6);
  std::uniform_int_distribution<int> den(1, 4);
  std::uniform_int_distribution<int> expo(0, max_degree);
  PhaseSpacePolynomial h(modes);
  for (int t = 0; t < pair_count; ++t) {
    std::vector<int> m(static_cast<std::size_t>(modes)), n(static_cast<std::size_t>(modes));
    int total = 0;
    for (int j = 0; j < modes; ++j) {
      m[static_cast<std::size_t>(j)] = expo(rng);
      n[static_cast<std::size_t>(j)] = expo(rng);
      total += m[static_cast<std::size_t>(j)] + n[static_cast<std::size_t>(j)];
    }
    if (total > max_degree) continue;
    ExactComplex c(Rational(num(rng), den(rng)), Rational(num(rng), den(rng)));
    if (c.is_zero()) c = ExactComplex(1);
    MultiIndex mi{m}, ni{n};
    h.add_term(c, mi, ni);
    h.add_term(c.conj(), ni, mi);
  }
  if (h.is_zero()) h.add_term(ExactComplex(1), MultiIndex::zeros(modes), MultiIndex::zeros(modes));
  return h;
}

struct AuditResult {
  int hamiltonians = 0;
  int points_per_hamiltonian = 0;
  double max_trace = 0.0;
  double max_anticommutation = 0.0;   // ||DJ + JD||_max
  double max_pairing_residual = 0.0;  // eigenvalue pairing
  double max_dual_route = 0.0;        // two-route assembly discrepancy
  bool mixed_block_structurally_absent = true;

  bool pass(double trace_tol = 1e-12, double anti_tol = 1e-12, double pairing_tol = 1e-9,
            double dual_tol = 1e-10) const {
    return max_trace <= trace_tol && max_anticommutation <= anti_tol &&
           max_pairing_residual <= pairing_tol && max_dual_route <= dual_tol &&
           mixed_block_structurally_absent;
  }

  std::string table() const {
    std::ostringstream os;
    os << "constraint audit: " << hamiltonians << " random Hamiltonians x "
       << points_per_hamiltonian << " points\n";
    char buf[128];
    std::snprintf(buf, sizeof(buf), "  max |trace D|          = %.3e\n", max_trace);
    os << buf;
    std::snprintf(buf, sizeof(buf), "  max ||DJ + JD||_max    = %.3e\n", max_anticommutation);
    os << buf;
    std::snprintf(buf, sizeof(buf), "  max pairing residual   = %.3e\n", max_pairing_residual);
    os << buf;
    std::snprintf(buf, sizeof(buf), "  max dual-route residual= %.3e\n", max_dual_route);
    os << buf;
    os << "  mixed holomorphic-antiholomorphic block: "
       << (mixed_block_structurally_absent ? "absent by construction" : "PRESENT (bug)") << "\n";
    return os.str();
  }
};

// Structural identity battery over random Hamiltonians: tracelessness,
// anticommutation with J, eigenvalue pairing, and the dual-route assembly.
inline AuditResult run_constraint_audit(std::uint64_t seed, int count, int points = 10,
                                        int modes_max = 2, int max_degree = 4) {
  std::mt19937_64 rng(seed);
  std::uniform_real_distribution<double> coord(-2.0, 2.0);
  AuditResult res;
  res.hamiltonians = count;
  res.points_per_hamiltonian = points;
  for (int t = 0; t < count; ++t) {
    int modes = 1 + (t % modes_max);
    PhaseSpacePolynomial h = random_real_symbol(rng, modes, max_degree);
    ModeScales scales = ModeScales::natural(modes);
    RealPolynomial hr = to_real_polynomial(h, scales.kappa);
    DiffusionField field(hr, scales);
    Eigen::MatrixXd J = symplectic_matrix(modes);
    for (int p = 0; p < points; ++p) {
      std::vector<double> z(static_cast<std::size_t>(2 * modes));
      for (double& v : z) v = coord(rng);
      Eigen::MatrixXd D = field.evaluate(z);
      res.max_trace = std::max(res.max_trace, std::abs(D.trace()));
      res.max_anticommutation =
          std::max(res.max_anticommutation, (D * J + J * D).cwiseAbs().maxCoeff());
      res.max_pairing_residual =
          std::max(res.max_pairing_residual, spectrum_report(D).pairing_residual);
      res.max_dual_route =
          std::max(res.max_dual_route, consistency_check_appendix_routes(h, scales, z));
    }
  }
  return res;
}

}  // namespace tsfp
