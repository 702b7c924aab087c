#pragma once

#include <Eigen/Dense>
#include <cmath>
#include <complex>
#include <stdexcept>
#include <vector>

#include "tsfp/density.hpp"
#include "tsfp/fock.hpp"
#include "tsfp/grid.hpp"
#include "tsfp/phase_space_poly.hpp"

namespace tsfp {

namespace detail {

// <alpha|n> = e^{-|alpha|^2/2} (alpha*)^n / sqrt(n!) per mode, tabulated over
// the mode plane in log space so large |alpha| never underflows prematurely.
inline Eigen::MatrixXcd coherent_overlap_table(const PhaseGrid& grid, int mode, int cutoff) {
  const int n = grid.npts();
  Eigen::MatrixXcd m(static_cast<long>(n) * n, cutoff);
  const double s = std::sqrt(grid.kappa() / 2.0);
#pragma omp parallel for schedule(static)
  for (int q = 0; q < n; ++q) {
    for (int p = 0; p < n; ++p) {
      std::complex<double> a(s * grid.coordinate(q), s * grid.coordinate(p));
      double aa = std::abs(a);
      double theta = (aa > 0) ? std::arg(a) : 0.0;
      for (int k = 0; k < cutoff; ++k) {
        double logmag = -0.5 * aa * aa - 0.5 * std::lgamma(k + 1.0);
        if (k > 0) logmag += k * std::log(aa > 0 ? aa : 1e-300);
        double mag = (aa == 0.0 && k > 0) ? 0.0 : std::exp(logmag);
        m(static_cast<long>(q) * n + p, k) = std::polar(mag, -k * theta);
      }
    }
  }
  (void)mode;
  return m;
}

}  // namespace detail

// Q(alpha) = |<alpha|psi>|^2 / pi^N sampled on the grid. Support that leaks
// past the window shows up as missing mass, reported by the caller through
// DensityGrid::mass().
inline DensityGrid husimi(const FockVector& psi, const PhaseGrid& grid) {
  const int modes = grid.modes();
  if (modes != psi.basis.modes()) throw std::invalid_argument("husimi: mode count mismatch");
  const int n = grid.npts();
  const long total = grid.total();
  const double norm = std::pow(M_PI, -modes);
  DensityGrid out(grid);

  if (modes == 1) {
    Eigen::MatrixXcd m = detail::coherent_overlap_table(grid, 0, psi.basis.cutoff(0));
    Eigen::VectorXcd overlap = m * psi.amps;
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) {
      long plane = static_cast<long>(grid.digit(i, 0)) * n + grid.digit(i, 1);
      out.values[static_cast<std::size_t>(i)] = std::norm(overlap[plane]) * norm;
    }
  } else if (modes == 2) {
    const int c1 = psi.basis.cutoff(0), c2 = psi.basis.cutoff(1);
    Eigen::MatrixXcd m1 = detail::coherent_overlap_table(grid, 0, c1);
    Eigen::MatrixXcd m2 = detail::coherent_overlap_table(grid, 1, c2);
    Eigen::Map<const Eigen::Matrix<std::complex<double>, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>>
        psi_mat(psi.amps.data(), c1, c2);
    Eigen::MatrixXcd overlap = m1 * (psi_mat * m2.transpose());  // (plane1 x plane2)
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) {
      long p1 = static_cast<long>(grid.digit(i, 0)) * n + grid.digit(i, 2);
      long p2 = static_cast<long>(grid.digit(i, 1)) * n + grid.digit(i, 3);
      out.values[static_cast<std::size_t>(i)] = std::norm(overlap(p1, p2)) * norm;
    }
  } else {
    // direct evaluation; adequate for small bases
    std::vector<Eigen::MatrixXcd> tables;
    for (int j = 0; j < modes; ++j)
      tables.push_back(detail::coherent_overlap_table(grid, j, psi.basis.cutoff(j)));
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) {
      std::complex<double> acc = 0.0;
      for (long b = 0; b < psi.basis.dim(); ++b) {
        auto occ = psi.basis.occupations(b);
        std::complex<double> v = psi.amps[b];
        for (int j = 0; j < modes; ++j) {
          long plane = static_cast<long>(grid.digit(i, j)) * n + grid.digit(i, modes + j);
          v *= tables[static_cast<std::size_t>(j)](plane, occ[static_cast<std::size_t>(j)]);
        }
        acc += v;
      }
      out.values[static_cast<std::size_t>(i)] = std::norm(acc) * norm;
    }
  }
  return out;
}

// |<psi|Op|psi> - integral of the Anti-Wick symbol against Q|; the phase-space
// side uses the fixed quadrature measure.
inline double expectation_identity_check(const OperatorPolynomial& op, const FockVector& psi,
                                         const PhaseGrid& grid) {
  OperatorMatrix m = build_operator(op, psi.basis);
  std::complex<double> quantum = (psi.amps.adjoint() * (m.mat * psi.amps))(0, 0);

  PhaseSpacePolynomial symbol = anti_wick_symbol(op);
  DensityGrid q = husimi(psi, grid);
  const long total = grid.total();
  std::vector<double> re(static_cast<std::size_t>(total)), im(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < total; ++i) {
    std::vector<std::complex<double>> alpha(static_cast<std::size_t>(grid.modes()));
    for (int j = 0; j < grid.modes(); ++j) alpha[static_cast<std::size_t>(j)] = grid.alpha(i, j);
    std::complex<double> v = symbol.evaluate(alpha) * q.values[static_cast<std::size_t>(i)];
    re[static_cast<std::size_t>(i)] = v.real();
    im[static_cast<std::size_t>(i)] = v.imag();
  }
  std::complex<double> phase_space(deterministic_sum(re.data(), total) * grid.cell_weight(),
                                   deterministic_sum(im.data(), total) * grid.cell_weight());
  return std::abs(quantum - phase_space);
}

// Central-difference Husimi rate from exact state evolution; the oracle side
// of every dynamical comparison.
inline std::vector<double> husimi_time_derivative(const FockVector& psi, const OperatorMatrix& h,
                                                  const PhaseGrid& grid, double delta_t,
                                                  double hbar = 1.0) {
  Propagator prop(h, hbar);
  DensityGrid plus = husimi(prop.evolve(psi, delta_t), grid);
  DensityGrid minus = husimi(prop.evolve(psi, -delta_t), grid);
  std::vector<double> rate(static_cast<std::size_t>(grid.total()));
  const long total = grid.total();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < total; ++i)
    rate[static_cast<std::size_t>(i)] = (plus.values[static_cast<std::size_t>(i)] -
                                         minus.values[static_cast<std::size_t>(i)]) /
                                        (2.0 * delta_t);
  return rate;
}

}  // namespace tsfp
