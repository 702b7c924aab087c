#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdio>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsfp/grid.hpp"
#include "tsfp/real_poly.hpp"

namespace tsfp {

// Sampled real density on a PhaseGrid, normalized under the fixed measure.
// Negative values are reported, never silently clamped or renormalized.
struct DensityGrid {
  PhaseGrid grid;
  std::vector<double> values;
  double time = 0.0;

  static constexpr double kNegativityFloor = 1e-9;

  DensityGrid(PhaseGrid g, std::vector<double> v, double t = 0.0)
      : grid(std::move(g)), values(std::move(v)), time(t) {
    if (static_cast<long>(values.size()) != grid.total())
      throw std::invalid_argument("DensityGrid: value count does not match grid");
  }
  explicit DensityGrid(PhaseGrid g)
      : grid(std::move(g)), values(static_cast<std::size_t>(grid.total()), 0.0) {}

  double mass() const { return deterministic_sum(values.data(), grid.total()) * grid.cell_weight(); }
  double min_value() const { return *std::min_element(values.begin(), values.end()); }
  double max_value() const { return *std::max_element(values.begin(), values.end()); }

  long count_below_floor() const {
    long c = 0;
    for (double v : values)
      if (v < -kNegativityFloor) ++c;
    return c;
  }

  // largest |value| on any boundary face relative to the global max
  double boundary_max_ratio() const {
    double mx = 0.0;
    const int n = grid.npts();
    const long total = grid.total();
    for (long i = 0; i < total; ++i) {
      for (int a = 0; a < grid.axes(); ++a) {
        int d = grid.digit(i, a);
        if (d == 0 || d == n - 1) {
          mx = std::max(mx, std::abs(values[static_cast<std::size_t>(i)]));
          break;
        }
      }
    }
    double peak = std::max(std::abs(max_value()), std::abs(min_value()));
    return peak > 0 ? mx / peak : 0.0;
  }

  void normalize() {
    double m = mass();
    if (m <= 0) throw std::runtime_error("DensityGrid::normalize: non-positive mass");
    for (double& v : values) v /= m;
  }
};

// rho_T(Q, P) = rho(Q, -P) by exact index permutation over every momentum axis.
inline DensityGrid time_reverse(const DensityGrid& rho) {
  const PhaseGrid& g = rho.grid;
  const int n = g.npts();
  DensityGrid out(g);
  out.time = rho.time;
  const long total = g.total();
#pragma omp parallel for schedule(static)
  for (long i = 0; i < total; ++i) {
    long src = 0;
    for (int a = 0; a < g.axes(); ++a) {
      int d = g.digit(i, a);
      if (a >= g.modes()) d = (n - d) % n;  // flip P axes about 0
      src += static_cast<long>(d) * g.stride(a);
    }
    out.values[static_cast<std::size_t>(i)] = rho.values[static_cast<std::size_t>(src)];
  }
  return out;
}

struct Observables {
  double mass = 0.0;
  double energy = 0.0;
  std::vector<std::complex<double>> centroid;  // <alpha_j>
  std::vector<double> var_q, var_p;            // density variances per mode
  double min_value = 0.0;
  double boundary_ratio = 0.0;
};

// Quadrature moments under the fixed measure; `h` is the Hamiltonian in grid
// coordinates so `energy` is the phase-space expectation value.
inline Observables observables(const DensityGrid& rho, const RealPolynomial& h) {
  const PhaseGrid& g = rho.grid;
  const long total = g.total();
  const double w = g.cell_weight();
  Observables obs;
  obs.mass = rho.mass();
  obs.min_value = rho.min_value();
  obs.boundary_ratio = rho.boundary_max_ratio();

  std::vector<double> hg = evaluate_on_grid(h, g);
  std::vector<double> tmp(static_cast<std::size_t>(total));
#pragma omp parallel for schedule(static)
  for (long i = 0; i < total; ++i)
    tmp[static_cast<std::size_t>(i)] = hg[static_cast<std::size_t>(i)] * rho.values[static_cast<std::size_t>(i)];
  obs.energy = deterministic_sum(tmp.data(), total) * w;

  const double s = std::sqrt(g.kappa() / 2.0);
  for (int j = 0; j < g.modes(); ++j) {
    double mq = 0, mp = 0, mq2 = 0, mp2 = 0;
    for (int which = 0; which < 4; ++which) {
      int axis = (which % 2 == 0) ? j : g.modes() + j;
      int power = (which < 2) ? 1 : 2;
#pragma omp parallel for schedule(static)
      for (long i = 0; i < total; ++i) {
        double x = g.coordinate(g.digit(i, axis));
        double v = rho.values[static_cast<std::size_t>(i)] * x;
        if (power == 2) v *= x;
        tmp[static_cast<std::size_t>(i)] = v;
      }
      double m = deterministic_sum(tmp.data(), total) * w;
      if (which == 0) mq = m;
      if (which == 1) mp = m;
      if (which == 2) mq2 = m;
      if (which == 3) mp2 = m;
    }
    obs.centroid.push_back(std::complex<double>(s * mq, s * mp));
    obs.var_q.push_back(mq2 - mq * mq);
    obs.var_p.push_back(mp2 - mp * mp);
  }
  return obs;
}

// --- snapshot files ----------------------------------------------------------
//
// Small text header followed by raw little-endian float64 values:
//   tsfp-snapshot 1
//   modes <N> ; npts <n> ; extent <R> ; kappa <k> ; time <t>
//   measure prod_k (kappa/2) dQ_k dP_k
//   data <count>
//   <binary doubles>

inline void write_snapshot(const DensityGrid& rho, const std::string& path) {
  std::ofstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("write_snapshot: cannot open " + path);
  char head[256];
  std::snprintf(head, sizeof(head),
                "tsfp-snapshot 1\nmodes %d ; npts %d ; extent %.17g ; kappa %.17g ; time %.17g\n"
                "measure prod_k (kappa/2) dQ_k dP_k\ndata %ld\n",
                rho.grid.modes(), rho.grid.npts(), rho.grid.extent(), rho.grid.kappa(), rho.time,
                rho.grid.total());
  f << head;
  f.write(reinterpret_cast<const char*>(rho.values.data()),
          static_cast<std::streamsize>(rho.values.size() * sizeof(double)));
}

inline DensityGrid read_snapshot(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw std::runtime_error("read_snapshot: cannot open " + path);
  std::string magic, line;
  std::getline(f, magic);
  if (magic != "tsfp-snapshot 1") throw std::runtime_error("read_snapshot: bad magic in " + path);
  int modes = 0, npts = 0;
  double extent = 0, kappa = 0, time = 0;
  std::getline(f, line);
  if (std::sscanf(line.c_str(), "modes %d ; npts %d ; extent %lg ; kappa %lg ; time %lg", &modes,
                  &npts, &extent, &kappa, &time) != 5)
    throw std::runtime_error("read_snapshot: bad header in " + path);
  std::getline(f, line);  // measure line
  long count = 0;
  std::getline(f, line);
  if (std::sscanf(line.c_str(), "data %ld", &count) != 1)
    throw std::runtime_error("read_snapshot: bad data line in " + path);
  PhaseGrid grid(modes, extent, npts, kappa);
  if (count != grid.total()) throw std::runtime_error("read_snapshot: count mismatch in " + path);
  std::vector<double> values(static_cast<std::size_t>(count));
  f.read(reinterpret_cast<char*>(values.data()), static_cast<std::streamsize>(count * sizeof(double)));
  if (!f) throw std::runtime_error("read_snapshot: truncated data in " + path);
  return DensityGrid(grid, std::move(values), time);
}

struct CompareMetrics {
  double l1 = 0.0;
  double linf = 0.0;
  double centroid_offset = 0.0;  // max over modes |<alpha>_A - <alpha>_B|
  double variance_offset = 0.0;  // max over modes/axes |var_A - var_B|
};

inline CompareMetrics compare_densities(const DensityGrid& a, const DensityGrid& b) {
  if (!(a.grid == b.grid)) throw std::invalid_argument("compare_densities: grid mismatch");
  const long total = a.grid.total();
  std::vector<double> diff(static_cast<std::size_t>(total));
  double linf = 0.0;
#pragma omp parallel for schedule(static) reduction(max : linf)
  for (long i = 0; i < total; ++i) {
    double d = std::abs(a.values[static_cast<std::size_t>(i)] - b.values[static_cast<std::size_t>(i)]);
    diff[static_cast<std::size_t>(i)] = d;
    linf = std::max(linf, d);
  }
  CompareMetrics m;
  m.l1 = deterministic_sum(diff.data(), total) * a.grid.cell_weight();
  m.linf = linf;
  RealPolynomial unused(static_cast<std::size_t>(a.grid.axes()));
  Observables oa = observables(a, unused), ob = observables(b, unused);
  for (int j = 0; j < a.grid.modes(); ++j) {
    m.centroid_offset = std::max(m.centroid_offset,
                                 std::abs(oa.centroid[static_cast<std::size_t>(j)] -
                                          ob.centroid[static_cast<std::size_t>(j)]));
    m.variance_offset = std::max({m.variance_offset,
                                  std::abs(oa.var_q[static_cast<std::size_t>(j)] - ob.var_q[static_cast<std::size_t>(j)]),
                                  std::abs(oa.var_p[static_cast<std::size_t>(j)] - ob.var_p[static_cast<std::size_t>(j)])});
  }
  return m;
}

}  // namespace tsfp
