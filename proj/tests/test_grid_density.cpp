#include <catch2/catch_amalgamated.hpp>
#include <cmath>
#include <filesystem>

#include "tsfp/density.hpp"
#include "tsfp/grid.hpp"

using namespace tsfp;

namespace {

// normalized Gaussian blob centered at (q0, p0) with unit width in grid units
DensityGrid gaussian_blob(const PhaseGrid& g, double q0, double p0, double sigma = 1.0) {
  DensityGrid rho(g);
  const long total = g.total();
  for (long i = 0; i < total; ++i) {
    double q = g.coordinate(g.digit(i, 0)), p = g.coordinate(g.digit(i, 1));
    rho.values[static_cast<std::size_t>(i)] =
        std::exp(-((q - q0) * (q - q0) + (p - p0) * (p - p0)) / (2 * sigma * sigma));
  }
  rho.normalize();
  return rho;
}

}  // namespace

TEST_CASE("PhaseGrid geometry") {
  PhaseGrid g(1, 6.0, 64, 1.0);
  CHECK(g.axes() == 2);
  CHECK(g.total() == 64L * 64L);
  CHECK(g.spacing() == Catch::Approx(12.0 / 64));
  CHECK(g.coordinate(0) == -6.0);
  CHECK(g.coordinate(32) == 0.0);
  CHECK(g.cell_weight() == Catch::Approx(0.5 * g.spacing() * g.spacing()));
  CHECK_THROWS(PhaseGrid(1, 6.0, 100));  // not a power of two
  CHECK_THROWS(PhaseGrid(1, -1.0, 64));
}

TEST_CASE("vacuum Gaussian has unit mass") {
  PhaseGrid g(1, 8.0, 128, 1.0);
  DensityGrid rho(g);
  for (long i = 0; i < g.total(); ++i) {
    double q = g.coordinate(g.digit(i, 0)), p = g.coordinate(g.digit(i, 1));
    // e^{-|alpha|^2}/pi with |alpha|^2 = (Q^2+P^2)/2 at kappa = 1
    rho.values[static_cast<std::size_t>(i)] = std::exp(-(q * q + p * p) / 2.0) / M_PI;
  }
  CHECK(rho.mass() == Catch::Approx(1.0).margin(1e-8));

  SECTION("observable |alpha|^2 integrates to one") {
    RealPolynomial n_sym(2);  // |alpha|^2 = (Q^2 + P^2)/2
    n_sym.add_term(0.5, MultiIndex({2, 0}));
    n_sym.add_term(0.5, MultiIndex({0, 2}));
    Observables obs = observables(rho, n_sym);
    CHECK(obs.energy == Catch::Approx(1.0).margin(1e-6));
  }
}

TEST_CASE("coherent blob centroid") {
  PhaseGrid g(1, 8.0, 128, 1.0);
  std::complex<double> beta(0.7, -0.3);
  DensityGrid rho = gaussian_blob(g, std::sqrt(2.0) * beta.real(), std::sqrt(2.0) * beta.imag());
  Observables obs = observables(rho, RealPolynomial(2));
  CHECK(std::abs(obs.centroid[0] - beta) <= 1e-6);
  CHECK(obs.var_q[0] == Catch::Approx(1.0).margin(1e-6));
}

TEST_CASE("time_reverse") {
  PhaseGrid g(1, 6.0, 64, 1.0);
  SECTION("applied twice is the identity, exactly") {
    DensityGrid rho = gaussian_blob(g, 1.0, 1.0);
    DensityGrid twice = time_reverse(time_reverse(rho));
    for (long i = 0; i < g.total(); ++i)
      REQUIRE(twice.values[static_cast<std::size_t>(i)] == rho.values[static_cast<std::size_t>(i)]);
  }
  SECTION("even-in-P density is a fixed point, exactly") {
    DensityGrid rho = gaussian_blob(g, 1.2, 0.0);
    DensityGrid rt = time_reverse(rho);
    for (long i = 0; i < g.total(); ++i)
      REQUIRE(rt.values[static_cast<std::size_t>(i)] == rho.values[static_cast<std::size_t>(i)]);
  }
  SECTION("blob at (1,1) reflects to (1,-1)") {
    DensityGrid rho = gaussian_blob(g, 1.0, 1.0);
    Observables obs = observables(time_reverse(rho), RealPolynomial(2));
    std::complex<double> expect = std::complex<double>(1.0, -1.0) / std::sqrt(2.0);
    CHECK(std::abs(obs.centroid[0] - expect) <= 1e-6);
  }
}

TEST_CASE("snapshot round trip is exact") {
  PhaseGrid g(1, 5.0, 32, 1.0);
  DensityGrid rho = gaussian_blob(g, 0.5, -0.25);
  rho.time = 1.375;
  auto path = std::filesystem::temp_directory_path() / "tsfp_test_snapshot.bin";
  write_snapshot(rho, path.string());
  DensityGrid back = read_snapshot(path.string());
  CHECK(back.grid == rho.grid);
  CHECK(back.time == rho.time);
  for (long i = 0; i < g.total(); ++i)
    REQUIRE(back.values[static_cast<std::size_t>(i)] == rho.values[static_cast<std::size_t>(i)]);
  std::filesystem::remove(path);
}

TEST_CASE("compare metrics") {
  PhaseGrid g(1, 8.0, 256, 1.0);
  DensityGrid a = gaussian_blob(g, 0.0, 0.0);
  SECTION("identical densities compare to zero") {
    CompareMetrics m = compare_densities(a, a);
    CHECK(m.l1 == 0.0);
    CHECK(m.linf == 0.0);
    CHECK(m.centroid_offset == 0.0);
    CHECK(m.variance_offset == 0.0);
  }
  SECTION("one-cell shift matches the Gaussian overlap closed form") {
    double h = g.spacing();
    DensityGrid b = gaussian_blob(g, h, 0.0);
    CompareMetrics m = compare_densities(a, b);
    double expect = 2.0 * std::erf(h / (2.0 * std::sqrt(2.0)));
    CHECK(m.l1 == Catch::Approx(expect).epsilon(0.05));
  }
  SECTION("grid mismatch is rejected") {
    PhaseGrid g2(1, 8.0, 128, 1.0);
    CHECK_THROWS(compare_densities(a, gaussian_blob(g2, 0.0, 0.0)));
  }
}

TEST_CASE("negativity reporting") {
  PhaseGrid g(1, 4.0, 16, 1.0);
  DensityGrid rho(g);
  rho.values[3] = -1e-7;
  rho.values[5] = -1e-10;  // below reporting floor magnitude
  CHECK(rho.count_below_floor() == 1);
  CHECK(rho.min_value() == -1e-7);
}
