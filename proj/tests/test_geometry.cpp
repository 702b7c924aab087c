#include <catch2/catch_amalgamated.hpp>
#include <random>

#include "tsfp/audit.hpp"
#include "tsfp/diffusion.hpp"
#include "tsfp/scales.hpp"

using namespace tsfp;

namespace {

PhaseSpacePolynomial kerr_like_symbol(double omega, double U) {
  // omega(|a|^2 - 1) + U/2 (|a|^4 - 4|a|^2 + 2)
  PhaseSpacePolynomial h(1);
  Rational w = rational_from_double(omega), u = rational_from_double(U);
  h.add_term(ExactComplex(u / 2), MultiIndex({2}), MultiIndex({2}));
  h.add_term(ExactComplex(w - 2 * u), MultiIndex({1}), MultiIndex({1}));
  h.add_term(ExactComplex(u - w), MultiIndex({0}), MultiIndex({0}));
  return h;
}

}  // namespace

TEST_CASE("build_scaling examples") {
  SECTION("unit scales give the identity") {
    CHECK(build_scaling(ModeScales::natural(2)).isApprox(Eigen::MatrixXd::Identity(4, 4)));
  }
  SECTION("N=1, l=2, kappa=1 gives diag(2, 0.5)") {
    ModeScales s{1, {2.0}, 1.0, 1.0, 1.0};
    Eigen::MatrixXd L = build_scaling(s);
    CHECK(L(0, 0) == 2.0);
    CHECK(L(1, 1) == 0.5);
  }
  SECTION("free-field scales for omega = (1, 4)") {
    ModeScales s = fix_free_lengths({1.0, 4.0}, 1.0);
    Eigen::MatrixXd L = build_scaling(s);
    CHECK(L(0, 0) == Catch::Approx(1.0));
    CHECK(L(1, 1) == Catch::Approx(0.5));
    CHECK(L(2, 2) == Catch::Approx(1.0));
    CHECK(L(3, 3) == Catch::Approx(2.0));
  }
}

TEST_CASE("symplectic matrix identities") {
  for (int n : {1, 2, 3}) {
    Eigen::MatrixXd J = symplectic_matrix(n);
    CHECK((J * J + Eigen::MatrixXd::Identity(2 * n, 2 * n)).cwiseAbs().maxCoeff() == 0.0);
    CHECK((J.transpose() + J).cwiseAbs().maxCoeff() == 0.0);
  }
}

TEST_CASE("fix_free_lengths examples") {
  CHECK(fix_free_lengths({1.0}, 1.0).lengths[0] == Catch::Approx(1.0));
  // omega = sqrt(k^2 + m^2) with k = 0, m = 2
  CHECK(fix_free_lengths({2.0}, 1.0).lengths[0] == Catch::Approx(1.0 / std::sqrt(2.0)));
  CHECK_THROWS(fix_free_lengths({-1.0}, 1.0));
  CHECK_THROWS(fix_free_lengths({}, 1.0));

  SECTION("scaled free Hessian is omega kappa times the identity") {
    // physical H0 = p^2/2 + omega^2 q^2 / 2 has Hessian diag(omega^2, 1)
    double omega = 3.0, kappa = 1.7;
    ModeScales s = fix_free_lengths({omega}, kappa);
    Eigen::MatrixXd L = build_scaling(s);
    Eigen::MatrixXd Hpp(2, 2);
    Hpp << omega * omega, 0.0, 0.0, 1.0;
    Eigen::MatrixXd scaled = L.transpose() * Hpp * L;
    CHECK(scaled(0, 0) == Catch::Approx(kappa * omega));
    CHECK(scaled(1, 1) == Catch::Approx(kappa * omega));
    Eigen::MatrixXd J = symplectic_matrix(1);
    CHECK((scaled * J - J * scaled).cwiseAbs().maxCoeff() < 1e-12);
  }
}

TEST_CASE("diffusion vanishes for free Hamiltonians") {
  SECTION("multi-frequency free theory: identically zero polynomials") {
    PhaseSpacePolynomial h(2);
    h.add_term(ExactComplex(1), MultiIndex({1, 0}), MultiIndex({1, 0}));
    h.add_term(ExactComplex(4), MultiIndex({0, 1}), MultiIndex({0, 1}));
    RealPolynomial hr = to_real_polynomial(h, 1.0);
    DiffusionField field(hr, ModeScales::natural(2));
    CHECK(field.is_identically_zero());
  }
  SECTION("any constant Hessian proportional to the identity") {
    // h = (Q^2 + P^2) * 3/2
    RealPolynomial h(2);
    h.add_term(1.5, MultiIndex({2, 0}));
    h.add_term(1.5, MultiIndex({0, 2}));
    CHECK(DiffusionField(h, ModeScales::natural(1)).is_identically_zero());
  }
}

TEST_CASE("Kerr diffusion block and finite-difference Hessian oracle") {
  double U = 0.7;
  PhaseSpacePolynomial h = kerr_like_symbol(1.0, U);

  SECTION("complex block equals U alpha^2 for the on-site quartic") {
    PhaseSpacePolynomial quartic(1);
    quartic.add_term(ExactComplex(rational_from_double(U / 2)), MultiIndex({2}), MultiIndex({2}));
    PhaseSpacePolynomial block = complex_diffusion_block(quartic, 0, 0);
    PhaseSpacePolynomial expect(1);
    expect.add_term(ExactComplex(rational_from_double(U)), MultiIndex({2}), MultiIndex({0}));
    CHECK(block == expect);
  }

  SECTION("amplifier block is i g C") {
    double g = 0.6;
    PhaseSpacePolynomial amp(1);
    Rational gr = rational_from_double(g);
    amp.add_term(ExactComplex(Rational(0), gr / 2), MultiIndex({0}), MultiIndex({2}));
    amp.add_term(ExactComplex(Rational(0), -gr / 2), MultiIndex({2}), MultiIndex({0}));
    PhaseSpacePolynomial block = complex_diffusion_block(amp, 0, 0, ExactComplex(3));
    PhaseSpacePolynomial expect(1);
    expect.add_term(ExactComplex(Rational(0), 3 * gr), MultiIndex::zeros(1), MultiIndex::zeros(1));
    CHECK(block == expect);
  }

  SECTION("assembled D matches a finite-difference Hessian at random points") {
    ModeScales scales = ModeScales::natural(1);
    RealPolynomial hr = to_real_polynomial(h, scales.kappa);
    DiffusionField field(hr, scales);
    Eigen::MatrixXd J = symplectic_matrix(1);
    std::mt19937_64 rng(41);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    for (int t = 0; t < 10; ++t) {
      std::vector<double> z{coord(rng), coord(rng)};
      // second differences of h as an independent Hessian route
      double e = 1e-4;
      Eigen::MatrixXd Hfd(2, 2);
      for (int a = 0; a < 2; ++a)
        for (int b = 0; b < 2; ++b) {
          auto at = [&](double da, double db) {
            std::vector<double> p = z;
            p[static_cast<std::size_t>(a)] += da;
            p[static_cast<std::size_t>(b)] += db;
            return hr.evaluate(p);
          };
          Hfd(a, b) = (at(e, e) - at(e, -e) - at(-e, e) + at(-e, -e)) / (4 * e * e);
        }
      Eigen::MatrixXd Dfd = 0.5 * (Hfd * J - J * Hfd);
      CHECK((field.evaluate(z) - Dfd).cwiseAbs().maxCoeff() <= 1e-7);
    }
  }
}

TEST_CASE("spectrum_report examples") {
  SECTION("zero matrix") {
    SpectrumReport rep = spectrum_report(Eigen::MatrixXd::Zero(2, 2));
    CHECK(rep.eigenvalues.cwiseAbs().maxCoeff() == 0.0);
    CHECK(rep.pairing_residual == 0.0);
    CHECK(rep.trace == 0.0);
  }
  SECTION("off-diagonal pair") {
    Eigen::MatrixXd d(2, 2);
    d << 0, 1, 1, 0;
    SpectrumReport rep = spectrum_report(d);
    CHECK(rep.eigenvalues[0] == Catch::Approx(-1.0));
    CHECK(rep.eigenvalues[1] == Catch::Approx(1.0));
    CHECK(rep.pairing_residual < 1e-12);
  }
  SECTION("Kerr diffusion at a random point pairs to 1e-9") {
    RealPolynomial hr = to_real_polynomial(kerr_like_symbol(1.0, 0.5), 1.0);
    Eigen::MatrixXd D = diffusion_matrix(hr, ModeScales::natural(1), {1.3, -0.4});
    CHECK(spectrum_report(D).pairing_residual <= 1e-9);
  }
  SECTION("non-symmetric input rejected") {
    Eigen::MatrixXd d(2, 2);
    d << 0, 1, 0, 0;
    CHECK_THROWS(spectrum_report(d));
  }
}

TEST_CASE("dual-route assembly agrees") {
  ModeScales s1 = ModeScales::natural(1);
  SECTION("quadratic Hamiltonian: both routes exact") {
    PhaseSpacePolynomial h(1);
    h.add_term(ExactComplex(Rational(3, 2)), MultiIndex({1}), MultiIndex({1}));
    h.add_term(ExactComplex(Rational(1, 4)), MultiIndex({2}), MultiIndex({0}));
    h.add_term(ExactComplex(Rational(1, 4)), MultiIndex({0}), MultiIndex({2}));
    CHECK(consistency_check_appendix_routes(h, s1, {0.7, -1.1}) <= 1e-12);
  }
  SECTION("two-site Bose-Hubbard at random points") {
    PhaseSpacePolynomial h(2);
    // hopping + on-site quartics
    h.add_term(ExactComplex(-1), MultiIndex({0, 1}), MultiIndex({1, 0}));
    h.add_term(ExactComplex(-1), MultiIndex({1, 0}), MultiIndex({0, 1}));
    for (int i = 0; i < 2; ++i) {
      std::vector<int> m(2, 0), n(2, 0);
      m[i] = n[i] = 2;
      h.add_term(ExactComplex(Rational(1, 4)), MultiIndex(m), MultiIndex(n));
      m[i] = n[i] = 1;
      h.add_term(ExactComplex(-1), MultiIndex(m), MultiIndex(n));
    }
    std::mt19937_64 rng(17);
    std::uniform_real_distribution<double> coord(-2.0, 2.0);
    ModeScales s2 = ModeScales::natural(2);
    for (int t = 0; t < 5; ++t) {
      std::vector<double> z{coord(rng), coord(rng), coord(rng), coord(rng)};
      CHECK(consistency_check_appendix_routes(h, s2, z) <= 1e-10);
    }
  }
  SECTION("amplifier Hamiltonian") {
    PhaseSpacePolynomial amp(1);
    amp.add_term(ExactComplex(Rational(0), Rational(1, 4)), MultiIndex({0}), MultiIndex({2}));
    amp.add_term(ExactComplex(Rational(0), Rational(-1, 4)), MultiIndex({2}), MultiIndex({0}));
    CHECK(consistency_check_appendix_routes(amp, s1, {1.0, 2.0}) <= 1e-12);
  }
}

TEST_CASE("structural identity battery over random Hamiltonians") {
  AuditResult res = run_constraint_audit(20260809, 100, 10);
  INFO(res.table());
  CHECK(res.max_trace <= 1e-12);
  CHECK(res.max_anticommutation <= 1e-12);
  CHECK(res.max_pairing_residual <= 1e-9);
  CHECK(res.max_dual_route <= 1e-10);
  CHECK(res.mixed_block_structurally_absent);
}

TEST_CASE("free-theory nullity at sampled points") {
  // kappa != 1 exercises the prefactors
  PhaseSpacePolynomial h(2);
  h.add_term(ExactComplex(2), MultiIndex({1, 0}), MultiIndex({1, 0}));
  h.add_term(ExactComplex(Rational(1, 3)), MultiIndex({0, 1}), MultiIndex({0, 1}));
  ModeScales s = fix_free_lengths({2.0, 1.0 / 3.0}, 0.7);
  RealPolynomial hr = to_real_polynomial(h, s.kappa);
  DiffusionField field(hr, s);
  CHECK(field.is_identically_zero());
  std::mt19937_64 rng(4);
  std::uniform_real_distribution<double> coord(-3.0, 3.0);
  for (int t = 0; t < 10; ++t) {
    std::vector<double> z{coord(rng), coord(rng), coord(rng), coord(rng)};
    CHECK(field.evaluate(z).cwiseAbs().maxCoeff() <= 1e-12);
  }
}
