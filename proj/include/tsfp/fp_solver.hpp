#pragma once

#include <cmath>
#include <complex>
#include <functional>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsfp/density.hpp"
#include "tsfp/derivatives.hpp"
#include "tsfp/diffusion.hpp"
#include "tsfp/grid.hpp"
#include "tsfp/phase_space_poly.hpp"
#include "tsfp/scales.hpp"

namespace tsfp {

enum class RhsKind { LiouvilleOnly, FokkerPlanck, FullSeries };

struct StabilityBounds {
  double advection = 0.0;  // h / ||drift||_max
  double diffusion = 0.0;  // h^2 / ||D||_max-scale, infinite when D == 0
  double guard() const { return 0.5 * std::min(advection, diffusion); }
};

struct EvolveReport {
  long steps = 0;
  double max_mass_drift_per_step = 0.0;
  double min_density = 0.0;
  long negativity_count = 0;      // grid points below the reporting floor
  double boundary_max_ratio = 0.0;
  bool support_overflow = false;  // boundary density exceeded 1e-10 of max
  bool aborted_unstable = false;
};

// Evolves a density under the Liouville drift plus the traceless diffusion
// built from the Hamiltonian Hessian. Spatial derivatives are spectral or
// 8th-order central on the periodic extension; time stepping is classical
// explicit RK4 with the stability guard computed per run.
class FokkerPlanckSolver {
 public:
  FokkerPlanckSolver(const PhaseGrid& grid, const ModeScales& scales,
                     const PhaseSpacePolynomial& symbol, Scheme scheme)
      : grid_(grid),
        scales_(scales),
        symbol_(symbol),
        h_real_(to_real_polynomial(symbol, scales.kappa)),
        field_(h_real_, scales),
        engine_(grid, scheme) {
    scales_.validate();
    if (grid_.modes() != scales_.modes || symbol.modes() != scales_.modes)
      throw std::invalid_argument("FokkerPlanckSolver: mode count mismatch");
    if (grid_.kappa() != scales_.kappa)
      throw std::invalid_argument("FokkerPlanckSolver: grid and scales disagree on kappa");

    const int n = grid_.modes();
    h_grid_ = evaluate_on_grid(h_real_, grid_);
    for (int j = 0; j < n; ++j) {
      drift_q_.push_back(evaluate_on_grid(h_real_.derivative(static_cast<std::size_t>(j)), grid_));
      drift_p_.push_back(evaluate_on_grid(h_real_.derivative(static_cast<std::size_t>(n + j)), grid_));
    }
    for (int a = 0; a < 2 * n; ++a)
      for (int b = a; b < 2 * n; ++b) {
        const RealPolynomial& dab = field_.entry(static_cast<std::size_t>(a), static_cast<std::size_t>(b));
        if (dab.is_zero()) continue;
        diff_terms_.push_back({a, b, (a == b) ? 1.0 : 2.0, evaluate_on_grid(dab, grid_)});
      }
    const std::size_t total = static_cast<std::size_t>(grid_.total());
    scratch_a_.resize(total);
    scratch_b_.resize(total);
    scratch_c_.resize(total);
  }

  const PhaseGrid& grid() const { return grid_; }
  const ModeScales& scales() const { return scales_; }
  const RealPolynomial& hamiltonian() const { return h_real_; }
  const PhaseSpacePolynomial& symbol() const { return symbol_; }
  const DiffusionField& diffusion_field() const { return field_; }
  const std::vector<double>& hamiltonian_grid() const { return h_grid_; }
  Scheme scheme() const { return engine_.scheme(); }

  // {H, rho}_PB in divergence form: (1/kappa) sum_j [dP_j(HQ_j rho) - dQ_j(HP_j rho)]
  void liouville_rhs(const double* rho, double* out) {
    const long total = grid_.total();
    zero(out);
    if (engine_.scheme() == Scheme::Spectral) {
      spectrum_.assign(static_cast<std::size_t>(total), {0.0, 0.0});
      accumulate_liouville_spectrum(rho);
      engine_.inverse_to_real(spectrum_, out);
      return;
    }
    const double invk = 1.0 / scales_.kappa;
    for (int j = 0; j < grid_.modes(); ++j) {
      multiply(drift_q_[static_cast<std::size_t>(j)].data(), rho, scratch_a_.data());
      engine_.first(scratch_a_.data(), grid_.modes() + j, scratch_b_.data());
      axpy(invk, scratch_b_.data(), out);
      multiply(drift_p_[static_cast<std::size_t>(j)].data(), rho, scratch_a_.data());
      engine_.first(scratch_a_.data(), j, scratch_b_.data());
      axpy(-invk, scratch_b_.data(), out);
    }
  }

  // (hbar/2) sum_ab d_a d_b (D_ab rho) with D = (C/2kappa^2)[H'', J]
  void diffusion_rhs(const double* rho, double* out) {
    const long total = grid_.total();
    zero(out);
    if (diff_terms_.empty()) return;
    if (engine_.scheme() == Scheme::Spectral) {
      spectrum_.assign(static_cast<std::size_t>(total), {0.0, 0.0});
      accumulate_diffusion_spectrum(rho);
      engine_.inverse_to_real(spectrum_, out);
      return;
    }
    const double pref = scales_.hbar / 2.0;
    for (const DiffTerm& t : diff_terms_) {
      multiply(t.values.data(), rho, scratch_a_.data());
      if (t.a == t.b)
        engine_.second(scratch_a_.data(), t.a, scratch_b_.data());
      else
        engine_.mixed(scratch_a_.data(), t.a, t.b, scratch_b_.data(), scratch_c_.data());
      axpy(pref * t.multiplicity, scratch_b_.data(), out);
    }
  }

  void rhs(const double* rho, double* out, RhsKind kind) {
    if (kind == RhsKind::FullSeries)
      throw std::logic_error("FokkerPlanckSolver: use SeriesRhs for the full derivative series");
    if (engine_.scheme() == Scheme::Spectral) {
      // one inverse transform for the combined rate
      spectrum_.assign(static_cast<std::size_t>(grid_.total()), {0.0, 0.0});
      accumulate_liouville_spectrum(rho);
      if (kind == RhsKind::FokkerPlanck) accumulate_diffusion_spectrum(rho);
      engine_.inverse_to_real(spectrum_, out);
      return;
    }
    liouville_rhs(rho, out);
    if (kind == RhsKind::FokkerPlanck && !diff_terms_.empty()) {
      const double pref = scales_.hbar / 2.0;
      for (const DiffTerm& t : diff_terms_) {
        multiply(t.values.data(), rho, scratch_a_.data());
        if (t.a == t.b)
          engine_.second(scratch_a_.data(), t.a, scratch_b_.data());
        else
          engine_.mixed(scratch_a_.data(), t.a, t.b, scratch_b_.data(), scratch_c_.data());
        axpy(pref * t.multiplicity, scratch_b_.data(), out);
      }
    }
  }

  // classical RK4
  void step(DensityGrid& rho, double dt, RhsKind kind) {
    const long total = grid_.total();
    ensure_rk_buffers();
    double* k1 = rk_[0].data();
    double* k2 = rk_[1].data();
    double* k3 = rk_[2].data();
    double* k4 = rk_[3].data();
    double* u = rk_[4].data();
    double* r = rho.values.data();

    rhs(r, k1, kind);
    combine(r, k1, dt / 2, u, total);
    rhs(u, k2, kind);
    combine(r, k2, dt / 2, u, total);
    rhs(u, k3, kind);
    combine(r, k3, dt, u, total);
    rhs(u, k4, kind);
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i)
      r[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    rho.time += dt;
  }

  // dt <= 0.5 min(h^2/||D||_max-scale, h/||drift||_max), computed per run
  StabilityBounds stability_bounds() const {
    const double h = grid_.spacing();
    double vmax = 0.0;
    const double invk = 1.0 / scales_.kappa;
    for (const auto& g : drift_q_)
      for (double v : g) vmax = std::max(vmax, std::abs(v) * invk);
    for (const auto& g : drift_p_)
      for (double v : g) vmax = std::max(vmax, std::abs(v) * invk);
    double dmax = 0.0;
    for (const DiffTerm& t : diff_terms_)
      for (double v : t.values) dmax = std::max(dmax, std::abs(v) * scales_.hbar / 2.0);
    StabilityBounds b;
    b.advection = (vmax > 0) ? h / vmax : std::numeric_limits<double>::infinity();
    b.diffusion = (dmax > 0) ? h * h / dmax : std::numeric_limits<double>::infinity();
    return b;
  }

  // integral of H against the diffusion rate; vanishes identically for the
  // commutator-built D up to quadrature and window truncation
  double energy_flux_diagnostic(const DensityGrid& rho) {
    diffusion_rhs(rho.values.data(), scratch_b_.data());
    const long total = grid_.total();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) scratch_b_[static_cast<std::size_t>(i)] *= h_grid_[static_cast<std::size_t>(i)];
    return deterministic_sum(scratch_b_.data(), total) * grid_.cell_weight();
  }

  // steps the density n times with per-step invariant tracking; aborts when
  // sup|rho| grows beyond 10x its initial value
  EvolveReport evolve(DensityGrid& rho, double dt, long nsteps, RhsKind kind,
                      const std::function<void(long, const DensityGrid&)>& on_log = {},
                      long log_interval = 0) {
    StabilityBounds bounds = stability_bounds();
    if (kind != RhsKind::LiouvilleOnly && !(dt <= bounds.guard()))
      throw std::runtime_error("evolve: dt " + std::to_string(dt) +
                               " violates the stability guard " + std::to_string(bounds.guard()));
    if (kind == RhsKind::LiouvilleOnly && !(dt <= 0.5 * bounds.advection))
      throw std::runtime_error("evolve: dt violates the advection bound");
    EvolveReport rep;
    const double sup0 = std::max(std::abs(rho.max_value()), std::abs(rho.min_value()));
    double mass_prev = rho.mass();
    rep.boundary_max_ratio = rho.boundary_max_ratio();
    rep.support_overflow = rep.boundary_max_ratio > 1e-10;
    for (long s = 0; s < nsteps; ++s) {
      step(rho, dt, kind);
      double mass = rho.mass();
      rep.max_mass_drift_per_step = std::max(rep.max_mass_drift_per_step, std::abs(mass - mass_prev));
      mass_prev = mass;
      double sup = std::max(std::abs(rho.max_value()), std::abs(rho.min_value()));
      if (sup > 10.0 * sup0) {
        rep.aborted_unstable = true;
        rep.steps = s + 1;
        return rep;
      }
      if (on_log && log_interval > 0 && ((s + 1) % log_interval == 0 || s + 1 == nsteps)) {
        double br = rho.boundary_max_ratio();
        rep.boundary_max_ratio = std::max(rep.boundary_max_ratio, br);
        rep.support_overflow = rep.support_overflow || br > 1e-10;
        on_log(s + 1, rho);
      }
    }
    rep.steps = nsteps;
    rep.min_density = rho.min_value();
    rep.negativity_count = rho.count_below_floor();
    return rep;
  }

 private:
  struct DiffTerm {
    int a, b;
    double multiplicity;
    std::vector<double> values;
  };

  void zero(double* out) {
    const long total = grid_.total();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) out[i] = 0.0;
  }
  void multiply(const double* a, const double* b, double* out) {
    const long total = grid_.total();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) out[i] = a[i] * b[i];
  }
  void axpy(double alpha, const double* x, double* y) {
    const long total = grid_.total();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) y[i] += alpha * x[i];
  }
  static void combine(const double* base, const double* k, double c, double* out, long total) {
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) out[i] = base[i] + c * k[i];
  }

  void accumulate_liouville_spectrum(const double* rho) {
    const double invk = 1.0 / scales_.kappa;
    for (int j = 0; j < grid_.modes(); ++j) {
      const int qa = j, pa = grid_.modes() + j;
      multiply(drift_q_[static_cast<std::size_t>(j)].data(), rho, scratch_a_.data());
      engine_.accumulate_spectrum(scratch_a_.data(), spectrum_, [&](long i) {
        return std::complex<double>(0.0, invk * engine_.wavenumber_odd(i, pa));
      });
      multiply(drift_p_[static_cast<std::size_t>(j)].data(), rho, scratch_a_.data());
      engine_.accumulate_spectrum(scratch_a_.data(), spectrum_, [&](long i) {
        return std::complex<double>(0.0, -invk * engine_.wavenumber_odd(i, qa));
      });
    }
  }

  void accumulate_diffusion_spectrum(const double* rho) {
    const double pref = scales_.hbar / 2.0;
    for (const DiffTerm& t : diff_terms_) {
      multiply(t.values.data(), rho, scratch_a_.data());
      const double c = pref * t.multiplicity;
      if (t.a == t.b) {
        engine_.accumulate_spectrum(scratch_a_.data(), spectrum_, [&](long i) {
          double k = engine_.wavenumber(i, t.a);
          return std::complex<double>(-c * k * k, 0.0);
        });
      } else {
        engine_.accumulate_spectrum(scratch_a_.data(), spectrum_, [&](long i) {
          return std::complex<double>(
              -c * engine_.wavenumber_odd(i, t.a) * engine_.wavenumber_odd(i, t.b), 0.0);
        });
      }
    }
  }

  void ensure_rk_buffers() {
    if (rk_.empty()) rk_.assign(5, std::vector<double>(static_cast<std::size_t>(grid_.total())));
  }

  PhaseGrid grid_;
  ModeScales scales_;
  PhaseSpacePolynomial symbol_;
  RealPolynomial h_real_;
  DiffusionField field_;
  DerivativeEngine engine_;
  std::vector<double> h_grid_;
  std::vector<std::vector<double>> drift_q_, drift_p_;
  std::vector<DiffTerm> diff_terms_;
  std::vector<double> scratch_a_, scratch_b_, scratch_c_;
  std::vector<std::complex<double>> spectrum_;
  std::vector<std::vector<double>> rk_;
};

// Evaluates the full derivative-series rate
//   (i/hbar) sum_{1<=|m|<=cap} (hbar^{|m|}/m!) [d^m(dbar^m h rho) - dbar^m(d^m h rho)]
// with complex derivatives realized through the real chain rule. The result
// must be real; the imaginary residue is asserted, not discarded silently.
class SeriesRhs {
 public:
  using cd = std::complex<double>;

  SeriesRhs(const PhaseGrid& grid, const ModeScales& scales, const PhaseSpacePolynomial& symbol,
            int cap, Scheme scheme)
      : grid_(grid), scales_(scales), cap_(cap), engine_(grid, scheme) {
    if (cap < 1) throw std::invalid_argument("SeriesRhs: order cap must be at least 1");
    if (!symbol.is_real_valued()) throw std::invalid_argument("SeriesRhs: symbol must be real-valued");
    // derivative stacks d^m h for every multi-index up to the cap; dbar^m h is
    // the complex conjugate since h is real-valued
    for (const MultiIndex& m : multi_indices_up_to(static_cast<std::size_t>(grid.modes()), cap)) {
      PhaseSpacePolynomial d = differentiate(symbol, m, Slot::Holomorphic);
      if (d.is_zero()) continue;
      terms_.push_back({m, std::move(d)});
    }
    build_alpha_tables(symbol.max_mode_degree());
    const std::size_t total = static_cast<std::size_t>(grid_.total());
    u_.resize(total);
    t1_.resize(total);
    t2_.resize(total);
    acc_.resize(total);
  }

  int cap() const { return cap_; }

  // rate array; throws if the imaginary residue exceeds 1e-10 of the real part
  void rhs(const double* rho, double* out) {
    const long total = grid_.total();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) acc_[static_cast<std::size_t>(i)] = 0.0;

    for (const Term& term : terms_) {
      const double weight = std::pow(scales_.hbar, term.m.order()) / term.m.factorial() / scales_.hbar;
      // first bracket: d^m ( conj(d^m h) rho )
      evaluate_times_rho(term.poly, rho, /*conjugate=*/true, u_.data());
      apply_derivative_stack(term.m, Slot::Holomorphic, u_.data());
      accumulate(u_.data(), cd(0.0, weight));
      // second bracket: dbar^m ( d^m h rho )
      evaluate_times_rho(term.poly, rho, /*conjugate=*/false, u_.data());
      apply_derivative_stack(term.m, Slot::Antiholomorphic, u_.data());
      accumulate(u_.data(), cd(0.0, -weight));
    }

    double max_re = 0.0, max_im = 0.0;
#pragma omp parallel for schedule(static) reduction(max : max_re, max_im)
    for (long i = 0; i < total; ++i) {
      max_re = std::max(max_re, std::abs(acc_[static_cast<std::size_t>(i)].real()));
      max_im = std::max(max_im, std::abs(acc_[static_cast<std::size_t>(i)].imag()));
    }
    if (max_im > 1e-10 * std::max(1e-300, max_re))
      throw std::runtime_error("SeriesRhs: rate has imaginary residue " + std::to_string(max_im) +
                               " against real scale " + std::to_string(max_re));
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) out[i] = acc_[static_cast<std::size_t>(i)].real();
  }

 private:
  struct Term {
    MultiIndex m;
    PhaseSpacePolynomial poly;  // d^m h
  };

  void build_alpha_tables(int max_power) {
    const int n = grid_.npts();
    const int modes = grid_.modes();
    max_power_ = std::max(1, max_power);
    alpha_pow_.assign(static_cast<std::size_t>(modes), {});
    const double s = std::sqrt(grid_.kappa() / 2.0);
    for (int j = 0; j < modes; ++j) {
      auto& t = alpha_pow_[static_cast<std::size_t>(j)];
      t.assign(static_cast<std::size_t>(n) * n * (max_power_ + 1), cd(1.0, 0.0));
      for (int q = 0; q < n; ++q)
        for (int p = 0; p < n; ++p) {
          cd a(s * grid_.coordinate(q), s * grid_.coordinate(p));
          for (int e = 1; e <= max_power_; ++e)
            t[static_cast<std::size_t>((e * n + q) * n + p)] =
                t[static_cast<std::size_t>(((e - 1) * n + q) * n + p)] * a;
        }
    }
  }

  // u = poly(alpha, alpha*) * rho, with optional conjugation of the polynomial value
  void evaluate_times_rho(const PhaseSpacePolynomial& poly, const double* rho, bool conjugate, cd* u) {
    const long total = grid_.total();
    const int n = grid_.npts();
    const int modes = grid_.modes();
    struct FlatTerm {
      cd c;
      std::vector<std::pair<int, std::pair<int, int>>> factors;  // mode -> (hol_pow, antihol_pow)
    };
    std::vector<FlatTerm> fts;
    for (const auto& [k, c] : poly.terms()) {
      FlatTerm ft{c.to_std(), {}};
      for (int j = 0; j < modes; ++j) {
        int hp = k.hol[static_cast<std::size_t>(j)], ap = k.antihol[static_cast<std::size_t>(j)];
        if (hp || ap) ft.factors.push_back({j, {hp, ap}});
      }
      fts.push_back(std::move(ft));
    }
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) {
      cd acc = 0.0;
      for (const FlatTerm& ft : fts) {
        cd v = ft.c;
        for (const auto& [j, pows] : ft.factors) {
          int q = grid_.digit(i, j), p = grid_.digit(i, modes + j);
          const auto& t = alpha_pow_[static_cast<std::size_t>(j)];
          if (pows.first) v *= t[static_cast<std::size_t>((pows.first * n + q) * n + p)];
          if (pows.second) v *= std::conj(t[static_cast<std::size_t>((pows.second * n + q) * n + p)]);
        }
        acc += v;
      }
      u[i] = (conjugate ? std::conj(acc) : acc) * rho[i];
    }
  }

  // in-place application of d^m or dbar^m through the real chain rule
  void apply_derivative_stack(const MultiIndex& m, Slot slot, cd* u) {
    const long total = grid_.total();
    const double s = 1.0 / std::sqrt(2.0 * grid_.kappa());
    const double sign = (slot == Slot::Holomorphic) ? -1.0 : 1.0;  // d/dalpha ~ (dQ - i dP)
    for (int j = 0; j < grid_.modes(); ++j) {
      for (int rep = 0; rep < m[static_cast<std::size_t>(j)]; ++rep) {
        engine_.first_complex(u, j, t1_.data());
        engine_.first_complex(u, grid_.modes() + j, t2_.data());
#pragma omp parallel for schedule(static)
        for (long i = 0; i < total; ++i)
          u[i] = s * (t1_[static_cast<std::size_t>(i)] +
                      cd(0.0, sign) * t2_[static_cast<std::size_t>(i)]);
      }
    }
  }

  void accumulate(const cd* u, cd factor) {
    const long total = grid_.total();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) acc_[static_cast<std::size_t>(i)] += factor * u[i];
  }

  PhaseGrid grid_;
  ModeScales scales_;
  int cap_;
  DerivativeEngine engine_;
  std::vector<Term> terms_;
  std::vector<std::vector<cd>> alpha_pow_;
  int max_power_ = 1;
  std::vector<cd> u_, t1_, t2_, acc_;
};

}  // namespace tsfp
