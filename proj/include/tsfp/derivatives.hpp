#pragma once

#include <fftw3.h>

#include <complex>
#include <mutex>
#include <stdexcept>
#include <vector>

#include "tsfp/grid.hpp"

namespace tsfp {

enum class Scheme { Spectral, Central8 };

inline Scheme scheme_from_string(const std::string& s) {
  if (s == "spectral") return Scheme::Spectral;
  if (s == "central-8th" || s == "central8") return Scheme::Central8;
  throw std::invalid_argument("unknown derivative scheme '" + s + "'");
}

namespace detail {

inline std::mutex& fftw_planner_mutex() {
  static std::mutex m;
  return m;
}

// 8th-order central coefficients
constexpr double kC1[4] = {4.0 / 5.0, -1.0 / 5.0, 4.0 / 105.0, -1.0 / 280.0};
constexpr double kC2[5] = {-205.0 / 72.0, 8.0 / 5.0, -1.0 / 5.0, 8.0 / 315.0, -1.0 / 560.0};

// Applies a periodic central stencil along one axis. Lines along the axis are
// addressed as base + j*inner; for inner > 1 the r-loop runs over contiguous
// memory.
template <typename T, bool Antisymmetric>
void stencil_axis(const T* f, T* out, long n, long inner, long outer, double scale,
                  const double* coef) {
#pragma omp parallel for schedule(static) collapse(1)
  for (long o = 0; o < outer; ++o) {
    const T* fo = f + o * n * inner;
    T* oo = out + o * n * inner;
    for (long j = 0; j < n; ++j) {
      long jp[4], jm[4];
      for (int t = 0; t < 4; ++t) {
        jp[t] = (j + t + 1) % n;
        jm[t] = (j - t - 1 + n) % n;
      }
      T* dst = oo + j * inner;
      const T* src = fo;
      if constexpr (Antisymmetric) {
        for (long r = 0; r < inner; ++r) {
          T acc = coef[0] * (src[jp[0] * inner + r] - src[jm[0] * inner + r]);
          acc += coef[1] * (src[jp[1] * inner + r] - src[jm[1] * inner + r]);
          acc += coef[2] * (src[jp[2] * inner + r] - src[jm[2] * inner + r]);
          acc += coef[3] * (src[jp[3] * inner + r] - src[jm[3] * inner + r]);
          dst[r] = scale * acc;
        }
      } else {
        for (long r = 0; r < inner; ++r) {
          T acc = coef[0] * src[j * inner + r];
          acc += coef[1] * (src[jp[0] * inner + r] + src[jm[0] * inner + r]);
          acc += coef[2] * (src[jp[1] * inner + r] + src[jm[1] * inner + r]);
          acc += coef[3] * (src[jp[2] * inner + r] + src[jm[2] * inner + r]);
          acc += coef[4] * (src[jp[3] * inner + r] + src[jm[3] * inner + r]);
          dst[r] = scale * acc;
        }
      }
    }
  }
}

}  // namespace detail

// Periodic derivatives on a PhaseGrid, either Fourier-spectral (FFTW, plans
// built with FFTW_ESTIMATE so repeated runs are bit-identical) or 8th-order
// central differences.
class DerivativeEngine {
 public:
  using cd = std::complex<double>;

  DerivativeEngine(const PhaseGrid& grid, Scheme scheme) : grid_(grid), scheme_(scheme) {
    if (scheme_ == Scheme::Spectral) {
      const long total = grid_.total();
      buf_.resize(static_cast<std::size_t>(total));
      std::vector<int> dims(static_cast<std::size_t>(grid_.axes()), grid_.npts());
      std::lock_guard<std::mutex> lock(detail::fftw_planner_mutex());
      fwd_ = fftw_plan_dft(grid_.axes(), dims.data(), reinterpret_cast<fftw_complex*>(buf_.data()),
                           reinterpret_cast<fftw_complex*>(buf_.data()), FFTW_FORWARD, FFTW_ESTIMATE);
      inv_ = fftw_plan_dft(grid_.axes(), dims.data(), reinterpret_cast<fftw_complex*>(buf_.data()),
                           reinterpret_cast<fftw_complex*>(buf_.data()), FFTW_BACKWARD, FFTW_ESTIMATE);
      if (!fwd_ || !inv_) throw std::runtime_error("DerivativeEngine: FFTW plan creation failed");
      // wavenumbers per axis position; Nyquist zeroed for odd derivatives
      const int n = grid_.npts();
      k_.resize(static_cast<std::size_t>(n));
      k_odd_.resize(static_cast<std::size_t>(n));
      const double dk = M_PI / grid_.extent();
      for (int i = 0; i < n; ++i) {
        int idx = (i <= n / 2) ? i : i - n;
        k_[static_cast<std::size_t>(i)] = dk * idx;
        k_odd_[static_cast<std::size_t>(i)] = (i == n / 2) ? 0.0 : dk * idx;
      }
    }
  }

  ~DerivativeEngine() {
    if (fwd_) fftw_destroy_plan(fwd_);
    if (inv_) fftw_destroy_plan(inv_);
  }
  DerivativeEngine(const DerivativeEngine&) = delete;
  DerivativeEngine& operator=(const DerivativeEngine&) = delete;

  const PhaseGrid& grid() const { return grid_; }
  Scheme scheme() const { return scheme_; }

  // largest wavenumber magnitude the scheme effectively propagates
  double max_effective_wavenumber() const {
    const double h = grid_.spacing();
    return (scheme_ == Scheme::Spectral) ? M_PI / h : 1.7306 / h;
  }

  void first(const double* f, int axis, double* out) {
    if (scheme_ == Scheme::Central8) {
      fd_pass<double, true>(f, axis, out, 1.0 / grid_.spacing(), detail::kC1);
    } else {
      load(f);
      fftw_execute(fwd_);
      apply_multiplier([&](long i) { return cd(0.0, k_odd_at(i, axis)); });
      fftw_execute(inv_);
      store_real(out);
    }
  }

  void second(const double* f, int axis, double* out) {
    if (scheme_ == Scheme::Central8) {
      const double h = grid_.spacing();
      fd_pass<double, false>(f, axis, out, 1.0 / (h * h), detail::kC2);
    } else {
      load(f);
      fftw_execute(fwd_);
      apply_multiplier([&](long i) {
        double k = k_at(i, axis);
        return cd(-k * k, 0.0);
      });
      fftw_execute(inv_);
      store_real(out);
    }
  }

  // mixed d^2/(d axis_a d axis_b), a != b
  void mixed(const double* f, int axis_a, int axis_b, double* out, double* scratch) {
    if (scheme_ == Scheme::Central8) {
      first(f, axis_a, scratch);
      first(scratch, axis_b, out);
    } else {
      load(f);
      fftw_execute(fwd_);
      apply_multiplier([&](long i) { return cd(-k_odd_at(i, axis_a) * k_odd_at(i, axis_b), 0.0); });
      fftw_execute(inv_);
      store_real(out);
    }
  }

  // complex-field first derivative (series evaluation path)
  void first_complex(const cd* f, int axis, cd* out) {
    if (scheme_ == Scheme::Central8) {
      fd_pass<cd, true>(f, axis, out, 1.0 / grid_.spacing(), detail::kC1);
    } else {
      std::copy(f, f + grid_.total(), buf_.begin());
      fftw_execute(fwd_);
      apply_multiplier([&](long i) { return cd(0.0, k_odd_at(i, axis)); });
      fftw_execute(inv_);
      const double norm = 1.0 / static_cast<double>(grid_.total());
      const long total = grid_.total();
#pragma omp parallel for schedule(static)
      for (long i = 0; i < total; ++i) out[i] = buf_[static_cast<std::size_t>(i)] * norm;
    }
  }

  // --- spectral accumulation interface for fused right-hand sides ----------
  // forward-transform f, multiply by mult(i), add into acc (k-space)
  template <typename Mult>
  void accumulate_spectrum(const double* f, std::vector<cd>& acc, Mult mult) {
    require_spectral();
    load(f);
    fftw_execute(fwd_);
    const long total = grid_.total();
    if (acc.size() != static_cast<std::size_t>(total)) acc.assign(static_cast<std::size_t>(total), cd(0.0));
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) acc[static_cast<std::size_t>(i)] += mult(i) * buf_[static_cast<std::size_t>(i)];
  }

  void inverse_to_real(std::vector<cd>& acc, double* out) {
    require_spectral();
    std::copy(acc.begin(), acc.end(), buf_.begin());
    fftw_execute(inv_);
    store_real(out);
  }

  double wavenumber(long flat, int axis) const { return k_at(flat, axis); }
  double wavenumber_odd(long flat, int axis) const { return k_odd_at(flat, axis); }

 private:
  void require_spectral() const {
    if (scheme_ != Scheme::Spectral)
      throw std::logic_error("DerivativeEngine: spectral accumulation requested on a stencil engine");
  }

  template <typename T, bool Anti>
  void fd_pass(const T* f, int axis, T* out, double scale, const double* coef) {
    const long n = grid_.npts();
    const long inner = grid_.stride(axis);
    const long outer = grid_.total() / (n * inner);
    detail::stencil_axis<T, Anti>(f, out, n, inner, outer, scale, coef);
  }

  void load(const double* f) {
    const long total = grid_.total();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) buf_[static_cast<std::size_t>(i)] = cd(f[i], 0.0);
  }
  void store_real(double* out) {
    const double norm = 1.0 / static_cast<double>(grid_.total());
    const long total = grid_.total();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) out[i] = buf_[static_cast<std::size_t>(i)].real() * norm;
  }
  template <typename Mult>
  void apply_multiplier(Mult mult) {
    const long total = grid_.total();
#pragma omp parallel for schedule(static)
    for (long i = 0; i < total; ++i) buf_[static_cast<std::size_t>(i)] *= mult(i);
  }

  double k_at(long flat, int axis) const { return k_[static_cast<std::size_t>(grid_.digit(flat, axis))]; }
  double k_odd_at(long flat, int axis) const {
    return k_odd_[static_cast<std::size_t>(grid_.digit(flat, axis))];
  }

  PhaseGrid grid_;
  Scheme scheme_;
  std::vector<cd> buf_;
  std::vector<double> k_, k_odd_;
  fftw_plan fwd_ = nullptr, inv_ = nullptr;
};

}  // namespace tsfp
