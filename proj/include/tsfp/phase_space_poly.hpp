#pragma once

#include <cmath>
#include <complex>
#include <map>
#include <optional>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "tsfp/exact.hpp"
#include "tsfp/multi_index.hpp"
#include "tsfp/operator_algebra.hpp"
#include "tsfp/real_poly.hpp"

namespace tsfp {

enum class Slot { Holomorphic, Antiholomorphic };

// Exact polynomial in (alpha_1..alpha_N, alpha*_1..alpha*_N):
//   sum over (m, n) of c_{m,n} alpha^m (alpha*)^n.
// Values are immutable in spirit: all operations return new polynomials.
class PhaseSpacePolynomial {
 public:
  struct Key {
    MultiIndex hol, antihol;
    friend auto operator<=>(const Key&, const Key&) = default;
  };

  PhaseSpacePolynomial() = default;
  explicit PhaseSpacePolynomial(int modes) : modes_(modes) {
    if (modes <= 0) throw std::invalid_argument("PhaseSpacePolynomial: modes must be positive");
  }

  int modes() const { return modes_; }
  const std::map<Key, ExactComplex>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const ExactComplex& c, MultiIndex hol, MultiIndex antihol) {
    if (static_cast<int>(hol.size()) != modes_ || static_cast<int>(antihol.size()) != modes_)
      throw std::invalid_argument("PhaseSpacePolynomial: exponent arity mismatch");
    Key k{std::move(hol), std::move(antihol)};
    auto [it, inserted] = terms_.emplace(std::move(k), c);
    if (!inserted) it->second += c;
    if (it->second.is_zero()) terms_.erase(it);
  }

  PhaseSpacePolynomial& operator+=(const PhaseSpacePolynomial& o) {
    check_same_modes(o);
    for (const auto& [k, c] : o.terms_) add_term(c, k.hol, k.antihol);
    return *this;
  }
  PhaseSpacePolynomial& operator-=(const PhaseSpacePolynomial& o) {
    check_same_modes(o);
    for (const auto& [k, c] : o.terms_) add_term(-c, k.hol, k.antihol);
    return *this;
  }
  PhaseSpacePolynomial& operator*=(const ExactComplex& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [k, c] : terms_) c *= s;
    return *this;
  }
  friend PhaseSpacePolynomial operator+(PhaseSpacePolynomial a, const PhaseSpacePolynomial& b) { return a += b; }
  friend PhaseSpacePolynomial operator-(PhaseSpacePolynomial a, const PhaseSpacePolynomial& b) { return a -= b; }
  friend PhaseSpacePolynomial operator*(PhaseSpacePolynomial a, const ExactComplex& s) { return a *= s; }

  friend PhaseSpacePolynomial operator*(const PhaseSpacePolynomial& a, const PhaseSpacePolynomial& b) {
    a.check_same_modes(b);
    PhaseSpacePolynomial r(a.modes_);
    for (const auto& [ka, ca] : a.terms_)
      for (const auto& [kb, cb] : b.terms_) {
        MultiIndex h = ka.hol, ah = ka.antihol;
        for (int j = 0; j < a.modes_; ++j) {
          h[j] += kb.hol[j];
          ah[j] += kb.antihol[j];
        }
        r.add_term(ca * cb, std::move(h), std::move(ah));
      }
    return r;
  }

  friend bool operator==(const PhaseSpacePolynomial& a, const PhaseSpacePolynomial& b) {
    return a.modes_ == b.modes_ && a.terms_ == b.terms_;
  }

  // real-valued iff c_{m,n} = conj(c_{n,m}) for all terms
  bool is_real_valued() const {
    for (const auto& [k, c] : terms_) {
      auto it = terms_.find(Key{k.antihol, k.hol});
      if (it == terms_.end() || !(it->second == c.conj())) return false;
    }
    return true;
  }

  // invariant under alpha <-> alpha* iff c_{m,n} = c_{n,m}
  bool is_swap_invariant() const {
    for (const auto& [k, c] : terms_) {
      auto it = terms_.find(Key{k.antihol, k.hol});
      if (it == terms_.end() || !(it->second == c)) return false;
    }
    return true;
  }

  int holomorphic_degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.hol.order());
    return d;
  }
  int antiholomorphic_degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_) d = std::max(d, k.antihol.order());
    return d;
  }
  int max_mode_degree() const {
    int d = 0;
    for (const auto& [k, c] : terms_)
      for (int j = 0; j < modes_; ++j) d = std::max({d, k.hol[j], k.antihol[j]});
    return d;
  }

  std::complex<double> evaluate(const std::vector<std::complex<double>>& alpha) const {
    if (static_cast<int>(alpha.size()) != modes_)
      throw std::invalid_argument("PhaseSpacePolynomial::evaluate: arity mismatch");
    std::complex<double> acc = 0.0;
    for (const auto& [k, c] : terms_) {
      std::complex<double> t = c.to_std();
      for (int j = 0; j < modes_; ++j) {
        for (int e = 0; e < k.hol[j]; ++e) t *= alpha[j];
        for (int e = 0; e < k.antihol[j]; ++e) t *= std::conj(alpha[j]);
      }
      acc += t;
    }
    return acc;
  }

 private:
  void check_same_modes(const PhaseSpacePolynomial& o) const {
    if (modes_ != o.modes_) throw std::invalid_argument("PhaseSpacePolynomial: mode count mismatch");
  }

  int modes_ = 1;
  std::map<Key, ExactComplex> terms_;
};

inline PhaseSpacePolynomial phase_monomial(int modes, const ExactComplex& c, MultiIndex hol, MultiIndex antihol) {
  PhaseSpacePolynomial p(modes);
  p.add_term(c, std::move(hol), std::move(antihol));
  return p;
}

// Exact partial derivative in one mode and slot; degree drops by one.
inline PhaseSpacePolynomial differentiate(const PhaseSpacePolynomial& p, int mode, Slot slot) {
  if (mode < 0 || mode >= p.modes()) throw std::out_of_range("differentiate: mode out of range");
  PhaseSpacePolynomial r(p.modes());
  for (const auto& [k, c] : p.terms()) {
    const MultiIndex& e = (slot == Slot::Holomorphic) ? k.hol : k.antihol;
    if (e[mode] == 0) continue;
    ExactComplex nc = c * ExactComplex(e[mode]);
    if (slot == Slot::Holomorphic)
      r.add_term(nc, k.hol.raised(mode, -1), k.antihol);
    else
      r.add_term(nc, k.hol, k.antihol.raised(mode, -1));
  }
  return r;
}

inline PhaseSpacePolynomial differentiate(const PhaseSpacePolynomial& p, const MultiIndex& m, Slot slot) {
  PhaseSpacePolynomial r = p;
  for (std::size_t j = 0; j < m.size(); ++j)
    for (int k = 0; k < m[static_cast<std::size_t>(j)]; ++k) r = differentiate(r, static_cast<int>(j), slot);
  return r;
}

// Substitution a_i -> alpha_i, a_i^dag -> alpha_i* applied to the
// anti-normally ordered form of p.
inline PhaseSpacePolynomial anti_wick_symbol(const OperatorPolynomial& p) {
  OperatorPolynomial ordered = antinormal_order(p);
  PhaseSpacePolynomial s(p.modes());
  for (const auto& [w, c] : ordered.terms()) {
    MultiIndex hol = MultiIndex::zeros(static_cast<std::size_t>(p.modes()));
    MultiIndex antihol = MultiIndex::zeros(static_cast<std::size_t>(p.modes()));
    for (const LadderOp& f : w) {
      if (f.create)
        ++antihol[static_cast<std::size_t>(f.mode)];
      else
        ++hol[static_cast<std::size_t>(f.mode)];
    }
    s.add_term(c, std::move(hol), std::move(antihol));
  }
  return s;
}

// Coherent-state quantization of a polynomial symbol: the monomial
// alpha^m (alpha*)^n maps to the anti-normally ordered word a^m adag^n.
// Round trip: anti_wick_quantize(anti_wick_symbol(p)) == antinormal_order(p).
inline OperatorPolynomial anti_wick_quantize(const PhaseSpacePolynomial& s) {
  OperatorPolynomial p(s.modes());
  for (const auto& [k, c] : s.terms()) {
    LadderString w;
    for (int j = 0; j < s.modes(); ++j)
      for (int e = 0; e < k.hol[static_cast<std::size_t>(j)]; ++e) w.push_back(annihilate(j));
    for (int j = 0; j < s.modes(); ++j)
      for (int e = 0; e < k.antihol[static_cast<std::size_t>(j)]; ++e) w.push_back(create(j));
    p.add_term(c, std::move(w));
  }
  return p;
}

// Truncation classification: all pure third derivatives vanish identically
// iff holomorphic and antiholomorphic total degrees are both <= 2. On
// violation reports one nonzero witness derivative.
struct TruncationWitness {
  std::vector<int> mode_triple;  // (i, j, k) of the nonvanishing derivative
  Slot slot = Slot::Holomorphic;
  PhaseSpacePolynomial residual;
};

struct TruncationReport {
  bool satisfied = true;
  std::optional<TruncationWitness> witness;
};

inline TruncationReport check_truncation(const PhaseSpacePolynomial& h) {
  if (!h.is_real_valued())
    throw std::invalid_argument("check_truncation: Hamiltonian symbol must be real-valued");
  const int n = h.modes();
  for (Slot slot : {Slot::Holomorphic, Slot::Antiholomorphic}) {
    for (int i = 0; i < n; ++i)
      for (int j = i; j < n; ++j)
        for (int k = j; k < n; ++k) {
          PhaseSpacePolynomial d = differentiate(differentiate(differentiate(h, i, slot), j, slot), k, slot);
          if (!d.is_zero()) return {false, TruncationWitness{{i, j, k}, slot, std::move(d)}};
        }
  }
  return {true, std::nullopt};
}

// Exact substitution alpha_j = sqrt(kappa/2)(Q_j + i P_j). Every resulting
// coefficient must be real up to `imag_tol` relative to the largest one;
// a larger imaginary residue signals a non-real input and raises.
inline RealPolynomial to_real_polynomial(const PhaseSpacePolynomial& h, double kappa,
                                         double imag_tol = 1e-12) {
  if (kappa <= 0) throw std::invalid_argument("to_real_polynomial: kappa must be positive");
  const int n = h.modes();
  const std::size_t vars = 2 * static_cast<std::size_t>(n);
  const double s = std::sqrt(kappa / 2.0);

  // accumulate complex coefficients per (Q,P) exponent, then check residues
  std::map<MultiIndex, std::complex<double>> acc;
  std::vector<double> binom_row;  // scratch

  for (const auto& [key, coeff] : h.terms()) {
    // expand prod_j (Q_j + iP_j)^{m_j} (Q_j - iP_j)^{n_j} term by term
    std::map<MultiIndex, std::complex<double>> partial{{MultiIndex::zeros(vars), coeff.to_std()}};
    int total_power = 0;
    for (int j = 0; j < n; ++j) {
      for (int rep = 0; rep < 2; ++rep) {
        const bool conjugated = (rep == 1);
        const int e = conjugated ? key.antihol[static_cast<std::size_t>(j)] : key.hol[static_cast<std::size_t>(j)];
        if (e == 0) continue;
        total_power += e;
        // binomial expansion of (Q_j ± i P_j)^e
        std::map<MultiIndex, std::complex<double>> next;
        double bin = 1.0;
        for (int t = 0; t <= e; ++t) {
          // coefficient C(e,t) (i^t or (-i)^t) on Q^{e-t} P^t
          std::complex<double> it(1.0, 0.0);
          for (int u = 0; u < t; ++u) it *= std::complex<double>(0.0, conjugated ? -1.0 : 1.0);
          for (const auto& [m, c] : partial) {
            MultiIndex m2 = m.raised(static_cast<std::size_t>(j), e - t)
                              .raised(static_cast<std::size_t>(n + j), t);
            next[m2] += c * bin * it;
          }
          bin = bin * (e - t) / (t + 1);
        }
        partial = std::move(next);
      }
    }
    double scale = std::pow(s, total_power);
    for (const auto& [m, c] : partial) acc[m] += c * scale;
  }

  double max_mag = 0.0;
  for (const auto& [m, c] : acc) max_mag = std::max(max_mag, std::abs(c));
  RealPolynomial out(vars);
  for (const auto& [m, c] : acc) {
    if (max_mag > 0.0 && std::abs(c.imag()) > imag_tol * std::max(1.0, max_mag))
      throw std::runtime_error("to_real_polynomial: imaginary residue " + std::to_string(c.imag()) +
                               " exceeds tolerance; input symbol is not real-valued");
    if (c.real() != 0.0 && (max_mag == 0.0 || std::abs(c.real()) > 1e-15 * max_mag))
      out.add_term(c.real(), m);
  }
  return out;
}

// --- text form ---------------------------------------------------------------
//
// One term per line:  coeff_re coeff_im : m_1 ... m_N | n_1 ... n_N

inline std::string to_text(const PhaseSpacePolynomial& p) {
  std::ostringstream os;
  for (const auto& [k, c] : p.terms()) {
    os << c.str() << " :";
    for (int j = 0; j < p.modes(); ++j) os << " " << k.hol[static_cast<std::size_t>(j)];
    os << " |";
    for (int j = 0; j < p.modes(); ++j) os << " " << k.antihol[static_cast<std::size_t>(j)];
    os << "\n";
  }
  return os.str();
}

inline PhaseSpacePolynomial symbol_from_text(const std::string& text) {
  std::istringstream is(text);
  std::string line;
  int modes = -1;
  std::vector<std::tuple<ExactComplex, MultiIndex, MultiIndex>> parsed;
  while (std::getline(is, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    auto bar = line.find('|');
    if (colon == std::string::npos || bar == std::string::npos || bar < colon)
      throw std::invalid_argument("symbol_from_text: expected 'coeff_re coeff_im : m... | n...' in '" + line + "'");
    std::istringstream head(line.substr(0, colon));
    std::string re_tok, im_tok;
    if (!(head >> re_tok >> im_tok)) throw std::invalid_argument("symbol_from_text: bad coefficient in '" + line + "'");
    ExactComplex c(rational_from_string(re_tok), rational_from_string(im_tok));
    std::vector<int> hol, antihol;
    {
      std::istringstream mid(line.substr(colon + 1, bar - colon - 1));
      int v;
      while (mid >> v) hol.push_back(v);
      std::istringstream tail(line.substr(bar + 1));
      while (tail >> v) antihol.push_back(v);
    }
    if (hol.size() != antihol.size() || hol.empty())
      throw std::invalid_argument("symbol_from_text: exponent arity mismatch in '" + line + "'");
    for (int v : hol)
      if (v < 0) throw std::invalid_argument("symbol_from_text: negative exponent");
    for (int v : antihol)
      if (v < 0) throw std::invalid_argument("symbol_from_text: negative exponent");
    if (modes < 0) modes = static_cast<int>(hol.size());
    if (modes != static_cast<int>(hol.size()))
      throw std::invalid_argument("symbol_from_text: inconsistent mode count across lines");
    parsed.emplace_back(std::move(c), MultiIndex(std::move(hol)), MultiIndex(std::move(antihol)));
  }
  if (modes < 0) throw std::invalid_argument("symbol_from_text: no terms");
  PhaseSpacePolynomial p(modes);
  for (auto& [c, m, n] : parsed) p.add_term(c, std::move(m), std::move(n));
  return p;
}

}  // namespace tsfp
