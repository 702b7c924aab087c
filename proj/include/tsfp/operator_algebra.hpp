#pragma once

#include <algorithm>
#include <compare>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsfp/exact.hpp"
#include "tsfp/multi_index.hpp"

namespace tsfp {

// One ladder factor acting on a single bosonic mode.
struct LadderOp {
  int mode = 0;
  bool create = false;  // false: annihilation, true: creation

  friend auto operator<=>(const LadderOp&, const LadderOp&) = default;
};

inline LadderOp annihilate(int mode) { return {mode, false}; }
inline LadderOp create(int mode) { return {mode, true}; }

// Ordered product of ladder factors; empty word is the identity.
using LadderString = std::vector<LadderOp>;

// Formal sum of ladder-operator words over N modes with exact coefficients.
// Words are stored as given (only identical factor sequences are merged);
// anti-normal ordering produces the canonical block-sorted form.
class OperatorPolynomial {
 public:
  OperatorPolynomial() = default;
  explicit OperatorPolynomial(int modes) : modes_(modes) {
    if (modes <= 0) throw std::invalid_argument("OperatorPolynomial: modes must be positive");
  }

  int modes() const { return modes_; }
  const std::map<LadderString, ExactComplex>& terms() const { return terms_; }
  bool empty() const { return terms_.empty(); }
  std::size_t size() const { return terms_.size(); }

  void add_term(const ExactComplex& coeff, LadderString word) {
    for (const LadderOp& f : word)
      if (f.mode < 0 || f.mode >= modes_)
        throw std::out_of_range("OperatorPolynomial: mode index out of range");
    auto [it, inserted] = terms_.emplace(std::move(word), coeff);
    if (!inserted) it->second += coeff;
    if (it->second.is_zero()) terms_.erase(it);
  }

  OperatorPolynomial& operator+=(const OperatorPolynomial& o) {
    check_same_modes(o);
    for (const auto& [w, c] : o.terms_) add_term(c, w);
    return *this;
  }
  OperatorPolynomial& operator-=(const OperatorPolynomial& o) {
    check_same_modes(o);
    for (const auto& [w, c] : o.terms_) add_term(-c, w);
    return *this;
  }
  OperatorPolynomial& operator*=(const ExactComplex& s) {
    if (s.is_zero()) {
      terms_.clear();
      return *this;
    }
    for (auto& [w, c] : terms_) c *= s;
    return *this;
  }
  friend OperatorPolynomial operator+(OperatorPolynomial a, const OperatorPolynomial& b) { return a += b; }
  friend OperatorPolynomial operator-(OperatorPolynomial a, const OperatorPolynomial& b) { return a -= b; }
  friend OperatorPolynomial operator*(OperatorPolynomial a, const ExactComplex& s) { return a *= s; }

  friend OperatorPolynomial operator*(const OperatorPolynomial& a, const OperatorPolynomial& b) {
    a.check_same_modes(b);
    OperatorPolynomial r(a.modes_);
    for (const auto& [wa, ca] : a.terms_)
      for (const auto& [wb, cb] : b.terms_) {
        LadderString w = wa;
        w.insert(w.end(), wb.begin(), wb.end());
        r.add_term(ca * cb, std::move(w));
      }
    return r;
  }

  friend bool operator==(const OperatorPolynomial& a, const OperatorPolynomial& b) {
    return a.modes_ == b.modes_ && a.terms_ == b.terms_;
  }

  // Hermitian conjugate: reverse each word, flip each factor, conjugate coeffs.
  OperatorPolynomial dagger() const {
    OperatorPolynomial r(modes_);
    for (const auto& [w, c] : terms_) {
      LadderString rev(w.rbegin(), w.rend());
      for (LadderOp& f : rev) f.create = !f.create;
      r.add_term(c.conj(), std::move(rev));
    }
    return r;
  }

  // Largest per-mode factor count over all words; controls how far from the
  // cutoff edge a truncated Fock representation stays exact.
  int max_mode_degree() const {
    int deg = 0;
    for (const auto& [w, c] : terms_) {
      std::vector<int> count(modes_, 0);
      for (const LadderOp& f : w) deg = std::max(deg, ++count[f.mode]);
    }
    return deg;
  }

 private:
  void check_same_modes(const OperatorPolynomial& o) const {
    if (modes_ != o.modes_) throw std::invalid_argument("OperatorPolynomial: mode count mismatch");
  }

  int modes_ = 1;
  std::map<LadderString, ExactComplex> terms_;
};

inline OperatorPolynomial operator_monomial(int modes, const ExactComplex& c, LadderString w) {
  OperatorPolynomial p(modes);
  p.add_term(c, std::move(w));
  return p;
}

namespace detail {

// Within a word annihilations precede creations and each block is sorted by
// mode; valid only once the word is anti-normally ordered.
inline void sort_antinormal_word(LadderString& w) {
  std::stable_sort(w.begin(), w.end(), [](const LadderOp& a, const LadderOp& b) {
    if (a.create != b.create) return !a.create;
    return a.mode < b.mode;
  });
}

}  // namespace detail

// Rewrites every word with all annihilation factors to the left of all
// creation factors using [a_i, a_j^dag] = delta_ij. Exact coefficients; the
// result is operator-identical to the input.
inline OperatorPolynomial antinormal_order(const OperatorPolynomial& p) {
  OperatorPolynomial out(p.modes());
  std::vector<std::pair<LadderString, ExactComplex>> work(p.terms().begin(), p.terms().end());
  while (!work.empty()) {
    auto [w, c] = std::move(work.back());
    work.pop_back();
    // find a creation factor immediately followed by an annihilation factor
    std::size_t bad = w.size();
    for (std::size_t i = 0; i + 1 < w.size(); ++i) {
      if (w[i].create && !w[i + 1].create) {
        bad = i;
        break;
      }
    }
    if (bad == w.size()) {
      detail::sort_antinormal_word(w);
      out.add_term(c, std::move(w));
      continue;
    }
    // a_i^dag a_j = a_j a_i^dag - delta_ij
    LadderString swapped = w;
    std::swap(swapped[bad], swapped[bad + 1]);
    if (w[bad].mode == w[bad + 1].mode) {
      LadderString contracted;
      contracted.reserve(w.size() - 2);
      contracted.insert(contracted.end(), w.begin(), w.begin() + bad);
      contracted.insert(contracted.end(), w.begin() + bad + 2, w.end());
      work.emplace_back(std::move(contracted), -c);
    }
    work.emplace_back(std::move(swapped), std::move(c));
  }
  return out;
}

// --- text form -------------------------------------------------------------
//
// One term per line:  coeff_re coeff_im : a1 ad1 a2 ...
// Tokens a<k> / ad<k> are annihilation / creation on 1-based mode k; a line
// with no tokens after ':' is the identity word.

inline std::string to_text(const OperatorPolynomial& p) {
  std::ostringstream os;
  for (const auto& [w, c] : p.terms()) {
    os << c.str() << " :";
    for (const LadderOp& f : w) os << " " << (f.create ? "ad" : "a") << (f.mode + 1);
    os << "\n";
  }
  return os.str();
}

inline OperatorPolynomial operator_from_text(const std::string& text, int modes_hint = 0) {
  std::vector<std::pair<LadderString, ExactComplex>> parsed;
  int max_mode = 0;
  std::istringstream is(text);
  std::string line;
  while (std::getline(is, line)) {
    if (auto h = line.find('#'); h != std::string::npos) line.erase(h);
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    auto colon = line.find(':');
    if (colon == std::string::npos) throw std::invalid_argument("operator_from_text: missing ':' in '" + line + "'");
    std::istringstream head(line.substr(0, colon));
    std::string re_tok, im_tok;
    if (!(head >> re_tok >> im_tok)) throw std::invalid_argument("operator_from_text: bad coefficient in '" + line + "'");
    ExactComplex c(rational_from_string(re_tok), rational_from_string(im_tok));
    LadderString w;
    std::istringstream tail(line.substr(colon + 1));
    std::string tok;
    while (tail >> tok) {
      bool creation = tok.rfind("ad", 0) == 0;
      std::string num = creation ? tok.substr(2) : (tok.rfind('a', 0) == 0 ? tok.substr(1) : "");
      if (num.empty() || num.find_first_not_of("0123456789") != std::string::npos)
        throw std::invalid_argument("operator_from_text: bad factor token '" + tok + "'");
      int mode = std::stoi(num);
      if (mode < 1) throw std::invalid_argument("operator_from_text: mode indices are 1-based");
      max_mode = std::max(max_mode, mode);
      w.push_back({mode - 1, creation});
    }
    parsed.emplace_back(std::move(w), std::move(c));
  }
  int modes = std::max(modes_hint, std::max(max_mode, 1));
  OperatorPolynomial p(modes);
  for (auto& [w, c] : parsed) p.add_term(c, std::move(w));
  return p;
}

}  // namespace tsfp
