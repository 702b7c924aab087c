#pragma once

#include <gmpxx.h>

#include <complex>
#include <cstdlib>
#include <sstream>
#include <stdexcept>
#include <string>

namespace tsfp {

// Arbitrary-precision rational scalar. Every finite double is a rational,
// so conversion from double is exact; decimal strings parse exactly as well.
using Rational = mpq_class;

inline Rational rational_from_double(double x) {
  if (!std::isfinite(x)) throw std::invalid_argument("rational_from_double: non-finite input");
  return Rational(x);
}

// Accepts integers ("-3"), fractions ("2/7") and decimals ("1.25e-3").
inline Rational rational_from_string(const std::string& s) {
  if (s.empty()) throw std::invalid_argument("rational_from_string: empty token");
  if (s.find('/') != std::string::npos) {
    Rational q;
    if (q.set_str(s, 10) != 0) throw std::invalid_argument("rational_from_string: bad fraction '" + s + "'");
    q.canonicalize();
    return q;
  }
  std::size_t pos = 0;
  bool neg = false;
  if (s[pos] == '+' || s[pos] == '-') {
    neg = (s[pos] == '-');
    ++pos;
  }
  std::string digits;
  long frac_digits = 0;
  bool seen_dot = false, seen_digit = false;
  long exp10 = 0;
  for (; pos < s.size(); ++pos) {
    char c = s[pos];
    if (c >= '0' && c <= '9') {
      digits.push_back(c);
      seen_digit = true;
      if (seen_dot) ++frac_digits;
    } else if (c == '.' && !seen_dot) {
      seen_dot = true;
    } else if ((c == 'e' || c == 'E') && seen_digit) {
      exp10 = std::strtol(s.c_str() + pos + 1, nullptr, 10);
      break;
    } else {
      throw std::invalid_argument("rational_from_string: bad number '" + s + "'");
    }
  }
  if (!seen_digit) throw std::invalid_argument("rational_from_string: bad number '" + s + "'");
  mpz_class mant(digits.empty() ? "0" : digits, 10);
  if (neg) mant = -mant;
  long net = exp10 - frac_digits;
  mpz_class p10;
  mpz_ui_pow_ui(p10.get_mpz_t(), 10, static_cast<unsigned long>(net < 0 ? -net : net));
  Rational q = (net >= 0) ? Rational(mant * p10) : Rational(mant, p10);
  q.canonicalize();
  return q;
}

// Prints the shortest faithful form: integers plainly, doubles that round-trip
// via %.17g as decimals, everything else as p/q.
inline std::string rational_to_string(const Rational& q) {
  if (q.get_den() == 1) return q.get_num().get_str();
  double d = q.get_d();
  if (std::isfinite(d) && Rational(d) == q) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.17g", d);
    // prefer the shortest representation that still round-trips
    for (int prec = 1; prec < 17; ++prec) {
      char b2[64];
      std::snprintf(b2, sizeof(b2), "%.*g", prec, d);
      if (std::strtod(b2, nullptr) == d) return std::string(b2);
    }
    return std::string(buf);
  }
  return q.get_num().get_str() + "/" + q.get_den().get_str();
}

// Exact complex scalar: coefficients of operator words and phase-space
// monomials stay exact under commutator rewriting and differentiation.
class ExactComplex {
 public:
  ExactComplex() : re_(0), im_(0) {}
  ExactComplex(long n) : re_(n), im_(0) {}  // NOLINT (implicit by design)
  ExactComplex(Rational re, Rational im = Rational(0)) : re_(std::move(re)), im_(std::move(im)) {}

  static ExactComplex i() { return ExactComplex(Rational(0), Rational(1)); }
  static ExactComplex from_double(double re, double im = 0.0) {
    return ExactComplex(rational_from_double(re), rational_from_double(im));
  }

  const Rational& real() const { return re_; }
  const Rational& imag() const { return im_; }
  bool is_zero() const { return re_ == 0 && im_ == 0; }
  bool is_real() const { return im_ == 0; }

  ExactComplex conj() const { return ExactComplex(re_, -im_); }
  std::complex<double> to_std() const { return {re_.get_d(), im_.get_d()}; }

  ExactComplex& operator+=(const ExactComplex& o) {
    re_ += o.re_;
    im_ += o.im_;
    return *this;
  }
  ExactComplex& operator-=(const ExactComplex& o) {
    re_ -= o.re_;
    im_ -= o.im_;
    return *this;
  }
  ExactComplex& operator*=(const ExactComplex& o) {
    Rational r = re_ * o.re_ - im_ * o.im_;
    Rational i = re_ * o.im_ + im_ * o.re_;
    re_ = std::move(r);
    im_ = std::move(i);
    return *this;
  }
  friend ExactComplex operator+(ExactComplex a, const ExactComplex& b) { return a += b; }
  friend ExactComplex operator-(ExactComplex a, const ExactComplex& b) { return a -= b; }
  friend ExactComplex operator*(ExactComplex a, const ExactComplex& b) { return a *= b; }
  friend ExactComplex operator-(const ExactComplex& a) { return ExactComplex(-a.re_, -a.im_); }
  friend bool operator==(const ExactComplex& a, const ExactComplex& b) {
    return a.re_ == b.re_ && a.im_ == b.im_;
  }

  std::string str() const {
    return rational_to_string(re_) + " " + rational_to_string(im_);
  }

 private:
  Rational re_, im_;
};

}  // namespace tsfp
