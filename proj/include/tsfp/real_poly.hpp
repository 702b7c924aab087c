#pragma once

#include <cmath>
#include <map>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include "tsfp/multi_index.hpp"

namespace tsfp {

// Polynomial in the 2N dimensionless phase-space coordinates
// z = (Q_1..Q_N, P_1..P_N), double coefficients. This is the numeric form
// consumed by the geometry and solver layers; exact derivative bookkeeping
// happens on the exponents, so differentiation introduces no roundoff beyond
// the coefficient multiply.
class RealPolynomial {
 public:
  RealPolynomial() = default;
  explicit RealPolynomial(std::size_t vars) : vars_(vars) {}

  std::size_t vars() const { return vars_; }
  const std::map<MultiIndex, double>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }

  void add_term(double coeff, const MultiIndex& m, double drop_tol = 0.0) {
    if (m.size() != vars_) throw std::invalid_argument("RealPolynomial: exponent arity mismatch");
    double& c = terms_[m];
    c += coeff;
    if (c == 0.0 || (drop_tol > 0.0 && std::abs(c) <= drop_tol)) terms_.erase(m);
  }

  RealPolynomial& operator+=(const RealPolynomial& o) {
    if (vars_ != o.vars_) throw std::invalid_argument("RealPolynomial: arity mismatch");
    for (const auto& [m, c] : o.terms_) add_term(c, m);
    return *this;
  }
  RealPolynomial& operator*=(double s) {
    if (s == 0.0) {
      terms_.clear();
      return *this;
    }
    for (auto& [m, c] : terms_) c *= s;
    return *this;
  }
  friend RealPolynomial operator+(RealPolynomial a, const RealPolynomial& b) { return a += b; }
  friend RealPolynomial operator*(RealPolynomial a, double s) { return a *= s; }

  friend RealPolynomial operator-(RealPolynomial a, const RealPolynomial& b) {
    RealPolynomial nb = b;
    nb *= -1.0;
    return a += nb;
  }

  RealPolynomial derivative(std::size_t axis) const {
    if (axis >= vars_) throw std::out_of_range("RealPolynomial::derivative: axis out of range");
    RealPolynomial r(vars_);
    for (const auto& [m, c] : terms_) {
      if (m[axis] == 0) continue;
      r.add_term(c * m[axis], m.raised(axis, -1));
    }
    return r;
  }

  double evaluate(const std::vector<double>& z) const {
    if (z.size() != vars_) throw std::invalid_argument("RealPolynomial::evaluate: point arity mismatch");
    double acc = 0.0;
    for (const auto& [m, c] : terms_) {
      double t = c;
      for (std::size_t i = 0; i < vars_; ++i)
        for (int k = 0; k < m[i]; ++k) t *= z[i];
      acc += t;
    }
    return acc;
  }

  int total_degree() const {
    int d = 0;
    for (const auto& [m, c] : terms_) d = std::max(d, m.order());
    return d;
  }

  double max_abs_coeff() const {
    double s = 0.0;
    for (const auto& [m, c] : terms_) s = std::max(s, std::abs(c));
    return s;
  }

  std::string str() const {
    std::ostringstream os;
    bool first = true;
    for (const auto& [m, c] : terms_) {
      if (!first) os << " + ";
      first = false;
      os << c;
      for (std::size_t i = 0; i < vars_; ++i)
        if (m[i] > 0) {
          os << "*" << (i < vars_ / 2 ? "Q" : "P") << (i < vars_ / 2 ? i + 1 : i + 1 - vars_ / 2);
          if (m[i] > 1) os << "^" << m[i];
        }
    }
    return first ? "0" : os.str();
  }

 private:
  std::size_t vars_ = 0;
  std::map<MultiIndex, double> terms_;
};

}  // namespace tsfp
