#pragma once

#include <gmpxx.h>

#include <algorithm>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

namespace motint {

using Integer = mpz_class;
using Rational = mpq_class;

/// Dense univariate polynomial, coefficients stored in ascending degree.
/// The zero polynomial has no coefficients and degree -1.
template <class C>
class Poly {
 public:
  Poly() = default;
  explicit Poly(std::vector<C> coeffs) : c_(std::move(coeffs)) { trim(); }
  Poly(std::initializer_list<C> coeffs) : c_(coeffs) { trim(); }

  static Poly constant(const C& c) { return Poly(std::vector<C>{c}); }
  static Poly monomial(const C& c, std::size_t degree) {
    std::vector<C> v(degree + 1, C(0));
    v[degree] = c;
    return Poly(std::move(v));
  }

  int degree() const { return static_cast<int>(c_.size()) - 1; }
  bool is_zero() const { return c_.empty(); }
  bool is_constant() const { return c_.size() <= 1; }
  const std::vector<C>& coeffs() const { return c_; }
  C coeff(std::size_t i) const { return i < c_.size() ? c_[i] : C(0); }
  const C& leading() const { return c_.back(); }

  Poly operator-() const {
    Poly r = *this;
    for (auto& x : r.c_) x = -x;
    return r;
  }

  Poly& operator+=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), C(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] += o.c_[i];
    trim();
    return *this;
  }
  Poly& operator-=(const Poly& o) {
    if (o.c_.size() > c_.size()) c_.resize(o.c_.size(), C(0));
    for (std::size_t i = 0; i < o.c_.size(); ++i) c_[i] -= o.c_[i];
    trim();
    return *this;
  }
  friend Poly operator+(Poly a, const Poly& b) { return a += b; }
  friend Poly operator-(Poly a, const Poly& b) { return a -= b; }

  friend Poly operator*(const Poly& a, const Poly& b) {
    if (a.is_zero() || b.is_zero()) return Poly();
    std::vector<C> r(a.c_.size() + b.c_.size() - 1, C(0));
    for (std::size_t i = 0; i < a.c_.size(); ++i) {
      if (a.c_[i] == 0) continue;
      for (std::size_t j = 0; j < b.c_.size(); ++j) r[i + j] += a.c_[i] * b.c_[j];
    }
    return Poly(std::move(r));
  }
  Poly& operator*=(const Poly& o) { return *this = *this * o; }

  Poly scaled(const C& s) const {
    Poly r = *this;
    for (auto& x : r.c_) x *= s;
    r.trim();
    return r;
  }

  /// Multiply by X^k.
  Poly shifted(std::size_t k) const {
    if (is_zero()) return {};
    std::vector<C> v(k, C(0));
    v.insert(v.end(), c_.begin(), c_.end());
    return Poly(std::move(v));
  }

  Poly derivative() const {
    if (c_.size() <= 1) return {};
    std::vector<C> v(c_.size() - 1);
    for (std::size_t i = 1; i < c_.size(); ++i) v[i - 1] = c_[i] * static_cast<long>(i);
    return Poly(std::move(v));
  }

  /// Horner evaluation at a point of a (possibly wider) coefficient type.
  template <class T>
  T eval(const T& x) const {
    T acc(0);
    for (auto it = c_.rbegin(); it != c_.rend(); ++it) acc = acc * x + T(*it);
    return acc;
  }

  friend bool operator==(const Poly& a, const Poly& b) { return a.c_ == b.c_; }
  friend bool operator!=(const Poly& a, const Poly& b) { return !(a == b); }

  /// Total order: by degree, then coefficients from the top.
  friend bool operator<(const Poly& a, const Poly& b) {
    if (a.c_.size() != b.c_.size()) return a.c_.size() < b.c_.size();
    for (std::size_t i = a.c_.size(); i-- > 0;) {
      if (a.c_[i] != b.c_[i]) return a.c_[i] < b.c_[i];
    }
    return false;
  }

 private:
  void trim() {
    while (!c_.empty() && c_.back() == 0) c_.pop_back();
  }

  std::vector<C> c_;
};

using ZPoly = Poly<Integer>;
using QPoly = Poly<Rational>;

QPoly to_qpoly(const ZPoly& p);

/// Euclidean division over Q. Throws std::domain_error on division by zero.
std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b);

/// Monic gcd over Q (zero if both inputs are zero).
QPoly gcd(QPoly a, QPoly b);

/// gcd of the integer coefficients (nonnegative; 0 for the zero polynomial).
Integer content(const ZPoly& p);

/// Scales a rational polynomial to the primitive integer polynomial with
/// positive leading coefficient; returns the factor c with p = c * result.
std::pair<ZPoly, Rational> primitive_part(const QPoly& p);

/// Exact division over Z; returns false if b does not divide a.
bool exact_divide(const ZPoly& a, const ZPoly& b, ZPoly& quotient);

/// Cyclotomic polynomial Phi_n (cached).
const ZPoly& cyclotomic(unsigned n);

/// Prints in descending degree using `var` as the indeterminate, e.g. "L^2 - 1".
std::string to_string(const ZPoly& p, const std::string& var = "L");
std::string to_string(const QPoly& p, const std::string& var = "L");

/// Number of distinct real roots of `p` in the open interval (lo, +inf),
/// computed with a Sturm sequence. `p` need not be squarefree.
int count_real_roots_above(const QPoly& p, const Rational& lo);

/// The product of the squarefree factors of odd multiplicity (Yun).
QPoly odd_multiplicity_part(const QPoly& p);

}  // namespace motint
