#pragma once

#include <string>

#include "motint/errors.hpp"
#include "motint/poly.hpp"

namespace motint {

/// Element of A = Z[L, L^-1, (1 - L^-i)^-1] stored as a reduced fraction
/// numer/denom of integer polynomials in L. denom is primitive with positive
/// leading coefficient and factors into L and cyclotomic polynomials.
class ARat {
 public:
  ARat() : den_(ZPoly::constant(Integer(1))) {}
  ARat(long v) : num_(ZPoly::constant(Integer(v))), den_(ZPoly::constant(Integer(1))) {}
  ARat(const Integer& v) : num_(ZPoly::constant(v)), den_(ZPoly::constant(Integer(1))) {}

  /// Throws NotInA if the reduced denominator has a non-cyclotomic factor
  /// or the quotient is not integral over Z.
  static ARat normalize(const ZPoly& numer, const ZPoly& denom);
  static ARat normalize(const QPoly& numer, const QPoly& denom);

  static ARat L() { return from_poly(ZPoly{Integer(0), Integer(1)}); }
  /// L^k for any integer k.
  static ARat L_pow(long k);
  static ARat from_poly(const ZPoly& p);
  /// 1 / (1 - L^c) for c != 0.
  static ARat geometric(long c);

  const ZPoly& numer() const { return num_; }
  const ZPoly& denom() const { return den_; }
  bool is_zero() const { return num_.is_zero(); }
  bool is_one() const { return num_ == den_; }
  bool is_polynomial() const { return den_.degree() == 0; }

  ARat operator-() const;
  friend ARat operator+(const ARat& a, const ARat& b);
  friend ARat operator-(const ARat& a, const ARat& b);
  friend ARat operator*(const ARat& a, const ARat& b);
  ARat& operator+=(const ARat& b) { return *this = *this + b; }
  ARat& operator-=(const ARat& b) { return *this = *this - b; }
  ARat& operator*=(const ARat& b) { return *this = *this * b; }
  ARat pow(unsigned e) const;

  /// Exact quotient when it lies in A (throws NotInA otherwise).
  ARat divided_by(const ARat& b) const;
  /// True when a is a unit of A, i.e. +-L^k * prod Phi_j^e.
  bool is_unit() const;

  friend bool operator==(const ARat& a, const ARat& b) { return a.num_ == b.num_ && a.den_ == b.den_; }
  friend bool operator!=(const ARat& a, const ARat& b) { return !(a == b); }
  friend bool operator<(const ARat& a, const ARat& b) {
    if (a.den_ != b.den_) return a.den_ < b.den_;
    return a.num_ < b.num_;
  }

  /// theta_q for rational q > 1; throws QOutOfRange otherwise.
  Rational theta(const Rational& q) const;
  /// theta_q(a) >= 0 for every real q > 1.
  bool is_nonneg() const;

  /// "numer" or "(numer) / (denom)".
  std::string to_string() const;

 private:
  ZPoly num_;
  ZPoly den_;
};

/// Text form: rational expressions in L with + - * / ^ (integer exponents,
/// negative allowed) and parentheses, e.g. "(L - 1) / L" or "1/(1 - L^-2)".
ARat parse_arat(const std::string& text);

}  // namespace motint
