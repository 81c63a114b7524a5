#include "motint/arat.hpp"

#include <cctype>

namespace motint {

namespace {

bool is_monomial(const ZPoly& p) {
  for (int i = 0; i < p.degree(); ++i) {
    if (p.coeffs()[static_cast<std::size_t>(i)] != 0) return false;
  }
  return !p.is_zero();
}

std::size_t low_degree(const ZPoly& p) {
  std::size_t k = 0;
  while (k < p.coeffs().size() && p.coeffs()[k] == 0) ++k;
  return k;
}

ZPoly drop_low(const ZPoly& p, std::size_t k) {
  return ZPoly(std::vector<Integer>(p.coeffs().begin() + static_cast<long>(k), p.coeffs().end()));
}

// Strips L and cyclotomic factors; true if nothing else remains.
bool cyclotomic_only(ZPoly d) {
  d = drop_low(d, low_degree(d));
  if (d.degree() == 0) return d.coeffs()[0] == 1 || d.coeffs()[0] == -1;
  const unsigned bound = static_cast<unsigned>(2 * d.degree() * d.degree() + 2);
  for (unsigned j = 1; j <= bound && d.degree() > 0; ++j) {
    const ZPoly& phi = cyclotomic(j);
    if (phi.degree() > d.degree()) continue;
    ZPoly q;
    while (d.degree() >= phi.degree() && exact_divide(d, phi, q)) d = q;
  }
  return d.degree() == 0 && (d.coeffs()[0] == 1 || d.coeffs()[0] == -1);
}

}  // namespace

ARat ARat::normalize(const ZPoly& numer, const ZPoly& denom) {
  if (denom.is_zero()) throw NotInA("zero denominator");
  ARat r;
  if (numer.is_zero()) return r;
  if (is_monomial(denom)) {
    std::size_t k = static_cast<std::size_t>(denom.degree());
    std::size_t s = std::min(k, low_degree(numer));
    ZPoly n = drop_low(numer, s);
    k -= s;
    Integer c = denom.leading();
    Integer g = content(n);
    mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
    if (c < 0) g = -g;
    if (abs(c) != abs(g)) throw NotInA("denominator constant " + c.get_str() + " is not a unit");
    std::vector<Integer> v;
    for (const auto& x : n.coeffs()) v.push_back(x / g);
    r.num_ = ZPoly(std::move(v));
    r.den_ = ZPoly::monomial(Integer(1), k);
    return r;
  }
  QPoly qn = to_qpoly(numer), qd = to_qpoly(denom);
  QPoly g = gcd(qn, qd);
  if (g.degree() > 0) {
    qn = divmod(qn, g).first;
    qd = divmod(qd, g).first;
  }
  auto [pd, factor] = primitive_part(qd);
  qn = qn.scaled(Rational(1) / factor);
  std::vector<Integer> nv;
  for (const auto& c : qn.coeffs()) {
    if (c.get_den() != 1) throw NotInA("quotient is not integral: (" + motint::to_string(numer) + ") / (" + motint::to_string(denom) + ")");
    nv.push_back(c.get_num());
  }
  if (!cyclotomic_only(pd)) throw NotInA("denominator " + motint::to_string(pd) + " has a factor other than L or a cyclotomic polynomial");
  r.num_ = ZPoly(std::move(nv));
  r.den_ = pd;
  return r;
}

ARat ARat::normalize(const QPoly& numer, const QPoly& denom) {
  auto [zn, cn] = primitive_part(numer);
  auto [zd, cd] = primitive_part(denom);
  if (zd.is_zero()) throw NotInA("zero denominator");
  Rational c = cn / cd;
  return normalize(zn.scaled(c.get_num()), zd.scaled(c.get_den()));
}

ARat ARat::L_pow(long k) {
  ARat r;
  if (k >= 0) {
    r.num_ = ZPoly::monomial(Integer(1), static_cast<std::size_t>(k));
  } else {
    r.num_ = ZPoly::constant(Integer(1));
    r.den_ = ZPoly::monomial(Integer(1), static_cast<std::size_t>(-k));
  }
  return r;
}

ARat ARat::from_poly(const ZPoly& p) {
  ARat r;
  r.num_ = p;
  return r;
}

ARat ARat::geometric(long c) {
  if (c == 0) throw NotInA("1/(1 - L^0) is undefined");
  ZPoly one = ZPoly::constant(Integer(1));
  if (c > 0) return normalize(one, one - ZPoly::monomial(Integer(1), static_cast<std::size_t>(c)));
  ZPoly lk = ZPoly::monomial(Integer(1), static_cast<std::size_t>(-c));
  return normalize(lk, lk - one);
}

ARat ARat::operator-() const {
  ARat r = *this;
  r.num_ = -r.num_;
  return r;
}

ARat operator+(const ARat& a, const ARat& b) {
  if (a.is_zero()) return b;
  if (b.is_zero()) return a;
  if (a.den_ == b.den_) return ARat::normalize(a.num_ + b.num_, a.den_);
  return ARat::normalize(a.num_ * b.den_ + b.num_ * a.den_, a.den_ * b.den_);
}

ARat operator-(const ARat& a, const ARat& b) { return a + (-b); }

ARat operator*(const ARat& a, const ARat& b) {
  if (a.is_zero() || b.is_zero()) return ARat();
  if (a.is_polynomial() && b.is_polynomial()) {
    ARat r;
    r.num_ = a.num_ * b.num_;
    return r;
  }
  return ARat::normalize(a.num_ * b.num_, a.den_ * b.den_);
}

ARat ARat::pow(unsigned e) const {
  ARat r(1), base = *this;
  while (e) {
    if (e & 1u) r *= base;
    base *= base;
    e >>= 1u;
  }
  return r;
}

ARat ARat::divided_by(const ARat& b) const {
  if (b.is_zero()) throw NotInA("division by zero");
  return normalize(num_ * b.den_, den_ * b.num_);
}

bool ARat::is_unit() const {
  if (is_zero()) return false;
  return cyclotomic_only(num_);
}

Rational ARat::theta(const Rational& q) const {
  if (q <= 1) throw QOutOfRange("theta_q requires q > 1, got " + q.get_str());
  Rational n = num_.eval(q), d = den_.eval(q);
  return n / d;
}

bool ARat::is_nonneg() const {
  if (is_zero()) return true;
  ZPoly f = num_ * den_;
  if (f.leading() < 0) return false;
  QPoly odd = odd_multiplicity_part(to_qpoly(f));
  return count_real_roots_above(odd, Rational(1)) == 0;
}

std::string ARat::to_string() const {
  if (is_polynomial()) return motint::to_string(num_);
  return "(" + motint::to_string(num_) + ") / (" + motint::to_string(den_) + ")";
}

namespace {

class ARatParser {
 public:
  explicit ARatParser(const std::string& s) : s_(s) {}

  ARat run() {
    ARat v = expr();
    skip();
    if (i_ != s_.size()) throw ParseError("unexpected '" + std::string(1, s_[i_]) + "'", i_);
    return v;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  bool eat(char c) {
    skip();
    if (i_ < s_.size() && s_[i_] == c) {
      ++i_;
      return true;
    }
    return false;
  }

  ARat expr() {
    ARat v;
    bool neg = eat('-');
    if (!neg) eat('+');
    v = term();
    if (neg) v = -v;
    for (;;) {
      if (eat('+')) {
        v += term();
      } else if (eat('-')) {
        v -= term();
      } else {
        return v;
      }
    }
  }

  ARat term() {
    ARat v = power();
    for (;;) {
      if (eat('*')) {
        v *= power();
      } else if (eat('/')) {
        std::size_t at = i_;
        ARat d = power();
        if (d.is_zero()) throw ParseError("division by zero", at);
        v = v.divided_by(d);
      } else {
        return v;
      }
    }
  }

  long exponent() {
    skip();
    bool paren = eat('(');
    skip();
    bool neg = false;
    if (eat('-')) neg = true;
    skip();
    std::size_t start = i_;
    while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
    if (start == i_) throw ParseError("expected integer exponent", i_);
    long e = std::stol(s_.substr(start, i_ - start));
    if (paren && !eat(')')) throw ParseError("expected ')'", i_);
    return neg ? -e : e;
  }

  ARat power() {
    ARat base = atom();
    if (eat('^')) {
      long e = exponent();
      if (e >= 0) return base.pow(static_cast<unsigned>(e));
      return ARat(1).divided_by(base.pow(static_cast<unsigned>(-e)));
    }
    return base;
  }

  ARat atom() {
    skip();
    if (i_ >= s_.size()) throw ParseError("unexpected end of input", i_);
    char c = s_[i_];
    if (c == '(') {
      ++i_;
      ARat v = expr();
      if (!eat(')')) throw ParseError("expected ')'", i_);
      return v;
    }
    if (c == 'L') {
      ++i_;
      return ARat::L();
    }
    if (c == '-') {
      ++i_;
      return -power();
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t start = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      return ARat(Integer(s_.substr(start, i_ - start)));
    }
    throw ParseError("unexpected '" + std::string(1, c) + "'", i_);
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

}  // namespace

ARat parse_arat(const std::string& text) { return ARatParser(text).run(); }

}  // namespace motint
