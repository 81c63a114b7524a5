#include "motint/poly.hpp"

#include <map>
#include <mutex>
#include <sstream>
#include <stdexcept>

namespace motint {

QPoly to_qpoly(const ZPoly& p) {
  std::vector<Rational> v;
  v.reserve(p.coeffs().size());
  for (const auto& c : p.coeffs()) v.emplace_back(c);
  return QPoly(std::move(v));
}

std::pair<QPoly, QPoly> divmod(const QPoly& a, const QPoly& b) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  if (a.degree() < b.degree()) return {QPoly(), a};
  std::vector<Rational> rem = a.coeffs();
  std::vector<Rational> quo(a.coeffs().size() - b.coeffs().size() + 1, Rational(0));
  const Rational& lead = b.leading();
  const std::size_t db = b.coeffs().size() - 1;
  for (std::size_t i = quo.size(); i-- > 0;) {
    Rational q = rem[i + db] / lead;
    quo[i] = q;
    if (q == 0) continue;
    for (std::size_t j = 0; j <= db; ++j) rem[i + j] -= q * b.coeffs()[j];
  }
  rem.resize(db);
  return {QPoly(std::move(quo)), QPoly(std::move(rem))};
}

QPoly gcd(QPoly a, QPoly b) {
  while (!b.is_zero()) {
    QPoly r = divmod(a, b).second;
    a = std::move(b);
    b = std::move(r);
  }
  if (a.is_zero()) return a;
  return a.scaled(Rational(1) / a.leading());
}

Integer content(const ZPoly& p) {
  Integer g = 0;
  for (const auto& c : p.coeffs()) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), c.get_mpz_t());
  return g;
}

std::pair<ZPoly, Rational> primitive_part(const QPoly& p) {
  if (p.is_zero()) return {ZPoly(), Rational(0)};
  Integer den = 1;
  for (const auto& c : p.coeffs()) mpz_lcm(den.get_mpz_t(), den.get_mpz_t(), c.get_den_mpz_t());
  std::vector<Integer> v;
  v.reserve(p.coeffs().size());
  for (const auto& c : p.coeffs()) {
    Rational s = c * den;
    v.push_back(s.get_num());
  }
  ZPoly z(std::move(v));
  Integer g = content(z);
  if (z.leading() < 0) g = -g;
  std::vector<Integer> w;
  w.reserve(z.coeffs().size());
  for (const auto& c : z.coeffs()) w.push_back(c / g);
  Rational factor(g, den);
  factor.canonicalize();
  return {ZPoly(std::move(w)), factor};
}

bool exact_divide(const ZPoly& a, const ZPoly& b, ZPoly& quotient) {
  if (b.is_zero()) throw std::domain_error("polynomial division by zero");
  if (a.is_zero()) {
    quotient = ZPoly();
    return true;
  }
  if (a.degree() < b.degree()) return false;
  std::vector<Integer> rem = a.coeffs();
  std::vector<Integer> quo(a.coeffs().size() - b.coeffs().size() + 1, Integer(0));
  const std::size_t db = b.coeffs().size() - 1;
  const Integer& lead = b.leading();
  for (std::size_t i = quo.size(); i-- > 0;) {
    const Integer& top = rem[i + db];
    if (top == 0) continue;
    if (!mpz_divisible_p(top.get_mpz_t(), lead.get_mpz_t())) return false;
    Integer q = top / lead;
    quo[i] = q;
    for (std::size_t j = 0; j <= db; ++j) rem[i + j] -= q * b.coeffs()[j];
  }
  for (std::size_t j = 0; j < db; ++j) {
    if (rem[j] != 0) return false;
  }
  quotient = ZPoly(std::move(quo));
  return true;
}

namespace {

// Phi_n = (L^n - 1) / prod_{d | n, d < n} Phi_d; caller holds the lock.
const ZPoly& cyclotomic_locked(std::map<unsigned, ZPoly>& cache, unsigned n) {
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;
  ZPoly acc = ZPoly::monomial(Integer(1), n) - ZPoly::constant(Integer(1));
  for (unsigned d = 1; d < n; ++d) {
    if (n % d != 0) continue;
    ZPoly q;
    exact_divide(acc, cyclotomic_locked(cache, d), q);
    acc = std::move(q);
  }
  return cache.emplace(n, std::move(acc)).first->second;
}

}  // namespace

const ZPoly& cyclotomic(unsigned n) {
  static std::mutex mu;
  static std::map<unsigned, ZPoly> cache;
  if (n == 0) throw std::domain_error("cyclotomic index must be positive");
  std::lock_guard<std::mutex> lock(mu);
  return cyclotomic_locked(cache, n);
}

namespace {

template <class C>
std::string poly_string(const Poly<C>& p, const std::string& var) {
  if (p.is_zero()) return "0";
  std::ostringstream os;
  bool first = true;
  for (int i = p.degree(); i >= 0; --i) {
    C c = p.coeffs()[static_cast<std::size_t>(i)];
    if (c == 0) continue;
    bool neg = c < 0;
    C a = neg ? C(-c) : c;
    if (first) {
      if (neg) os << "-";
    } else {
      os << (neg ? " - " : " + ");
    }
    first = false;
    if (i == 0) {
      os << a;
    } else {
      if (a != 1) os << a << "*";
      os << var;
      if (i > 1) os << "^" << i;
    }
  }
  return os.str();
}

int sign_of(const Rational& r) { return sgn(r); }

int sign_changes(const std::vector<int>& signs) {
  int changes = 0;
  int last = 0;
  for (int s : signs) {
    if (s == 0) continue;
    if (last != 0 && s != last) ++changes;
    last = s;
  }
  return changes;
}

}  // namespace

std::string to_string(const ZPoly& p, const std::string& var) { return poly_string(p, var); }
std::string to_string(const QPoly& p, const std::string& var) { return poly_string(p, var); }

int count_real_roots_above(const QPoly& p, const Rational& lo) {
  if (p.degree() <= 0) return 0;
  QPoly g = divmod(p, gcd(p, p.derivative())).first;
  // Drop a root exactly at `lo` so the Sturm count is over the open interval.
  const QPoly lin({Rational(-lo), Rational(1)});
  while (g.degree() > 0 && g.eval(lo) == 0) g = divmod(g, lin).first;
  if (g.degree() <= 0) return 0;
  std::vector<QPoly> seq{g, g.derivative()};
  while (!seq.back().is_zero()) {
    QPoly r = divmod(seq[seq.size() - 2], seq.back()).second;
    if (r.is_zero()) break;
    seq.push_back(-r);
  }
  std::vector<int> at_lo, at_inf;
  for (const auto& s : seq) {
    at_lo.push_back(sign_of(s.eval(lo)));
    at_inf.push_back(sign_of(s.leading()));
  }
  return sign_changes(at_lo) - sign_changes(at_inf);
}

QPoly odd_multiplicity_part(const QPoly& f) {
  if (f.degree() <= 0) return QPoly::constant(Rational(1));
  QPoly df = f.derivative();
  QPoly a = gcd(f, df);
  QPoly b = divmod(f, a).first;
  QPoly c = divmod(df, a).first;
  QPoly d = c - b.derivative();
  QPoly odd = QPoly::constant(Rational(1));
  for (int i = 1; b.degree() > 0; ++i) {
    QPoly ai = gcd(b, d);
    if (i % 2 == 1) odd = odd * ai;
    b = divmod(b, ai).first;
    c = divmod(d, ai).first;
    d = c - b.derivative();
  }
  return odd;
}

}  // namespace motint
