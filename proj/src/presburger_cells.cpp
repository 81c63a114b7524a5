#include <cctype>
#include <sstream>

#include "motint/presburger.hpp"

namespace motint {

// ------------------------------------------------------------------ Affine

Affine Affine::var(const std::string& v, const Rational& k) {
  Affine a;
  if (k != 0) a.coef[v] = k;
  return a;
}

Rational Affine::coeff(const std::string& v) const {
  auto it = coef.find(v);
  return it == coef.end() ? Rational(0) : it->second;
}

std::set<std::string> Affine::vars() const {
  std::set<std::string> s;
  for (const auto& [v, k] : coef) s.insert(v);
  return s;
}

Affine Affine::operator-() const {
  Affine r = *this;
  r.c0 = -r.c0;
  for (auto& [v, k] : r.coef) k = -k;
  return r;
}

Affine operator+(const Affine& a, const Affine& b) {
  Affine r = a;
  r.c0 += b.c0;
  for (const auto& [v, k] : b.coef) {
    Rational s = r.coeff(v) + k;
    if (s == 0) r.coef.erase(v); else r.coef[v] = s;
  }
  return r;
}

Affine operator-(const Affine& a, const Affine& b) { return a + (-b); }

Affine operator*(const Rational& k, const Affine& a) {
  if (k == 0) return Affine();
  Affine r = a;
  r.c0 *= k;
  for (auto& [v, c] : r.coef) c *= k;
  return r;
}

Affine Affine::substitute(const std::string& v, const Affine& by) const {
  auto it = coef.find(v);
  if (it == coef.end()) return *this;
  Affine r = *this;
  Rational k = it->second;
  r.coef.erase(v);
  return r + k * by;
}

Affine Affine::substitute(const std::map<std::string, Affine>& m) const {
  Affine r(c0);
  for (const auto& [v, k] : coef) {
    auto it = m.find(v);
    r = r + k * (it == m.end() ? Affine::var(v) : it->second);
  }
  return r;
}

Rational Affine::eval(const std::map<std::string, Integer>& point) const {
  Rational r = c0;
  for (const auto& [v, k] : coef) {
    auto it = point.find(v);
    if (it == point.end()) throw EvalError("no value for variable '" + v + "'");
    r += k * Rational(it->second);
  }
  return r;
}

Integer Affine::denominator() const {
  Integer l = c0.get_den();
  for (const auto& [v, k] : coef) mpz_lcm(l.get_mpz_t(), l.get_mpz_t(), k.get_den().get_mpz_t());
  return l;
}

Affine Affine::primitive() const {
  Affine r = Rational(denominator()) * *this;
  Integer g = r.c0.get_num();
  for (const auto& [v, k] : r.coef) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), k.get_num().get_mpz_t());
  if (g == 0) return r;
  return Rational(1, 1) / Rational(abs(g)) * r;
}

bool operator<(const Affine& a, const Affine& b) {
  if (a.coef != b.coef) {
    auto ia = a.coef.begin(), ib = b.coef.begin();
    for (; ia != a.coef.end() && ib != b.coef.end(); ++ia, ++ib) {
      if (ia->first != ib->first) return ia->first < ib->first;
      if (ia->second != ib->second) return ia->second < ib->second;
    }
    return ia == a.coef.end() && ib != b.coef.end();
  }
  return a.c0 < b.c0;
}

std::string Affine::to_string() const {
  std::ostringstream os;
  bool first = true;
  auto emit = [&](const Rational& k, const std::string& v) {
    Rational a = abs(k);
    if (first) {
      if (k < 0) os << "-";
    } else {
      os << (k < 0 ? " - " : " + ");
    }
    first = false;
    if (v.empty()) {
      os << a;
    } else if (a == 1) {
      os << v;
    } else if (a.get_den() == 1) {
      os << a << "*" << v;
    } else {
      os << a.get_num() << "*" << v << "/" << a.get_den();
    }
  };
  for (const auto& [v, k] : coef) emit(k, v);
  if (c0 != 0 || first) emit(c0, "");
  return os.str();
}

namespace {

class AffineParser {
 public:
  explicit AffineParser(const std::string& s) : s_(s) {}

  Affine parse() {
    Affine a = expr();
    skip();
    if (i_ != s_.size()) fail("unexpected character");
    return a;
  }

 private:
  const std::string& s_;
  std::size_t i_ = 0;

  [[noreturn]] void fail(const std::string& m) { throw ParseError(m + " in affine form '" + s_ + "'", i_); }
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
  Affine expr() {
    Affine a = product();
    for (;;) {
      if (eat('+')) a = a + product();
      else if (eat('-')) a = a - product();
      else return a;
    }
  }
  Affine product() {
    Affine a = unary();
    for (;;) {
      if (eat('*')) {
        Affine b = unary();
        if (!a.is_const() && !b.is_const()) fail("product of two variables");
        a = a.is_const() ? a.c0 * b : b.c0 * a;
      } else if (eat('/')) {
        Affine b = unary();
        if (!b.is_const() || b.c0 == 0) fail("division by a non-constant or zero");
        a = (Rational(1) / b.c0) * a;
      } else {
        return a;
      }
    }
  }
  Affine unary() {
    if (eat('-')) return -unary();
    if (eat('+')) return unary();
    return primary();
  }
  Affine primary() {
    skip();
    if (eat('(')) {
      Affine a = expr();
      if (!eat(')')) fail("expected ')'");
      return a;
    }
    if (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) {
      std::size_t j = i_;
      while (i_ < s_.size() && std::isdigit(static_cast<unsigned char>(s_[i_]))) ++i_;
      return Affine(Rational(Integer(s_.substr(j, i_ - j))));
    }
    if (i_ < s_.size() && (std::isalpha(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) {
      std::size_t j = i_;
      while (i_ < s_.size() && (std::isalnum(static_cast<unsigned char>(s_[i_])) || s_[i_] == '_')) ++i_;
      return Affine::var(s_.substr(j, i_ - j));
    }
    fail("expected a number, variable or '('");
  }
};

}  // namespace

Affine parse_affine(const std::string& text) { return AffineParser(text).parse(); }

Affine affine_of_term(const Term& t) {
  switch (t->kind) {
    case TermKind::Var: return Affine::var(t->name);
    case TermKind::Int: return Affine(t->value);
    case TermKind::Add: return affine_of_term(t->args[0]) + affine_of_term(t->args[1]);
    case TermKind::Sub: return affine_of_term(t->args[0]) - affine_of_term(t->args[1]);
    case TermKind::Neg: return -affine_of_term(t->args[0]);
    case TermKind::Mul: {
      Affine a = affine_of_term(t->args[0]), b = affine_of_term(t->args[1]);
      if (!a.is_const() && !b.is_const()) throw OutsideFragment("nonlinear value-group term " + to_string(t));
      return a.is_const() ? a.c0 * b : b.c0 * a;
    }
    default: throw OutsideFragment("value-group term " + to_string(t) + " is not affine in value-group variables");
  }
}

// ------------------------------------------------------------------ PCell

PCell PCell::bounds(const std::string& v, const std::optional<Affine>& lo, const std::optional<Affine>& hi) {
  PCell c;
  if (lo) c.ineqs.push_back(Affine::var(v) - *lo);
  if (hi) c.ineqs.push_back(*hi - Affine::var(v));
  return c;
}

bool PCell::contains(const std::map<std::string, Integer>& point) const {
  for (const auto& f : ineqs) {
    if (f.eval(point) < 0) return false;
  }
  for (const auto& c : congs) {
    Rational v = c.form.eval(point);
    if (v.get_den() != 1) return false;
    Integer r;
    mpz_fdiv_r(r.get_mpz_t(), v.get_num().get_mpz_t(), c.mod.get_mpz_t());
    if (r != 0) return false;
  }
  return true;
}

std::set<std::string> PCell::vars() const {
  std::set<std::string> s;
  for (const auto& f : ineqs) {
    for (const auto& [v, k] : f.coef) s.insert(v);
  }
  for (const auto& c : congs) {
    for (const auto& [v, k] : c.form.coef) s.insert(v);
  }
  return s;
}

PCell PCell::substitute(const std::string& v, const Affine& by) const {
  PCell r;
  for (const auto& f : ineqs) r.ineqs.push_back(f.substitute(v, by));
  for (const auto& c : congs) r.congs.push_back({c.form.substitute(v, by), c.mod});
  return r;
}

PCell PCell::substitute(const std::map<std::string, Affine>& m) const {
  PCell r;
  for (const auto& f : ineqs) r.ineqs.push_back(f.substitute(m));
  for (const auto& c : congs) r.congs.push_back({c.form.substitute(m), c.mod});
  return r;
}

namespace {

Integer floor_div(const Integer& a, const Integer& b) {
  Integer q;
  mpz_fdiv_q(q.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return q;
}

Integer mod_pos(const Integer& a, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

// Integer-point tightening: integer coefficients with gcd 1, constant
// rounded down.
Affine tighten(const Affine& f) {
  Affine r = Rational(f.denominator()) * f;
  if (r.is_const()) return r;
  Integer g = 0;
  for (const auto& [v, k] : r.coef) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), k.get_num().get_mpz_t());
  Affine out;
  for (const auto& [v, k] : r.coef) out.coef[v] = Rational(k.get_num() / g);
  out.c0 = Rational(floor_div(r.c0.get_num(), g));
  return out;
}

// Congruence normal form; nullopt when trivially true, throws-free: sets
// `empty` when unsatisfiable.
std::optional<Congruence> normalize_cong(Congruence c, bool& empty) {
  Integer den = c.form.denominator();
  Integer m = c.mod * den;
  Affine f = Rational(den) * c.form;
  Integer g = m;
  Affine red;
  for (const auto& [v, k] : f.coef) {
    Integer r = mod_pos(k.get_num(), m);
    if (r != 0) red.coef[v] = Rational(r);
  }
  red.c0 = Rational(mod_pos(f.c0.get_num(), m));
  for (const auto& [v, k] : red.coef) mpz_gcd(g.get_mpz_t(), g.get_mpz_t(), k.get_num().get_mpz_t());
  if (red.is_const()) {
    if (red.c0 != 0) empty = true;
    return std::nullopt;
  }
  if (red.c0.get_num() % g != 0) {
    empty = true;
    return std::nullopt;
  }
  m /= g;
  Affine out;
  for (const auto& [v, k] : red.coef) {
    Integer r = mod_pos(k.get_num() / g, m);
    if (r != 0) out.coef[v] = Rational(r);
  }
  out.c0 = Rational(mod_pos(red.c0.get_num() / g, m));
  if (m == 1) return std::nullopt;
  if (out.is_const()) {
    if (out.c0 != 0) empty = true;
    return std::nullopt;
  }
  return Congruence{out, m};
}

// l + c1 = 0 mod m1 and l + c2 = 0 mod m2 with the same linear part l.
std::optional<Congruence> crt(const Congruence& a, const Congruence& b, bool& empty) {
  Integer m1 = a.mod, m2 = b.mod;
  Integer r1 = mod_pos(-a.form.c0.get_num(), m1), r2 = mod_pos(-b.form.c0.get_num(), m2);
  Integer g, s, t;
  mpz_gcdext(g.get_mpz_t(), s.get_mpz_t(), t.get_mpz_t(), m1.get_mpz_t(), m2.get_mpz_t());
  if ((r2 - r1) % g != 0) {
    empty = true;
    return std::nullopt;
  }
  Integer l = m1 / g * m2;
  Integer x = mod_pos(r1 + (r2 - r1) / g * s * m1, l);
  Affine f = a.form;
  f.c0 = Rational(-x);
  return normalize_cong({f, l}, empty);
}

}  // namespace

bool PCell::normalize() {
  bool empty = false;
  std::map<std::map<std::string, Rational>, Rational> tight;  // linear part -> min constant
  for (const auto& f : ineqs) {
    if (f.is_const()) {
      if (f.c0 < 0) empty = true;
      continue;
    }
    Affine t = tighten(f);
    auto it = tight.find(t.coef);
    if (it == tight.end() || t.c0 < it->second) tight[t.coef] = t.c0;
  }
  ineqs.clear();
  for (const auto& [lin, c] : tight) {
    Affine neg;
    for (const auto& [v, k] : lin) neg.coef[v] = -k;
    auto it = tight.find(neg.coef);
    if (it != tight.end() && c + it->second < 0) empty = true;
    Affine f;
    f.coef = lin;
    f.c0 = c;
    ineqs.push_back(f);
  }
  std::vector<Congruence> cs;
  for (const auto& c : congs) {
    auto n = normalize_cong(c, empty);
    if (!n) continue;
    bool merged = false;
    for (auto& e : cs) {
      if (e.form.coef == n->form.coef) {
        auto m = crt(e, *n, empty);
        if (m) e = *m;
        merged = true;
        break;
      }
    }
    if (!merged) cs.push_back(*n);
  }
  std::sort(cs.begin(), cs.end());
  cs.erase(std::unique(cs.begin(), cs.end()), cs.end());
  congs = cs;
  if (empty) {
    ineqs = {Affine(Rational(-1))};
    congs.clear();
  }
  return !empty;
}

std::string PCell::to_string() const {
  if (ineqs.empty() && congs.empty()) return "true";
  std::string s;
  for (const auto& f : ineqs) {
    if (!s.empty()) s += " && ";
    s += f.to_string() + " >= 0";
  }
  for (const auto& c : congs) {
    if (!s.empty()) s += " && ";
    s += c.form.to_string() + " = 0 mod " + c.mod.get_str();
  }
  return s;
}

PCell intersect(const PCell& a, const PCell& b) {
  PCell r = a;
  r.ineqs.insert(r.ineqs.end(), b.ineqs.begin(), b.ineqs.end());
  r.congs.insert(r.congs.end(), b.congs.begin(), b.congs.end());
  return r;
}

namespace {

// Fourier-Motzkin over the integer-tightened inequalities.
bool fm_feasible(std::vector<Affine> sys) {
  for (;;) {
    PCell c;
    c.ineqs = sys;
    if (!c.normalize()) return false;
    sys = c.ineqs;
    std::set<std::string> vs;
    for (const auto& f : sys) {
      for (const auto& [v, k] : f.coef) vs.insert(v);
    }
    if (vs.empty()) return true;
    std::string best;
    std::size_t best_cost = SIZE_MAX;
    for (const auto& v : vs) {
      std::size_t pos = 0, neg = 0;
      for (const auto& f : sys) {
        Rational k = f.coeff(v);
        if (k > 0) ++pos; else if (k < 0) ++neg;
      }
      if (pos * neg < best_cost || (pos * neg == best_cost && v < best)) {
        best_cost = pos * neg;
        best = v;
      }
    }
    if (best_cost > 4000) return true;  // give up: treat as feasible
    std::vector<Affine> next, pos, neg;
    for (const auto& f : sys) {
      Rational k = f.coeff(best);
      if (k > 0) pos.push_back(f); else if (k < 0) neg.push_back(f); else next.push_back(f);
    }
    for (const auto& P : pos) {
      for (const auto& N : neg) next.push_back((-N.coeff(best)) * P + P.coeff(best) * N);
    }
    sys = next;
  }
}

}  // namespace

bool is_empty(const PCell& cell) {
  PCell c = cell;
  if (!c.normalize()) return true;
  if (c.vars().empty()) return false;
  return !fm_feasible(c.ineqs);
}

CellSet complement(const PCell& cell) {
  PCell c = cell;
  if (!c.normalize()) return {PCell::universe()};
  CellSet out;
  PCell prefix;
  for (const auto& f : c.ineqs) {
    PCell piece = prefix;
    piece.ineqs.push_back(-f - Affine(Rational(1)));
    if (!is_empty(piece)) out.push_back(piece);
    prefix.ineqs.push_back(f);
  }
  for (const auto& g : c.congs) {
    for (Integer r = 1; r < g.mod; ++r) {
      PCell piece = prefix;
      piece.congs.push_back({g.form - Affine(Rational(r)), g.mod});
      if (!is_empty(piece)) out.push_back(piece);
    }
    prefix.congs.push_back(g);
  }
  return out;
}

namespace {

CellSet difference1(const PCell& a, const CellSet& bs) {
  CellSet cur{a};
  for (const auto& b : bs) {
    CellSet comp = complement(b), next;
    for (const auto& p : cur) {
      for (const auto& q : comp) {
        PCell r = intersect(p, q);
        if (r.normalize() && !is_empty(r)) next.push_back(r);
      }
    }
    cur = std::move(next);
    if (cur.empty()) break;
  }
  return cur;
}

CellSet refine_set(const CellSet& a) {
  CellSet out;
  for (const auto& c : a) {
    CellSet add = difference1(c, out);
    out.insert(out.end(), add.begin(), add.end());
  }
  return out;
}

}  // namespace

CellSet cell_algebra(const CellSet& a, const CellSet& b, CellOp op) {
  switch (op) {
    case CellOp::Refine: return refine_set(a);
    case CellOp::Union: {
      CellSet all = a;
      all.insert(all.end(), b.begin(), b.end());
      return refine_set(all);
    }
    case CellOp::Intersection: {
      CellSet ra = refine_set(a), rb = refine_set(b), out;
      for (const auto& x : ra) {
        for (const auto& y : rb) {
          PCell r = intersect(x, y);
          if (r.normalize() && !is_empty(r)) out.push_back(r);
        }
      }
      return out;
    }
    case CellOp::Difference: {
      CellSet out;
      for (const auto& x : refine_set(a)) {
        CellSet d = difference1(x, b);
        out.insert(out.end(), d.begin(), d.end());
      }
      return out;
    }
  }
  return {};
}

namespace {

CellSet cells_rec(const Formula& f, bool positive) {
  auto single = [](std::vector<Affine> ineqs, std::vector<Congruence> congs = {}) {
    PCell c;
    c.ineqs = std::move(ineqs);
    c.congs = std::move(congs);
    return CellSet{c};
  };
  const Affine one(Rational(1));
  switch (f->kind) {
    case FormKind::True: return positive ? single({}) : CellSet{};
    case FormKind::False: return positive ? CellSet{} : single({});
    case FormKind::Not: return cells_rec(f->subs[0], !positive);
    case FormKind::And:
    case FormKind::Or: {
      bool conj = (f->kind == FormKind::And) == positive;
      if (conj) {
        CellSet acc = single({});
        for (const auto& s : f->subs) {
          CellSet part = cells_rec(s, positive), next;
          for (const auto& x : acc) {
            for (const auto& y : part) {
              PCell r = intersect(x, y);
              if (r.normalize()) next.push_back(r);
            }
          }
          acc = std::move(next);
        }
        return acc;
      }
      CellSet acc;
      for (const auto& s : f->subs) {
        CellSet part = cells_rec(s, positive);
        acc.insert(acc.end(), part.begin(), part.end());
      }
      return acc;
    }
    case FormKind::Exists:
    case FormKind::Forall: throw OutsideFragment("quantified value-group condition " + to_string(f));
    default: break;
  }
  const Term& a = f->terms[0];
  if (a->sort.kind != Sort::VG) throw OutsideFragment("non value-group atom " + to_string(f) + " in a Presburger condition");
  Affine d = affine_of_term(f->terms[0]) - affine_of_term(f->terms[1]);
  FormKind k = f->kind;
  if (k == FormKind::Cong) {
    if (positive) return single({}, {{d, f->modulus}});
    CellSet out;
    for (Integer r = 1; r < f->modulus; ++r) out.push_back(single({}, {{d - Affine(Rational(r)), f->modulus}})[0]);
    return out;
  }
  if (!positive) {
    switch (k) {
      case FormKind::Eq: k = FormKind::Ne; break;
      case FormKind::Ne: k = FormKind::Eq; break;
      case FormKind::Le: k = FormKind::Gt; break;
      case FormKind::Lt: k = FormKind::Ge; break;
      case FormKind::Ge: k = FormKind::Lt; break;
      case FormKind::Gt: k = FormKind::Le; break;
      default: break;
    }
  }
  switch (k) {
    case FormKind::Eq: return single({d, -d});
    case FormKind::Ne: {
      CellSet out = single({d - one});
      out.push_back(single({-d - one})[0]);
      return out;
    }
    case FormKind::Ge: return single({d});
    case FormKind::Gt: return single({d - one});
    case FormKind::Le: return single({-d});
    case FormKind::Lt: return single({-d - one});
    default: throw OutsideFragment("unsupported atom " + to_string(f));
  }
}

}  // namespace

CellSet cells_of(const Formula& f) {
  CellSet raw = cells_rec(f, true), nonempty;
  for (auto& c : raw) {
    if (c.normalize() && !is_empty(c)) nonempty.push_back(c);
  }
  return refine_set(nonempty);
}

}  // namespace motint
