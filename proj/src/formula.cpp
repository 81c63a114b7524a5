#include "motint/formula.hpp"

#include <algorithm>
#include <functional>
#include <sstream>

#include "formula_internal.hpp"

namespace motint {

std::string Sort::to_string() const {
  switch (kind) {
    case VF: return "vf";
    case VG: return "vg";
    case RES: return "res(" + std::to_string(depth) + ")";
  }
  return "?";
}

namespace {

std::shared_ptr<TermNode> mk(TermKind k, Sort s) {
  auto t = std::make_shared<TermNode>();
  t->kind = k;
  t->sort = s;
  return t;
}

[[noreturn]] void sort_fail(const std::string& what, const Term& t) {
  throw SortError(what + " in '" + to_string(t) + "'");
}

bool is_literal(const Term& t) { return t->kind == TermKind::Int; }

}  // namespace

namespace term {

Term var(const std::string& name, Sort s) {
  if (s.kind == Sort::RES && s.depth < 1) throw SortError("residue depth must be >= 1 for '" + name + "'");
  auto t = mk(TermKind::Var, s);
  t->name = name;
  return t;
}

Term integer(const Integer& v, Sort s) {
  auto t = mk(TermKind::Int, s);
  t->value = v;
  return t;
}

Term rational(const Rational& v) {
  if (v.get_den() == 1) return integer(v.get_num(), Sort::vf());
  auto t = mk(TermKind::Rat, Sort::vf());
  t->value = v;
  return t;
}

Term pi(Sort s) {
  if (s.kind == Sort::VG) throw SortError("'pi' has no value-group meaning");
  return mk(TermKind::Pi, s);
}

namespace {
Term binary(TermKind k, Term a, Term b) {
  auto t = mk(k, a->sort);
  t->args = {a, b};
  if (a->sort != b->sort) {
    sort_fail("operands of sorts " + a->sort.to_string() + " and " + b->sort.to_string(), t);
  }
  return t;
}
}  // namespace

Term add(Term a, Term b) { return binary(TermKind::Add, a, b); }
Term sub(Term a, Term b) { return binary(TermKind::Sub, a, b); }

Term mul(Term a, Term b) {
  Term t = binary(TermKind::Mul, a, b);
  if (a->sort.kind == Sort::VG && !is_literal(a) && !is_literal(b)) {
    sort_fail("value-group product of two non-constant terms", t);
  }
  return t;
}

Term neg(Term a) {
  if (a->kind == TermKind::Int) return integer(-a->value.get_num(), a->sort);
  if (a->kind == TermKind::Rat) return rational(-a->value);
  auto t = mk(TermKind::Neg, a->sort);
  t->args = {a};
  return t;
}

Term pow(Term a, int e) {
  auto t = mk(TermKind::Pow, a->sort);
  t->args = {a};
  t->n = e;
  if (e < 0) sort_fail("negative exponent", t);
  if (a->sort.kind == Sort::VG) sort_fail("power of a value-group term", t);
  return t;
}

Term ord(Term a) {
  auto t = mk(TermKind::Ord, Sort::vg());
  t->args = {a};
  if (a->sort.kind != Sort::VF) sort_fail("ord applied to a " + a->sort.to_string() + " term", t);
  return t;
}

Term ac(int n, Term a) {
  auto t = mk(TermKind::Ac, Sort::res(n < 1 ? 1 : n));
  t->args = {a};
  t->n = n;
  if (n < 1) sort_fail("ac depth must be >= 1", t);
  if (a->sort.kind != Sort::VF) sort_fail("ac_" + std::to_string(n) + " applied to a " + a->sort.to_string() + " term", t);
  return t;
}

Term proj(int n, int m, Term a) {
  auto t = mk(TermKind::Proj, Sort::res(m < 1 ? 1 : m));
  t->args = {a};
  t->n = n;
  t->m = m;
  if (m < 1 || m > n) sort_fail("projection needs 1 <= m <= n", t);
  if (a->sort != Sort::res(n)) sort_fail("proj_" + std::to_string(n) + "_" + std::to_string(m) + " applied to a " + a->sort.to_string() + " term", t);
  return t;
}

}  // namespace term

namespace fm {

namespace {
std::shared_ptr<FormulaNode> mkf(FormKind k) {
  auto f = std::make_shared<FormulaNode>();
  f->kind = k;
  return f;
}
}  // namespace

Formula truth() { return mkf(FormKind::True); }
Formula falsity() { return mkf(FormKind::False); }

Formula atom(FormKind k, Term a, Term b) {
  auto f = mkf(k);
  f->terms = {a, b};
  if (a->sort != b->sort) {
    throw SortError("comparison of sorts " + a->sort.to_string() + " and " + b->sort.to_string() + " in '" + to_string(Formula(f)) + "'");
  }
  if (k != FormKind::Eq && k != FormKind::Ne && a->sort.kind != Sort::VG) {
    throw SortError("order comparison outside the value group in '" + to_string(Formula(f)) + "'");
  }
  return f;
}

Formula cong(Term a, Term b, const Integer& modulus) {
  auto f = mkf(FormKind::Cong);
  f->terms = {a, b};
  f->modulus = modulus;
  if (a->sort.kind != Sort::VG || b->sort.kind != Sort::VG) {
    throw SortError("congruence outside the value group in '" + to_string(Formula(f)) + "'");
  }
  if (modulus < 1) throw SortError("congruence modulus must be positive");
  return f;
}

Formula neg(Formula g) {
  auto f = mkf(FormKind::Not);
  f->subs = {g};
  return f;
}

Formula conj(std::vector<Formula> fs) {
  if (fs.empty()) return truth();
  if (fs.size() == 1) return fs[0];
  auto f = mkf(FormKind::And);
  f->subs = std::move(fs);
  return f;
}

Formula disj(std::vector<Formula> fs) {
  if (fs.empty()) return falsity();
  if (fs.size() == 1) return fs[0];
  auto f = mkf(FormKind::Or);
  f->subs = std::move(fs);
  return f;
}

namespace {
Formula quant(FormKind k, const std::string& v, Sort s, Formula body, std::optional<Integer> lo, std::optional<Integer> hi) {
  if (s.kind == Sort::VF) throw SortError("quantifier over the valued field for '" + v + "'");
  if (s.kind != Sort::VG && (lo || hi)) throw SortError("bounds on non-value-group quantifier for '" + v + "'");
  auto f = mkf(k);
  f->var = v;
  f->var_sort = s;
  f->subs = {body};
  f->lo = lo;
  f->hi = hi;
  return f;
}
}  // namespace

Formula exists(const std::string& v, Sort s, Formula body, std::optional<Integer> lo, std::optional<Integer> hi) {
  return quant(FormKind::Exists, v, s, body, lo, hi);
}
Formula forall(const std::string& v, Sort s, Formula body, std::optional<Integer> lo, std::optional<Integer> hi) {
  return quant(FormKind::Forall, v, s, body, lo, hi);
}

}  // namespace fm

// ---------------------------------------------------------------- printing

namespace {

int term_prec(const Term& t) {
  switch (t->kind) {
    case TermKind::Add:
    case TermKind::Sub: return 1;
    case TermKind::Mul: return 2;
    case TermKind::Neg: return 3;
    case TermKind::Pow: return 4;
    case TermKind::Int: return t->value < 0 ? 3 : 5;
    case TermKind::Rat: return 3;
    default: return 5;
  }
}

void print_term(std::ostream& os, const Term& t, int ctx) {
  int p = term_prec(t);
  bool paren = p < ctx;
  if (paren) os << "(";
  switch (t->kind) {
    case TermKind::Var: os << t->name; break;
    case TermKind::Int: os << t->value.get_num(); break;
    case TermKind::Rat: os << t->value; break;
    case TermKind::Pi: os << "pi"; break;
    case TermKind::Add:
      print_term(os, t->args[0], 1);
      os << " + ";
      print_term(os, t->args[1], 2);
      break;
    case TermKind::Sub:
      print_term(os, t->args[0], 1);
      os << " - ";
      print_term(os, t->args[1], 2);
      break;
    case TermKind::Mul:
      print_term(os, t->args[0], 2);
      os << " * ";
      print_term(os, t->args[1], 3);
      break;
    case TermKind::Neg:
      os << "-";
      print_term(os, t->args[0], 4);
      break;
    case TermKind::Pow:
      print_term(os, t->args[0], 5);
      os << "^" << t->n;
      break;
    case TermKind::Ord:
      os << "ord(";
      print_term(os, t->args[0], 0);
      os << ")";
      break;
    case TermKind::Ac:
      os << "ac_" << t->n << "(";
      print_term(os, t->args[0], 0);
      os << ")";
      break;
    case TermKind::Proj:
      os << "proj_" << t->n << "_" << t->m << "(";
      print_term(os, t->args[0], 0);
      os << ")";
      break;
  }
  if (paren) os << ")";
}

int form_prec(const Formula& f) {
  switch (f->kind) {
    case FormKind::Exists:
    case FormKind::Forall: return 0;
    case FormKind::Or: return 1;
    case FormKind::And: return 2;
    case FormKind::Not: return 3;
    default: return 4;
  }
}

const char* relop(FormKind k) {
  switch (k) {
    case FormKind::Eq: return " = ";
    case FormKind::Ne: return " != ";
    case FormKind::Le: return " <= ";
    case FormKind::Lt: return " < ";
    case FormKind::Ge: return " >= ";
    case FormKind::Gt: return " > ";
    case FormKind::Cong: return " = ";
    default: return " ? ";
  }
}

void print_formula(std::ostream& os, const Formula& f, int ctx) {
  int p = form_prec(f);
  bool paren = p < ctx;
  if (paren) os << "(";
  switch (f->kind) {
    case FormKind::True: os << "true"; break;
    case FormKind::False: os << "false"; break;
    case FormKind::Eq:
    case FormKind::Ne:
    case FormKind::Le:
    case FormKind::Lt:
    case FormKind::Ge:
    case FormKind::Gt:
    case FormKind::Cong:
      print_term(os, f->terms[0], 0);
      os << relop(f->kind);
      print_term(os, f->terms[1], 0);
      if (f->kind == FormKind::Cong) os << " mod " << f->modulus;
      break;
    case FormKind::Not:
      os << "!";
      print_formula(os, f->subs[0], 5);
      break;
    case FormKind::And:
    case FormKind::Or:
      for (std::size_t i = 0; i < f->subs.size(); ++i) {
        if (i) os << (f->kind == FormKind::And ? " && " : " || ");
        print_formula(os, f->subs[i], p + 1);
      }
      break;
    case FormKind::Exists:
    case FormKind::Forall:
      os << (f->kind == FormKind::Exists ? "exists " : "forall ") << f->var << ":" << f->var_sort.to_string();
      if (f->lo || f->hi) {
        os << " in [" << (f->lo ? f->lo->get_str() : std::string("-inf")) << ", "
           << (f->hi ? f->hi->get_str() : std::string("inf")) << "]";
      }
      os << ". ";
      print_formula(os, f->subs[0], 0);
      break;
  }
  if (paren) os << ")";
}

}  // namespace

std::string to_string(const Term& t) {
  std::ostringstream os;
  print_term(os, t, 0);
  return os.str();
}

std::string body_string(const Formula& f) {
  std::ostringstream os;
  print_formula(os, f, 0);
  return os.str();
}

std::string to_string(const Formula& f) {
  std::vector<std::string> decls;
  std::set<std::string> open = detail::undetermined_free_vars(f);
  for (const auto& v : free_vars(f)) {
    if (open.count(v.name)) decls.push_back(v.name + ":" + v.sort.to_string());
  }
  std::string body = body_string(f);
  if (decls.empty()) return body;
  std::string head = "decl ";
  for (std::size_t i = 0; i < decls.size(); ++i) {
    if (i) head += ", ";
    head += decls[i];
  }
  return head + "; " + body;
}

// ------------------------------------------------------------ s-expressions

namespace {

std::string sort_atom(Sort s) {
  if (s.kind == Sort::RES) return "res" + std::to_string(s.depth);
  return s.to_string();
}

void sx_term(std::ostream& os, const Term& t) {
  switch (t->kind) {
    case TermKind::Var: os << t->name; return;
    case TermKind::Int: os << t->value.get_num(); return;
    case TermKind::Rat: os << t->value; return;
    case TermKind::Pi: os << "pi"; return;
    default: break;
  }
  os << "(";
  switch (t->kind) {
    case TermKind::Add: os << "+"; break;
    case TermKind::Sub: os << "-"; break;
    case TermKind::Mul: os << "*"; break;
    case TermKind::Neg: os << "neg"; break;
    case TermKind::Pow: os << "^"; break;
    case TermKind::Ord: os << "ord"; break;
    case TermKind::Ac: os << "ac " << t->n; break;
    case TermKind::Proj: os << "proj " << t->n << " " << t->m; break;
    default: break;
  }
  for (const auto& a : t->args) {
    os << " ";
    sx_term(os, a);
  }
  if (t->kind == TermKind::Pow) os << " " << t->n;
  os << ")";
}

void sx_formula(std::ostream& os, const Formula& f) {
  switch (f->kind) {
    case FormKind::True: os << "true"; return;
    case FormKind::False: os << "false"; return;
    case FormKind::Eq:
    case FormKind::Ne:
    case FormKind::Le:
    case FormKind::Lt:
    case FormKind::Ge:
    case FormKind::Gt: {
      std::string op = relop(f->kind);
      op = op.substr(1, op.size() - 2);
      os << "(" << op << " ";
      sx_term(os, f->terms[0]);
      os << " ";
      sx_term(os, f->terms[1]);
      os << ")";
      return;
    }
    case FormKind::Cong:
      os << "(cong ";
      sx_term(os, f->terms[0]);
      os << " ";
      sx_term(os, f->terms[1]);
      os << " " << f->modulus << ")";
      return;
    case FormKind::Not:
      os << "(not ";
      sx_formula(os, f->subs[0]);
      os << ")";
      return;
    case FormKind::And:
    case FormKind::Or:
      os << (f->kind == FormKind::And ? "(and" : "(or");
      for (const auto& s : f->subs) {
        os << " ";
        sx_formula(os, s);
      }
      os << ")";
      return;
    case FormKind::Exists:
    case FormKind::Forall:
      os << "(" << (f->kind == FormKind::Exists ? "exists" : "forall") << " " << f->var << " " << sort_atom(f->var_sort);
      if (f->var_sort.kind == Sort::VG) {
        os << " " << (f->lo ? f->lo->get_str() : "-inf") << " " << (f->hi ? f->hi->get_str() : "inf");
      }
      os << " ";
      sx_formula(os, f->subs[0]);
      os << ")";
      return;
  }
}

}  // namespace

std::string to_sexpr(const Formula& f) {
  std::ostringstream os;
  std::set<std::string> open = detail::undetermined_free_vars(f);
  std::vector<FreeVar> decl;
  for (const auto& v : free_vars(f)) {
    if (open.count(v.name)) decl.push_back(v);
  }
  if (!decl.empty()) {
    os << "(decl (";
    for (std::size_t i = 0; i < decl.size(); ++i) {
      if (i) os << " ";
      os << "(" << decl[i].name << " " << sort_atom(decl[i].sort) << ")";
    }
    os << ") ";
  }
  sx_formula(os, f);
  if (!decl.empty()) os << ")";
  return os.str();
}

// ------------------------------------------------------------ free variables

namespace {

void collect(const Term& t, std::vector<FreeVar>& out, std::set<std::string>& seen, const std::set<std::string>& bound) {
  if (t->kind == TermKind::Var) {
    if (!bound.count(t->name) && seen.insert(t->name).second) out.push_back({t->name, t->sort});
    return;
  }
  for (const auto& a : t->args) collect(a, out, seen, bound);
}

void collect(const Formula& f, std::vector<FreeVar>& out, std::set<std::string>& seen, std::set<std::string> bound) {
  for (const auto& t : f->terms) collect(t, out, seen, bound);
  if (f->kind == FormKind::Exists || f->kind == FormKind::Forall) bound.insert(f->var);
  for (const auto& s : f->subs) collect(s, out, seen, bound);
}

}  // namespace

std::vector<FreeVar> free_vars(const Formula& f) {
  std::vector<FreeVar> out;
  std::set<std::string> seen;
  collect(f, out, seen, {});
  return out;
}

std::vector<FreeVar> free_vars(const Term& t) {
  std::vector<FreeVar> out;
  std::set<std::string> seen;
  collect(t, out, seen, {});
  return out;
}

std::string Frame::to_string() const {
  std::string s = "h[" + std::to_string(n) + ", (";
  for (std::size_t i = 0; i < m.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(m[i]);
  }
  return s + "), " + std::to_string(r) + "]";
}

Frame frame(const Formula& f) {
  Frame fr;
  for (const auto& v : free_vars(f)) {
    switch (v.sort.kind) {
      case Sort::VF:
        fr.vf.push_back(v);
        ++fr.n;
        break;
      case Sort::RES:
        fr.res.push_back(v);
        fr.m.push_back(v.sort.depth);
        break;
      case Sort::VG:
        fr.vg.push_back(v);
        ++fr.r;
        break;
    }
  }
  return fr;
}

// -------------------------------------------------------------- substitution

bool mentions(const Term& t, const std::string& var) {
  if (t->kind == TermKind::Var) return t->name == var;
  for (const auto& a : t->args) {
    if (mentions(a, var)) return true;
  }
  return false;
}

bool mentions(const Formula& f, const std::string& var) {
  for (const auto& t : f->terms) {
    if (mentions(t, var)) return true;
  }
  if ((f->kind == FormKind::Exists || f->kind == FormKind::Forall) && f->var == var) return false;
  for (const auto& s : f->subs) {
    if (mentions(s, var)) return true;
  }
  return false;
}

namespace {

Term retype_literal(const Term& t, Sort s) {
  if (t->kind == TermKind::Int && t->sort != s) return term::integer(t->value.get_num(), s);
  if (t->kind == TermKind::Pi && t->sort != s) return term::pi(s);
  return t;
}

Term rebuild(const TermNode& n, std::vector<Term> args) {
  switch (n.kind) {
    case TermKind::Add: return term::add(args[0], args[1]);
    case TermKind::Sub: return term::sub(args[0], args[1]);
    case TermKind::Mul: return term::mul(args[0], args[1]);
    case TermKind::Neg: return term::neg(args[0]);
    case TermKind::Pow: return term::pow(args[0], n.n);
    case TermKind::Ord: return term::ord(args[0]);
    case TermKind::Ac: return term::ac(n.n, args[0]);
    case TermKind::Proj: return term::proj(n.n, n.m, args[0]);
    default: break;
  }
  throw SortError("internal: rebuild of leaf term");
}

void add_names(const Term& t, std::set<std::string>& out) {
  if (t->kind == TermKind::Var) out.insert(t->name);
  for (const auto& a : t->args) add_names(a, out);
}

void add_names(const Formula& f, std::set<std::string>& out) {
  for (const auto& t : f->terms) add_names(t, out);
  if (!f->var.empty()) out.insert(f->var);
  for (const auto& s : f->subs) add_names(s, out);
}

Formula rebuild_formula(const Formula& f, const std::vector<Term>& terms, const std::vector<Formula>& subs) {
  switch (f->kind) {
    case FormKind::True:
    case FormKind::False: return f;
    case FormKind::Cong: return fm::cong(terms[0], terms[1], f->modulus);
    case FormKind::Eq:
    case FormKind::Ne:
    case FormKind::Le:
    case FormKind::Lt:
    case FormKind::Ge:
    case FormKind::Gt: {
      Term a = terms[0], b = terms[1];
      // A literal side adopts the sort of the other side.
      if (a->sort != b->sort) {
        if (a->kind == TermKind::Int || a->kind == TermKind::Pi) a = retype_literal(a, b->sort);
        if (b->kind == TermKind::Int || b->kind == TermKind::Pi) b = retype_literal(b, a->sort);
      }
      return fm::atom(f->kind, a, b);
    }
    case FormKind::Not: return fm::neg(subs[0]);
    case FormKind::And: return fm::conj(subs);
    case FormKind::Or: return fm::disj(subs);
    case FormKind::Exists: return fm::exists(f->var, f->var_sort, subs[0], f->lo, f->hi);
    case FormKind::Forall: return fm::forall(f->var, f->var_sort, subs[0], f->lo, f->hi);
  }
  return f;
}

}  // namespace

Term substitute(const Term& t, const std::map<std::string, Term>& b) {
  if (t->kind == TermKind::Var) {
    auto it = b.find(t->name);
    if (it == b.end()) return t;
    Term r = retype_literal(it->second, t->sort);
    if (r->sort != t->sort) {
      throw SortError("binding " + t->name + ":" + t->sort.to_string() + " to '" + to_string(r) + "' of sort " + r->sort.to_string());
    }
    return r;
  }
  if (t->args.empty()) return t;
  std::vector<Term> args;
  bool changed = false;
  for (const auto& a : t->args) {
    args.push_back(substitute(a, b));
    changed |= args.back() != a;
  }
  if (!changed) return t;
  // Literals inside arithmetic adopt the sort of their siblings.
  if (args.size() == 2 && args[0]->sort != args[1]->sort) {
    args[0] = retype_literal(args[0], args[1]->sort);
    args[1] = retype_literal(args[1], args[0]->sort);
  }
  return rebuild(*t, std::move(args));
}

Formula substitute(const Formula& f, const std::map<std::string, Term>& b) {
  if (b.empty()) return f;
  if (f->kind == FormKind::Exists || f->kind == FormKind::Forall) {
    std::map<std::string, Term> inner = b;
    inner.erase(f->var);
    if (inner.empty()) return f;
    const Formula& body = f->subs[0];
    bool capture = false;
    for (const auto& [name, t] : inner) {
      if (mentions(body, name) && mentions(t, f->var)) capture = true;
    }
    std::string v = f->var;
    Formula nb = body;
    if (capture) {
      std::set<std::string> used;
      add_names(body, used);
      for (const auto& [name, t] : inner) {
        used.insert(name);
        add_names(t, used);
      }
      int k = 1;
      while (used.count(f->var + "_" + std::to_string(k))) ++k;
      v = f->var + "_" + std::to_string(k);
      nb = substitute(body, {{f->var, term::var(v, f->var_sort)}});
    }
    nb = substitute(nb, inner);
    if (f->kind == FormKind::Exists) return fm::exists(v, f->var_sort, nb, f->lo, f->hi);
    return fm::forall(v, f->var_sort, nb, f->lo, f->hi);
  }
  std::vector<Term> terms;
  bool changed = false;
  for (const auto& t : f->terms) {
    terms.push_back(substitute(t, b));
    changed |= terms.back() != t;
  }
  std::vector<Formula> subs;
  for (const auto& s : f->subs) {
    subs.push_back(substitute(s, b));
    changed |= subs.back() != s;
  }
  if (!changed) return f;
  return rebuild_formula(f, terms, subs);
}

Formula rename(const Formula& f, const std::map<std::string, std::string>& names) {
  std::map<std::string, Term> b;
  for (const auto& v : free_vars(f)) {
    auto it = names.find(v.name);
    if (it != names.end()) b[v.name] = term::var(it->second, v.sort);
  }
  return substitute(f, b);
}

// ----------------------------------------------------------------- equality

bool structurally_equal(const Term& a, const Term& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->sort != b->sort || a->n != b->n || a->m != b->m) return false;
  if (a->name != b->name || a->value != b->value || a->args.size() != b->args.size()) return false;
  for (std::size_t i = 0; i < a->args.size(); ++i) {
    if (!structurally_equal(a->args[i], b->args[i])) return false;
  }
  return true;
}

bool structurally_equal(const Formula& a, const Formula& b) {
  if (a == b) return true;
  if (a->kind != b->kind || a->modulus != b->modulus || a->var != b->var || a->var_sort != b->var_sort) return false;
  if (a->lo != b->lo || a->hi != b->hi) return false;
  if (a->terms.size() != b->terms.size() || a->subs.size() != b->subs.size()) return false;
  for (std::size_t i = 0; i < a->terms.size(); ++i) {
    if (!structurally_equal(a->terms[i], b->terms[i])) return false;
  }
  for (std::size_t i = 0; i < a->subs.size(); ++i) {
    if (!structurally_equal(a->subs[i], b->subs[i])) return false;
  }
  return true;
}

// -------------------------------------------------------------- sort checks

void check_sorts(const Term& t) {
  for (const auto& a : t->args) check_sorts(a);
  if (t->kind == TermKind::Var || t->kind == TermKind::Int || t->kind == TermKind::Rat || t->kind == TermKind::Pi) {
    if (t->kind == TermKind::Rat && t->sort.kind != Sort::VF) sort_fail("rational literal outside the valued field", t);
    if (t->kind == TermKind::Pi && t->sort.kind == Sort::VG) sort_fail("pi in the value group", t);
    if (t->sort.kind == Sort::RES && t->sort.depth < 1) sort_fail("residue depth below 1", t);
    return;
  }
  // Rebuilding re-runs every constructor check.
  Term r = rebuild(*t, t->args);
  if (r->sort != t->sort) sort_fail("declared sort " + t->sort.to_string() + " but computed " + r->sort.to_string(), t);
}

void check_sorts(const Formula& f) {
  for (const auto& t : f->terms) check_sorts(t);
  for (const auto& s : f->subs) check_sorts(s);
  if (f->kind == FormKind::True || f->kind == FormKind::False) return;
  if (f->terms.size() == 2 && f->terms[0]->sort != f->terms[1]->sort) {
    throw SortError("comparison of sorts " + f->terms[0]->sort.to_string() + " and " + f->terms[1]->sort.to_string() +
                    " in '" + body_string(f) + "'");
  }
  rebuild_formula(f, f->terms, f->subs);
  // Bound variables must be used at their declared sort.
  if (f->kind == FormKind::Exists || f->kind == FormKind::Forall) {
    std::function<void(const Term&)> chk = [&](const Term& t) {
      if (t->kind == TermKind::Var && t->name == f->var && t->sort != f->var_sort) {
        throw SortError("bound variable '" + f->var + "' used at sort " + t->sort.to_string());
      }
      for (const auto& a : t->args) chk(a);
    };
    std::function<void(const Formula&)> walk = [&](const Formula& g) {
      for (const auto& t : g->terms) chk(t);
      if ((g->kind == FormKind::Exists || g->kind == FormKind::Forall) && g->var == f->var) return;
      for (const auto& s : g->subs) walk(s);
    };
    walk(f->subs[0]);
  }
}

// ------------------------------------------------------------ simplification

bool is_atom(const Formula& f) {
  switch (f->kind) {
    case FormKind::Eq:
    case FormKind::Ne:
    case FormKind::Le:
    case FormKind::Lt:
    case FormKind::Ge:
    case FormKind::Gt:
    case FormKind::Cong: return true;
    default: return false;
  }
}

std::vector<Formula> conjuncts(const Formula& f) {
  if (f->kind == FormKind::And) return f->subs;
  if (f->kind == FormKind::True) return {};
  return {f};
}

namespace {

bool has_ord(const Term& t) {
  if (t->kind == TermKind::Ord) return true;
  for (const auto& a : t->args) {
    if (has_ord(a)) return true;
  }
  return false;
}

std::optional<Integer> vg_constant(const Term& t) {
  switch (t->kind) {
    case TermKind::Int: return t->value.get_num();
    case TermKind::Add:
    case TermKind::Sub:
    case TermKind::Mul: {
      auto a = vg_constant(t->args[0]), b = vg_constant(t->args[1]);
      if (!a || !b) return std::nullopt;
      if (t->kind == TermKind::Add) return *a + *b;
      if (t->kind == TermKind::Sub) return *a - *b;
      return *a * *b;
    }
    case TermKind::Neg: {
      auto a = vg_constant(t->args[0]);
      if (!a) return std::nullopt;
      return -*a;
    }
    default: return std::nullopt;
  }
}

// Integer literal arithmetic, also through proj (RES) and as VF constants.
std::optional<Rational> ground_value(const Term& t) {
  switch (t->kind) {
    case TermKind::Int:
    case TermKind::Rat: return t->value;
    case TermKind::Add:
    case TermKind::Sub:
    case TermKind::Mul: {
      auto a = ground_value(t->args[0]), b = ground_value(t->args[1]);
      if (!a || !b) return std::nullopt;
      if (t->kind == TermKind::Add) return Rational(*a + *b);
      if (t->kind == TermKind::Sub) return Rational(*a - *b);
      return Rational(*a * *b);
    }
    case TermKind::Neg: {
      auto a = ground_value(t->args[0]);
      if (!a) return std::nullopt;
      return Rational(-*a);
    }
    case TermKind::Pow: {
      auto a = ground_value(t->args[0]);
      if (!a) return std::nullopt;
      Rational r = 1;
      for (int i = 0; i < t->n; ++i) r *= *a;
      return r;
    }
    case TermKind::Proj: {
      auto a = ground_value(t->args[0]);
      if (!a || a->get_den() != 1) return std::nullopt;
      return a;
    }
    default: return std::nullopt;
  }
}

std::optional<Rational> unit_value(const Term& t) {
  if (t->sort.kind != Sort::RES) return std::nullopt;
  switch (t->kind) {
    case TermKind::Ac: {
      auto v = ground_value(t->args[0]);
      if (!v || *v == 0) return std::nullopt;
      return v;
    }
    case TermKind::Int:
      if (t->value == 1 || t->value == -1) return t->value;
      return std::nullopt;
    case TermKind::Neg: {
      auto a = unit_value(t->args[0]);
      if (!a) return std::nullopt;
      return Rational(-*a);
    }
    case TermKind::Mul: {
      auto a = unit_value(t->args[0]), b = unit_value(t->args[1]);
      if (!a || !b) return std::nullopt;
      return Rational(*a * *b);
    }
    case TermKind::Pow: {
      auto a = unit_value(t->args[0]);
      if (!a) return std::nullopt;
      Rational r = 1;
      for (int i = 0; i < t->n; ++i) r *= *a;
      return r;
    }
    case TermKind::Proj: return unit_value(t->args[0]);
    default: return std::nullopt;
  }
}

bool has_ord_of_zero(const Term& t) {
  if (t->kind == TermKind::Ord) {
    auto v = ground_value(t->args[0]);
    if (v && *v == 0) return true;
  }
  for (const auto& a : t->args) {
    if (has_ord_of_zero(a)) return true;
  }
  return false;
}

Integer mod_floor(const Integer& a, const Integer& m) {
  Integer r = a % m;
  if (r < 0) r += m;
  return r;
}

Formula simplify_atom(const Formula& f) {
  const Term& a = f->terms[0];
  const Term& b = f->terms[1];
  if (has_ord_of_zero(a) || has_ord_of_zero(b)) return fm::falsity();
  if (a->sort.kind == Sort::RES && (f->kind == FormKind::Eq || f->kind == FormKind::Ne)) {
    // a unit is never 0; equal angular components are equal everywhere
    auto ua = unit_value(a), ub = unit_value(b);
    auto za = ground_value(a), zb = ground_value(b);
    bool decided = false, eq = false;
    if ((ua && zb && *zb == 0) || (ub && za && *za == 0)) decided = true;
    if (ua && ub && *ua == *ub) decided = eq = true;
    if (decided) return (f->kind == FormKind::Eq) == eq ? fm::truth() : fm::falsity();
    auto x = ground_value(a), y = ground_value(b);
    if (x && y && x->get_den() == 1 && y->get_den() == 1) {
      Integer d = abs(x->get_num() - y->get_num());
      // 0 and units are p-independent
      if (d == 0) return f->kind == FormKind::Eq ? fm::truth() : fm::falsity();
      if (d == 1) return f->kind == FormKind::Eq ? fm::falsity() : fm::truth();
    }
  }
  if (a->sort.kind == Sort::VG) {
    auto x = vg_constant(a), y = vg_constant(b);
    if (x && y) {
      bool v = false;
      switch (f->kind) {
        case FormKind::Eq: v = *x == *y; break;
        case FormKind::Ne: v = *x != *y; break;
        case FormKind::Le: v = *x <= *y; break;
        case FormKind::Lt: v = *x < *y; break;
        case FormKind::Ge: v = *x >= *y; break;
        case FormKind::Gt: v = *x > *y; break;
        case FormKind::Cong: v = mod_floor(*x - *y, f->modulus) == 0; break;
        default: break;
      }
      return v ? fm::truth() : fm::falsity();
    }
    if (f->kind == FormKind::Cong && f->modulus == 1) return fm::truth();
  }
  if (!has_ord(a) && !has_ord(b) && structurally_equal(a, b)) {
    switch (f->kind) {
      case FormKind::Eq:
      case FormKind::Le:
      case FormKind::Ge:
      case FormKind::Cong: return fm::truth();
      case FormKind::Ne:
      case FormKind::Lt:
      case FormKind::Gt: return fm::falsity();
      default: break;
    }
  }
  return f;
}

}  // namespace

std::optional<Rational> res_unit_value(const Term& t) { return unit_value(t); }

Formula simplify(const Formula& f) {
  switch (f->kind) {
    case FormKind::True:
    case FormKind::False: return f;
    case FormKind::Not: {
      Formula g = simplify(f->subs[0]);
      if (g->kind == FormKind::True) return fm::falsity();
      if (g->kind == FormKind::False) return fm::truth();
      if (g->kind == FormKind::Not) return g->subs[0];
      return fm::neg(g);
    }
    case FormKind::And:
    case FormKind::Or: {
      const bool is_and = f->kind == FormKind::And;
      const FormKind unit = is_and ? FormKind::True : FormKind::False;
      const FormKind absorb = is_and ? FormKind::False : FormKind::True;
      std::vector<std::pair<std::string, Formula>> items;
      std::function<void(const Formula&)> add = [&](const Formula& g) {
        if (g->kind == f->kind) {
          for (const auto& s : g->subs) add(s);
          return;
        }
        items.emplace_back(body_string(g), g);
      };
      for (const auto& s : f->subs) add(simplify(s));
      std::vector<Formula> out;
      std::set<std::string> seen;
      std::sort(items.begin(), items.end(), [](const auto& x, const auto& y) { return x.first < y.first; });
      for (const auto& [key, g] : items) {
        if (g->kind == absorb) return g;
        if (g->kind == unit) continue;
        if (seen.insert(key).second) out.push_back(g);
      }
      // Complementary literal pair.
      for (const auto& g : out) {
        if (g->kind == FormKind::Not && seen.count(body_string(g->subs[0]))) return is_and ? fm::falsity() : fm::truth();
      }
      if (out.empty()) return is_and ? fm::truth() : fm::falsity();
      return is_and ? fm::conj(out) : fm::disj(out);
    }
    case FormKind::Exists:
    case FormKind::Forall: {
      Formula body = simplify(f->subs[0]);
      bool empty_range = f->lo && f->hi && *f->lo > *f->hi;
      if (empty_range) return f->kind == FormKind::Exists ? fm::falsity() : fm::truth();
      if (!mentions(body, f->var)) return body;
      if (f->kind == FormKind::Exists) return fm::exists(f->var, f->var_sort, body, f->lo, f->hi);
      return fm::forall(f->var, f->var_sort, body, f->lo, f->hi);
    }
    default: return simplify_atom(f);
  }
}

Term map_term(const Term& t, const std::function<std::optional<Term>(const Term&)>& fn) {
  if (auto r = fn(t)) return *r;
  std::vector<Term> args;
  for (const auto& a : t->args) args.push_back(map_term(a, fn));
  switch (t->kind) {
    case TermKind::Var:
    case TermKind::Int:
    case TermKind::Rat:
    case TermKind::Pi: return t;
    case TermKind::Add: return term::add(args[0], args[1]);
    case TermKind::Sub: return term::sub(args[0], args[1]);
    case TermKind::Mul: return term::mul(args[0], args[1]);
    case TermKind::Neg: return term::neg(args[0]);
    case TermKind::Pow: return term::pow(args[0], t->n);
    case TermKind::Ord: return term::ord(args[0]);
    case TermKind::Ac: return term::ac(t->n, args[0]);
    case TermKind::Proj: return term::proj(t->n, t->m, args[0]);
  }
  return t;
}

Formula map_formula(const Formula& f, const std::function<std::optional<Term>(const Term&)>& fn) {
  switch (f->kind) {
    case FormKind::True:
    case FormKind::False: return f;
    case FormKind::Cong: return fm::cong(map_term(f->terms[0], fn), map_term(f->terms[1], fn), f->modulus);
    case FormKind::Not: return fm::neg(map_formula(f->subs[0], fn));
    case FormKind::And:
    case FormKind::Or: {
      std::vector<Formula> s;
      for (const auto& g : f->subs) s.push_back(map_formula(g, fn));
      return f->kind == FormKind::And ? fm::conj(s) : fm::disj(s);
    }
    case FormKind::Exists: return fm::exists(f->var, f->var_sort, map_formula(f->subs[0], fn), f->lo, f->hi);
    case FormKind::Forall: return fm::forall(f->var, f->var_sort, map_formula(f->subs[0], fn), f->lo, f->hi);
    default: return fm::atom(f->kind, map_term(f->terms[0], fn), map_term(f->terms[1], fn));
  }
}

}  // namespace motint
