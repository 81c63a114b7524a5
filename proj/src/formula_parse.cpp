// Parsers (infix and s-expression) and sort inference for formulas.
#include <cctype>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <set>

#include "formula_internal.hpp"
#include "motint/formula.hpp"

namespace motint {

namespace {

struct RawTerm {
  TermKind kind = TermKind::Var;
  std::string name;
  Rational value;
  int n = 0, m = 0;
  std::vector<RawTerm> args;
  std::string text;
  int uf = -1;
};

struct RawFormula {
  FormKind kind = FormKind::True;
  std::vector<RawTerm> terms;
  Integer modulus;
  std::vector<RawFormula> subs;
  std::string var;
  Sort var_sort;
  std::optional<Integer> lo, hi;
  std::string text;
};

struct RawInput {
  std::map<std::string, Sort> decls;
  RawFormula body;
};

// ------------------------------------------------------------------- lexer

enum class Tok { Ident, Int, Rat, Sym, End };

struct Token {
  Tok kind;
  std::string text;
  std::size_t pos;
};

std::vector<Token> lex(const std::string& s) {
  std::vector<Token> out;
  std::size_t i = 0;
  while (i < s.size()) {
    char c = s[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      ++i;
      continue;
    }
    std::size_t start = i;
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      while (i < s.size() && (std::isalnum(static_cast<unsigned char>(s[i])) || s[i] == '_' || s[i] == '\'')) ++i;
      out.push_back({Tok::Ident, s.substr(start, i - start), start});
      continue;
    }
    if (std::isdigit(static_cast<unsigned char>(c))) {
      while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
      if (i + 1 < s.size() && s[i] == '/' && std::isdigit(static_cast<unsigned char>(s[i + 1]))) {
        ++i;
        while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i;
        out.push_back({Tok::Rat, s.substr(start, i - start), start});
      } else {
        out.push_back({Tok::Int, s.substr(start, i - start), start});
      }
      continue;
    }
    static const char* two[] = {"!=", "<=", ">=", "&&", "||", "=="};
    bool matched = false;
    for (const char* t : two) {
      if (s.compare(i, 2, t) == 0) {
        out.push_back({Tok::Sym, t, start});
        i += 2;
        matched = true;
        break;
      }
    }
    if (matched) continue;
    if (std::string("()[],:;.+-*^=<>!").find(c) != std::string::npos) {
      out.push_back({Tok::Sym, std::string(1, c), start});
      ++i;
      continue;
    }
    throw ParseError("unexpected character '" + std::string(1, c) + "'", i);
  }
  out.push_back({Tok::End, "", s.size()});
  return out;
}

bool parse_fn_name(const std::string& id, const char* prefix, int count, int* out) {
  std::size_t plen = std::char_traits<char>::length(prefix);
  if (id.compare(0, plen, prefix) != 0) return false;
  std::size_t i = plen;
  for (int k = 0; k < count; ++k) {
    if (k > 0) {
      if (i >= id.size() || id[i] != '_') return false;
      ++i;
    }
    std::size_t s = i;
    while (i < id.size() && std::isdigit(static_cast<unsigned char>(id[i]))) ++i;
    if (s == i || i - s > 6) return false;
    out[k] = std::stoi(id.substr(s, i - s));
  }
  return i == id.size();
}

const std::set<std::string> kReserved = {"ord", "pi", "true", "false", "exists", "forall", "mod", "decl", "in", "inf"};

bool is_reserved(const std::string& id) {
  int tmp[2];
  return kReserved.count(id) || parse_fn_name(id, "ac_", 1, tmp) || parse_fn_name(id, "proj_", 2, tmp);
}

// ------------------------------------------------------------ infix parser

class InfixParser {
 public:
  explicit InfixParser(const std::string& s) : src_(s), toks_(lex(s)) {}

  RawInput input() {
    RawInput in;
    if (peek_ident("decl")) {
      ++i_;
      for (;;) {
        std::string name = ident("variable name");
        expect(":");
        in.decls[name] = sort();
        if (accept(",")) continue;
        expect(";");
        break;
      }
    }
    in.body = formula();
    if (cur().kind != Tok::End) fail("unexpected '" + cur().text + "'");
    return in;
  }

  RawTerm whole_term() {
    RawTerm t = sum();
    if (cur().kind != Tok::End) fail("unexpected '" + cur().text + "'");
    return t;
  }

 private:
  const Token& cur() const { return toks_[i_]; }
  bool peek_sym(const char* s) const { return cur().kind == Tok::Sym && cur().text == s; }
  bool peek_ident(const char* s) const { return cur().kind == Tok::Ident && cur().text == s; }
  bool accept(const char* s) {
    if (peek_sym(s)) {
      ++i_;
      return true;
    }
    return false;
  }
  [[noreturn]] void fail(const std::string& msg) {
    throw ParseError(msg, cur().pos);
  }
  void expect(const char* s) {
    if (!accept(s)) fail(std::string("expected '") + s + "'" + (cur().kind == Tok::End ? " before end of input" : ", found '" + cur().text + "'"));
  }
  std::string ident(const char* what) {
    if (cur().kind != Tok::Ident || is_reserved(cur().text)) fail(std::string("expected ") + what);
    return toks_[i_++].text;
  }
  Integer integer() {
    bool neg = accept("-");
    if (cur().kind != Tok::Int) fail("expected integer");
    Integer v(toks_[i_++].text);
    return neg ? Integer(-v) : v;
  }
  std::string text_from(std::size_t tok_start) const {
    std::size_t b = toks_[tok_start].pos;
    std::size_t e = i_ > 0 ? toks_[i_ - 1].pos + toks_[i_ - 1].text.size() : b;
    return src_.substr(b, e > b ? e - b : 0);
  }

  Sort sort() {
    std::size_t at = cur().pos;
    if (accept_ident("vf")) return Sort::vf();
    if (accept_ident("vg")) return Sort::vg();
    if (accept_ident("res")) {
      expect("(");
      Integer n = integer();
      expect(")");
      if (n < 1 || n > 1000000) throw ParseError("residue depth must be positive", at);
      return Sort::res(static_cast<int>(n.get_si()));
    }
    fail("expected sort (vf, vg or res(n))");
  }
  bool accept_ident(const char* s) {
    if (peek_ident(s)) {
      ++i_;
      return true;
    }
    return false;
  }

  RawFormula formula() {
    if (peek_ident("exists") || peek_ident("forall")) return quantifier();
    return disjunction();
  }

  RawFormula quantifier() {
    std::size_t start = i_;
    RawFormula f;
    f.kind = cur().text == "exists" ? FormKind::Exists : FormKind::Forall;
    ++i_;
    f.var = ident("bound variable");
    expect(":");
    std::size_t sort_pos = cur().pos;
    f.var_sort = sort();
    if (f.var_sort.kind == Sort::VF) throw ParseError("quantifiers over the valued field are not supported", sort_pos);
    if (accept_ident("in")) {
      if (f.var_sort.kind != Sort::VG) fail("bounds are only allowed on value-group quantifiers");
      expect("[");
      f.lo = bound();
      expect(",");
      f.hi = bound();
      expect("]");
    }
    expect(".");
    f.subs.push_back(formula());
    f.text = text_from(start);
    return f;
  }

  std::optional<Integer> bound() {
    if (accept_ident("inf")) return std::nullopt;
    if (peek_sym("-") && toks_[i_ + 1].kind == Tok::Ident && toks_[i_ + 1].text == "inf") {
      i_ += 2;
      return std::nullopt;
    }
    return integer();
  }

  RawFormula disjunction() {
    std::size_t start = i_;
    RawFormula first = conjunction();
    if (!peek_sym("||")) return first;
    RawFormula f;
    f.kind = FormKind::Or;
    f.subs.push_back(std::move(first));
    while (accept("||")) f.subs.push_back(conjunction());
    f.text = text_from(start);
    return f;
  }

  RawFormula conjunction() {
    std::size_t start = i_;
    RawFormula first = negation();
    if (!peek_sym("&&")) return first;
    RawFormula f;
    f.kind = FormKind::And;
    f.subs.push_back(std::move(first));
    while (accept("&&")) f.subs.push_back(negation());
    f.text = text_from(start);
    return f;
  }

  RawFormula negation() {
    std::size_t start = i_;
    if (accept("!")) {
      RawFormula f;
      f.kind = FormKind::Not;
      f.subs.push_back(negation());
      f.text = text_from(start);
      return f;
    }
    return primary();
  }

  RawFormula primary() {
    std::size_t start = i_;
    if (accept_ident("true")) return leaf(FormKind::True, start);
    if (accept_ident("false")) return leaf(FormKind::False, start);
    if (peek_ident("exists") || peek_ident("forall")) return quantifier();
    if (peek_sym("(")) {
      // Either a parenthesised formula or an atom whose left term starts with '('.
      try {
        return atom();
      } catch (const ParseError& e) {
        std::size_t atom_err = e.position();
        std::string atom_msg = e.what();
        i_ = start;
        try {
          expect("(");
          RawFormula f = formula();
          expect(")");
          return f;
        } catch (const ParseError& e2) {
          if (e2.position() >= atom_err) throw;
          throw ParseError(atom_msg.substr(0, atom_msg.rfind(" at position")), atom_err);
        }
      }
    }
    return atom();
  }

  RawFormula leaf(FormKind k, std::size_t start) {
    RawFormula f;
    f.kind = k;
    f.text = text_from(start);
    return f;
  }

  RawFormula atom() {
    std::size_t start = i_;
    RawFormula f;
    RawTerm a = sum();
    static const std::pair<const char*, FormKind> ops[] = {{"==", FormKind::Eq}, {"=", FormKind::Eq}, {"!=", FormKind::Ne},
                                                           {"<=", FormKind::Le}, {"<", FormKind::Lt}, {">=", FormKind::Ge},
                                                           {">", FormKind::Gt}};
    bool found = false;
    for (const auto& [s, k] : ops) {
      if (accept(s)) {
        f.kind = k;
        found = true;
        break;
      }
    }
    if (!found) fail("expected comparison operator");
    RawTerm b = sum();
    if (f.kind == FormKind::Eq && accept_ident("mod")) {
      std::size_t at = cur().pos;
      f.kind = FormKind::Cong;
      f.modulus = integer();
      if (f.modulus < 1) throw ParseError("congruence modulus must be positive", at);
    }
    f.terms.push_back(std::move(a));
    f.terms.push_back(std::move(b));
    f.text = text_from(start);
    return f;
  }

  RawTerm node(TermKind k, std::size_t start, std::vector<RawTerm> args) {
    RawTerm t;
    t.kind = k;
    t.args = std::move(args);
    t.text = text_from(start);
    return t;
  }

  RawTerm sum() {
    std::size_t start = i_;
    RawTerm t = product();
    for (;;) {
      if (accept("+")) {
        t = node(TermKind::Add, start, {t, product()});
        t.text = text_from(start);
      } else if (accept("-")) {
        t = node(TermKind::Sub, start, {t, product()});
        t.text = text_from(start);
      } else {
        return t;
      }
    }
  }

  RawTerm product() {
    std::size_t start = i_;
    RawTerm t = unary();
    while (accept("*")) {
      RawTerm r = unary();
      t = node(TermKind::Mul, start, {t, r});
    }
    return t;
  }

  RawTerm unary() {
    std::size_t start = i_;
    if (accept("-")) {
      RawTerm a = unary();
      if (a.kind == TermKind::Int || a.kind == TermKind::Rat) {
        a.value = -a.value;
        a.text = text_from(start);
        return a;
      }
      return node(TermKind::Neg, start, {a});
    }
    return power();
  }

  RawTerm power() {
    std::size_t start = i_;
    RawTerm base = primary_term();
    if (accept("^")) {
      if (cur().kind != Tok::Int) fail("expected nonnegative integer exponent");
      Integer e(toks_[i_++].text);
      if (e > 1000000) fail("exponent too large");
      RawTerm t = node(TermKind::Pow, start, {base});
      t.n = static_cast<int>(e.get_si());
      return t;
    }
    return base;
  }

  RawTerm primary_term() {
    std::size_t start = i_;
    const Token& t = cur();
    if (t.kind == Tok::Int) {
      ++i_;
      RawTerm r;
      r.kind = TermKind::Int;
      r.value = Rational(Integer(t.text));
      r.text = t.text;
      return r;
    }
    if (t.kind == Tok::Rat) {
      ++i_;
      RawTerm r;
      r.kind = TermKind::Rat;
      r.value = Rational(t.text);
      r.value.canonicalize();
      if (r.value.get_den() == 1) r.kind = TermKind::Int;
      r.text = t.text;
      return r;
    }
    if (accept("(")) {
      RawTerm r = sum();
      expect(")");
      return r;
    }
    if (t.kind == Tok::Ident) {
      int nm[2];
      if (t.text == "pi") {
        ++i_;
        return node(TermKind::Pi, start, {});
      }
      if (t.text == "ord") {
        ++i_;
        expect("(");
        RawTerm a = sum();
        expect(")");
        return node(TermKind::Ord, start, {a});
      }
      if (parse_fn_name(t.text, "ac_", 1, nm)) {
        ++i_;
        if (nm[0] < 1) throw ParseError("ac depth must be >= 1", t.pos);
        expect("(");
        RawTerm a = sum();
        expect(")");
        RawTerm r = node(TermKind::Ac, start, {a});
        r.n = nm[0];
        return r;
      }
      if (parse_fn_name(t.text, "proj_", 2, nm)) {
        ++i_;
        if (nm[1] < 1 || nm[1] > nm[0]) throw ParseError("projection proj_n_m needs 1 <= m <= n", t.pos);
        expect("(");
        RawTerm a = sum();
        expect(")");
        RawTerm r = node(TermKind::Proj, start, {a});
        r.n = nm[0];
        r.m = nm[1];
        return r;
      }
      if (is_reserved(t.text)) fail("unexpected keyword '" + t.text + "'");
      ++i_;
      RawTerm r;
      r.kind = TermKind::Var;
      r.name = t.text;
      r.text = t.text;
      return r;
    }
    fail(t.kind == Tok::End ? "unexpected end of input" : "unexpected '" + t.text + "'");
  }

  const std::string& src_;
  std::vector<Token> toks_;
  std::size_t i_ = 0;
};

// -------------------------------------------------------- s-expression parser

struct SNode {
  std::string atom;
  std::vector<SNode> list;
  bool is_list = false;
  std::size_t pos = 0;
};

class SexprParser {
 public:
  explicit SexprParser(const std::string& s) : s_(s) {}

  SNode parse() {
    SNode n = node();
    skip();
    if (i_ != s_.size()) throw ParseError("trailing input", i_);
    return n;
  }

 private:
  void skip() {
    while (i_ < s_.size() && std::isspace(static_cast<unsigned char>(s_[i_]))) ++i_;
  }
  SNode node() {
    skip();
    if (i_ >= s_.size()) throw ParseError("unexpected end of input", i_);
    SNode n;
    n.pos = i_;
    if (s_[i_] == '(') {
      ++i_;
      n.is_list = true;
      for (;;) {
        skip();
        if (i_ >= s_.size()) throw ParseError("unbalanced '('", n.pos);
        if (s_[i_] == ')') {
          ++i_;
          return n;
        }
        n.list.push_back(node());
      }
    }
    if (s_[i_] == ')') throw ParseError("unexpected ')'", i_);
    std::size_t start = i_;
    while (i_ < s_.size() && !std::isspace(static_cast<unsigned char>(s_[i_])) && s_[i_] != '(' && s_[i_] != ')') ++i_;
    n.atom = s_.substr(start, i_ - start);
    return n;
  }

  const std::string& s_;
  std::size_t i_ = 0;
};

bool is_int_atom(const std::string& a) {
  std::size_t i = (a.size() > 1 && a[0] == '-') ? 1 : 0;
  if (i == a.size()) return false;
  for (; i < a.size(); ++i) {
    if (!std::isdigit(static_cast<unsigned char>(a[i]))) return false;
  }
  return true;
}

Sort sexpr_sort(const SNode& n) {
  if (n.is_list) throw ParseError("expected sort", n.pos);
  if (n.atom == "vf") return Sort::vf();
  if (n.atom == "vg") return Sort::vg();
  if (n.atom.size() > 3 && n.atom.compare(0, 3, "res") == 0 && is_int_atom(n.atom.substr(3))) {
    int d = std::stoi(n.atom.substr(3));
    if (d >= 1) return Sort::res(d);
  }
  throw ParseError("expected sort (vf, vg, resN)", n.pos);
}

int sexpr_int(const SNode& n) {
  if (n.is_list || !is_int_atom(n.atom) || n.atom.size() > 8) throw ParseError("expected small integer", n.pos);
  return std::stoi(n.atom);
}

RawTerm sexpr_term(const SNode& n) {
  RawTerm t;
  if (!n.is_list) {
    t.text = n.atom;
    if (is_int_atom(n.atom)) {
      t.kind = TermKind::Int;
      t.value = Rational(Integer(n.atom));
      return t;
    }
    auto slash = n.atom.find('/');
    if (slash != std::string::npos && is_int_atom(n.atom.substr(0, slash)) && is_int_atom(n.atom.substr(slash + 1))) {
      t.kind = TermKind::Rat;
      t.value = Rational(n.atom);
      if (t.value.get_den() == 0) throw ParseError("zero denominator", n.pos);
      t.value.canonicalize();
      if (t.value.get_den() == 1) t.kind = TermKind::Int;
      return t;
    }
    if (n.atom == "pi") {
      t.kind = TermKind::Pi;
      return t;
    }
    if (is_reserved(n.atom) || n.atom.empty() || !(std::isalpha(static_cast<unsigned char>(n.atom[0])) || n.atom[0] == '_')) {
      throw ParseError("bad term atom '" + n.atom + "'", n.pos);
    }
    t.kind = TermKind::Var;
    t.name = n.atom;
    return t;
  }
  if (n.list.empty() || n.list[0].is_list) throw ParseError("expected operator", n.pos);
  const std::string& op = n.list[0].atom;
  auto args_from = [&](std::size_t k, std::size_t count) {
    if (n.list.size() != k + count) throw ParseError("wrong number of arguments to '" + op + "'", n.pos);
    for (std::size_t i = k; i < n.list.size(); ++i) t.args.push_back(sexpr_term(n.list[i]));
  };
  if (op == "+" || op == "-" || op == "*") {
    t.kind = op == "+" ? TermKind::Add : op == "-" ? TermKind::Sub : TermKind::Mul;
    args_from(1, 2);
  } else if (op == "neg") {
    t.kind = TermKind::Neg;
    args_from(1, 1);
    if (t.args[0].kind == TermKind::Int || t.args[0].kind == TermKind::Rat) {
      RawTerm v = t.args[0];
      v.value = -v.value;
      return v;
    }
  } else if (op == "^") {
    if (n.list.size() != 3) throw ParseError("'^' takes a term and an exponent", n.pos);
    t.kind = TermKind::Pow;
    t.args.push_back(sexpr_term(n.list[1]));
    t.n = sexpr_int(n.list[2]);
    if (t.n < 0) throw ParseError("negative exponent", n.list[2].pos);
  } else if (op == "ord") {
    t.kind = TermKind::Ord;
    args_from(1, 1);
  } else if (op == "ac") {
    if (n.list.size() != 3) throw ParseError("'ac' takes a depth and a term", n.pos);
    t.kind = TermKind::Ac;
    t.n = sexpr_int(n.list[1]);
    if (t.n < 1) throw ParseError("ac depth must be >= 1", n.list[1].pos);
    t.args.push_back(sexpr_term(n.list[2]));
  } else if (op == "proj") {
    if (n.list.size() != 4) throw ParseError("'proj' takes n, m and a term", n.pos);
    t.kind = TermKind::Proj;
    t.n = sexpr_int(n.list[1]);
    t.m = sexpr_int(n.list[2]);
    if (t.m < 1 || t.m > t.n) throw ParseError("projection needs 1 <= m <= n", n.pos);
    t.args.push_back(sexpr_term(n.list[3]));
  } else {
    throw ParseError("unknown term operator '" + op + "'", n.pos);
  }
  t.text = "(" + op + " ...)";
  return t;
}

std::optional<Integer> sexpr_bound(const SNode& n) {
  if (!n.is_list && (n.atom == "inf" || n.atom == "-inf")) return std::nullopt;
  if (n.is_list || !is_int_atom(n.atom)) throw ParseError("expected integer bound", n.pos);
  return Integer(n.atom);
}

RawFormula sexpr_formula(const SNode& n) {
  RawFormula f;
  f.text = n.is_list ? "(...)" : n.atom;
  if (!n.is_list) {
    if (n.atom == "true") return f;
    if (n.atom == "false") {
      f.kind = FormKind::False;
      return f;
    }
    throw ParseError("expected formula", n.pos);
  }
  if (n.list.empty() || n.list[0].is_list) throw ParseError("expected formula operator", n.pos);
  const std::string& op = n.list[0].atom;
  f.text = "(" + op + " ...)";
  static const std::map<std::string, FormKind> rel = {{"=", FormKind::Eq}, {"!=", FormKind::Ne}, {"<=", FormKind::Le},
                                                      {"<", FormKind::Lt}, {">=", FormKind::Ge}, {">", FormKind::Gt}};
  if (auto it = rel.find(op); it != rel.end()) {
    if (n.list.size() != 3) throw ParseError("comparison takes two terms", n.pos);
    f.kind = it->second;
    f.terms.push_back(sexpr_term(n.list[1]));
    f.terms.push_back(sexpr_term(n.list[2]));
    return f;
  }
  if (op == "cong") {
    if (n.list.size() != 4) throw ParseError("'cong' takes two terms and a modulus", n.pos);
    f.kind = FormKind::Cong;
    f.terms.push_back(sexpr_term(n.list[1]));
    f.terms.push_back(sexpr_term(n.list[2]));
    if (n.list[3].is_list || !is_int_atom(n.list[3].atom)) throw ParseError("expected modulus", n.list[3].pos);
    f.modulus = Integer(n.list[3].atom);
    if (f.modulus < 1) throw ParseError("congruence modulus must be positive", n.list[3].pos);
    return f;
  }
  if (op == "not") {
    if (n.list.size() != 2) throw ParseError("'not' takes one formula", n.pos);
    f.kind = FormKind::Not;
    f.subs.push_back(sexpr_formula(n.list[1]));
    return f;
  }
  if (op == "and" || op == "or") {
    f.kind = op == "and" ? FormKind::And : FormKind::Or;
    if (n.list.size() < 3) throw ParseError("'" + op + "' takes at least two formulas", n.pos);
    for (std::size_t i = 1; i < n.list.size(); ++i) f.subs.push_back(sexpr_formula(n.list[i]));
    return f;
  }
  if (op == "exists" || op == "forall") {
    f.kind = op == "exists" ? FormKind::Exists : FormKind::Forall;
    if (n.list.size() < 4 || n.list[1].is_list) throw ParseError("quantifier needs a variable, a sort and a body", n.pos);
    f.var = n.list[1].atom;
    f.var_sort = sexpr_sort(n.list[2]);
    if (f.var_sort.kind == Sort::VF) throw ParseError("quantifiers over the valued field are not supported", n.list[2].pos);
    std::size_t body = 3;
    if (f.var_sort.kind == Sort::VG && n.list.size() == 6) {
      f.lo = sexpr_bound(n.list[3]);
      f.hi = sexpr_bound(n.list[4]);
      body = 5;
    }
    if (n.list.size() != body + 1) throw ParseError("malformed quantifier", n.pos);
    f.subs.push_back(sexpr_formula(n.list[body]));
    return f;
  }
  throw ParseError("unknown formula operator '" + op + "'", n.pos);
}

RawInput sexpr_input(const SNode& n) {
  RawInput in;
  if (n.is_list && !n.list.empty() && !n.list[0].is_list && n.list[0].atom == "decl") {
    if (n.list.size() != 3 || !n.list[1].is_list) throw ParseError("'decl' takes a declaration list and a formula", n.pos);
    for (const auto& d : n.list[1].list) {
      if (!d.is_list || d.list.size() != 2 || d.list[0].is_list) throw ParseError("expected (name sort)", d.pos);
      in.decls[d.list[0].atom] = sexpr_sort(d.list[1]);
    }
    in.body = sexpr_formula(n.list[2]);
    return in;
  }
  in.body = sexpr_formula(n);
  return in;
}

// ----------------------------------------------------------- sort inference

class Inference {
 public:
  Inference(const std::map<std::string, Sort>& declared, std::optional<Sort> fallback)
      : declared_(declared), fallback_(fallback) {}

  void formula(RawFormula& f) {
    switch (f.kind) {
      case FormKind::True:
      case FormKind::False: return;
      case FormKind::Eq:
      case FormKind::Ne: {
        int a = term(f.terms[0]), b = term(f.terms[1]);
        unify(a, b, f.text);
        return;
      }
      case FormKind::Le:
      case FormKind::Lt:
      case FormKind::Ge:
      case FormKind::Gt:
      case FormKind::Cong:
        fix(term(f.terms[0]), Sort::vg(), f.text);
        fix(term(f.terms[1]), Sort::vg(), f.text);
        return;
      case FormKind::Not:
      case FormKind::And:
      case FormKind::Or:
        for (auto& s : f.subs) formula(s);
        return;
      case FormKind::Exists:
      case FormKind::Forall: {
        int id = fresh(f.var);
        fix(id, f.var_sort, f.text);
        scope_[f.var].push_back(id);
        formula(f.subs[0]);
        scope_[f.var].pop_back();
        return;
      }
    }
  }

  int term(RawTerm& t) {
    int id = -1;
    switch (t.kind) {
      case TermKind::Var: {
        auto& stack = scope_[t.name];
        if (stack.empty()) {
          id = fresh(t.name);
          stack.push_back(id);
          free_.push_back({t.name, id});
          if (auto it = declared_.find(t.name); it != declared_.end()) fix(id, it->second, t.text);
        } else {
          id = stack.back();
        }
        break;
      }
      case TermKind::Int:
      case TermKind::Pi: id = fresh(""); break;
      case TermKind::Rat:
        id = fresh("");
        fix(id, Sort::vf(), t.text);
        break;
      case TermKind::Add:
      case TermKind::Sub:
      case TermKind::Mul:
      case TermKind::Neg:
      case TermKind::Pow:
        id = fresh("");
        for (auto& a : t.args) unify(id, term(a), t.text);
        break;
      case TermKind::Ord:
        id = fresh("");
        fix(term(t.args[0]), Sort::vf(), t.text);
        fix(id, Sort::vg(), t.text);
        break;
      case TermKind::Ac:
        id = fresh("");
        fix(term(t.args[0]), Sort::vf(), t.text);
        fix(id, Sort::res(t.n), t.text);
        break;
      case TermKind::Proj:
        id = fresh("");
        fix(term(t.args[0]), Sort::res(t.n), t.text);
        fix(id, Sort::res(t.m), t.text);
        break;
    }
    t.uf = id;
    return id;
  }

  std::optional<Sort> resolved(int id) {
    int r = find(id);
    if (sort_[r]) return sort_[r];
    return fallback_;
  }

  std::set<std::string> open_free_vars() {
    std::set<std::string> out;
    for (const auto& [name, id] : free_) {
      if (!sort_[find(id)]) out.insert(name);
    }
    return out;
  }

  void fix_node(int id, Sort s, const std::string& ctx) { fix(id, s, ctx); }

 private:
  int fresh(const std::string&) {
    parent_.push_back(static_cast<int>(parent_.size()));
    sort_.push_back(std::nullopt);
    return static_cast<int>(parent_.size()) - 1;
  }
  int find(int x) {
    while (parent_[x] != x) {
      parent_[x] = parent_[parent_[x]];
      x = parent_[x];
    }
    return x;
  }
  void fix(int id, Sort s, const std::string& ctx) {
    int r = find(id);
    if (sort_[r] && *sort_[r] != s) {
      throw SortError("expected " + s.to_string() + " but found " + sort_[r]->to_string() + " in '" + ctx + "'");
    }
    sort_[r] = s;
  }
  void unify(int a, int b, const std::string& ctx) {
    int ra = find(a), rb = find(b);
    if (ra == rb) return;
    if (sort_[ra] && sort_[rb] && *sort_[ra] != *sort_[rb]) {
      throw SortError("sorts " + sort_[ra]->to_string() + " and " + sort_[rb]->to_string() + " mixed in '" + ctx + "'");
    }
    if (!sort_[ra]) sort_[ra] = sort_[rb];
    parent_[rb] = ra;
  }

  const std::map<std::string, Sort>& declared_;
  std::optional<Sort> fallback_;
  std::vector<int> parent_;
  std::vector<std::optional<Sort>> sort_;
  std::map<std::string, std::vector<int>> scope_;
  std::vector<std::pair<std::string, int>> free_;
};

Term build(const RawTerm& t, Inference& inf) {
  Sort s = *inf.resolved(t.uf);
  try {
    switch (t.kind) {
      case TermKind::Var: return term::var(t.name, s);
      case TermKind::Int: return term::integer(t.value.get_num(), s);
      case TermKind::Rat: return term::rational(t.value);
      case TermKind::Pi: return term::pi(s);
      case TermKind::Add: return term::add(build(t.args[0], inf), build(t.args[1], inf));
      case TermKind::Sub: return term::sub(build(t.args[0], inf), build(t.args[1], inf));
      case TermKind::Mul: return term::mul(build(t.args[0], inf), build(t.args[1], inf));
      case TermKind::Neg: return term::neg(build(t.args[0], inf));
      case TermKind::Pow: return term::pow(build(t.args[0], inf), t.n);
      case TermKind::Ord: return term::ord(build(t.args[0], inf));
      case TermKind::Ac: return term::ac(t.n, build(t.args[0], inf));
      case TermKind::Proj: return term::proj(t.n, t.m, build(t.args[0], inf));
    }
  } catch (const SortError& e) {
    std::string msg = e.what();
    if (msg.find(" in '") == std::string::npos) throw SortError(msg + " in '" + t.text + "'");
    throw;
  }
  throw SortError("internal: unknown term");
}

Formula build(const RawFormula& f, Inference& inf) {
  switch (f.kind) {
    case FormKind::True: return fm::truth();
    case FormKind::False: return fm::falsity();
    case FormKind::Eq:
    case FormKind::Ne:
    case FormKind::Le:
    case FormKind::Lt:
    case FormKind::Ge:
    case FormKind::Gt: return fm::atom(f.kind, build(f.terms[0], inf), build(f.terms[1], inf));
    case FormKind::Cong: return fm::cong(build(f.terms[0], inf), build(f.terms[1], inf), f.modulus);
    case FormKind::Not: return fm::neg(build(f.subs[0], inf));
    case FormKind::And:
    case FormKind::Or: {
      std::vector<Formula> subs;
      for (const auto& s : f.subs) subs.push_back(build(s, inf));
      // Keep the parsed shape: fm::conj/disj would collapse singletons only.
      return f.kind == FormKind::And ? fm::conj(subs) : fm::disj(subs);
    }
    case FormKind::Exists: return fm::exists(f.var, f.var_sort, build(f.subs[0], inf), f.lo, f.hi);
    case FormKind::Forall: return fm::forall(f.var, f.var_sort, build(f.subs[0], inf), f.lo, f.hi);
  }
  throw SortError("internal: unknown formula");
}

Formula finish(RawInput in, const ParseOptions& opts) {
  std::map<std::string, Sort> declared = opts.declared;
  for (const auto& [k, v] : in.decls) declared[k] = v;
  Inference inf(declared, opts.default_sort);
  inf.formula(in.body);
  return build(in.body, inf);
}

// Typed -> raw, for re-running inference without declarations.
RawTerm to_raw(const Term& t) {
  RawTerm r;
  r.kind = t->kind;
  r.name = t->name;
  r.value = t->value;
  r.n = t->n;
  r.m = t->m;
  r.text = to_string(t);
  for (const auto& a : t->args) r.args.push_back(to_raw(a));
  return r;
}

RawFormula to_raw(const Formula& f) {
  RawFormula r;
  r.kind = f->kind;
  r.modulus = f->modulus;
  r.var = f->var;
  r.var_sort = f->var_sort;
  r.lo = f->lo;
  r.hi = f->hi;
  r.text = body_string(f);
  for (const auto& t : f->terms) r.terms.push_back(to_raw(t));
  for (const auto& s : f->subs) r.subs.push_back(to_raw(s));
  return r;
}

}  // namespace

namespace detail {
std::set<std::string> undetermined_free_vars(const Formula& f) {
  RawFormula r = to_raw(f);
  std::map<std::string, Sort> none;
  Inference inf(none, std::nullopt);
  inf.formula(r);
  return inf.open_free_vars();
}
}  // namespace detail

Formula parse_formula(const std::string& text, const ParseOptions& opts) {
  return finish(InfixParser(text).input(), opts);
}

Term parse_term(const std::string& text, Sort expected, const ParseOptions& opts) {
  RawTerm t = InfixParser(text).whole_term();
  Inference inf(opts.declared, opts.default_sort);
  int id = inf.term(t);
  inf.fix_node(id, expected, t.text);
  return build(t, inf);
}

Formula parse_sexpr(const std::string& text, const ParseOptions& opts) {
  SNode n = SexprParser(text).parse();
  return finish(sexpr_input(n), opts);
}

}  // namespace motint
