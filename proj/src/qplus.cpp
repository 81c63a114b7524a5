#include "motint/qplus.hpp"

#include <algorithm>
#include <mutex>
#include <set>

namespace motint {

namespace {

std::mutex g_obs_mutex;
std::function<void(const RewriteEvent&)> g_observer;

void notify(const std::string& rule, const ResClass& before, const ResClass& after) {
  std::function<void(const RewriteEvent&)> obs;
  {
    std::lock_guard<std::mutex> lock(g_obs_mutex);
    obs = g_observer;
  }
  if (obs) obs(RewriteEvent{rule, before, after});
}

bool observing() {
  std::lock_guard<std::mutex> lock(g_obs_mutex);
  return static_cast<bool>(g_observer);
}

ARat L_to(int k) { return ARat::L_pow(k); }

// L^n - 1
ARat torus_scalar(int n) { return ARat::L_pow(n) - ARat(1); }

std::string sort_text(const Sort& s) { return s.to_string(); }

std::string vars_text(const std::vector<FreeVar>& vs) {
  std::string out;
  for (std::size_t i = 0; i < vs.size(); ++i) {
    if (i) out += ", ";
    out += vs[i].name + ":" + sort_text(vs[i].sort);
  }
  return out;
}

bool same_base(const std::vector<FreeVar>& a, const std::vector<FreeVar>& b) {
  std::map<std::string, Sort> x, y;
  for (const auto& v : a) x[v.name] = v.sort;
  for (const auto& v : b) y[v.name] = v.sort;
  return x == y;
}

std::vector<FreeVar> merge_base(const std::vector<FreeVar>& a, const std::vector<FreeVar>& b) {
  if (!same_base(a, b)) throw FrameMismatch("residue classes over different bases: [" + vars_text(a) + "] vs [" + vars_text(b) + "]");
  return a;
}

// Collects, for variable v, the projection depths of its occurrences; a bare
// occurrence (not directly under a projection) sets `bare`.
void proj_uses(const motint::Term& t, const std::string& v, bool& bare, int& maxk) {
  if (t->kind == TermKind::Proj && t->args[0]->kind == TermKind::Var && t->args[0]->name == v) {
    maxk = std::max(maxk, t->m);
    return;
  }
  if (t->kind == TermKind::Var && t->name == v) {
    bare = true;
    return;
  }
  for (const auto& a : t->args) proj_uses(a, v, bare, maxk);
}

void proj_uses(const Formula& f, const std::string& v, bool& bare, int& maxk) {
  if ((f->kind == FormKind::Exists || f->kind == FormKind::Forall) && f->var == v) return;
  for (const auto& t : f->terms) proj_uses(t, v, bare, maxk);
  for (const auto& g : f->subs) proj_uses(g, v, bare, maxk);
}

bool is_var(const motint::Term& t, const std::string& v) { return t->kind == TermKind::Var && t->name == v; }

// Linear form A*v + B of a RES term with unit-literal coefficients; nullopt
// entries are 0.
using OptQ = std::optional<Rational>;
OptQ neg_opt(const OptQ& a) { return a ? OptQ(Rational(-*a)) : std::nullopt; }
// sum of two coefficients; fails (outer nullopt) unless one of them is 0
std::optional<OptQ> lin_add(const OptQ& a, const OptQ& b) {
  if (a && b) return std::nullopt;
  return a ? a : b;
}
std::optional<std::pair<OptQ, OptQ>> unit_lin(const motint::Term& t, const std::string& v) {
  if (is_var(t, v)) return std::make_pair(OptQ(Rational(1)), OptQ());
  if (!mentions(t, v)) {
    if (auto u = res_unit_value(t)) return std::make_pair(OptQ(), OptQ(*u));
    if (t->kind == TermKind::Int && t->value == 0) return std::make_pair(OptQ(), OptQ());
    return std::nullopt;
  }
  switch (t->kind) {
    case TermKind::Neg: {
      auto a = unit_lin(t->args[0], v);
      if (!a) return std::nullopt;
      return std::make_pair(neg_opt(a->first), neg_opt(a->second));
    }
    case TermKind::Mul: {
      for (int side = 0; side < 2; ++side) {
        auto u = res_unit_value(t->args[static_cast<std::size_t>(side)]);
        if (!u) continue;
        auto a = unit_lin(t->args[static_cast<std::size_t>(1 - side)], v);
        if (!a) return std::nullopt;
        auto sc = [&](const OptQ& x) { return x ? OptQ(Rational(*x * *u)) : std::nullopt; };
        return std::make_pair(sc(a->first), sc(a->second));
      }
      return std::nullopt;
    }
    case TermKind::Add:
    case TermKind::Sub: {
      auto a = unit_lin(t->args[0], v), b = unit_lin(t->args[1], v);
      if (!a || !b) return std::nullopt;
      if (t->kind == TermKind::Sub) b = std::make_pair(neg_opt(b->first), neg_opt(b->second));
      auto A = lin_add(a->first, b->first), B = lin_add(a->second, b->second);
      if (!A || !B) return std::nullopt;
      return std::make_pair(*A, *B);
    }
    default: return std::nullopt;
  }
}

// One-step rules on a single generator. Returns the replacement class (of
// scalar 1) or nullopt.
struct Step {
  std::string rule;
  ARat factor;
  ResGen gen;
  bool empty = false;
};

std::optional<Step> step(const ResGen& g) {
  Formula f = simplify(g.formula);
  if (f->kind == FormKind::False) return Step{"eq0", ARat(1), g, true};
  std::set<std::string> free;
  for (const auto& v : free_vars(f)) free.insert(v.name);
  for (std::size_t i = 0; i < g.vars.size(); ++i) {
    if (!free.count(g.vars[i].name)) {
      ResGen h{g.vars, f};
      h.vars.erase(h.vars.begin() + static_cast<long>(i));
      return Step{"fullspace", L_to(g.vars[i].sort.depth), h};
    }
  }
  // eq3: coordinate only seen through projections to a lower depth
  for (std::size_t i = 0; i < g.vars.size(); ++i) {
    const FreeVar& v = g.vars[i];
    if (v.sort.depth < 2) continue;
    bool bare = false;
    int maxk = 0;
    proj_uses(f, v.name, bare, maxk);
    if (bare || maxk == 0 || maxk >= v.sort.depth) continue;
    const int n = v.sort.depth;
    Formula h = map_formula(f, [&](const motint::Term& t) -> std::optional<motint::Term> {
      if (t->kind == TermKind::Proj && is_var(t->args[0], v.name)) {
        motint::Term nv = term::var(v.name, Sort::res(maxk));
        return t->m == maxk ? nv : term::proj(maxk, t->m, nv);
      }
      return std::nullopt;
    });
    ResGen out{g.vars, h};
    out.vars[i].sort = Sort::res(maxk);
    return Step{"eq3", L_to(n - maxk), out};
  }
  std::vector<Formula> cs = conjuncts(f);
  // unit-solve: A*v + B rel 0 with unit literals A, B becomes v rel ac(-B/A)
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const Formula& c = cs[k];
    if ((c->kind != FormKind::Eq && c->kind != FormKind::Ne) || c->terms[0]->sort.kind != Sort::RES) continue;
    for (const auto& v : g.vars) {
      if (!mentions(c, v.name)) continue;
      auto a = unit_lin(c->terms[0], v.name), b = unit_lin(c->terms[1], v.name);
      if (!a || !b) continue;
      auto A = lin_add(a->first, neg_opt(b->first)), B = lin_add(a->second, neg_opt(b->second));
      if (!A || !B || !*A) continue;
      motint::Term lit;
      if (!*B) {
        lit = term::integer(0, v.sort);
      } else {
        Rational K = -**B / **A;
        lit = K == 1 ? term::integer(1, v.sort) : term::ac(v.sort.depth, term::rational(K));
      }
      Formula na = c->kind == FormKind::Eq ? fm::atom(FormKind::Eq, term::var(v.name, v.sort), lit)
                                           : fm::atom(FormKind::Ne, term::var(v.name, v.sort), lit);
      if (motint::to_string(na) == motint::to_string(c)) continue;
      std::vector<Formula> out = cs;
      out[k] = na;
      return Step{"unit-solve", ARat(1), ResGen{g.vars, fm::conj(out)}};
    }
  }
  // unit-scale: v a unit, v != ac(K) and v nowhere else; v -> ac(K) v maps
  // it to v != 1
  for (const auto& v : g.vars) {
    std::optional<std::size_t> at;
    bool ok = true, unit = false;
    for (std::size_t k = 0; k < cs.size() && ok; ++k) {
      const Formula& c = cs[k];
      if (!mentions(c, v.name)) continue;
      ok = c->kind == FormKind::Ne;
      if (!ok) break;
      const motint::Term& l = c->terms[0];
      const motint::Term& r = c->terms[1];
      bool zero = r->kind == TermKind::Int && r->value == 0;
      bool lead = v.sort.depth == 1 ? is_var(l, v.name) : l->kind == TermKind::Proj && l->m == 1 && is_var(l->args[0], v.name);
      if (zero && lead) {
        unit = true;
      } else if (is_var(l, v.name) && res_unit_value(r) && !at) {
        at = k;
      } else {
        ok = false;
      }
    }
    if (!ok || !at || !unit || *res_unit_value(cs[*at]->terms[1]) == 1) continue;
    std::vector<Formula> out = cs;
    out[*at] = fm::atom(FormKind::Ne, term::var(v.name, v.sort), term::integer(1, v.sort));
    return Step{"unit-scale", ARat(1), ResGen{g.vars, fm::conj(out)}};
  }
  // eq1: graph of a term
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const Formula& c = cs[k];
    if (c->kind != FormKind::Eq || c->terms[0]->sort.kind != Sort::RES) continue;
    for (const auto& v : g.vars) {
      for (int side = 0; side < 2; ++side) {
        const motint::Term& lhs = c->terms[static_cast<std::size_t>(side)];
        const motint::Term& rhs = c->terms[static_cast<std::size_t>(1 - side)];
        if (!is_var(lhs, v.name) || mentions(rhs, v.name)) continue;
        std::vector<Formula> rest;
        for (std::size_t j = 0; j < cs.size(); ++j) {
          if (j != k) rest.push_back(cs[j]);
        }
        ResGen out{{}, substitute(fm::conj(rest), {{v.name, rhs}})};
        for (const auto& w : g.vars) {
          if (w.name != v.name) out.vars.push_back(w);
        }
        return Step{"eq1-graph", ARat(1), out};
      }
    }
  }
  // complement of a graph: v != t with v nowhere else
  for (std::size_t k = 0; k < cs.size(); ++k) {
    const Formula& c = cs[k];
    if (c->kind != FormKind::Ne || c->terms[0]->sort.kind != Sort::RES) continue;
    for (const auto& v : g.vars) {
      for (int side = 0; side < 2; ++side) {
        const motint::Term& lhs = c->terms[static_cast<std::size_t>(side)];
        const motint::Term& rhs = c->terms[static_cast<std::size_t>(1 - side)];
        if (!is_var(lhs, v.name) || mentions(rhs, v.name)) continue;
        bool elsewhere = false;
        std::vector<Formula> rest;
        for (std::size_t j = 0; j < cs.size(); ++j) {
          if (j == k) continue;
          if (mentions(cs[j], v.name)) elsewhere = true;
          rest.push_back(cs[j]);
        }
        if (elsewhere) continue;
        ResGen out{{}, fm::conj(rest)};
        for (const auto& w : g.vars) {
          if (w.name != v.name) out.vars.push_back(w);
        }
        return Step{"torus", torus_scalar(v.sort.depth), out};
      }
    }
  }
  return std::nullopt;
}

// Renames coordinates to _r1, _r2, ... by first occurrence in the printed
// formula.
ResGen canonical(const ResGen& g) {
  ResGen cur{g.vars, simplify(g.formula)};
  for (int round = 0; round < 4; ++round) {
    std::map<std::string, std::string> tmp;
    std::vector<FreeVar> tv;
    for (std::size_t i = 0; i < cur.vars.size(); ++i) {
      std::string t = "_t" + std::to_string(i + 1) + "_";
      tmp[cur.vars[i].name] = t;
      tv.push_back({t, cur.vars[i].sort});
    }
    Formula ft = simplify(rename(cur.formula, tmp));
    std::string text = motint::to_string(ft);
    std::vector<std::pair<std::size_t, std::size_t>> pos;
    for (std::size_t i = 0; i < tv.size(); ++i) {
      std::size_t at = text.find(tv[i].name);
      pos.push_back({at == std::string::npos ? text.size() + i : at, i});
    }
    std::sort(pos.begin(), pos.end());
    std::map<std::string, std::string> fin;
    ResGen next;
    for (std::size_t r = 0; r < pos.size(); ++r) {
      const FreeVar& v = tv[pos[r].second];
      std::string name = "_r" + std::to_string(r + 1);
      fin[v.name] = name;
      next.vars.push_back({name, v.sort});
    }
    next.formula = simplify(rename(ft, fin));
    bool stable = next.key() == cur.key();
    cur = next;
    if (stable) break;
  }
  return cur;
}

// Coefficients in the basis (L - 1)^k, if s is a polynomial.
std::optional<std::vector<Integer>> shifted_coeffs(const ARat& s) {
  if (!s.is_polynomial()) return std::nullopt;
  const Integer den = s.denom().coeff(0);
  ZPoly acc;
  const ZPoly tp1{Integer(1), Integer(1)};
  const auto& c = s.numer().coeffs();
  for (auto it = c.rbegin(); it != c.rend(); ++it) acc = acc * tp1 + ZPoly::constant(*it);
  std::vector<Integer> out;
  for (const auto& x : acc.coeffs()) {
    if (x % den != 0) return std::nullopt;
    out.push_back(x / den);
  }
  return out;
}

ARat from_shifted(const std::vector<Integer>& v) {
  ARat out, pw(1);
  const ARat lm1 = ARat::L() - ARat(1);
  for (const auto& x : v) {
    out += ARat(x) * pw;
    pw *= lm1;
  }
  return out;
}

// Flips one literal: the complementary literal, or nullopt.
bool complementary(const Formula& a, const Formula& b) {
  if (a->kind == FormKind::Not && structurally_equal(a->subs[0], b)) return true;
  if (b->kind == FormKind::Not && structurally_equal(b->subs[0], a)) return true;
  auto flip = [](FormKind k) {
    switch (k) {
      case FormKind::Eq: return FormKind::Ne;
      case FormKind::Ne: return FormKind::Eq;
      default: return FormKind::True;
    }
  };
  if (a->kind == FormKind::Eq || a->kind == FormKind::Ne) {
    if (b->kind != flip(a->kind)) return false;
    return (structurally_equal(a->terms[0], b->terms[0]) && structurally_equal(a->terms[1], b->terms[1])) ||
           (structurally_equal(a->terms[0], b->terms[1]) && structurally_equal(a->terms[1], b->terms[0]));
  }
  return false;
}

// If the conjunct lists differ in exactly one complementary literal, the
// formula without it.
std::optional<Formula> eq2_merge(const ResGen& a, const ResGen& b) {
  if (a.signature() != b.signature()) return std::nullopt;
  for (std::size_t i = 0; i < a.vars.size(); ++i) {
    if (a.vars[i].name != b.vars[i].name) return std::nullopt;
  }
  std::vector<Formula> ca = conjuncts(a.formula), cb = conjuncts(b.formula);
  if (ca.size() != cb.size()) return std::nullopt;
  for (std::size_t i = 0; i < ca.size(); ++i) {
    for (std::size_t j = 0; j < cb.size(); ++j) {
      if (!complementary(ca[i], cb[j])) continue;
      std::vector<Formula> ra, rb;
      for (std::size_t k = 0; k < ca.size(); ++k) {
        if (k != i) ra.push_back(ca[k]);
      }
      for (std::size_t k = 0; k < cb.size(); ++k) {
        if (k != j) rb.push_back(cb[k]);
      }
      Formula fa = simplify(fm::conj(ra)), fb = simplify(fm::conj(rb));
      if (motint::to_string(fa) == motint::to_string(fb)) return fa;
      return std::nullopt;
    }
  }
  return std::nullopt;
}

ResClass single(const ARat& s, const ResGen& g, const std::vector<FreeVar>& base) { return ResClass::raw({{s, g}}, base); }

// Normalizes one generator: rules to a fixed point, then canonical names.
std::pair<ARat, ResGen> normalize_gen(const ResGen& g0, const std::vector<FreeVar>& base, bool& empty) {
  ResGen g = g0;
  ARat factor(1);
  empty = false;
  for (int guard = 0; guard < 10000; ++guard) {
    auto s = step(g);
    if (!s) break;
    if (observing()) {
      ResClass before = single(ARat(1), g, base);
      ResClass after = s->empty ? ResClass::zero(base) : single(s->factor, s->gen, base);
      notify(s->rule, before, after);
    }
    if (s->empty) {
      empty = true;
      return {ARat(0), g};
    }
    factor *= s->factor;
    g = s->gen;
  }
  ResGen c = canonical(g);
  if (observing() && c.key() != ResGen{g.vars, simplify(g.formula)}.key()) {
    notify("eq1-rename", single(ARat(1), g, base), single(ARat(1), c, base));
  }
  return {factor, c};
}

}  // namespace

std::vector<int> ResGen::signature() const {
  std::vector<int> s;
  for (const auto& v : vars) s.push_back(v.sort.depth);
  return s;
}

std::string ResGen::key() const {
  std::string k = "(";
  for (std::size_t i = 0; i < vars.size(); ++i) k += (i ? "," : "") + std::to_string(vars[i].sort.depth);
  return k + ")" + to_string();
}

std::string ResGen::to_string() const {
  std::string out = "[";
  if (!vars.empty()) out += vars_text(vars) + " | ";
  std::string f = motint::to_string(formula);
  if (f.rfind("decl ", 0) == 0) f = f.substr(f.find("; ") + 2);
  return out + f + "]";
}

bool in_scalar_semiring(const ARat& s) {
  auto c = shifted_coeffs(s);
  if (!c) return false;
  for (const auto& x : *c) {
    if (x < 0) return false;
  }
  return true;
}

ResClass ResClass::raw(std::vector<Term> terms, std::vector<FreeVar> base) {
  ResClass r(std::move(base));
  r.terms_ = std::move(terms);
  return r;
}

ResClass ResClass::zero(std::vector<FreeVar> base) { return ResClass(std::move(base)); }

ResClass ResClass::one(std::vector<FreeVar> base) { return scalar(ARat(1), std::move(base)); }

ResClass ResClass::scalar(const ARat& s, std::vector<FreeVar> base) {
  if (!in_scalar_semiring(s)) throw FormatError("scalar " + s.to_string() + " is not in N[L - 1]");
  ResClass r(std::move(base));
  if (!s.is_zero()) r.terms_.push_back({s, ResGen{{}, fm::truth()}});
  return r;
}

ResClass ResClass::L_pow(int k, std::vector<FreeVar> base) {
  if (k < 0) throw FormatError("negative power of L in Q+");
  return scalar(ARat::L_pow(k), std::move(base));
}

ResClass ResClass::gen(std::vector<FreeVar> vars, Formula formula, std::vector<FreeVar> base, const ARat& mult) {
  if (!in_scalar_semiring(mult)) throw FormatError("multiplicity " + mult.to_string() + " is not in N[L - 1]");
  std::set<std::string> names;
  for (const auto& v : vars) {
    if (v.sort.kind != Sort::RES) throw SortError("generator coordinate '" + v.name + "' must have a residue sort");
    names.insert(v.name);
  }
  std::set<std::string> bnames;
  for (const auto& v : base) bnames.insert(v.name);
  for (const auto& v : free_vars(formula)) {
    if (names.count(v.name)) {
      for (const auto& w : vars) {
        if (w.name == v.name && w.sort != v.sort) throw SortError("coordinate '" + v.name + "' used at sort " + v.sort.to_string());
      }
      continue;
    }
    if (!bnames.count(v.name)) throw FrameMismatch("free variable '" + v.name + "' is neither a coordinate nor a base parameter");
  }
  return rewrite(raw({{mult, ResGen{std::move(vars), std::move(formula)}}}, std::move(base)));
}

ResClass ResClass::parse(const std::string& formula_text, std::vector<FreeVar> base) {
  ParseOptions opts;
  for (const auto& v : base) opts.declared[v.name] = v.sort;
  Formula f = parse_formula(formula_text, opts);
  std::set<std::string> bnames;
  for (const auto& v : base) bnames.insert(v.name);
  std::vector<FreeVar> vars;
  for (const auto& v : free_vars(f)) {
    if (!bnames.count(v.name)) vars.push_back(v);
  }
  return gen(vars, f, std::move(base));
}

std::optional<ARat> ResClass::as_scalar() const {
  if (terms_.empty()) return ARat(0);
  if (terms_.size() == 1 && terms_[0].gen.vars.empty() && terms_[0].gen.formula->kind == FormKind::True) return terms_[0].scalar;
  return std::nullopt;
}

ResClass operator+(const ResClass& a, const ResClass& b) {
  auto base = merge_base(a.base_, b.base_);
  std::vector<ResClass::Term> t = a.terms_;
  t.insert(t.end(), b.terms_.begin(), b.terms_.end());
  return rewrite(ResClass::raw(std::move(t), base));
}

ResClass operator*(const ResClass& a, const ResClass& b) {
  auto base = merge_base(a.base_, b.base_);
  std::vector<ResClass::Term> out;
  for (const auto& x : a.terms_) {
    for (const auto& y : b.terms_) {
      std::map<std::string, std::string> ren;
      ResGen g{x.gen.vars, nullptr};
      for (const auto& v : y.gen.vars) {
        std::string nn = "_m" + std::to_string(g.vars.size() + 1);
        ren[v.name] = nn;
        g.vars.push_back({nn, v.sort});
      }
      g.formula = fm::conj({x.gen.formula, rename(y.gen.formula, ren)});
      out.push_back({x.scalar * y.scalar, g});
    }
  }
  return rewrite(ResClass::raw(std::move(out), base));
}

ResClass ResClass::times(const ARat& s) const {
  if (!in_scalar_semiring(s)) throw FormatError("scalar " + s.to_string() + " is not in N[L - 1]");
  std::vector<Term> t;
  for (const auto& x : terms_) t.push_back({x.scalar * s, x.gen});
  return rewrite(raw(std::move(t), base_));
}

ResClass ResClass::substitute(const std::map<std::string, motint::Term>& bindings, std::vector<FreeVar> new_base) const {
  std::vector<Term> t;
  for (const auto& x : terms_) {
    // coordinates shadow base names; rename apart first
    std::map<std::string, std::string> ren;
    ResGen g{{}, nullptr};
    for (const auto& v : x.gen.vars) {
      std::string nn = "_s" + std::to_string(g.vars.size() + 1);
      ren[v.name] = nn;
      g.vars.push_back({nn, v.sort});
    }
    g.formula = motint::substitute(rename(x.gen.formula, ren), bindings);
    t.push_back({x.scalar, g});
  }
  return rewrite(raw(std::move(t), std::move(new_base)));
}

std::string ResClass::to_string() const {
  if (terms_.empty()) return "0";
  std::string out;
  for (std::size_t i = 0; i < terms_.size(); ++i) {
    if (i) out += " + ";
    const auto& t = terms_[i];
    bool unit_gen = t.gen.vars.empty() && t.gen.formula->kind == FormKind::True;
    std::string s = t.scalar.to_string();
    if (unit_gen) {
      out += s;
    } else {
      if (!t.scalar.is_one()) out += (t.scalar.numer().coeffs().size() > 1 ? "(" + s + ")" : s) + "*";
      out += t.gen.to_string();
    }
  }
  return out;
}

void set_rewrite_observer(std::function<void(const RewriteEvent&)> obs) {
  std::lock_guard<std::mutex> lock(g_obs_mutex);
  g_observer = std::move(obs);
}

ResClass rewrite(const ResClass& a) {
  std::vector<ResClass::Term> cur = a.terms();
  for (int round = 0; round < 100; ++round) {
    std::map<std::string, std::pair<ARat, ResGen>> merged;
    for (const auto& t : cur) {
      if (t.scalar.is_zero()) continue;
      bool empty = false;
      auto [factor, g] = normalize_gen(t.gen, a.base(), empty);
      if (empty) continue;
      std::string k = g.key();
      auto it = merged.find(k);
      if (it == merged.end()) {
        merged.emplace(k, std::make_pair(t.scalar * factor, g));
      } else {
        it->second.first += t.scalar * factor;
      }
    }
    std::vector<ResClass::Term> next;
    for (auto& [k, v] : merged) next.push_back({v.first, v.second});
    // eq2: complementary pairs
    bool changed = false;
    for (std::size_t i = 0; i < next.size() && !changed; ++i) {
      for (std::size_t j = i + 1; j < next.size() && !changed; ++j) {
        auto f = eq2_merge(next[i].gen, next[j].gen);
        if (!f) continue;
        auto ci = shifted_coeffs(next[i].scalar), cj = shifted_coeffs(next[j].scalar);
        if (!ci || !cj) continue;
        std::vector<Integer> mn(std::min(ci->size(), cj->size()));
        for (std::size_t k = 0; k < mn.size(); ++k) mn[k] = std::min((*ci)[k], (*cj)[k]);
        ARat common = from_shifted(mn);
        if (common.is_zero()) continue;
        ResGen g{next[i].gen.vars, *f};
        if (observing()) {
          ResClass before = ResClass::raw({{common, next[i].gen}, {common, next[j].gen}}, a.base());
          notify("eq2", before, single(common, g, a.base()));
        }
        next[i].scalar -= common;
        next[j].scalar -= common;
        next.push_back({common, g});
        changed = true;
      }
    }
    cur = std::move(next);
    if (!changed) break;
  }
  return ResClass::raw(std::move(cur), a.base());
}

Equality is_equal(const ResClass& a, const ResClass& b) {
  if (!same_base(a.base(), b.base())) throw FrameMismatch("is_equal over different bases");
  return rewrite(a).to_string() == rewrite(b).to_string() ? Equality::Equal : Equality::Unknown;
}

ResClass mu_res(const ResClass& a, const std::vector<std::string>& fiber) {
  std::vector<FreeVar> nb, moved;
  std::set<std::string> fs(fiber.begin(), fiber.end());
  for (const auto& v : a.base()) {
    if (fs.count(v.name)) {
      if (v.sort.kind != Sort::RES) throw FrameMismatch("mu_res integrates residue coordinates only; '" + v.name + "' has sort " + v.sort.to_string());
      moved.push_back(v);
      fs.erase(v.name);
    } else {
      nb.push_back(v);
    }
  }
  if (!fs.empty()) throw FrameMismatch("'" + *fs.begin() + "' is not a base coordinate");
  std::vector<ResClass::Term> t;
  for (const auto& x : a.terms()) {
    std::map<std::string, std::string> ren;
    ResGen g{{}, nullptr};
    for (const auto& v : x.gen.vars) {
      std::string nn = "_u" + std::to_string(g.vars.size() + 1);
      ren[v.name] = nn;
      g.vars.push_back({nn, v.sort});
    }
    for (const auto& v : moved) g.vars.push_back(v);
    g.formula = rename(x.gen.formula, ren);
    t.push_back({x.scalar, g});
  }
  return rewrite(ResClass::raw(std::move(t), nb));
}

Rational count_class(const ResClass& a, long p, int d, const Env& point, const CountOptions& opts) {
  std::set<std::string> used;
  for (const auto& t : a.terms()) {
    for (const auto& v : free_vars(t.gen.formula)) used.insert(v.name);
  }
  for (const auto& v : a.base()) {
    if (!used.count(v.name)) continue;
    bool bound = (v.sort.kind == Sort::VF && point.vf.count(v.name)) || (v.sort.kind == Sort::RES && point.res.count(v.name)) ||
                 (v.sort.kind == Sort::VG && point.vg.count(v.name));
    if (!bound) throw EvalError("base parameter '" + v.name + "' is not bound");
  }
  Rational total = 0;
  for (const auto& t : a.terms()) {
    Env env = point;
    for (const auto& v : t.gen.vars) env.res.erase(v.name);
    Integer n = count_points(t.gen.formula, p, d, {}, opts, env);
    std::set<std::string> free;
    for (const auto& v : free_vars(t.gen.formula)) free.insert(v.name);
    for (const auto& v : t.gen.vars) {
      if (!free.count(v.name)) {
        Integer q;
        mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(d * v.sort.depth));
        n *= q;
      }
    }
    total += counting_value(t.scalar, p, d) * Rational(n);
  }
  total.canonicalize();
  return total;
}

}  // namespace motint
