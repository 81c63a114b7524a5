#include "motint/cplus.hpp"

#include <algorithm>
#include <set>
#include <sstream>

#include "motint/mpoly.hpp"

namespace motint {

namespace {

Term linear_term(const std::string& var, const Rational& c) {
  Term v = term::var(var, Sort::vf());
  if (c == 0) return v;
  if (c > 0) return term::sub(v, term::rational(c));
  return term::add(v, term::rational(-c));
}

void merge_factor(LinearFactors& lf, const LinearFactors::Factor& f) {
  for (auto& g : lf.factors) {
    if (g.var == f.var && g.center == f.center) {
      g.exp += f.exp;
      return;
    }
  }
  lf.factors.push_back(f);
}

// Linear factors plus the power of pi.
struct Lin {
  LinearFactors lf;
  int pi_exp = 0;
};

Lin lin_rec(const Term& t) {
  switch (t->kind) {
    case TermKind::Pi: return Lin{{}, 1};
    case TermKind::Mul: {
      Lin a = lin_rec(t->args[0]), b = lin_rec(t->args[1]);
      a.lf.k *= b.lf.k;
      a.pi_exp += b.pi_exp;
      for (const auto& f : b.lf.factors) merge_factor(a.lf, f);
      return a;
    }
    case TermKind::Pow: {
      Lin a = lin_rec(t->args[0]);
      Lin r;
      for (int i = 0; i < t->n; ++i) {
        r.lf.k *= a.lf.k;
        r.pi_exp += a.pi_exp;
        for (const auto& f : a.lf.factors) merge_factor(r.lf, f);
      }
      return r;
    }
    case TermKind::Neg: {
      Lin a = lin_rec(t->args[0]);
      a.lf.k = -a.lf.k;
      return a;
    }
    default: break;
  }
  MPoly h;
  try {
    h = mpoly_from_term(t);
  } catch (const ParseError&) {
    throw OutsideFragment("term '" + to_string(t) + "' is not a product of linear factors");
  }
  Lin out;
  if (h.is_zero()) {
    out.lf.k = 0;
    return out;
  }
  if (h.is_monomial()) {
    const auto& [e, c] = *h.terms.begin();
    out.lf.k = c;
    for (std::size_t i = 0; i < e.size(); ++i) {
      if (e[i]) out.lf.factors.push_back({h.vars[i], Rational(0), e[i]});
    }
    return out;
  }
  if (h.total_degree() == 1) {
    int var = -1;
    Rational a, b;
    for (const auto& [e, c] : h.terms) {
      int nz = -1;
      for (std::size_t i = 0; i < e.size(); ++i) {
        if (e[i]) nz = static_cast<int>(i);
      }
      if (nz < 0) {
        b = c;
      } else {
        if (var >= 0 && var != nz) throw OutsideFragment("term '" + to_string(t) + "' mixes several variables");
        var = nz;
        a = c;
      }
    }
    out.lf.k = a;
    Rational center = -b / a;
    center.canonicalize();
    out.lf.factors.push_back({h.vars[static_cast<std::size_t>(var)], center, 1});
    return out;
  }
  throw OutsideFragment("term '" + to_string(t) + "' is not a product of linear factors");
}

Rational ord_constant(const Rational& k, const PContext& ctx) {
  if (abs(k.get_num()) == 1 && k.get_den() == 1) return 0;
  if (ctx.p == 0) throw OutsideFragment("ord(" + k.get_str() + ") depends on the residue characteristic; give a p-context");
  return Rational(padic_valuation(k, ctx.p));
}

Term affine_to_term(const Affine& a) {
  Term out;
  auto add = [&](Term t) { out = out ? term::add(out, t) : t; };
  for (const auto& [v, c] : a.coef) {
    if (c.get_den() != 1) throw OutsideFragment("non-integral coefficient in " + a.to_string());
    Term x = term::var(v, Sort::vg());
    add(c == 1 ? x : term::mul(term::integer(c.get_num(), Sort::vg()), x));
  }
  if (a.c0 != 0 || !out) add(term::integer(a.c0.get_num(), Sort::vg()));
  return out;
}

bool has_vg_atom(const Formula& f) {
  if (is_atom(f)) return f->terms[0]->sort.kind == Sort::VG;
  for (const auto& s : f->subs) {
    if (has_vg_atom(s)) return true;
  }
  return false;
}

void collect_vg_atoms(const Formula& f, std::vector<Formula>& out, std::set<std::string>& seen) {
  if (is_atom(f)) {
    if (f->terms[0]->sort.kind == Sort::VG && seen.insert(to_string(f)).second) out.push_back(f);
    return;
  }
  if ((f->kind == FormKind::Exists || f->kind == FormKind::Forall) && has_vg_atom(f->subs[0])) {
    throw OutsideFragment("quantified value-group condition '" + to_string(f) + "'");
  }
  for (const auto& s : f->subs) collect_vg_atoms(s, out, seen);
}

// Replaces VF equalities by their almost-everywhere value and the listed
// value-group atoms by truth values.
Formula fold_atoms(const Formula& f, const std::map<std::string, bool>& vg_truth) {
  if (is_atom(f)) {
    if (f->terms[0]->sort.kind == Sort::VG) {
      auto it = vg_truth.find(to_string(f));
      if (it != vg_truth.end()) return it->second ? fm::truth() : fm::falsity();
      return f;
    }
    if (f->terms[0]->sort.kind == Sort::VF) {
      MPoly d = mpoly_from_term(term::sub(f->terms[0], f->terms[1]));
      bool zero = d.is_zero();
      bool eq = f->kind == FormKind::Eq;
      return (zero == eq) ? fm::truth() : fm::falsity();
    }
    return f;
  }
  switch (f->kind) {
    case FormKind::Not: return fm::neg(fold_atoms(f->subs[0], vg_truth));
    case FormKind::And:
    case FormKind::Or: {
      std::vector<Formula> s;
      for (const auto& g : f->subs) s.push_back(fold_atoms(g, vg_truth));
      return f->kind == FormKind::And ? fm::conj(s) : fm::disj(s);
    }
    case FormKind::Exists: return fm::exists(f->var, f->var_sort, fold_atoms(f->subs[0], vg_truth), f->lo, f->hi);
    case FormKind::Forall: return fm::forall(f->var, f->var_sort, fold_atoms(f->subs[0], vg_truth), f->lo, f->hi);
    default: return f;
  }
}

std::vector<std::string> names_of(const std::vector<FreeVar>& vs) {
  std::vector<std::string> out;
  for (const auto& v : vs) out.push_back(v.name);
  return out;
}

PFun with_vars(PFun pf, std::vector<std::string> vars) {
  pf.vars = std::move(vars);
  return pf;
}

ResClass rebase(const ResClass& rc, std::vector<FreeVar> base) {
  std::vector<ResClass::Term> t = rc.terms();
  return ResClass::raw(std::move(t), std::move(base));
}

Rational q_of(long p, int d) {
  Integer q;
  mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(d));
  return Rational(q);
}

}  // namespace

LinearFactors linearize(const Term& vf_term) {
  if (vf_term->sort.kind != Sort::VF) throw SortError("linearize expects a valued-field term");
  Lin l = lin_rec(vf_term);
  if (l.pi_exp) throw OutsideFragment("pi inside '" + to_string(vf_term) + "'; use the p-context form");
  return l.lf;
}

std::string derived_ord_name(const std::string& var, const Rational& center) { return to_string(term::ord(linear_term(var, center))); }

std::string derived_ac_name(int n, const std::string& var, const Rational& center) {
  return to_string(term::ac(n, linear_term(var, center)));
}

std::vector<FreeVar> MotFrame::of_sort(Sort::Kind k) const {
  std::vector<FreeVar> out;
  for (const auto& v : coords) {
    if (v.sort.kind == k) out.push_back(v);
  }
  return out;
}

std::vector<std::string> MotFrame::vg_names() const {
  std::vector<std::string> out = names_of(of_sort(Sort::VG));
  for (const auto& [n, t] : derived) {
    if (t->kind == TermKind::Ord) out.push_back(n);
  }
  return out;
}

std::vector<FreeVar> MotFrame::res_base() const {
  std::vector<FreeVar> out = of_sort(Sort::RES);
  for (const auto& v : of_sort(Sort::VF)) out.push_back(v);
  for (const auto& [n, t] : derived) {
    if (t->kind == TermKind::Ac) out.push_back({n, Sort::res(t->n)});
  }
  return out;
}

bool MotFrame::has(const std::string& name) const {
  for (const auto& v : coords) {
    if (v.name == name) return true;
  }
  return derived.count(name) > 0;
}

std::string MotFrame::add_ord(const std::string& var, const Rational& center) {
  std::string n = derived_ord_name(var, center);
  derived.emplace(n, term::ord(linear_term(var, center)));
  return n;
}

std::string MotFrame::add_ac(int n, const std::string& var, const Rational& center) {
  std::string name = derived_ac_name(n, var, center);
  derived.emplace(name, term::ac(n, linear_term(var, center)));
  return name;
}

std::string MotFrame::to_string() const {
  std::string out = "h[";
  for (std::size_t i = 0; i < coords.size(); ++i) out += (i ? ", " : "") + coords[i].name + ":" + coords[i].sort.to_string();
  return out + "]";
}

Affine ord_affine(const Term& vf_term, MotFrame& frame, const PContext& ctx) {
  Lin l = lin_rec(vf_term);
  if (l.lf.k == 0) throw OutsideFragment("ord of the zero term '" + to_string(vf_term) + "'");
  Affine a(ord_constant(l.lf.k, ctx) + Rational(l.pi_exp));
  for (const auto& f : l.lf.factors) {
    if (!frame.has(f.var)) throw FrameMismatch("variable '" + f.var + "' is not a coordinate");
    a = a + Affine::var(frame.add_ord(f.var, f.center), Rational(f.exp));
  }
  return a;
}

Term ac_term(int n, const Term& vf_term, MotFrame& frame) {
  Lin l = lin_rec(vf_term);
  if (l.lf.k == 0) return term::integer(0, Sort::res(n));
  Term out;
  auto mul = [&](Term t) { out = out ? term::mul(out, t) : t; };
  if (l.lf.k != 1) mul(term::ac(n, term::rational(l.lf.k)));
  for (const auto& f : l.lf.factors) {
    if (!frame.has(f.var)) throw FrameMismatch("variable '" + f.var + "' is not a coordinate");
    Term v = term::var(frame.add_ac(n, f.var, f.center), Sort::res(n));
    mul(f.exp == 1 ? v : term::pow(v, f.exp));
  }
  return out ? out : term::integer(1, Sort::res(n));
}

Affine vg_affine(const Term& t, MotFrame& frame, const PContext& ctx) {
  switch (t->kind) {
    case TermKind::Var: return Affine::var(t->name);
    case TermKind::Int: return Affine(t->value);
    case TermKind::Add: return vg_affine(t->args[0], frame, ctx) + vg_affine(t->args[1], frame, ctx);
    case TermKind::Sub: return vg_affine(t->args[0], frame, ctx) - vg_affine(t->args[1], frame, ctx);
    case TermKind::Neg: return -vg_affine(t->args[0], frame, ctx);
    case TermKind::Mul: {
      Affine a = vg_affine(t->args[0], frame, ctx), b = vg_affine(t->args[1], frame, ctx);
      if (a.is_const()) return a.c0 * b;
      if (b.is_const()) return b.c0 * a;
      throw OutsideFragment("nonlinear value-group term '" + to_string(t) + "'");
    }
    case TermKind::Ord: return ord_affine(t->args[0], frame, ctx);
    default: throw OutsideFragment("value-group term '" + to_string(t) + "'");
  }
}

Term res_term(const Term& t, MotFrame& frame) {
  return map_term(t, [&](const Term& s) -> std::optional<Term> {
    if (s->kind == TermKind::Ac && s->args[0]->sort.kind == Sort::VF) return ac_term(s->n, s->args[0], frame);
    return std::nullopt;
  });
}

MotFun MotFun::zero(MotFrame frame) {
  MotFun f;
  f.frame = std::move(frame);
  return f;
}

MotFun MotFun::constant(const ARat& a, MotFrame frame) {
  MotFun f = zero(std::move(frame));
  if (!a.is_zero()) f.terms.push_back({PFun::constant(a, f.frame.vg_names()), ResClass::one(f.frame.res_base())});
  return f;
}

MotFun MotFun::from_pfun(const PFun& pf, MotFrame frame) {
  MotFun f = zero(std::move(frame));
  f.terms.push_back({with_vars(pf, f.frame.vg_names()), ResClass::one(f.frame.res_base())});
  return f.normalized();
}

MotFun MotFun::from_class(const ResClass& rc, MotFrame frame) {
  MotFun f = zero(std::move(frame));
  f.terms.push_back({PFun::constant(ARat(1), f.frame.vg_names()), rebase(rc, f.frame.res_base())});
  return f.normalized();
}

MotFun MotFun::indicator(const Formula& cond, MotFrame frame, const PContext& ctx) {
  Formula c = simplify(cond);
  std::vector<Formula> atoms;
  std::set<std::string> seen;
  collect_vg_atoms(c, atoms, seen);
  if (atoms.size() > 12) throw OutsideFragment("too many value-group atoms (" + std::to_string(atoms.size()) + ")");
  // value-group atoms with ord(...) replaced by derived names
  std::vector<Formula> lin;
  for (const auto& a : atoms) {
    lin.push_back(map_formula(a, [&](const Term& t) -> std::optional<Term> {
      if (t->kind == TermKind::Ord) return affine_to_term(ord_affine(t->args[0], frame, ctx));
      return std::nullopt;
    }));
  }
  // residue atoms with ac_n(VF) replaced by derived names
  Formula res_side = map_formula(c, [&](const Term& t) -> std::optional<Term> {
    if (t->kind == TermKind::Ac && t->args[0]->sort.kind == Sort::VF) return ac_term(t->n, t->args[0], frame);
    return std::nullopt;
  });
  std::vector<std::string> atom_keys;
  for (const auto& a : atoms) atom_keys.push_back(motint::to_string(a));
  MotFun out = zero(frame);
  const std::size_t k = atoms.size();
  for (std::size_t mask = 0; mask < (std::size_t(1) << k); ++mask) {
    std::vector<Formula> lits;
    std::map<std::string, bool> truth;
    for (std::size_t i = 0; i < k; ++i) {
      bool on = (mask >> i) & 1;
      lits.push_back(on ? lin[i] : fm::neg(lin[i]));
      truth[atom_keys[i]] = on;
    }
    Formula rf = simplify(fold_atoms(res_side, truth));
    if (rf->kind == FormKind::False) continue;
    CellSet cells = cells_of(fm::conj(lits));
    if (cells.empty()) continue;
    PFun pf;
    for (const auto& cell : cells) pf = pf + PFun::indicator(cell, {});
    ResClass rc = ResClass::gen({}, rf, frame.res_base());
    if (rc.is_zero()) continue;
    out.terms.push_back({pf, rc});
  }
  out.frame = frame;
  return out.extended(frame).normalized();
}

MotFun MotFun::L_power(const Term& e, MotFrame frame, const PContext& ctx) {
  Affine a = vg_affine(e, frame, ctx);
  MotFun f = zero(frame);
  f.terms.push_back({PFun::term(PCell::universe(), PTerm{ARat(1), a, {}}, frame.vg_names()), ResClass::one(frame.res_base())});
  return f;
}

MotFun MotFun::extended(const MotFrame& to) const {
  MotFun f = zero(to);
  for (const auto& t : terms) f.terms.push_back({with_vars(t.pf, to.vg_names()), rebase(t.rc, to.res_base())});
  return f;
}

MotFun MotFun::normalized() const {
  std::map<std::string, std::pair<PFun, ResClass>> groups;
  const auto base = frame.res_base();
  const auto vars = frame.vg_names();
  for (const auto& t : terms) {
    for (const auto& rt : t.rc.terms()) {
      ResClass g = ResClass::raw({{ARat(1), rt.gen}}, base);
      std::string key = g.to_string();
      PFun pf = scale(t.pf, rt.scalar);
      auto it = groups.find(key);
      if (it == groups.end()) {
        groups.emplace(key, std::make_pair(pf, g));
      } else {
        it->second.first = it->second.first + pf;
      }
    }
  }
  MotFun out = zero(frame);
  for (auto& [key, v] : groups) {
    PFun pf = simplify(with_vars(v.first, vars));
    if (pf.is_zero()) continue;
    if (vars.empty()) {
      ARat c = pf.as_constant();
      if (c.is_zero()) continue;
      pf = PFun::constant(c, {});
    }
    out.terms.push_back({pf, v.second});
  }
  return out;
}

std::optional<ARat> MotFun::as_constant() const {
  MotFun n = normalized();
  ARat sum;
  for (const auto& t : n.terms) {
    auto s = t.rc.as_scalar();
    if (!s) return std::nullopt;
    try {
      sum += t.pf.as_constant() * *s;
    } catch (const EvalError&) {
      return std::nullopt;
    }
  }
  return sum;
}

std::string MotFun::to_string() const {
  if (terms.empty()) return "0";
  std::ostringstream os;
  for (std::size_t i = 0; i < terms.size(); ++i) {
    if (i) os << " + ";
    const auto& t = terms[i];
    std::string pf;
    try {
      pf = t.pf.as_constant().to_string();
    } catch (const EvalError&) {
      pf = t.pf.to_string();
    }
    auto s = t.rc.as_scalar();
    if (s && s->is_one()) {
      os << "(" << pf << ")";
    } else {
      os << "(" << pf << ") x " << t.rc.to_string();
    }
  }
  return os.str();
}

MotFrame merge_frames(const MotFrame& a, const MotFrame& b) {
  MotFrame out = a;
  for (const auto& v : b.coords) {
    bool found = false;
    for (const auto& w : a.coords) {
      if (w.name == v.name) {
        if (w.sort != v.sort) throw FrameMismatch("coordinate '" + v.name + "' has sorts " + w.sort.to_string() + " and " + v.sort.to_string());
        found = true;
      }
    }
    if (!found) out.coords.push_back(v);
  }
  for (const auto& [n, t] : b.derived) out.derived.emplace(n, t);
  return out;
}

MotFun operator+(const MotFun& a, const MotFun& b) {
  MotFrame fr = merge_frames(a.frame, b.frame);
  MotFun x = a.extended(fr), y = b.extended(fr);
  x.terms.insert(x.terms.end(), y.terms.begin(), y.terms.end());
  return x.normalized();
}

MotFun operator*(const MotFun& a, const MotFun& b) {
  MotFrame fr = merge_frames(a.frame, b.frame);
  MotFun x = a.extended(fr), y = b.extended(fr);
  MotFun out = MotFun::zero(fr);
  for (const auto& s : x.terms) {
    for (const auto& t : y.terms) out.terms.push_back({s.pf * t.pf, s.rc * t.rc});
  }
  return out.normalized();
}

MotFun scale(const MotFun& a, const ARat& s) {
  MotFun out = a;
  for (auto& t : out.terms) t.pf = scale(t.pf, s);
  return out.normalized();
}

MotFun pullback(const MotFun& a, const CoordMap& f, const MotFrame& source, const PContext& ctx) {
  MotFrame fr = source;
  std::map<std::string, Affine> vg_map;
  std::map<std::string, Term> res_map;
  auto image = [&](const FreeVar& v) -> Term {
    auto it = f.find(v.name);
    if (it != f.end()) return it->second;
    bool present = false;
    for (const auto& w : source.coords) present = present || (w.name == v.name && w.sort == v.sort);
    if (!present) throw UnsupportedMorphism("no image for coordinate '" + v.name + "'");
    return term::var(v.name, v.sort);
  };
  std::map<std::string, Term> vf_image;
  for (const auto& v : a.frame.coords) {
    Term img = image(v);
    if (img->sort != v.sort) throw UnsupportedMorphism("image of '" + v.name + "' has sort " + img->sort.to_string());
    if (v.sort.kind == Sort::VG) {
      vg_map[v.name] = vg_affine(img, fr, ctx);
    } else if (v.sort.kind == Sort::RES) {
      res_map[v.name] = res_term(img, fr);
    } else {
      vf_image[v.name] = img;
      res_map[v.name] = img;
    }
  }
  for (const auto& [name, t] : a.frame.derived) {
    Term arg = substitute(t->args[0], vf_image);
    if (t->kind == TermKind::Ord) {
      vg_map[name] = ord_affine(arg, fr, ctx);
    } else {
      res_map[name] = ac_term(t->n, arg, fr);
    }
  }
  MotFun out = MotFun::zero(fr);
  for (const auto& t : a.terms) {
    out.terms.push_back({t.pf.substitute(vg_map, fr.vg_names()), t.rc.substitute(res_map, fr.res_base())});
  }
  out.frame = fr;
  return out.extended(fr).normalized();
}

Env with_derived(const MotFrame& frame, const Env& point) {
  Env env = point;
  for (const auto& [name, t] : frame.derived) {
    if (t->kind == TermKind::Ord) {
      VGValue v = eval_vg(t, env);
      if (v.undefined) throw EvalError("point lies on the exceptional locus: " + name + " is ord(0)");
      if (!v.is_point()) throw InsufficientPrecision("precision does not determine " + name);
      env.vg[name] = *v.lo;
    } else {
      env.res.insert_or_assign(name, eval_res(t, env));
    }
  }
  return env;
}

Rational specialize(const MotFun& a, long p, int d, const Env& point, const CountOptions& opts) {
  Env base = point;
  base.p = p;
  base.d = d;
  const Env env = with_derived(a.frame, base);
  const Rational q = q_of(p, d);
  Rational total = 0;
  for (const auto& t : a.terms) {
    std::map<std::string, Integer> vg;
    for (const auto& n : t.pf.vars) {
      auto it = env.vg.find(n);
      if (it == env.vg.end()) throw EvalError("value-group coordinate '" + n + "' is not bound");
      vg[n] = it->second;
    }
    Rational v = t.pf.eval(vg, q);
    if (v == 0) continue;
    total += v * count_class(t.rc, p, d, env, opts);
  }
  total.canonicalize();
  return total;
}

namespace {

void split_fiber(const MotFun& a, const std::vector<std::string>& fiber, std::vector<std::string>& vg, std::vector<std::string>& res) {
  for (const auto& n : fiber) {
    bool found = false;
    for (const auto& v : a.frame.coords) {
      if (v.name != n) continue;
      found = true;
      if (v.sort.kind == Sort::VG) vg.push_back(n);
      else if (v.sort.kind == Sort::RES) res.push_back(n);
      else throw FrameMismatch("valued-field coordinate '" + n + "' is integrated by the vfint module");
    }
    if (!found) throw FrameMismatch("'" + n + "' is not a coordinate of " + a.frame.to_string());
  }
}

}  // namespace

bool is_integrable(const MotFun& a, const std::vector<std::string>& fiber) {
  std::vector<std::string> vg, res;
  split_fiber(a, fiber, vg, res);
  for (const auto& t : a.terms) {
    if (!is_integrable(t.pf, vg)) return false;
  }
  return true;
}

MotFun mu_vg_res(const MotFun& a, const std::vector<std::string>& fiber) {
  std::vector<std::string> vg, res;
  split_fiber(a, fiber, vg, res);
  MotFrame fr = a.frame;
  std::set<std::string> fs(fiber.begin(), fiber.end());
  fr.coords.erase(std::remove_if(fr.coords.begin(), fr.coords.end(), [&](const FreeVar& v) { return fs.count(v.name) > 0; }),
                  fr.coords.end());
  MotFun out = MotFun::zero(fr);
  for (const auto& t : a.terms) {
    PFun pf = sum_fibers(t.pf, vg);
    ResClass rc = mu_res(t.rc, res);
    out.terms.push_back({with_vars(pf, fr.vg_names()), rebase(rc, fr.res_base())});
  }
  return out.normalized();
}

MotFun lift(const MotFun& a, std::vector<FreeVar>& added) {
  added.clear();
  MotFun n = a.normalized();
  struct Item {
    PFun pf;
    ResGen gen;
    std::vector<FreeVar> coords;
  };
  std::vector<Item> items;
  for (const auto& t : n.terms) {
    for (const auto& rt : t.rc.terms()) {
      Item it{scale(t.pf, rt.scalar), rt.gen, {}};
      for (const auto& v : rt.gen.vars) {
        FreeVar c{"_l" + std::to_string(added.size() + 1), v.sort};
        added.push_back(c);
        it.coords.push_back(c);
      }
      items.push_back(std::move(it));
    }
  }
  MotFrame fr = n.frame;
  for (const auto& v : added) fr.coords.push_back(v);
  MotFun out = MotFun::zero(fr);
  for (const auto& it : items) {
    std::map<std::string, std::string> ren;
    std::set<std::string> own;
    for (std::size_t i = 0; i < it.gen.vars.size(); ++i) {
      ren[it.gen.vars[i].name] = it.coords[i].name;
      own.insert(it.coords[i].name);
    }
    std::vector<Formula> parts{rename(it.gen.formula, ren)};
    for (const auto& v : added) {
      if (!own.count(v.name)) parts.push_back(fm::atom(FormKind::Eq, term::var(v.name, v.sort), term::integer(0, v.sort)));
    }
    ResClass ind = ResClass::raw({{ARat(1), ResGen{{}, fm::conj(parts)}}}, fr.res_base());
    out.terms.push_back({with_vars(it.pf, fr.vg_names()), ind});
  }
  return out;
}

Equality is_equal(const MotFun& a, const MotFun& b) {
  MotFrame fr = merge_frames(a.frame, b.frame);
  return a.extended(fr).normalized().to_string() == b.extended(fr).normalized().to_string() ? Equality::Equal : Equality::Unknown;
}

std::optional<std::string> refute(const MotFun& a, const MotFun& b, const std::vector<Env>& points,
                                  const std::vector<std::pair<long, int>>& grid) {
  for (const auto& [p, d] : grid) {
    for (std::size_t i = 0; i < points.size(); ++i) {
      Rational x = specialize(a, p, d, points[i]), y = specialize(b, p, d, points[i]);
      if (x != y) {
        return "p=" + std::to_string(p) + " d=" + std::to_string(d) + " point #" + std::to_string(i) + ": " + x.get_str() + " vs " + y.get_str();
      }
    }
  }
  return std::nullopt;
}

}  // namespace motint
