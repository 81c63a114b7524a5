#include "motint/vfint.hpp"

#include <algorithm>
#include <set>

namespace motint {

namespace {

Integer ord_of(const Rational& r, const PContext& ctx) {
  if (r == 0) throw OutsideFragment("coincident centers");
  if (abs(r.get_num()) == 1 && r.get_den() == 1) return 0;
  if (ctx.p == 0) throw OutsideFragment("ord(" + r.get_str() + ") depends on the residue characteristic; give a p-context");
  return Integer(padic_valuation(r, ctx.p));
}

// var and center of a derived coordinate's argument
std::pair<std::string, Rational> derived_target(const Term& t) {
  LinearFactors lf = linearize(t->args[0]);
  return {lf.factors.at(0).var, lf.factors.at(0).center};
}

struct ZPiece {
  std::optional<Integer> lo, hi;
  bool is_point() const { return lo && hi && *lo == *hi; }
};

std::vector<ZPiece> pieces_from(const std::set<Integer>& s) {
  std::vector<ZPiece> out;
  if (s.empty()) return {ZPiece{}};
  std::vector<Integer> v(s.begin(), s.end());
  out.push_back({std::nullopt, v.front() - 1});
  for (std::size_t i = 0; i < v.size(); ++i) {
    out.push_back({v[i], v[i]});
    if (i + 1 < v.size() && v[i] + 1 <= v[i + 1] - 1) out.push_back({v[i] + 1, v[i + 1] - 1});
  }
  out.push_back({v.back() + 1, std::nullopt});
  return out;
}

PCell zcell(const ZPiece& pc) {
  std::optional<Affine> lo, hi;
  if (pc.lo) lo = Affine(Rational(*pc.lo));
  if (pc.hi) hi = Affine(Rational(*pc.hi));
  return PCell::bounds(kCellZ, lo, hi);
}

Term xi_term(int n, int m) {
  Term xi = term::var(kCellXi, Sort::res(n));
  return m == n ? xi : term::proj(n, m, xi);
}

Term pi_times(int k, int m, Term x) {
  Term pk = k == 1 ? term::pi(Sort::res(m)) : term::pow(term::pi(Sort::res(m)), k);
  return term::mul(pk, x);
}

void check_free_of(const MotFun& phi, const std::string& t) {
  for (const auto& term : phi.terms) {
    for (const auto& rt : term.rc.terms()) {
      for (const auto& v : free_vars(rt.gen.formula)) {
        if (v.name == t) throw NotCellPresented("residue condition '" + rt.gen.to_string() + "' mentions " + t + " outside ord/ac");
      }
    }
  }
}

}  // namespace

std::string VFCell::to_string(const std::string& t) const {
  std::string c = center.get_str();
  if (point) return t + " = " + c + (point_cond ? " if " + motint::to_string(point_cond) : "");
  std::string zs;
  for (std::size_t i = 0; i < z_cells.size(); ++i) zs += (i ? " | " : "") + z_cells[i].to_string();
  return "ball c=" + c + " n=" + std::to_string(depth) + " z: " + (zs.empty() ? "none" : zs) + "; xi: " + motint::to_string(xi_cond);
}

MotFrame CellDecomposition::value_frame() const {
  MotFrame f = base;
  f.coords.push_back({kCellZ, Sort::vg()});
  f.coords.push_back({kCellXi, Sort::res(depth)});
  return f;
}

std::vector<Rational> centers_of(const MotFrame& frame, const std::string& t) {
  std::set<Rational> cs;
  for (const auto& [name, term] : frame.derived) {
    auto [v, c] = derived_target(term);
    if (v == t) cs.insert(c);
  }
  if (cs.empty()) cs.insert(Rational(0));
  return {cs.begin(), cs.end()};
}

CellDecomposition decompose(const MotFun& phi_in, const std::string& t, const PContext& ctx) {
  MotFun phi = phi_in.normalized();
  bool found = false;
  for (const auto& v : phi.frame.coords) found = found || (v.name == t && v.sort.kind == Sort::VF);
  if (!found) throw FrameMismatch("'" + t + "' is not a valued-field coordinate of " + phi.frame.to_string());
  check_free_of(phi, t);

  CellDecomposition dec;
  dec.var = t;
  dec.centers = centers_of(phi.frame, t);
  for (const auto& v : phi.frame.coords) {
    if (v.name == t) continue;
    if (v.name == kCellZ || v.name == kCellXi) throw FrameMismatch("coordinate name '" + v.name + "' is reserved");
    dec.base.coords.push_back(v);
  }
  struct Derived {
    std::string name;
    bool is_ord;
    int m;
    std::size_t j;
  };
  std::vector<Derived> own;
  for (const auto& [name, term] : phi.frame.derived) {
    auto [v, c] = derived_target(term);
    if (v != t) {
      dec.base.derived.emplace(name, term);
      continue;
    }
    std::size_t j = static_cast<std::size_t>(std::find(dec.centers.begin(), dec.centers.end(), c) - dec.centers.begin());
    bool is_ord = term->kind == TermKind::Ord;
    own.push_back({name, is_ord, is_ord ? 0 : term->n, j});
    if (!is_ord) dec.depth = std::max(dec.depth, term->n);
  }
  const int n = dec.depth;
  const std::size_t k = dec.centers.size();
  std::vector<std::vector<Integer>> delta(k, std::vector<Integer>(k));
  for (std::size_t i = 0; i < k; ++i) {
    for (std::size_t j = 0; j < k; ++j) {
      if (i != j) delta[i][j] = ord_of(dec.centers[i] - dec.centers[j], ctx);
    }
  }
  const MotFrame vf = dec.value_frame();
  const auto vg_names = vf.vg_names();
  const auto res_base = vf.res_base();

  for (std::size_t i = 0; i < k; ++i) {
    std::set<Integer> special;
    std::optional<Integer> lb;
    for (std::size_t j = 0; j < k; ++j) {
      if (j == i) continue;
      for (int s = -(n - 1); s <= n - 1; ++s) special.insert(delta[i][j] + s);
      if (j < i && (!lb || delta[i][j] + 1 > *lb)) lb = delta[i][j] + 1;
    }
    for (ZPiece pc : pieces_from(special)) {
      if (lb) {
        if (pc.hi && *pc.hi < *lb) continue;
        if (!pc.lo || *pc.lo < *lb) pc.lo = *lb;
      }
      // position relative to each other center: -1 below, 0 at, 1 above; gap |z - delta|
      auto relation = [&](std::size_t j) -> std::pair<int, Integer> {
        const Integer& d = delta[i][j];
        if (pc.is_point()) {
          Integer z = *pc.lo;
          if (z < d) return {-1, d - z};
          if (z > d) return {1, z - d};
          return {0, 0};
        }
        if (pc.hi && *pc.hi < d) return {-1, Integer(n)};
        return {1, Integer(n)};
      };
      std::map<std::string, Affine> vg_map;
      std::map<std::string, Term> res_map;
      std::vector<Formula> xi_parts{fm::atom(FormKind::Ne, xi_term(n, 1), term::integer(0, Sort::res(1)))};
      for (std::size_t j = i + 1; j < k; ++j) {
        if (relation(j).first == 0) {
          Term s = term::add(xi_term(n, 1), term::ac(1, term::rational(dec.centers[i] - dec.centers[j])));
          xi_parts.push_back(fm::atom(FormKind::Ne, s, term::integer(0, Sort::res(1))));
        }
      }
      for (const auto& dv : own) {
        if (dv.j == i) {
          if (dv.is_ord) vg_map[dv.name] = Affine::var(kCellZ);
          else res_map[dv.name] = xi_term(n, dv.m);
          continue;
        }
        auto [rel, gap] = relation(dv.j);
        if (dv.is_ord) {
          vg_map[dv.name] = rel == 1 ? Affine(Rational(delta[i][dv.j])) : Affine::var(kCellZ);
          continue;
        }
        const int m = dv.m;
        Term dlit = term::ac(m, term::rational(dec.centers[i] - dec.centers[dv.j]));
        Term own_ac = xi_term(n, m);
        Term r;
        if (rel == 0) {
          r = term::add(own_ac, dlit);
        } else if (rel < 0) {
          r = gap >= m ? own_ac : term::add(own_ac, pi_times(static_cast<int>(gap.get_si()), m, dlit));
        } else {
          r = gap >= m ? dlit : term::add(dlit, pi_times(static_cast<int>(gap.get_si()), m, own_ac));
        }
        res_map[dv.name] = r;
      }
      MotFun value = MotFun::zero(vf);
      for (const auto& term : phi.terms) {
        value.terms.push_back({term.pf.substitute(vg_map, vg_names), term.rc.substitute(res_map, res_base)});
      }
      value = value.normalized();
      if (value.is_zero()) continue;
      VFCell cell;
      cell.center = dec.centers[i];
      cell.depth = n;
      cell.xi_cond = fm::conj(xi_parts);
      cell.z_cells = {zcell(pc)};
      dec.cells.push_back(std::move(cell));
      dec.values.push_back(std::move(value));
    }
  }
  for (const auto& c : dec.centers) dec.ledger.push_back(t + " = " + c.get_str());
  return dec;
}

CellDecomposition decompose_fragment(const Formula& cond, const MotFrame& frame, const std::string& t, const PContext& ctx) {
  MotFrame fr = frame;
  // roots of linear valued-field equalities become centers
  std::function<void(const Formula&)> scan = [&](const Formula& f) {
    if (is_atom(f)) {
      if (f->terms[0]->sort.kind != Sort::VF) return;
      LinearFactors lf = linearize(term::sub(f->terms[0], f->terms[1]));
      for (const auto& fac : lf.factors) {
        if (fac.var == t) fr.add_ord(t, fac.center);
      }
      return;
    }
    for (const auto& s : f->subs) scan(s);
  };
  scan(cond);
  MotFun phi = MotFun::indicator(cond, fr, ctx);
  // keep the centers even where the indicator no longer mentions them
  for (const auto& [n, term] : fr.derived) phi.frame.derived.emplace(n, term);
  phi = phi.extended(phi.frame);
  CellDecomposition dec = decompose(phi, t, ctx);
  CellDecomposition out;
  out.var = t;
  out.base = dec.base;
  out.depth = dec.depth;
  out.centers = dec.centers;
  const MotFrame vf = dec.value_frame();
  for (std::size_t c = 0; c < dec.cells.size(); ++c) {
    for (const auto& term : dec.values[c].terms) {
      for (const auto& rt : term.rc.terms()) {
        if (!rt.gen.vars.empty() || !rt.scalar.is_one()) throw Error("Error", "indicator value is not a set: " + term.rc.to_string());
        for (const auto& piece : term.pf.pieces) {
          if (piece.terms.size() != 1 || !piece.terms[0].beta.is_const() || piece.terms[0].beta.c0 != 0 || !piece.terms[0].alphas.empty() ||
              !piece.terms[0].a.is_one()) {
            throw Error("Error", "indicator value is not a set: " + term.pf.to_string());
          }
          VFCell cell = dec.cells[c];
          cell.xi_cond = simplify(fm::conj({cell.xi_cond, rt.gen.formula}));
          CellSet zs;
          for (const auto& zc : cell.z_cells) {
            PCell x = intersect(zc, piece.cell);
            if (x.normalize() && !is_empty(x)) zs.push_back(x);
          }
          if (zs.empty()) continue;
          cell.z_cells = zs;
          out.cells.push_back(cell);
          out.values.push_back(MotFun::constant(ARat(1), vf));
        }
      }
    }
  }
  for (const auto& c : dec.centers) {
    VFCell p;
    p.center = c;
    p.point = true;
    p.point_cond = simplify(substitute(cond, std::map<std::string, Term>{{t, term::rational(c)}}));
    if (p.point_cond->kind == FormKind::False) continue;
    out.cells.push_back(p);
    out.values.push_back(MotFun::zero(vf));
  }
  return out;
}

bool cell_contains(const VFCell& cell, const CellDecomposition& dec, const Env& env) {
  Env e = with_derived(dec.base, env);
  const PadicElem& tv = env.vf.at(dec.var);
  PadicElem u = tv - PadicElem::exact(tv.p(), tv.d(), cell.center);
  if (cell.point) return u.is_zero() && evaluate(cell.point_cond, e);
  auto z = u.ord();
  if (!z) return false;
  e.vg[kCellZ] = Integer(*z);
  e.res.insert_or_assign(kCellXi, u.ac(cell.depth));
  bool in_z = false;
  for (const auto& c : cell.z_cells) in_z = in_z || c.contains(e.vg);
  return in_z && evaluate(cell.xi_cond, e);
}

MotFun integrate_cell_family(const CellDecomposition& dec) {
  const MotFrame vf = dec.value_frame();
  MotFun total = MotFun::zero(vf);
  for (std::size_t c = 0; c < dec.cells.size(); ++c) {
    const VFCell& cell = dec.cells[c];
    if (cell.point) continue;
    PFun vol;
    for (const auto& zc : cell.z_cells) {
      vol = vol + PFun::term(zc, PTerm{ARat(1), Affine(Rational(-cell.depth)) + Affine::var(kCellZ, -1), {}}, vf.vg_names());
    }
    MotFun ind = MotFun::zero(vf);
    ind.terms.push_back({vol, ResClass::gen({}, cell.xi_cond, vf.res_base())});
    total = total + dec.values[c] * ind;
  }
  return mu_vg_res(total, {kCellZ, kCellXi});
}

IntegralResult integrate_iterated(const MotFun& phi, const std::vector<std::string>& order, const std::vector<std::string>& fiber,
                                  const PContext& ctx) {
  IntegralResult r;
  MotFun cur = phi;
  try {
    for (const auto& t : order) {
      CellDecomposition dec = decompose(cur, t, ctx);
      r.ledger.insert(r.ledger.end(), dec.ledger.begin(), dec.ledger.end());
      cur = integrate_cell_family(dec);
    }
    if (!fiber.empty()) cur = mu_vg_res(cur, fiber);
  } catch (const NotIntegrable& e) {
    r.integrable = false;
    r.reason = e.what();
    return r;
  }
  r.value = cur;
  return r;
}

namespace {

// u = k * pi^e
std::pair<Rational, int> unit_shape(const Term& u) {
  switch (u->kind) {
    case TermKind::Pi: return {Rational(1), 1};
    case TermKind::Rat:
    case TermKind::Int: return {u->value, 0};
    case TermKind::Neg: {
      auto [k, e] = unit_shape(u->args[0]);
      return {-k, e};
    }
    case TermKind::Mul: {
      auto [k1, e1] = unit_shape(u->args[0]);
      auto [k2, e2] = unit_shape(u->args[1]);
      return {k1 * k2, e1 + e2};
    }
    case TermKind::Pow: {
      auto [k, e] = unit_shape(u->args[0]);
      Rational r = 1;
      for (int i = 0; i < u->n; ++i) r *= k;
      return {r, e * u->n};
    }
    default: throw OutsideFragment("scaling factor '" + to_string(u) + "' is not a constant times a power of pi");
  }
}

}  // namespace

MotFun change_of_variables_1d(const MotFun& phi, const std::string& s, const std::string& t, const Term& u, const Rational& c,
                              const PContext& ctx) {
  auto [k, e] = unit_shape(u);
  if (k == 0) throw ZeroDerivative("the map t -> 0*t + c is not a change of variables");
  MotFrame source;
  bool found = false;
  for (const auto& v : phi.frame.coords) {
    if (v.name == t) throw FrameMismatch("'" + t + "' is already a coordinate");
    if (v.name == s) {
      if (v.sort.kind != Sort::VF) throw FrameMismatch("'" + s + "' is not a valued-field coordinate");
      source.coords.push_back({t, v.sort});
      found = true;
    } else {
      source.coords.push_back(v);
    }
  }
  if (!found) throw FrameMismatch("'" + s + "' is not a coordinate");
  Term tv = term::var(t, Sort::vf());
  Term image;
  Integer ord_u;
  if (ctx.p != 0) {
    Rational ur = k;
    for (int i = 0; i < std::abs(e); ++i) ur = e > 0 ? Rational(ur * ctx.p) : Rational(ur / ctx.p);
    ur.canonicalize();
    image = term::mul(term::rational(ur), tv);
    ord_u = Integer(padic_valuation(ur, ctx.p));
  } else {
    if (c != 0 && e != 0) throw OutsideFragment("translation with a pi-multiple needs a p-context");
    image = term::mul(u, tv);
    ord_u = ord_of(k, ctx) + e;
  }
  if (c != 0) image = term::add(image, term::rational(c));
  MotFun pulled = pullback(phi, CoordMap{{s, image}}, source, ctx);
  return scale(pulled, ARat::L_pow(static_cast<int>(-ord_u.get_si())));
}

MotFun parse_integrand(const std::string& text, const MotFrame& frame, const PContext& ctx) {
  ParseOptions opts;
  for (const auto& v : frame.coords) opts.declared[v.name] = v.sort;
  std::vector<std::string> factors;
  int depth = 0;
  std::string cur;
  for (char ch : text) {
    if (ch == '(' || ch == '[') ++depth;
    if (ch == ')' || ch == ']') --depth;
    if (ch == '*' && depth == 0) {
      factors.push_back(cur);
      cur.clear();
    } else {
      cur += ch;
    }
  }
  factors.push_back(cur);
  MotFun out = MotFun::constant(ARat(1), frame);
  for (auto f : factors) {
    auto b = f.find_first_not_of(" \t\n");
    auto e = f.find_last_not_of(" \t\n");
    if (b == std::string::npos) throw ParseError("empty factor in integrand", 0);
    f = f.substr(b, e - b + 1);
    if (f.front() == '[' && f.back() == ']') {
      out = out * MotFun::indicator(parse_formula(f.substr(1, f.size() - 2), opts), frame, ctx);
    } else if (f.rfind("L^(", 0) == 0 && f.back() == ')') {
      out = out * MotFun::L_power(parse_term(f.substr(3, f.size() - 4), Sort::vg(), opts), frame, ctx);
    } else {
      out = scale(out, parse_arat(f));
    }
  }
  return out;
}

}  // namespace motint
