#include <algorithm>
#include <sstream>

#include "motint/presburger.hpp"

namespace motint {

namespace {

Integer lcm(const Integer& a, const Integer& b) {
  Integer r;
  mpz_lcm(r.get_mpz_t(), a.get_mpz_t(), b.get_mpz_t());
  return r;
}

Integer mod_pos(const Integer& a, const Integer& m) {
  Integer r;
  mpz_fdiv_r(r.get_mpz_t(), a.get_mpz_t(), m.get_mpz_t());
  return r;
}

Rational qpow(const Rational& q, const Rational& e) {
  if (e.get_den() != 1) throw EvalError("exponent " + e.get_str() + " is not an integer");
  Integer n = e.get_num();
  Rational r = 1, b = q;
  Integer k = abs(n);
  while (k > 0) {
    if (mpz_odd_p(k.get_mpz_t())) r *= b;
    b *= b;
    k /= 2;
  }
  return n < 0 ? Rational(1) / r : r;
}

// Constant alphas and the integer part of beta's constant fold into the
// coefficient;
// equal (beta, alphas) merge.
std::vector<PTerm> canonical(const std::vector<PTerm>& ts) {
  std::map<std::pair<Affine, std::vector<Affine>>, ARat> acc;
  for (const auto& t : ts) {
    ARat a = t.a;
    std::vector<Affine> al;
    for (const auto& x : t.alphas) {
      if (x.is_const()) {
        if (x.c0.get_den() != 1) throw EvalError("non-integral constant factor " + x.c0.get_str());
        a *= ARat(x.c0.get_num());
      } else {
        al.push_back(x);
      }
    }
    if (a.is_zero()) continue;
    // the integer part of beta's constant moves into a, leaving c0 in [0, 1)
    Affine beta = t.beta;
    Integer fl;
    mpz_fdiv_q(fl.get_mpz_t(), beta.c0.get_num_mpz_t(), beta.c0.get_den_mpz_t());
    if (fl != 0) {
      a *= ARat::L_pow(fl.get_si());
      beta.c0 -= Rational(fl);
    }
    std::sort(al.begin(), al.end());
    auto key = std::make_pair(beta, al);
    auto it = acc.find(key);
    if (it == acc.end()) {
      acc.emplace(key, a);
    } else {
      it->second += a;
    }
  }
  std::vector<PTerm> out;
  for (const auto& [key, a] : acc) {
    if (a.is_zero()) continue;
    out.push_back({a, key.first, key.second});
  }
  return out;
}

PTerm subst_term(const PTerm& t, const std::map<std::string, Affine>& m) {
  PTerm r{t.a, t.beta.substitute(m), {}};
  for (const auto& x : t.alphas) r.alphas.push_back(x.substitute(m));
  return r;
}

PTerm subst_term(const PTerm& t, const std::string& v, const Affine& by) {
  return subst_term(t, std::map<std::string, Affine>{{v, by}});
}

PTerm mul_terms(const PTerm& a, const PTerm& b) {
  PTerm r{a.a * b.a, a.beta + b.beta, a.alphas};
  r.alphas.insert(r.alphas.end(), b.alphas.begin(), b.alphas.end());
  return r;
}

}  // namespace

std::string PTerm::to_string() const {
  std::string s = a.to_string();
  bool compound = !a.is_polynomial() || a.numer().coeffs().size() > 1;
  if (compound && (!beta.is_const() || beta.c0 != 0 || !alphas.empty())) s = "(" + s + ")";
  if (!beta.is_const() || beta.c0 != 0) s += "*L^(" + beta.to_string() + ")";
  for (const auto& x : alphas) s += "*(" + x.to_string() + ")";
  return s;
}

// ------------------------------------------------------------------ PFun

PFun PFun::constant(const ARat& a, std::vector<std::string> vars) {
  PFun f;
  f.vars = std::move(vars);
  if (!a.is_zero()) f.pieces.push_back({PCell::universe(), {PTerm{a, Affine(), {}}}});
  return f;
}

PFun PFun::indicator(const PCell& c, std::vector<std::string> vars) { return term(c, PTerm{ARat(1), Affine(), {}}, std::move(vars)); }

PFun PFun::term(const PCell& c, const PTerm& t, std::vector<std::string> vars) {
  PFun f;
  f.vars = std::move(vars);
  if (!t.a.is_zero()) f.pieces.push_back({c, {t}});
  return f;
}

Rational PFun::eval(const std::map<std::string, Integer>& point, const Rational& q) const {
  if (q <= 1) throw QOutOfRange("q must exceed 1, got " + q.get_str());
  Rational sum = 0;
  for (const auto& pc : pieces) {
    if (!pc.cell.contains(point)) continue;
    for (const auto& t : pc.terms) {
      Rational v = t.a.theta(q) * qpow(q, t.beta.eval(point));
      for (const auto& x : t.alphas) v *= x.eval(point);
      sum += v;
    }
  }
  return sum;
}

ARat PFun::value(const std::map<std::string, Integer>& point) const {
  ARat sum;
  for (const auto& pc : pieces) {
    if (!pc.cell.contains(point)) continue;
    for (const auto& t : pc.terms) {
      Rational b = t.beta.eval(point);
      if (b.get_den() != 1) throw EvalError("non-integral exponent " + b.get_str());
      ARat v = t.a * ARat::L_pow(b.get_num().get_si());
      for (const auto& x : t.alphas) {
        Rational a = x.eval(point);
        if (a.get_den() != 1) throw EvalError("non-integral factor " + a.get_str());
        v *= ARat(a.get_num());
      }
      sum += v;
    }
  }
  return sum;
}

ARat PFun::as_constant() const {
  for (const auto& pc : pieces) {
    if (!pc.cell.vars().empty()) throw EvalError("function is not constant: cell " + pc.cell.to_string());
    for (const auto& t : pc.terms) {
      if (!t.beta.is_const()) throw EvalError("function is not constant: term " + t.to_string());
      for (const auto& x : t.alphas) {
        if (!x.is_const()) throw EvalError("function is not constant: term " + t.to_string());
      }
    }
  }
  return value({});
}

PFun PFun::substitute(const std::map<std::string, Affine>& m, std::vector<std::string> new_vars) const {
  PFun f;
  f.vars = std::move(new_vars);
  for (const auto& pc : pieces) {
    Piece p{pc.cell.substitute(m), {}};
    for (const auto& t : pc.terms) p.terms.push_back(subst_term(t, m));
    f.pieces.push_back(std::move(p));
  }
  return f;
}

PFun PFun::restrict_to(const std::map<std::string, Integer>& point) const {
  std::map<std::string, Affine> m;
  for (const auto& [v, x] : point) m[v] = Affine(Rational(x));
  std::vector<std::string> keep;
  for (const auto& v : vars) {
    if (!point.count(v)) keep.push_back(v);
  }
  return simplify(substitute(m, keep));
}

std::string PFun::to_string() const {
  if (pieces.empty()) return "0";
  std::ostringstream os;
  bool first = true;
  for (const auto& pc : pieces) {
    if (!first) os << "\n";
    first = false;
    os << "[" << pc.cell.to_string() << "] ";
    for (std::size_t i = 0; i < pc.terms.size(); ++i) {
      if (i) os << " + ";
      os << pc.terms[i].to_string();
    }
  }
  return os.str();
}

namespace {

std::vector<std::string> merge_vars(const std::vector<std::string>& a, const std::vector<std::string>& b) {
  std::vector<std::string> r = a;
  for (const auto& v : b) {
    if (std::find(r.begin(), r.end(), v) == r.end()) r.push_back(v);
  }
  return r;
}

}  // namespace

PFun operator+(const PFun& a, const PFun& b) {
  PFun r;
  r.vars = merge_vars(a.vars, b.vars);
  r.pieces = a.pieces;
  r.pieces.insert(r.pieces.end(), b.pieces.begin(), b.pieces.end());
  return r;
}

PFun operator*(const PFun& a, const PFun& b) {
  PFun r;
  r.vars = merge_vars(a.vars, b.vars);
  for (const auto& x : a.pieces) {
    for (const auto& y : b.pieces) {
      PCell c = intersect(x.cell, y.cell);
      if (!c.normalize()) continue;
      Piece p{c, {}};
      for (const auto& s : x.terms) {
        for (const auto& t : y.terms) p.terms.push_back(mul_terms(s, t));
      }
      r.pieces.push_back(std::move(p));
    }
  }
  return r;
}

PFun scale(const PFun& f, const ARat& a) {
  PFun r = f;
  for (auto& pc : r.pieces) {
    for (auto& t : pc.terms) t.a *= a;
  }
  return r;
}

PFun simplify(const PFun& f) {
  std::map<std::string, std::size_t> index;
  std::vector<Piece> out;
  for (const auto& pc : f.pieces) {
    PCell c = pc.cell;
    if (!c.normalize() || is_empty(c)) continue;
    std::string key = c.to_string();
    auto it = index.find(key);
    if (it == index.end()) {
      index[key] = out.size();
      out.push_back({c, pc.terms});
    } else {
      auto& ts = out[it->second].terms;
      ts.insert(ts.end(), pc.terms.begin(), pc.terms.end());
    }
  }
  PFun r;
  r.vars = f.vars;
  for (auto& pc : out) {
    pc.terms = canonical(pc.terms);
    if (!pc.terms.empty()) r.pieces.push_back(std::move(pc));
  }
  std::stable_sort(r.pieces.begin(), r.pieces.end(), [](const Piece& a, const Piece& b) { return a.cell.to_string() < b.cell.to_string(); });
  return r;
}

PFun refine(const PFun& f) {
  std::vector<Piece> done;
  for (const auto& pc : f.pieces) {
    std::vector<Piece> next;
    CellSet rest{pc.cell};
    for (const auto& d : done) {
      PCell both = intersect(d.cell, pc.cell);
      if (both.normalize() && !is_empty(both)) {
        Piece p{both, d.terms};
        p.terms.insert(p.terms.end(), pc.terms.begin(), pc.terms.end());
        next.push_back(p);
        for (const auto& c : cell_algebra({d.cell}, {pc.cell}, CellOp::Difference)) next.push_back({c, d.terms});
        rest = cell_algebra(rest, {d.cell}, CellOp::Difference);
      } else {
        next.push_back(d);
      }
    }
    for (const auto& c : rest) next.push_back({c, pc.terms});
    done = std::move(next);
  }
  PFun r;
  r.vars = f.vars;
  r.pieces = done;
  for (auto& pc : r.pieces) pc.terms = canonical(pc.terms);
  return r;
}

// ------------------------------------------------------------------ integrability

namespace {

bool cone_feasible(const std::vector<Affine>& sys) {
  PCell c;
  c.ineqs = sys;
  return !is_empty(c);
}

}  // namespace

bool is_integrable(const PFun& f, const std::vector<std::string>& fiber) {
  for (const auto& pc : f.pieces) {
    PCell c = pc.cell;
    if (!c.normalize() || is_empty(c)) continue;
    std::vector<Affine> cone;
    for (const auto& g : c.ineqs) {
      Affine h;
      for (const auto& v : fiber) {
        if (g.mentions(v)) h.coef[v] = g.coeff(v);
      }
      if (!h.is_const()) cone.push_back(h);
    }
    for (const auto& t : pc.terms) {
      if (t.a.is_zero()) continue;
      Affine b;
      for (const auto& v : fiber) {
        if (t.beta.mentions(v)) b.coef[v] = t.beta.coeff(v);
      }
      for (const auto& v : fiber) {
        for (int s : {1, -1}) {
          std::vector<Affine> sys = cone;
          sys.push_back(b);
          sys.push_back(Affine::var(v, s) - Affine(Rational(1)));
          if (cone_feasible(sys)) return false;
        }
      }
    }
  }
  return true;
}

// ------------------------------------------------------------------ summation

namespace {

Integer stirling2(int n, int k) {
  static std::vector<std::vector<Integer>> table;
  while (static_cast<int>(table.size()) <= n) {
    int m = static_cast<int>(table.size());
    std::vector<Integer> row(static_cast<std::size_t>(m + 1), 0);
    if (m == 0) {
      row[0] = 1;
    } else {
      for (int j = 1; j <= m; ++j) {
        Integer prev_j = j < m ? table[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(j)] : Integer(0);
        row[static_cast<std::size_t>(j)] = Integer(j) * prev_j + table[static_cast<std::size_t>(m - 1)][static_cast<std::size_t>(j - 1)];
      }
    }
    table.push_back(row);
  }
  if (k > n || k < 0) return 0;
  return table[static_cast<std::size_t>(n)][static_cast<std::size_t>(k)];
}

Integer factorial(int n) {
  Integer r;
  mpz_fac_ui(r.get_mpz_t(), static_cast<unsigned long>(n));
  return r;
}

struct Contribution {
  PCell extra;
  PTerm term;
};

// C(N + 1, m) as integer-valued affine factors, one split per residue of N
// modulo m!.
std::vector<std::pair<Congruence, std::vector<Affine>>> binomial_split(const Affine& N, int m) {
  std::vector<std::pair<Congruence, std::vector<Affine>>> out;
  if (m == 0) {
    out.push_back({{Affine(), Integer(1)}, {}});
    return out;
  }
  Integer M = factorial(m);
  std::vector<std::pair<unsigned long, int>> primes;  // p, v_p(m!)
  for (unsigned long p = 2; p <= static_cast<unsigned long>(m); ++p) {
    bool prime = true;
    for (unsigned long k = 2; k * k <= p; ++k) {
      if (p % k == 0) prime = false;
    }
    if (!prime) continue;
    int e = 0;
    Integer x = M;
    while (mpz_divisible_ui_p(x.get_mpz_t(), p)) {
      x /= p;
      ++e;
    }
    primes.push_back({p, e});
  }
  for (Integer rho = 0; rho < M; ++rho) {
    std::vector<Integer> d(static_cast<std::size_t>(m), 1);
    for (const auto& [p, e] : primes) {
      int remaining = e;
      for (int r = 0; r < m && remaining > 0; ++r) {
        Integer val = mod_pos(rho + 1 - r, M);
        int known = 0;
        if (val == 0) {
          known = e;
        } else {
          while (known < e && mpz_divisible_ui_p(val.get_mpz_t(), p)) {
            val /= p;
            ++known;
          }
        }
        int take = std::min(known, remaining);
        for (int i = 0; i < take; ++i) d[static_cast<std::size_t>(r)] *= p;
        remaining -= take;
      }
      if (remaining != 0) throw EvalError("internal: binomial distribution failed");
    }
    std::vector<Affine> factors;
    for (int r = 0; r < m; ++r) factors.push_back(Rational(1, 1) / Rational(d[static_cast<std::size_t>(r)]) * (N + Affine(Rational(1 - r))));
    out.push_back({{N - Affine(Rational(rho)), M}, factors});
  }
  return out;
}

// Sum over u = 0..N (or to infinity when N is absent) of a * L^(beta0 + c u)
// * prod gs * C(u, k).
void sum_binomial(const ARat& a, const Affine& beta0, long c, const std::vector<Affine>& gs, int k, const std::optional<Affine>& N,
                  std::vector<Contribution>& out) {
  if (!N) {
    if (c >= 0) throw NotIntegrable("divergent geometric sum with ratio L^" + std::to_string(c));
    ARat g = ARat::geometric(c).pow(static_cast<unsigned>(k + 1)) * ARat::L_pow(c * k);
    out.push_back({PCell(), PTerm{a * g, beta0, gs}});
    return;
  }
  if (c == 0) {
    for (const auto& [cong, fs] : binomial_split(*N, k + 1)) {
      PCell extra;
      if (cong.mod > 1) extra.congs.push_back(cong);
      std::vector<Affine> al = gs;
      al.insert(al.end(), fs.begin(), fs.end());
      out.push_back({extra, PTerm{a, beta0, al}});
    }
    return;
  }
  ARat g = ARat::geometric(c);
  out.push_back({PCell(), PTerm{a * g.pow(static_cast<unsigned>(k + 1)) * ARat::L_pow(c * k), beta0, gs}});
  Affine tail_beta = beta0 + Rational(c) * (*N + Affine(Rational(1)));
  for (int i = 0; i <= k; ++i) {
    ARat coeff = -a * ARat::L_pow(c * i) * g.pow(static_cast<unsigned>(i + 1));
    for (const auto& [cong, fs] : binomial_split(*N, k - i)) {
      PCell extra;
      if (cong.mod > 1) extra.congs.push_back(cong);
      std::vector<Affine> al = gs;
      al.insert(al.end(), fs.begin(), fs.end());
      out.push_back({extra, PTerm{coeff, tail_beta, al}});
    }
  }
}

// Sum of the terms over x in [lo, hi] (hi absent: infinite), the cell
// already restricted to the parameters.
void sum_range(const std::vector<PTerm>& terms, const std::string& x, const Affine& lo, const std::optional<Affine>& hi,
               std::vector<Contribution>& out) {
  std::optional<Affine> N;
  if (hi) N = *hi - lo;
  const Affine u = Affine::var(x);
  for (const auto& t : terms) {
    Rational cr = t.beta.coeff(x);
    if (cr.get_den() != 1) throw EvalError("internal: fractional exponent slope");
    long c = cr.get_num().get_si();
    // x = lo + u
    PTerm s = subst_term(t, x, lo + u);
    Affine beta0 = s.beta.substitute(x, Affine());
    // prod (e_i u + g_i), expanded over subsets
    std::map<int, std::vector<std::pair<Integer, std::vector<Affine>>>> by_power;
    std::vector<std::pair<Integer, std::vector<Affine>>> cur{{Integer(1), {}}};
    std::vector<int> powers{0};
    for (const auto& al : s.alphas) {
      Rational e = al.coeff(x);
      if (e.get_den() != 1) throw EvalError("internal: fractional factor slope");
      Affine g = al.substitute(x, Affine());
      std::vector<std::pair<Integer, std::vector<Affine>>> nxt;
      std::vector<int> np;
      for (std::size_t i = 0; i < cur.size(); ++i) {
        auto with_g = cur[i];
        with_g.second.push_back(g);
        nxt.push_back(with_g);
        np.push_back(powers[i]);
        if (e != 0) {
          nxt.push_back({cur[i].first * e.get_num(), cur[i].second});
          np.push_back(powers[i] + 1);
        }
      }
      cur = std::move(nxt);
      powers = std::move(np);
    }
    for (std::size_t i = 0; i < cur.size(); ++i) by_power[powers[i]].push_back(cur[i]);
    for (const auto& [j, list] : by_power) {
      for (const auto& [coef, gs] : list) {
        if (coef == 0) continue;
        for (int k = 0; k <= j; ++k) {
          Integer sk = stirling2(j, k) * factorial(k);
          if (sk == 0) continue;
          sum_binomial(s.a * ARat(coef * sk), beta0, c, gs, k, N, out);
        }
      }
    }
  }
}

std::vector<Piece> sum_piece(const Piece& piece, const std::string& x) {
  std::vector<Piece> result;
  PCell cell = piece.cell;
  if (!cell.normalize() || is_empty(cell)) return result;
  // x = D t + s clears congruences on x and fractional slopes.
  Integer D = 1;
  for (const auto& c : cell.congs) {
    if (c.form.mentions(x)) D = lcm(D, c.mod * c.form.denominator());
  }
  for (const auto& t : piece.terms) {
    D = lcm(D, t.beta.coeff(x).get_den());
    for (const auto& al : t.alphas) D = lcm(D, al.coeff(x).get_den());
  }
  const Affine X = Affine::var(x);
  for (Integer s = 0; s < D; ++s) {
    Affine sub = Rational(D) * X + Affine(Rational(s));
    PCell c = cell.substitute(x, sub);
    if (!c.normalize()) continue;
    std::vector<PTerm> terms;
    for (const auto& t : piece.terms) terms.push_back(subst_term(t, x, sub));

    // Bounds a x + rest >= 0, with residue splits of rest mod |a|.
    struct Bound {
      Affine rest;
      Integer a;
    };
    std::vector<Bound> bounds;
    PCell base;
    base.congs = c.congs;
    for (const auto& f : c.ineqs) {
      Rational a = f.coeff(x);
      if (a == 0) {
        base.ineqs.push_back(f);
      } else {
        bounds.push_back({f.substitute(x, Affine()), a.get_num()});
      }
    }
    std::vector<std::pair<PCell, std::pair<std::vector<Affine>, std::vector<Affine>>>> cases{{base, {{}, {}}}};
    for (const auto& b : bounds) {
      Integer m = abs(b.a);
      std::vector<std::pair<PCell, std::pair<std::vector<Affine>, std::vector<Affine>>>> next;
      for (const auto& [pc, lu] : cases) {
        for (Integer r = 0; r < m; ++r) {
          PCell q = pc;
          if (m > 1) q.congs.push_back({b.rest - Affine(Rational(r)), m});
          auto bounds_lu = lu;
          if (b.a > 0) {
            bounds_lu.first.push_back(Rational(1) / Rational(b.a) * (Affine(Rational(r)) - b.rest));
          } else {
            bounds_lu.second.push_back(Rational(1) / Rational(m) * (b.rest - Affine(Rational(r))));
          }
          next.push_back({q, bounds_lu});
        }
      }
      cases = std::move(next);
    }

    for (auto& [pc, lu] : cases) {
      auto& [lows, ups] = lu;
      std::vector<std::tuple<PCell, std::vector<Affine>, std::vector<Affine>, std::vector<PTerm>>> oriented;
      if (lows.empty() && ups.empty()) {
        // split at 0; the half x <= -1 is flipped to x' = -x >= 1
        std::vector<PTerm> flipped;
        for (const auto& t : terms) flipped.push_back(subst_term(t, x, -X));
        oriented.push_back({pc, {Affine()}, {}, terms});
        oriented.push_back({pc, {Affine(Rational(1))}, {}, flipped});
      } else if (lows.empty()) {
        std::vector<PTerm> flipped;
        for (const auto& t : terms) flipped.push_back(subst_term(t, x, -X));
        std::vector<Affine> nl;
        for (const auto& u : ups) nl.push_back(-u);
        oriented.push_back({pc, nl, {}, flipped});
      } else {
        oriented.push_back({pc, lows, ups, terms});
      }
      for (const auto& [qc, L, U, ts] : oriented) {
        for (std::size_t ia = 0; ia < L.size(); ++ia) {
          for (std::size_t ib = 0; ib < std::max<std::size_t>(U.size(), 1); ++ib) {
            PCell cc = qc;
            for (std::size_t o = 0; o < L.size(); ++o) {
              if (o == ia) continue;
              Affine diff = L[ia] - L[o];
              cc.ineqs.push_back(o < ia ? diff - Affine(Rational(1)) : diff);
            }
            std::optional<Affine> hi;
            if (!U.empty()) {
              hi = U[ib];
              for (std::size_t o = 0; o < U.size(); ++o) {
                if (o == ib) continue;
                Affine diff = U[o] - U[ib];
                cc.ineqs.push_back(o < ib ? diff - Affine(Rational(1)) : diff);
              }
              cc.ineqs.push_back(*hi - L[ia]);
            }
            if (!cc.normalize() || is_empty(cc)) continue;
            std::vector<Contribution> contribs;
            sum_range(ts, x, L[ia], hi, contribs);
            for (auto& ct : contribs) {
              PCell full = intersect(cc, ct.extra);
              if (!full.normalize() || is_empty(full)) continue;
              result.push_back({full, {ct.term}});
            }
          }
        }
      }
    }
  }
  return result;
}

}  // namespace

PFun sum_fibers(const PFun& f, const std::vector<std::string>& fiber) {
  PFun cur = simplify(f);
  for (const auto& x : fiber) {
    PFun next;
    for (const auto& v : cur.vars) {
      if (v != x) next.vars.push_back(v);
    }
    for (const auto& pc : cur.pieces) {
      auto parts = sum_piece(pc, x);
      next.pieces.insert(next.pieces.end(), parts.begin(), parts.end());
    }
    cur = simplify(next);
  }
  return cur;
}

}  // namespace motint
