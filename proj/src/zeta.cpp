#include "motint/zeta.hpp"

#include <algorithm>
#include <set>

namespace motint {

namespace {

using Factor = std::pair<int, int>;  // 1 - L^a T^b
using TPoly = std::map<int, ARat>;

void add_to(TPoly& p, int k, const ARat& c) {
  if (c.is_zero()) return;
  auto it = p.find(k);
  if (it == p.end()) {
    p.emplace(k, c);
    return;
  }
  it->second += c;
  if (it->second.is_zero()) p.erase(it);
}

TPoly times_factor(const TPoly& p, const Factor& f) {
  TPoly out;
  const ARat La = ARat::L_pow(f.first);
  for (const auto& [k, c] : p) {
    add_to(out, k, c);
    add_to(out, k + f.second, -(La * c));
  }
  return out;
}

// Exact quotient by 1 - L^a T^b.
std::optional<TPoly> divide_factor(const TPoly& p, const Factor& f) {
  if (p.empty()) return TPoly{};
  const ARat La = ARat::L_pow(f.first);
  const int lo = p.begin()->first, hi = p.rbegin()->first;
  TPoly q;
  for (int k = lo; k <= hi; ++k) {
    ARat v;
    if (auto it = p.find(k); it != p.end()) v = it->second;
    if (auto it = q.find(k - f.second); it != q.end()) v += La * it->second;
    if (v.is_zero()) continue;
    if (k > hi - f.second) return std::nullopt;
    q.emplace(k, v);
  }
  return q;
}

// Sum of fractions with per-class numerators over one denominator.
struct Frac {
  std::map<std::string, std::pair<ResClass, TPoly>> num;
  std::map<Factor, int> den;
};

Frac bring_to(const Frac& f, const std::map<Factor, int>& den) {
  Frac out;
  out.den = den;
  for (const auto& [key, v] : f.num) {
    TPoly p = v.second;
    for (const auto& [fac, mult] : den) {
      auto it = f.den.find(fac);
      int have = it == f.den.end() ? 0 : it->second;
      for (int k = have; k < mult; ++k) p = times_factor(p, fac);
    }
    out.num.emplace(key, std::make_pair(v.first, p));
  }
  return out;
}

Frac add(const Frac& a, const Frac& b) {
  std::map<Factor, int> den = a.den;
  for (const auto& [fac, m] : b.den) den[fac] = std::max(den[fac], m);
  Frac x = bring_to(a, den), y = bring_to(b, den);
  for (auto& [key, v] : y.num) {
    auto it = x.num.find(key);
    if (it == x.num.end()) {
      x.num.emplace(key, v);
      continue;
    }
    for (const auto& [k, c] : v.second) add_to(it->second.second, k, c);
  }
  for (auto it = x.num.begin(); it != x.num.end();) {
    it = it->second.second.empty() ? x.num.erase(it) : std::next(it);
  }
  return x;
}

// Cancels denominator factors dividing every numerator.
void reduce(Frac& f) {
  if (f.num.empty()) {
    f.den.clear();
    return;
  }
  for (auto it = f.den.begin(); it != f.den.end();) {
    bool all = true;
    std::map<std::string, TPoly> q;
    for (const auto& [key, v] : f.num) {
      auto d = divide_factor(v.second, it->first);
      if (!d) {
        all = false;
        break;
      }
      q.emplace(key, *d);
    }
    if (!all) {
      ++it;
      continue;
    }
    for (auto& [key, v] : f.num) v.second = q[key];
    if (--it->second == 0) {
      it = f.den.erase(it);
    } else {
      it = f.den.begin();
    }
  }
}

Integer binom(int n, int k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

Integer floor_div(const Rational& x) {
  Integer r;
  mpz_fdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

Integer ceil_div(const Rational& x) {
  Integer r;
  mpz_cdiv_q(r.get_mpz_t(), x.get_num_mpz_t(), x.get_den_mpz_t());
  return r;
}

int small(const Integer& v, const char* what) {
  if (!v.fits_sint_p() || abs(v) > 1000000) throw NonGeometricFamily(std::string(what) + " out of range: " + v.get_str());
  return static_cast<int>(v.get_si());
}

ARat term_value(const PTerm& t, const std::string& i, long at) {
  std::map<std::string, Integer> pt{{i, Integer(at)}};
  Rational b = t.beta.eval(pt);
  if (b.get_den() != 1) throw NonGeometricFamily("non-integral L exponent " + t.beta.to_string() + " at " + i + " = " + std::to_string(at));
  ARat v = t.a * ARat::L_pow(b.get_num().get_si());
  for (const auto& al : t.alphas) {
    Rational x = al.eval(pt);
    if (x.get_den() != 1) throw NonGeometricFamily("non-integral factor " + al.to_string());
    v *= ARat(x.get_num());
  }
  return v;
}

// Generating function of one term on an arithmetic progression.
Frac progression(const PTerm& t, const std::string& i, long lo, std::optional<long> hi, long step) {
  Frac out;
  if (hi) {
    TPoly p;
    for (long k = lo; k <= *hi; k += step) add_to(p, static_cast<int>(k), term_value(t, i, k));
    return Frac{{{"", {ResClass::one(), p}}}, {}};
  }
  Rational aL = t.beta.coeff(i) * Rational(step);
  if (aL.get_den() != 1) throw NonGeometricFamily("L exponent step " + aL.get_str() + " is not integral");
  if (aL >= 0) throw NonGeometricFamily("terms do not decay: L exponent step " + aL.get_str());
  const int a = static_cast<int>(aL.get_num().get_si());
  const int D = static_cast<int>(t.alphas.size());
  // g(j) = value(lo + step j) / L^(a j); numerator = (1 - X)^(D+1) sum g(j) X^j mod X^(D+1)
  std::vector<ARat> g;
  for (int j = 0; j <= D; ++j) g.push_back(term_value(t, i, lo + step * j) * ARat::L_pow(-static_cast<long>(a) * j));
  TPoly p;
  for (int j = 0; j <= D; ++j) {
    ARat n;
    for (int k = 0; k <= j; ++k) {
      ARat c(binom(D + 1, k));
      n += (k % 2 ? -c : c) * g[static_cast<std::size_t>(j - k)];
    }
    add_to(p, static_cast<int>(lo + step * j), n * ARat::L_pow(static_cast<long>(a) * j));
  }
  out.num.emplace("", std::make_pair(ResClass::one(), p));
  out.den[{a, static_cast<int>(step)}] = D + 1;
  return out;
}

Frac piece_series(const Piece& pc, const std::string& i) {
  PCell cell = pc.cell;
  if (!cell.normalize()) return {};
  std::optional<Integer> lo, hi;
  for (const auto& q : cell.ineqs) {
    Rational c = q.coeff(i);
    if (c == 0) {
      if (q.c0 < 0) return {};
      continue;
    }
    if (c > 0) {
      Integer b = ceil_div(-q.c0 / c);
      if (!lo || b > *lo) lo = b;
    } else {
      Integer b = floor_div(q.c0 / -c);
      if (!hi || b < *hi) hi = b;
    }
  }
  if (!lo) throw NonGeometricFamily("cell " + cell.to_string() + " is unbounded below in " + i);
  if (hi && *hi < *lo) return {};
  Integer m = 1;
  for (const auto& cg : cell.congs) m = lcm(m, cg.mod);
  const int M = small(m, "modulus");
  const long l0 = small(*lo, "lower bound");
  std::optional<long> h0;
  if (hi) h0 = small(*hi, "upper bound");
  Frac out;
  for (int r = 0; r < M; ++r) {
    long start = l0 + r;
    if (h0 && start > *h0) break;
    std::map<std::string, Integer> pt{{i, Integer(start)}};
    bool ok = true;
    for (const auto& cg : cell.congs) {
      Rational v = cg.form.eval(pt);
      if (v.get_den() != 1 || v.get_num() % cg.mod != 0) ok = false;
    }
    if (!ok) continue;
    for (const auto& t : pc.terms) out = add(out, progression(t, i, start, h0, M));
  }
  return out;
}

MotFun coefficient(const Frac& f, int k) {
  MotFun out = MotFun::zero(MotFrame{});
  for (const auto& [key, v] : f.num) {
    auto it = v.second.find(k);
    if (it == v.second.end()) continue;
    out = out + MotFun::constant(it->second, MotFrame{}) * MotFun::from_class(v.first, MotFrame{});
  }
  return out.normalized();
}

RatSeries to_series(Frac f) {
  reduce(f);
  RatSeries s;
  std::set<int> ks;
  for (const auto& [key, v] : f.num) {
    for (const auto& [k, c] : v.second) ks.insert(k);
  }
  for (int k : ks) {
    MotFun c = coefficient(f, k);
    if (!c.is_zero()) s.numer.emplace(k, c);
  }
  for (const auto& [fac, m] : f.den) {
    for (int j = 0; j < m; ++j) s.denom.push_back(fac);
  }
  if (s.numer.empty()) s.denom.clear();
  return s;
}

// 1 / prod(1 - x_a T^b) to degree n, x_a supplied by `pw`.
template <class V, class Pw>
std::vector<V> inverse_denominator(const std::vector<Factor>& den, int n, const Pw& pw) {
  std::vector<V> e(static_cast<std::size_t>(n + 1), V(0));
  if (n < 0) return e;
  e[0] = V(1);
  for (const auto& [a, b] : den) {
    const V x = pw(a);
    for (int k = b; k <= n; ++k) e[static_cast<std::size_t>(k)] += x * e[static_cast<std::size_t>(k - b)];
  }
  return e;
}

std::string factor_text(const Factor& f) {
  std::string t = f.second == 1 ? "T" : "T^" + std::to_string(f.second);
  if (f.first == 0) return "1 - " + t;
  return "1 - L^" + (f.first < 0 ? "(" + std::to_string(f.first) + ")" : std::to_string(f.first)) + "*" + t;
}

}  // namespace

RatSeries RatSeries::zero() { return {}; }

std::optional<std::map<int, ARat>> RatSeries::constant_numer() const {
  std::map<int, ARat> out;
  for (const auto& [k, c] : numer) {
    auto a = c.as_constant();
    if (!a) return std::nullopt;
    out.emplace(k, *a);
  }
  return out;
}

std::vector<MotFun> RatSeries::expand(int i_max) const {
  std::vector<MotFun> out(static_cast<std::size_t>(std::max(0, i_max + 1)), MotFun::zero(MotFrame{}));
  if (numer.empty()) return out;
  const int k0 = std::min(0, numer.begin()->first);
  auto e = inverse_denominator<ARat>(denom, i_max - k0, [](int a) { return ARat::L_pow(a); });
  for (const auto& [k, c] : numer) {
    for (int i = std::max(0, k); i <= i_max; ++i) {
      const ARat& w = e[static_cast<std::size_t>(i - k)];
      if (!w.is_zero()) out[static_cast<std::size_t>(i)] = out[static_cast<std::size_t>(i)] + scale(c, w);
    }
  }
  for (auto& x : out) x = x.normalized();
  return out;
}

std::vector<Rational> RatSeries::expand_at(long p, int d, int i_max, const CountOptions& opts) const {
  std::vector<Rational> out(static_cast<std::size_t>(std::max(0, i_max + 1)), Rational(0));
  if (numer.empty()) return out;
  Integer q;
  mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(d));
  const int k0 = std::min(0, numer.begin()->first);
  auto e = inverse_denominator<Rational>(denom, i_max - k0, [&](int a) {
    Integer qa;
    mpz_pow_ui(qa.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(a < 0 ? -a : a));
    return a < 0 ? Rational(1) / Rational(qa) : Rational(qa);
  });
  for (const auto& [k, c] : numer) {
    Rational v = specialize(c, p, d, Env{}, opts);
    for (int i = std::max(0, k); i <= i_max; ++i) out[static_cast<std::size_t>(i)] += v * e[static_cast<std::size_t>(i - k)];
  }
  for (auto& x : out) x.canonicalize();
  return out;
}

std::string RatSeries::to_string() const {
  if (numer.empty()) return "0";
  std::string n;
  for (const auto& [k, c] : numer) {
    if (!n.empty()) n += " + ";
    auto a = c.as_constant();
    n += "(" + (a ? a->to_string() : c.to_string()) + ")";
    if (k != 0) n += k == 1 ? "*T" : "*T^" + std::to_string(k);
  }
  if (denom.empty()) return n;
  std::string d;
  for (std::size_t j = 0; j < denom.size();) {
    std::size_t e = j;
    while (e < denom.size() && denom[e] == denom[j]) ++e;
    if (!d.empty()) d += " * ";
    d += "(" + factor_text(denom[j]) + ")";
    if (e - j > 1) d += "^" + std::to_string(e - j);
    j = e;
  }
  return "[" + n + "] / [" + d + "]";
}

namespace {

Frac to_frac(const RatSeries& s) {
  Frac f;
  for (const auto& fac : s.denom) f.den[fac] += 1;
  for (const auto& [k, c] : s.numer) {
    for (const auto& t : c.terms) {
      ARat a = t.pf.as_constant();
      for (const auto& rt : t.rc.terms()) {
        ResClass g = ResClass::raw({{ARat(1), rt.gen}}, {});
        auto& slot = f.num[g.to_string()];
        slot.first = g;
        add_to(slot.second, k, a * rt.scalar);
      }
    }
  }
  return f;
}

}  // namespace

RatSeries operator+(const RatSeries& a, const RatSeries& b) { return to_series(add(to_frac(a), to_frac(b))); }

bool operator==(const RatSeries& a, const RatSeries& b) { return a.to_string() == b.to_string(); }

RatSeries series_of(const MotFun& f0, const std::string& i) {
  MotFun f = f0.normalized();
  if (!f.frame.derived.empty()) throw NonGeometricFamily("family still depends on derived coordinates");
  for (const auto& c : f.frame.coords) {
    if (c.name != i || c.sort != Sort::vg()) throw NonGeometricFamily("family depends on " + c.name + " besides " + i);
  }
  Frac total;
  for (const auto& t : f.terms) {
    PFun pf = t.pf;
    if (std::find(pf.vars.begin(), pf.vars.end(), i) == pf.vars.end()) {
      if (!pf.is_zero()) throw NonGeometricFamily("constant in " + i + ": infinitely many negative powers of T");
      continue;
    }
    for (const auto& pc : pf.pieces) {
      Frac ps = piece_series(pc, i);
      // attach the residue class of this term
      for (const auto& rt : t.rc.terms()) {
        Frac cls;
        cls.den = ps.den;
        ResClass g = ResClass::raw({{ARat(1), rt.gen}}, {});
        TPoly p;
        for (const auto& [key, v] : ps.num) {
          for (const auto& [k, c] : v.second) add_to(p, k, c * rt.scalar);
        }
        if (p.empty()) continue;
        cls.num.emplace(g.to_string(), std::make_pair(g, p));
        total = add(total, cls);
      }
    }
  }
  return to_series(total);
}

RatSeries zmot_from_family(const MotFun& family, const std::string& i, const std::vector<std::string>& order, const PContext& ctx) {
  IntegralResult r = integrate_iterated(family, order, {}, ctx);
  if (!r.integrable) throw NotIntegrable(r.reason);
  return series_of(r.value, i);
}

RatSeries zmot_from_cells(const CellDecomposition& dec, const std::string& i, const std::vector<std::string>& rest,
                          const PContext& ctx) {
  if (dec.cells.empty()) return RatSeries::zero();
  MotFun v = integrate_cell_family(dec);
  if (rest.empty()) return series_of(v, i);
  return zmot_from_family(v, i, rest, ctx);
}

RatSeries zmot_monomial(const MPoly& h, const PContext& ctx) {
  if (h.is_zero()) throw UnsupportedH("H = 0");
  if (!h.is_monomial()) throw UnsupportedH("H = " + h.to_string() + " is not a monomial");
  std::string i = "i";
  while (std::find(h.vars.begin(), h.vars.end(), i) != h.vars.end()) i = "_" + i;
  MotFrame frame;
  std::vector<Formula> cs;
  for (const auto& v : h.vars) {
    frame.coords.push_back({v, Sort::vf()});
    cs.push_back(fm::atom(FormKind::Ge, term::ord(term::var(v, Sort::vf())), term::integer(0, Sort::vg())));
  }
  frame.coords.push_back({i, Sort::vg()});
  cs.push_back(fm::atom(FormKind::Eq, term::ord(mpoly_to_term(h)), term::var(i, Sort::vg())));
  MotFun ind;
  try {
    ind = MotFun::indicator(fm::conj(cs), frame, ctx);
  } catch (const OutsideFragment& e) {
    throw UnsupportedH("H = " + h.to_string() + ": " + e.what());
  }
  return zmot_from_family(ind, i, h.vars, ctx);
}

bool MeuserReport::all_match() const {
  return std::all_of(rows.begin(), rows.end(), [](const MeuserRow& r) { return r.match; });
}

MeuserReport verify_meuser(const RatSeries& zmot, const MPoly& h, long p, int d, int i_max, const CountOptions& opts) {
  MeuserReport rep;
  rep.p = p;
  rep.d = d;
  rep.i_max = i_max;
  std::vector<Rational> mot = zmot.expand_at(p, d, i_max, opts);
  CoeffList cnt = zprime_count(h, p, d, i_max, opts);
  for (int i = 0; i <= i_max; ++i) {
    MeuserRow row{i, mot[static_cast<std::size_t>(i)], cnt.v[static_cast<std::size_t>(i)], false};
    row.match = row.motivic == row.counted;
    rep.rows.push_back(row);
  }
  return rep;
}

MeuserReport verify_meuser(const MPoly& h, long p, int d, int i_max, const CountOptions& opts) {
  return verify_meuser(zmot_monomial(h, PContext{p}), h, p, d, i_max, opts);
}

std::optional<std::pair<std::vector<Rational>, std::vector<Rational>>> heuristic_pade(const std::vector<Rational>& c, int m, int k) {
  if (m < 0 || k < 0 || static_cast<int>(c.size()) < m + k + 1) return std::nullopt;
  auto at = [&](int j) { return j < 0 ? Rational(0) : c[static_cast<std::size_t>(j)]; };
  // denominator 1 + b_1 T + .. + b_k T^k: sum_l b_l c_{j-l} = -c_j for j = m+1..m+k
  std::vector<std::vector<Rational>> A(static_cast<std::size_t>(k), std::vector<Rational>(static_cast<std::size_t>(k + 1)));
  for (int r = 0; r < k; ++r) {
    const int j = m + 1 + r;
    for (int l = 1; l <= k; ++l) A[static_cast<std::size_t>(r)][static_cast<std::size_t>(l - 1)] = at(j - l);
    A[static_cast<std::size_t>(r)][static_cast<std::size_t>(k)] = -at(j);
  }
  for (int col = 0, row = 0; col < k; ++col) {
    int piv = -1;
    for (int r = row; r < k; ++r) {
      if (A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] != 0) {
        piv = r;
        break;
      }
    }
    if (piv < 0) return std::nullopt;
    std::swap(A[static_cast<std::size_t>(row)], A[static_cast<std::size_t>(piv)]);
    for (int r = 0; r < k; ++r) {
      if (r == row) continue;
      Rational f = A[static_cast<std::size_t>(r)][static_cast<std::size_t>(col)] / A[static_cast<std::size_t>(row)][static_cast<std::size_t>(col)];
      for (int cc = col; cc <= k; ++cc) {
        A[static_cast<std::size_t>(r)][static_cast<std::size_t>(cc)] -= f * A[static_cast<std::size_t>(row)][static_cast<std::size_t>(cc)];
      }
    }
    ++row;
  }
  std::vector<Rational> den{Rational(1)};
  for (int l = 0; l < k; ++l) {
    den.push_back(A[static_cast<std::size_t>(l)][static_cast<std::size_t>(k)] / A[static_cast<std::size_t>(l)][static_cast<std::size_t>(l)]);
  }
  std::vector<Rational> num;
  for (int j = 0; j <= m; ++j) {
    Rational s = 0;
    for (int l = 0; l <= std::min(j, k); ++l) s += den[static_cast<std::size_t>(l)] * at(j - l);
    num.push_back(s);
  }
  // the fit must reproduce every coefficient given
  for (int j = m + 1; j < static_cast<int>(c.size()); ++j) {
    Rational s = 0;
    for (int l = 0; l <= std::min(j, k); ++l) s += den[static_cast<std::size_t>(l)] * at(j - l);
    if (s != 0) return std::nullopt;
  }
  return std::make_pair(num, den);
}

}  // namespace motint
