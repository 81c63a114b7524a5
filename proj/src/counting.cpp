#include "motint/counting.hpp"

#include <functional>

namespace motint {

namespace {

using GRPoly = std::map<std::vector<int>, GRElem>;

GRPoly to_gr(const MPoly& h, const GaloisRing& R) {
  GRPoly P;
  for (const auto& [e, c] : h.terms) {
    GRElem g = R.from_rational(c);
    if (!g.is_zero()) P.emplace(e, g);
  }
  return P;
}

Integer binom(int n, int k) {
  Integer r;
  mpz_bin_uiui(r.get_mpz_t(), static_cast<unsigned long>(n), static_cast<unsigned long>(k));
  return r;
}

// P(y_j -> t + p y_j).
GRPoly shift_var(const GRPoly& P, std::size_t j, const GRElem& t, const GaloisRing& R) {
  GRPoly out;
  const GRElem pe = R.from_int(Integer(R.p()));
  for (const auto& [e, c] : P) {
    int k = e[j];
    std::vector<GRElem> tp(static_cast<std::size_t>(k + 1), R.one()), pp(static_cast<std::size_t>(k + 1), R.one());
    for (int i = 1; i <= k; ++i) {
      tp[static_cast<std::size_t>(i)] = tp[static_cast<std::size_t>(i - 1)] * t;
      pp[static_cast<std::size_t>(i)] = pp[static_cast<std::size_t>(i - 1)] * pe;
    }
    for (int l = 0; l <= k; ++l) {
      GRElem term = c * R.from_int(binom(k, l)) * tp[static_cast<std::size_t>(k - l)] * pp[static_cast<std::size_t>(l)];
      if (term.is_zero()) continue;
      std::vector<int> ne = e;
      ne[j] = l;
      auto it = out.find(ne);
      if (it == out.end()) {
        out.emplace(ne, term);
      } else {
        it->second = it->second + term;
        if (it->second.is_zero()) out.erase(it);
      }
    }
  }
  return out;
}

bool is_const(const std::vector<int>& e) {
  for (int k : e) {
    if (k) return false;
  }
  return true;
}

}  // namespace

namespace {

struct TreeCap {};

CoeffList count_tree(const MPoly& h, long p, int d, int i_max, std::int64_t cap) {
  const int M = i_max + 1;
  const GaloisRing& R = GaloisRing::get(p, d, M);
  const GaloisRing& F = GaloisRing::get(p, d, 1);
  std::vector<GRElem> digits;
  for (std::int64_t i = 0; i < F.size(); ++i) digits.push_back(R.convert(F.element_at(i)));
  Integer q;
  mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(d));

  std::map<int, std::vector<Integer>> by_depth;
  std::int64_t nodes = 0;
  std::function<void(const GRPoly&, int)> visit = [&](const GRPoly& P, int depth) {
    if (++nodes > cap) throw TreeCap{};
    int v0 = M, m = M;
    for (const auto& [e, c] : P) {
      int v = c.valuation();
      if (is_const(e)) v0 = v; else m = std::min(m, v);
    }
    if (v0 < m) {
      auto& row = by_depth[depth];
      row.resize(static_cast<std::size_t>(M));
      row[static_cast<std::size_t>(v0)] += 1;
      return;
    }
    if (m > i_max) return;
    std::size_t j = 0;
    bool found = false;
    for (const auto& [e, c] : P) {
      if (is_const(e) || c.valuation() != m) continue;
      for (std::size_t k = 0; k < e.size(); ++k) {
        if (e[k] && (!found || k < j)) {
          j = k;
          found = true;
        }
      }
    }
    for (const auto& t : digits) visit(shift_var(P, j, t, R), depth + 1);
  };
  visit(to_gr(h, R), 0);

  CoeffList out;
  out.i_max = i_max;
  out.v.assign(static_cast<std::size_t>(M), Rational(0));
  for (const auto& [depth, row] : by_depth) {
    Integer qd;
    mpz_pow_ui(qd.get_mpz_t(), q.get_mpz_t(), static_cast<unsigned long>(depth));
    for (int i = 0; i < M; ++i) out.v[static_cast<std::size_t>(i)] += Rational(row[static_cast<std::size_t>(i)], qd);
  }
  for (auto& x : out.v) x.canonicalize();
  return out;
}

}  // namespace

CoeffList zprime_count(const MPoly& h, long p, int d, int i_max, const CountOptions& opts) {
  if (i_max < 0) throw EvalError("i_max must be >= 0");
  if (h.is_zero()) throw UnsupportedH("H = 0 has no finite orders");
  try {
    return count_tree(h, p, d, i_max, opts.cap);
  } catch (const TreeCap&) {
  }
  int feasible = i_max - 1;
  for (; feasible >= 0; --feasible) {
    try {
      count_tree(h, p, d, feasible, opts.cap);
      break;
    } catch (const TreeCap&) {
    }
  }
  throw CapExceeded("digit tree for i_max = " + std::to_string(i_max) + " exceeds the cap of " + std::to_string(opts.cap) +
                    " nodes; largest feasible i_max is " + std::to_string(feasible));
}

int feasible_imax_brute(int nvars, long p, int d, std::int64_t cap) {
  int best = -1;
  for (int i = 0; i < 64; ++i) {
    Integer size;
    mpz_ui_pow_ui(size.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(d * nvars * (i + 1)));
    if (size > cap) break;
    best = i;
  }
  return best;
}

CoeffList zprime_count_brute(const MPoly& h, long p, int d, int i_max, const CountOptions& opts) {
  const int n = h.nvars();
  int feasible = feasible_imax_brute(n, p, d, opts.cap);
  if (i_max > feasible) {
    throw CapExceeded("enumeration for i_max = " + std::to_string(i_max) + " exceeds the cap; largest feasible i_max is " +
                      std::to_string(feasible));
  }
  CoeffList out;
  out.i_max = i_max;
  for (int i = 0; i <= i_max; ++i) {
    const GaloisRing& R = GaloisRing::get(p, d, i + 1);
    GRPoly P = to_gr(h, R);
    const std::int64_t rs = R.size();
    Integer total = R.size_exact();
    std::int64_t tuples = 1;
    for (int k = 0; k < n; ++k) tuples *= rs;
    std::vector<GRElem> x(static_cast<std::size_t>(n), R.zero());
    std::int64_t count = 0;
    for (std::int64_t idx = 0; idx < tuples; ++idx) {
      std::int64_t rest = idx;
      for (int k = n - 1; k >= 0; --k) {
        x[static_cast<std::size_t>(k)] = R.element_at(rest % rs);
        rest /= rs;
      }
      GRElem val = R.zero();
      for (const auto& [e, c] : P) {
        GRElem t = c;
        for (int k = 0; k < n; ++k) {
          for (int r = 0; r < e[static_cast<std::size_t>(k)]; ++r) t = t * x[static_cast<std::size_t>(k)];
        }
        val = val + t;
      }
      if (val.valuation() == i) ++count;
    }
    Integer denom = 1;
    for (int k = 0; k < n; ++k) denom *= total;
    out.v.push_back(Rational(Integer(static_cast<long>(count)), denom));
    out.v.back().canonicalize();
  }
  return out;
}

}  // namespace motint
