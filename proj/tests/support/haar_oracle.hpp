#pragma once

// Haar integrals over balls by adaptive subdivision: a ball is evaluated with
// truncated coordinates and subdivided while the integrand is undetermined.

#include <climits>
#include <map>
#include <optional>
#include <vector>

#include "motint/padic.hpp"

namespace oracle {

using motint::Formula;
using motint::Integer;
using motint::Rational;
using motint::Term;

struct HaarIntegrand {
  Formula cond;
  Term exponent;  // value-group term or null
  Rational coeff = 1;
  // points where the integrand is not locally constant, per variable
  // (default {0}), and the largest ac depth used
  std::map<std::string, std::vector<Rational>> centers;
  int ac_depth = 1;
};

struct HaarResult {
  Rational value = 0;
  Rational undetermined = 0;  // volume left unresolved
  Rational bound = 0;         // |true - value| <= bound
};

inline Rational qpow(long p, int d, long e) {
  Integer q;
  mpz_ui_pow_ui(q.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(d * (e < 0 ? -e : e)));
  return e < 0 ? Rational(1) / Rational(q) : Rational(q);
}

// vars range over p^-shift O each; max_depth is the finest level per variable.
inline HaarResult haar_integral(const HaarIntegrand& f, const std::vector<std::string>& vars, long p, int d, int max_depth,
                                int shift = 0, const motint::Env& base = {}) {
  struct Ball {
    std::vector<std::vector<Integer>> center;
    std::vector<int> level;
  };
  HaarResult out;
  const std::size_t n = vars.size();
  std::vector<Ball> stack{{std::vector<std::vector<Integer>>(n, std::vector<Integer>(static_cast<std::size_t>(d), 0)),
                           std::vector<int>(n, 0)}};
  const motint::GaloisRing& F = motint::GaloisRing::get(p, d, 1);
  std::vector<std::vector<Integer>> digits;
  for (std::int64_t i = 0; i < F.size(); ++i) {
    motint::GRElem w = F.element_at(i);
    std::vector<Integer> c;
    for (int k = 0; k < d; ++k) c.push_back(Integer(w.c[static_cast<std::size_t>(k)]));
    digits.push_back(c);
  }
  while (!stack.empty()) {
    Ball b = stack.back();
    stack.pop_back();
    long vol_exp = 0;
    bool any_zero = false;
    for (std::size_t i = 0; i < n; ++i) {
      vol_exp += shift - b.level[i];
      any_zero = any_zero || b.level[i] == 0;
    }
    Rational vol = qpow(p, d, vol_exp);
    bool determined = false;
    std::optional<Rational> bound_here;
    if (!any_zero) {
      motint::Env env = base;
      env.p = p;
      env.d = d;
      for (std::size_t i = 0; i < n; ++i) {
        const motint::GaloisRing& R = motint::GaloisRing::get(p, d, b.level[i]);
        env.vf.insert_or_assign(vars[i], motint::PadicElem::truncated(R.from_coeffs(b.center[i]), -shift));
      }
      try {
        bool in = motint::evaluate(f.cond, env);
        if (!in) {
          determined = true;
        } else if (!f.exponent) {
          out.value += vol * f.coeff;
          determined = true;
        } else {
          motint::VGValue v = motint::eval_vg(f.exponent, env);
          if (v.is_point()) {
            out.value += vol * f.coeff * qpow(p, d, v.lo->get_si());
            determined = true;
          } else if (v.hi) {
            bound_here = abs(f.coeff) * qpow(p, d, v.hi->get_si());
          }
        }
      } catch (const motint::InsufficientPrecision&) {
      }
    }
    if (determined) continue;
    // refine a variable whose ball still meets one of its centers
    std::optional<std::size_t> pick;
    for (std::size_t i = 0; i < n; ++i) {
      auto it = f.centers.find(vars[i]);
      std::vector<Rational> cs = it == f.centers.end() ? std::vector<Rational>{Rational(0)} : it->second;
      bool near = b.level[i] == 0;
      for (const auto& c : cs) {
        long v = LONG_MAX;
        for (int k = 0; k < d; ++k) {
          Rational ck = k == 0 ? c : Rational(0);
          Rational diff = ck - Rational(b.center[i][static_cast<std::size_t>(k)]) * qpow(p, 1, -shift);
          if (diff != 0) v = std::min(v, motint::padic_valuation(diff, p));
        }
        near = near || v >= b.level[i] - shift - f.ac_depth + 1;
      }
      if (near && (!pick || b.level[i] < b.level[*pick])) pick = i;
    }
    if (!pick) {
      pick = 0;
      for (std::size_t i = 1; i < n; ++i) {
        if (b.level[i] < b.level[*pick]) pick = i;
      }
    }
    const int depth = b.level[*pick];
    if (depth >= max_depth) {
      out.undetermined += vol;
      if (!bound_here) {
        // bound from the exponent alone
        motint::Env env = base;
        env.p = p;
        env.d = d;
        for (std::size_t i = 0; i < n; ++i) {
          const motint::GaloisRing& R = motint::GaloisRing::get(p, d, b.level[i]);
          env.vf.insert_or_assign(vars[i], motint::PadicElem::truncated(R.from_coeffs(b.center[i]), -shift));
        }
        if (!f.exponent) {
          bound_here = abs(f.coeff);
        } else {
          motint::VGValue v = motint::eval_vg(f.exponent, env);
          if (!v.hi) throw std::runtime_error("unbounded integrand near an undetermined ball");
          bound_here = abs(f.coeff) * qpow(p, d, v.hi->get_si());
        }
      }
      out.bound += vol * *bound_here;
      continue;
    }
    Integer pk;
    mpz_ui_pow_ui(pk.get_mpz_t(), static_cast<unsigned long>(p), static_cast<unsigned long>(b.level[*pick]));
    for (const auto& w : digits) {
      Ball c = b;
      for (int k = 0; k < d; ++k) c.center[*pick][static_cast<std::size_t>(k)] += pk * w[static_cast<std::size_t>(k)];
      c.level[*pick] += 1;
      stack.push_back(std::move(c));
    }
  }
  out.value.canonicalize();
  return out;
}

}  // namespace oracle
