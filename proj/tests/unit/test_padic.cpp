#include <gtest/gtest.h>

#include <random>
#include <set>

#include "motint/padic.hpp"

using namespace motint;

namespace {

PadicElem ex(long p, const Rational& v) { return PadicElem::exact(p, 1, v); }

// Oracle: valuation and unit part by repeated division.
std::pair<long, Integer> split_ord(Integer n, long p) {
  long v = 0;
  while (n % p == 0) {
    n /= p;
    ++v;
  }
  return {v, n};
}

Integer ipow(long p, int e) {
  Integer r = 1;
  for (int i = 0; i < e; ++i) r *= p;
  return r;
}

}  // namespace

TEST(Padic, OrdAcOfTwelve) {
  PadicElem x = ex(2, 12);
  EXPECT_EQ(*x.ord(), 2);
  EXPECT_EQ(x.ac(1).c[0], 1);
  EXPECT_EQ(x.ac(2).c[0], 3);
  PadicElem z = ex(2, 0);
  EXPECT_FALSE(z.ord().has_value());
  EXPECT_TRUE(z.ac(3).is_zero());
}

TEST(Padic, AcMatchesDivisionOracle) {
  std::mt19937_64 rng(7);
  for (long p : {2L, 3L, 5L}) {
    for (int i = 0; i < 100; ++i) {
      long n = static_cast<long>(rng() % 100000) + 1;
      auto [v, u] = split_ord(Integer(n), p);
      PadicElem x = ex(p, n);
      EXPECT_EQ(*x.ord(), v);
      for (int k = 1; k <= 3; ++k) {
        Integer m = u % ipow(p, k);
        EXPECT_EQ(x.ac(k).c[0], m.get_si());
      }
    }
  }
}

TEST(Padic, AcMultiplicative) {
  std::mt19937_64 rng(11);
  for (long p : {2L, 3L}) {
    for (int d : {1, 2}) {
      for (int n : {1, 2}) {
        for (int it = 0; it < 200; ++it) {
          std::vector<Rational> a(static_cast<std::size_t>(d)), b(static_cast<std::size_t>(d));
          for (int k = 0; k < d; ++k) {
            a[static_cast<std::size_t>(k)] = Rational(static_cast<long>(rng() % 61) - 30, static_cast<long>(rng() % 4) * 2 + 1);
            b[static_cast<std::size_t>(k)] = Rational(static_cast<long>(rng() % 61) - 30, static_cast<long>(rng() % 4) * 2 + 1);
          }
          if (p == 3) {
            // keep denominators prime to 3 as well
            for (auto& c : a) c = Rational(c.get_num(), 1);
            for (auto& c : b) c = Rational(c.get_num(), 1);
          }
          PadicElem x = PadicElem::exact_coords(p, d, a), y = PadicElem::exact_coords(p, d, b);
          EXPECT_EQ((x * y).ac(n), x.ac(n) * y.ac(n));
        }
      }
    }
  }
}

TEST(Padic, EnumerateSizes) {
  EXPECT_EQ(enumerate(GaloisRing::get(2, 1, 2), 1000).size(), 4u);
  EXPECT_EQ(enumerate(GaloisRing::get(3, 2, 1), 1000).size(), 9u);
  auto all = enumerate(GaloisRing::get(2, 2, 3), 1000);
  EXPECT_EQ(all.size(), 64u);
  std::set<std::pair<long, long>> seen;
  for (const auto& e : all) seen.insert({e.c[0], e.c[1]});
  EXPECT_EQ(seen.size(), 64u);
  EXPECT_THROW(enumerate(GaloisRing::get(2, 2, 3), 10), CapExceeded);
}

TEST(Padic, DefaultModulus) {
  EXPECT_EQ(GaloisRing::default_modulus(2, 2), (std::vector<long>{1, 1, 1}));
  EXPECT_EQ(GaloisRing::default_modulus(3, 2), (std::vector<long>{1, 0, 1}));
  EXPECT_EQ(GaloisRing::default_modulus(2, 3), (std::vector<long>{1, 1, 0, 1}));
}

TEST(Padic, FieldAxiomsF9) {
  const GaloisRing& F = GaloisRing::get(3, 2, 1);
  auto all = enumerate(F, 100);
  // Every nonzero element is invertible, and the unit group has order 8.
  for (const auto& x : all) {
    if (x.is_zero()) continue;
    EXPECT_EQ(x * F.inverse(x), F.one());
    GRElem r = F.one();
    for (int i = 0; i < 8; ++i) r = r * x;
    EXPECT_EQ(r, F.one());
  }
}

TEST(Padic, GaloisRingInverseAtHigherLevel) {
  const GaloisRing& R = GaloisRing::get(2, 2, 4);
  for (std::int64_t i = 0; i < R.size(); ++i) {
    GRElem x = R.element_at(i);
    if (x.valuation() != 0) continue;
    EXPECT_EQ(x * R.inverse(x), R.one());
  }
}

TEST(Padic, CountPoints) {
  EXPECT_EQ(count_points(parse_formula("x^2 = 0"), 2, 1, {}, {}), 1);
  EXPECT_EQ(count_points(parse_formula("x = x", {Sort::res(1), {}}), 3, 2, {}), 9);
  EXPECT_EQ(count_points(parse_formula("x != 0"), 2, 1, {}), 1);
  // depth-2 variable: x^2 = 0 in Z/4 and Z/9
  ParseOptions o;
  o.default_sort = Sort::res(2);
  EXPECT_EQ(count_points(parse_formula("x^2 = 0", o), 2, 1, {}), 2);
  EXPECT_EQ(count_points(parse_formula("x^2 = 0", o), 3, 1, {}), 3);
}

TEST(Padic, CountWithVgBox) {
  Formula f = parse_formula("z >= 0 && z = 0 mod 2");
  EXPECT_EQ(count_points(f, 2, 1, {{"z", {Integer(-3), Integer(6)}}}), 4);
  EXPECT_THROW(count_points(f, 2, 1, {}), EvalError);
}

TEST(Padic, CountCapAndThreads) {
  ParseOptions o;
  o.default_sort = Sort::res(2);
  Formula f = parse_formula("x * y = 1 || x = y", o);
  CountOptions one{1000000, 1}, four{1000000, 4};
  // brute-force oracle over Z/9 x Z/9
  long expect = 0;
  for (int x = 0; x < 9; ++x)
    for (int y = 0; y < 9; ++y) expect += ((x * y) % 9 == 1 || x == y) ? 1 : 0;
  EXPECT_EQ(count_points(f, 3, 1, {}, one), expect);
  EXPECT_EQ(count_points(f, 3, 1, {}, four), expect);
  EXPECT_THROW(count_points(f, 3, 1, {}, CountOptions{10, 1}), CapExceeded);
}

TEST(Padic, CountModulusInvariance) {
  std::vector<std::string> corpus = {"x^2 + 1 = 0", "x^2 = y", "x * y = 1", "x^3 = x && y != 0", "exists w:res(1). w^2 = x"};
  const std::vector<long> m2 = {2, 2, 1};  // x^2 + 2x + 2, irreducible mod 3
  for (const auto& s : corpus) {
    Formula f = parse_formula(s);
    Env e1, e2;
    e2.modulus = m2;
    EXPECT_EQ(count_points(f, 3, 2, {}, {}, e1), count_points(f, 3, 2, {}, {}, e2)) << s;
  }
}

TEST(Padic, VolLevel) {
  ParseOptions vf;
  vf.default_sort = Sort::vf();
  EXPECT_EQ(vol_level(parse_formula("ord(x) = 2", vf), 2, 1, 3), Rational(1, 8));
  EXPECT_EQ(vol_level(parse_formula("ord(x) >= 0", vf), 2, 1, 1), 1);
  EXPECT_EQ(vol_level(parse_formula("ord(x*y) = 0", vf), 2, 1, 1), Rational(1, 4));
  // level stability
  Formula f = parse_formula("ord(x - 1) >= 2", vf);
  EXPECT_EQ(vol_level(f, 3, 1, 2), vol_level(f, 3, 1, 3));
  EXPECT_EQ(vol_level(f, 3, 1, 2), Rational(1, 9));
  // undetermined at level 1
  EXPECT_THROW(vol_level(parse_formula("ord(x) = 2", vf), 2, 1, 1), InsufficientPrecision);
  // ord(x) >= 0 || x = 0 is true on every class, even the one of 0
  EXPECT_EQ(vol_level(parse_formula("ord(x) >= 0 || x = 0", vf), 2, 1, 2), 1);
}

TEST(Padic, TruncatedArithmetic) {
  const GaloisRing& R = GaloisRing::get(3, 1, 4);
  PadicElem a = PadicElem::truncated(R.from_int(10), 0);  // 10 + O(3^4)
  PadicElem b = PadicElem::truncated(R.from_int(17), 1);  // 51 + O(3^5)
  PadicElem s = a + b;
  EXPECT_EQ(s.abs_precision(), 4);
  EXPECT_EQ(s.residue(4).c[0], 61 % 81);
  PadicElem m = a * b;  // 510 known mod 3^(1+4)
  EXPECT_EQ(m.abs_precision(), 5);
  EXPECT_EQ(*m.ord(), 1);
  EXPECT_EQ(m.ac(4).c[0], 170 % 81);
  PadicElem c = a * ex(3, Rational(9));
  EXPECT_EQ(*c.ord(), 2);
  EXPECT_EQ(c.abs_precision(), 6);
  PadicElem z = a - a;
  EXPECT_THROW(z.is_zero(), InsufficientPrecision);
  EXPECT_THROW(z.ord(), InsufficientPrecision);
  EXPECT_EQ(z.ord_lower_bound(), 4);
}

TEST(Padic, EvaluateAndSubstitutedLiteral) {
  Env env;
  env.p = 2;
  env.vg["z"] = 2;
  Formula f = substitute(parse_formula("decl x:vf, z:vg; ord(x) = z"), {{"x", term::integer(12, Sort::vf())}});
  EXPECT_TRUE(evaluate(f, env));
  env.vg["z"] = 1;
  EXPECT_FALSE(evaluate(f, env));
  // ord(0) atoms are false
  Formula g = parse_formula("decl z:vg; ord(0) = z");
  EXPECT_FALSE(evaluate(g, env));
  EXPECT_TRUE(evaluate(fm::neg(g), env));
}

TEST(Padic, CountingValue) {
  EXPECT_EQ(counting_value(ARat::L(), 3, 2), 9);
  EXPECT_EQ(counting_value((ARat::L() - ARat(1)) * ARat::L_pow(-1), 5, 1), Rational(4, 5));
}

TEST(Padic, DefaultCapEnv) {
  setenv("MOTINT_CAP", "1234", 1);
  EXPECT_EQ(default_cap(), 1234);
  setenv("MOTINT_CAP", "abc", 1);
  EXPECT_THROW(default_cap(), EvalError);
  unsetenv("MOTINT_CAP");
  EXPECT_EQ(default_cap(), 100000000);
}
