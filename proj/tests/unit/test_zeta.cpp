#include <gtest/gtest.h>

#include <chrono>
#include <functional>

#include "motint/zeta.hpp"

using namespace motint;

namespace {

const ARat kU = ARat(1) - ARat::L_pow(-1);  // 1 - L^-1

RatSeries series(std::map<int, ARat> num, std::vector<std::pair<int, int>> den) {
  RatSeries s;
  for (const auto& [k, c] : num) s.numer.emplace(k, MotFun::constant(c, MotFrame{}).normalized());
  s.denom = std::move(den);
  return s;
}

// mu{ord H = i} for a monomial: sum over (a_j) with sum k_j a_j = i of
// prod (1 - L^-1) L^-a_j.
ARat monomial_oracle(const std::vector<int>& k, int i) {
  ARat total;
  std::function<void(std::size_t, int, ARat)> rec = [&](std::size_t j, int left, ARat acc) {
    if (j == k.size()) {
      if (left == 0) total += acc;
      return;
    }
    for (int a = 0; a * k[j] <= left; ++a) rec(j + 1, left - a * k[j], acc * kU * ARat::L_pow(-a));
  };
  rec(0, i, ARat(1));
  return total;
}

std::vector<int> exponents(const MPoly& h) {
  const auto& e = h.terms.begin()->first;
  return {e.begin(), e.end()};
}

ARat constant_of(const MotFun& f) {
  auto c = f.as_constant();
  EXPECT_TRUE(c.has_value()) << f.to_string();
  return c ? *c : ARat();
}

}  // namespace

TEST(Zeta, MonomialExamples) {
  EXPECT_EQ(zmot_monomial(parse_mpoly("x")), series({{0, kU}}, {{-1, 1}}));
  EXPECT_EQ(zmot_monomial(parse_mpoly("x^2")), series({{0, kU}}, {{-1, 2}}));
  EXPECT_EQ(zmot_monomial(parse_mpoly("x*y")), series({{0, kU * kU}}, {{-1, 1}, {-1, 1}}));
  EXPECT_EQ(zmot_monomial(parse_mpoly("-x")), zmot_monomial(parse_mpoly("x")));
  EXPECT_EQ(zmot_monomial(parse_mpoly("x*y")).to_string(), "[(" + (kU * kU).to_string() + ")] / [(1 - L^(-1)*T)^2]");
}

TEST(Zeta, ExpansionMatchesOracle) {
  for (const char* h : {"x", "x^2", "x^3", "x*y", "x^2*y^3", "x*y*z"}) {
    MPoly H = parse_mpoly(h);
    std::vector<MotFun> c = zmot_monomial(H).expand(8);
    for (int i = 0; i <= 8; ++i) EXPECT_EQ(constant_of(c[static_cast<std::size_t>(i)]), monomial_oracle(exponents(H), i)) << h << " i=" << i;
  }
}

TEST(Zeta, RationalityPerI) {
  // closed form vs the integrator run separately for each i
  for (const char* h : {"x", "x^2", "x*y", "x^2*y^3"}) {
    MPoly H = parse_mpoly(h);
    std::vector<MotFun> c = zmot_monomial(H).expand(6);
    MotFrame fr;
    std::vector<Formula> base;
    for (const auto& v : H.vars) {
      fr.coords.push_back({v, Sort::vf()});
      base.push_back(fm::atom(FormKind::Ge, term::ord(term::var(v, Sort::vf())), term::integer(0, Sort::vg())));
    }
    for (int i = 0; i <= 6; ++i) {
      std::vector<Formula> cs = base;
      cs.push_back(fm::atom(FormKind::Eq, term::ord(mpoly_to_term(H)), term::integer(i, Sort::vg())));
      IntegralResult r = integrate_iterated(MotFun::indicator(fm::conj(cs), fr), H.vars);
      ASSERT_TRUE(r.integrable);
      EXPECT_EQ(constant_of(r.value), constant_of(c[static_cast<std::size_t>(i)])) << h << " i=" << i;
    }
  }
}

TEST(Zeta, FromCells) {
  MotFrame fx;
  fx.coords = {{"x", Sort::vf()}, {"i", Sort::vg()}};
  ParseOptions o;
  o.declared = {{"x", Sort::vf()}, {"y", Sort::vf()}, {"i", Sort::vg()}};
  auto dec = decompose_fragment(parse_formula("ord(x) = i && ord(x) >= 0", o), fx, "x");
  EXPECT_EQ(zmot_from_cells(dec, "i"), zmot_monomial(parse_mpoly("x")));

  auto dec2 = decompose_fragment(parse_formula("2*ord(x) = i && ord(x) >= 0", o), fx, "x");
  EXPECT_EQ(zmot_from_cells(dec2, "i"), zmot_monomial(parse_mpoly("x^2")));

  MotFrame fxy;
  fxy.coords = {{"x", Sort::vf()}, {"y", Sort::vf()}, {"i", Sort::vg()}};
  auto dec3 = decompose_fragment(parse_formula("ord(x) + ord(y) = i && ord(x) >= 0 && ord(y) >= 0", o), fxy, "x");
  EXPECT_EQ(zmot_from_cells(dec3, "i", {"y"}), zmot_monomial(parse_mpoly("x*y")));

  // shrunk domain: coefficient 0 at i = 0, (1 - L^-1) L^-i after
  auto dec4 = decompose_fragment(parse_formula("ord(x) = i && ord(x) >= 1", o), fx, "x");
  RatSeries s = zmot_from_cells(dec4, "i");
  EXPECT_EQ(s, series({{1, kU * ARat::L_pow(-1)}}, {{-1, 1}}));
  std::vector<MotFun> c = s.expand(5);
  EXPECT_TRUE(c[0].is_zero());
  for (int i = 1; i <= 5; ++i) EXPECT_EQ(constant_of(c[static_cast<std::size_t>(i)]), kU * ARat::L_pow(-i));

  auto empty = decompose_fragment(parse_formula("ord(x) = i && ord(x) >= 0 && ord(x) < 0", o), fx, "x");
  EXPECT_TRUE(zmot_from_cells(empty, "i").is_zero());
}

TEST(Zeta, Errors) {
  EXPECT_THROW(zmot_monomial(parse_mpoly("x + y")), UnsupportedH);
  EXPECT_THROW(zmot_monomial(parse_mpoly("3*x")), UnsupportedH);  // order of 3 needs p
  EXPECT_NO_THROW(zmot_monomial(parse_mpoly("3*x"), PContext{2}));
  MotFrame fi;
  fi.coords = {{"i", Sort::vg()}};
  ParseOptions o;
  o.declared = {{"i", Sort::vg()}};
  EXPECT_THROW(series_of(MotFun::indicator(parse_formula("i <= 3", o), fi), "i"), NonGeometricFamily);
  EXPECT_THROW(series_of(MotFun::indicator(parse_formula("i >= 0", o), fi), "i"), NonGeometricFamily);
  EXPECT_EQ(series_of(MotFun::indicator(parse_formula("i >= 0 && i <= 2", o), fi), "i"), series({{0, 1}, {1, 1}, {2, 1}}, {}));
}

TEST(Zeta, ShiftedCoefficient) {
  // ord(2x) = 1 + ord x at p = 2: the series is T * Z_x
  RatSeries s = zmot_monomial(parse_mpoly("2*x"), PContext{2});
  EXPECT_EQ(s, series({{1, kU}}, {{-1, 1}}));
  MeuserReport r = verify_meuser(s, parse_mpoly("2*x"), 2, 1, 5);
  EXPECT_TRUE(r.all_match());
}

TEST(Zeta, MeuserExamples) {
  MeuserReport a = verify_meuser(parse_mpoly("x"), 2, 1, 5);
  EXPECT_TRUE(a.all_match());
  EXPECT_EQ(a.rows.size(), 6u);
  MeuserReport b = verify_meuser(parse_mpoly("x^2"), 3, 1, 4);
  EXPECT_TRUE(b.all_match());
  EXPECT_EQ(b.rows[1].counted, 0);
  EXPECT_EQ(b.rows[3].counted, 0);
  MeuserReport c = verify_meuser(parse_mpoly("x*y"), 2, 2, 4);
  EXPECT_TRUE(c.all_match());
  for (int i = 0; i <= 4; ++i) {
    Rational want = Rational(i + 1) * Rational(9, 16) / Rational(Integer(1) << static_cast<unsigned>(2 * i));
    want.canonicalize();
    EXPECT_EQ(c.rows[static_cast<std::size_t>(i)].counted, want);
  }
}

TEST(Zeta, MeuserGrid) {
  // one motivic series per H serves every (p, d)
  auto t0 = std::chrono::steady_clock::now();
  for (const char* h : {"x", "x^2", "x^3", "x*y", "x^2*y^3"}) {
    MPoly H = parse_mpoly(h);
    const RatSeries z = zmot_monomial(H);
    for (long p : {2L, 3L, 5L}) {
      for (int d : {1, 2}) {
        int i_max = H.nvars() == 1 ? 6 : (d == 2 ? 4 : 6);
        MeuserReport r = verify_meuser(z, H, p, d, i_max);
        EXPECT_TRUE(r.all_match()) << h << " p=" << p << " d=" << d;
        EXPECT_EQ(static_cast<int>(r.rows.size()), i_max + 1);
      }
    }
  }
  EXPECT_LT(std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count(), 180.0);
}

TEST(Zeta, SpecializedSeriesAgainstOracle) {
  // N_d of the closed form vs theta of the oracle coefficients
  for (const char* h : {"x^3", "x^2*y^3"}) {
    MPoly H = parse_mpoly(h);
    RatSeries z = zmot_monomial(H);
    for (long p : {2L, 7L}) {
      std::vector<Rational> v = z.expand_at(p, 1, 7);
      for (int i = 0; i <= 7; ++i) EXPECT_EQ(v[static_cast<std::size_t>(i)], monomial_oracle(exponents(H), i).theta(Rational(p)));
    }
  }
}

TEST(Zeta, Sum) {
  RatSeries a = zmot_monomial(parse_mpoly("x")), b = zmot_monomial(parse_mpoly("y^2"));
  RatSeries s = a + b;
  std::vector<MotFun> c = s.expand(6);
  for (int i = 0; i <= 6; ++i) {
    EXPECT_EQ(constant_of(c[static_cast<std::size_t>(i)]), monomial_oracle({1}, i) + monomial_oracle({2}, i));
  }
  EXPECT_EQ(a + RatSeries::zero(), a);
}

TEST(Zeta, HeuristicPade) {
  // 1 / (1 - T/2) and (1 + T) / (1 - T/3)
  std::vector<Rational> g, h;
  for (int i = 0; i < 8; ++i) {
    g.push_back(Rational(1, 1 << i));
    const Rational t(1, 3);
    Rational v = 1;
    for (int k = 0; k < i; ++k) v *= t;
    Rational w = v;
    if (i > 0) {
      Rational u = 1;
      for (int k = 0; k < i - 1; ++k) u *= t;
      w += u;
    }
    h.push_back(w);
  }
  auto a = heuristic_pade(g, 0, 1);
  ASSERT_TRUE(a);
  EXPECT_EQ(a->first, std::vector<Rational>{1});
  EXPECT_EQ(a->second, (std::vector<Rational>{1, Rational(-1, 2)}));
  auto b = heuristic_pade(h, 1, 1);
  ASSERT_TRUE(b);
  EXPECT_EQ(b->first, (std::vector<Rational>{1, 1}));
  EXPECT_EQ(b->second, (std::vector<Rational>{1, Rational(-1, 3)}));
  EXPECT_FALSE(heuristic_pade(h, 0, 1));
}

TEST(ZPrime, CapReportsFeasible) {
  try {
    zprime_count(parse_mpoly("x^2*y^3"), 5, 2, 6, CountOptions{60, 1});
    FAIL() << "expected CapExceeded";
  } catch (const CapExceeded& e) {
    EXPECT_NE(std::string(e.what()).find("largest feasible i_max is"), std::string::npos);
  }
}
