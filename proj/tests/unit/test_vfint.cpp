#include <gtest/gtest.h>

#include <random>

#include "vf_corpus.hpp"

using namespace motint;

using namespace vf;

namespace {

ARat integral(const MotFun& phi, const std::vector<std::string>& order, PContext ctx = {}) {
  IntegralResult r = integrate_iterated(phi, order, {}, ctx);
  EXPECT_TRUE(r.integrable) << r.reason;
  auto c = r.value.as_constant();
  EXPECT_TRUE(c.has_value()) << r.value.to_string();
  return c ? *c : ARat();
}

}  // namespace

TEST(VFInt, DecomposeShell) {
  CellDecomposition d = decompose_fragment(cond("ord(t) >= 0", kT), kT, "t");
  ASSERT_EQ(d.cells.size(), 1u);  // ord(0) >= 0 is false: no point cell
  EXPECT_FALSE(d.cells[0].point);
  EXPECT_EQ(d.cells[0].center, 0);
  EXPECT_EQ(d.cells[0].depth, 1);
  Env e;
  e.p = 3;
  for (long z = -2; z <= 3; ++z) {
    e.vg["_z"] = z;
    bool in = false;
    for (const auto& c : d.cells[0].z_cells) in = in || c.contains(e.vg);
    EXPECT_EQ(in, z >= 0);
  }
  CellDecomposition d3 = decompose_fragment(cond("ord(t) = 3", kT), kT, "t");
  ASSERT_EQ(d3.cells.size(), 1u);
  e.vg["_z"] = 3;
  EXPECT_TRUE(d3.cells[0].z_cells[0].contains(e.vg));
  e.vg["_z"] = 4;
  EXPECT_FALSE(d3.cells[0].z_cells[0].contains(e.vg));
  CellDecomposition dp = decompose_fragment(cond("t = 0 || ord(t) = 1", kT), kT, "t");
  int points = 0;
  for (const auto& c : dp.cells) points += c.point;
  EXPECT_EQ(points, 1);
}

TEST(VFInt, DecomposerSoundness) {
  const MotFrame fr = frame_of({{"t", Sort::vf()}, {"w", Sort::vg()}, {"eta", Sort::res(1)}});
  std::mt19937_64 rng(2024);
  for (long p : {2L, 3L}) {
    for (const auto& text : vf::kDecomposerCorpus) {
      Formula f = cond(text, fr);
      CellDecomposition dec = decompose_fragment(f, fr, "t", PContext{p});
      std::vector<Rational> centers = dec.centers;
      centers.push_back(Rational(7, 3));
      for (int k = 0; k < 500; ++k) {
        Env e;
        e.p = p;
        e.d = 1;
        Rational t = random_point(rng, p, centers);
        e.vf.emplace("t", PadicElem::exact(p, 1, t));
        e.vg["w"] = static_cast<long>(rng() % 7) - 2;
        e.res.emplace("eta", GaloisRing::get(p, 1, 1).from_int(static_cast<long>(rng() % p)));
        bool direct = evaluate(f, e);
        int hits = 0;
        for (const auto& c : dec.cells) hits += cell_contains(c, dec, e);
        ASSERT_LE(hits, 1) << text << " t=" << t.get_str();
        ASSERT_EQ(hits == 1, direct) << text << " p=" << p << " t=" << t.get_str();
      }
    }
  }
}

TEST(VFInt, CellFamilyExamples) {
  MotFun one = MotFun::indicator(cond("ord(t) >= 0", kT), kT);
  EXPECT_EQ(integral(one, {"t"}), ARat(1));
  MotFun w = one * MotFun::L_power(parse_term("-ord(t)", Sort::vg(), opts_of(kT)), kT);
  EXPECT_EQ(integral(w, {"t"}), ARat::L().divided_by(ARat::L() + ARat(1)));
  EXPECT_EQ(counting_value(integral(w, {"t"}), 2, 1), Rational(2, 3));
  MotFun s3 = MotFun::indicator(cond("ord(t) = 3", kT), kT);
  EXPECT_EQ(integral(s3, {"t"}), (ARat::L() - ARat(1)) * ARat::L_pow(-4));
  EXPECT_EQ(counting_value(integral(s3, {"t"}), 2, 1), Rational(1, 16));
}

TEST(VFInt, Additivity) {
  const std::vector<std::string> conds = {"ord(t) >= 0 && ord(t - 1) >= 1", "ord(t) >= -1 && ac_1(t) = 1", "ord(t - 1) >= 0 && ord(t) = 0 mod 2",
                                          "ord(t) >= 0 && ac_2(t - 1) != 1"};
  for (const auto& c : conds) {
    Formula f = cond(c, kT);
    CellDecomposition dec = decompose_fragment(f, kT, "t", PContext{3});
    MotFun whole = integrate_cell_family(dec);
    MotFun sum = MotFun::zero(MotFrame{});
    for (std::size_t i = 0; i < dec.cells.size(); ++i) {
      CellDecomposition one = dec;
      one.cells = {dec.cells[i]};
      one.values = {dec.values[i]};
      sum = sum + integrate_cell_family(one);
    }
    EXPECT_FALSE(refute(whole, sum, {Env{}}, {{3, 1}, {3, 2}}));
    MotFun direct = integrate_iterated(MotFun::indicator(f, kT, PContext{3}), {"t"}, {}, PContext{3}).value;
    EXPECT_FALSE(refute(whole, direct, {Env{}}, {{3, 1}, {3, 2}})) << c;
  }
}

TEST(VFInt, IteratedExamples) {
  EXPECT_EQ(integral(build({"", ""}, kXY, kO2), {"y", "x"}), ARat(1));
  ARat f = ARat::L().divided_by(ARat::L() + ARat(1));
  EXPECT_EQ(integral(build({"", "-ord(x*y)"}, kXY, kO2), {"y", "x"}), f * f);
  EXPECT_EQ(counting_value(f * f, 2, 1), Rational(4, 9));
  EXPECT_EQ(integral(build({"ord(y) >= ord(x)", ""}, kXY, kO2), {"y", "x"}), f);
}

TEST(VFInt, Fubini) {
  for (const auto& c : kCorpus) {
    MotFun phi = build(c, kXY, kO2);
    IntegralResult a = integrate_iterated(phi, {"y", "x"});
    IntegralResult b = integrate_iterated(phi, {"x", "y"});
    ASSERT_TRUE(a.integrable && b.integrable) << c.cond;
    EXPECT_EQ(a.value.normalized().to_string(), b.value.normalized().to_string()) << c.cond << " / " << c.exp;
  }
}

TEST(VFInt, SpecializationVsHaar) {
  for (const auto& c : kCorpus) {
    MotFun phi = build(c, kXY, kO2);
    MotFun mot = integrate_iterated(phi, {"y", "x"}).value;
    for (auto [p, d] : std::vector<std::pair<long, int>>{{2, 1}, {3, 1}, {2, 2}, {3, 2}}) {
      Rational v = specialize(mot, p, d, {});
      // finest level per variable; products of two truncated coordinates must
      // stay within 62-bit rings
      int depth = (p == 2 ? (d == 1 ? 31 : 16) : (d == 1 ? 19 : 10)) + (c.exp.empty() ? 1 : 0);
      oracle::HaarResult h = oracle::haar_integral(haar_of(c, kXY, kO2, p, d), {"x", "y"}, p, d, depth);
      Rational diff = abs(v - h.value);
      EXPECT_LE(diff, h.bound) << c.cond << " / " << c.exp << " p=" << p << " d=" << d;
      if (h.undetermined == 0) EXPECT_EQ(v, h.value);
      EXPECT_LT(h.bound.get_d(), 1e-9);
    }
  }
}

TEST(VFInt, NotIntegrable) {
  MotFun all = MotFun::constant(ARat(1), kT);
  IntegralResult r = integrate_iterated(all, {"t"});
  EXPECT_FALSE(r.integrable);
  MotFun grow = MotFun::indicator(cond("ord(t) >= 0", kT), kT) * MotFun::L_power(parse_term("ord(t)", Sort::vg(), opts_of(kT)), kT);
  EXPECT_FALSE(integrate_iterated(grow, {"t"}).integrable);
  EXPECT_THROW(integrate_iterated(all, {"nope"}), FrameMismatch);
}

TEST(VFInt, ChangeOfVariablesExamples) {
  const MotFrame fs = frame_of({{"s", Sort::vf()}});
  MotFun one_s = MotFun::indicator(cond("ord(s) >= 1", fs), fs);
  // s = pi*t maps O onto pi O
  MotFun pulled = change_of_variables_1d(one_s, "s", "t", term::pi(Sort::vf()), 0);
  EXPECT_EQ(integral(pulled, {"t"}), ARat::L_pow(-1));
  EXPECT_EQ(integral(one_s, {"s"}), ARat::L_pow(-1));
  // translation
  MotFun g = MotFun::indicator(cond("ord(s - 1) >= 2 && ac_1(s - 1) = 1", fs), fs);
  EXPECT_EQ(integral(change_of_variables_1d(g, "s", "t", term::rational(1), 1), {"t"}), integral(g, {"s"}));
  // ord u = 2 on the unit shell
  MotFun sh = MotFun::indicator(cond("ord(s) = 2", fs), fs);
  MotFun back = change_of_variables_1d(sh, "s", "t", term::rational(4), 0, PContext{2});
  EXPECT_EQ(counting_value(integral(sh, {"s"}), 2, 1), Rational(1, 8));
  EXPECT_EQ(counting_value(integral(back, {"t"}, PContext{2}), 2, 1), Rational(1, 8));
  EXPECT_THROW(change_of_variables_1d(sh, "s", "t", term::rational(0), 0), ZeroDerivative);
}

TEST(VFInt, ChangeOfVariablesRandom) {
  const MotFrame fs = frame_of({{"s", Sort::vf()}});
  std::mt19937_64 rng(77);
  int exact = 0;
  for (int k = 0; k < 20; ++k) {
    long p = k % 2 ? 3 : 2;
    PContext ctx{p};
    Rational u(static_cast<long>(rng() % 17) - 8, static_cast<long>(rng() % 4) + 1);
    if (u == 0) u = 3;
    u.canonicalize();
    Rational c(static_cast<long>(rng() % 9) - 4, static_cast<long>(rng() % 3) + 1);
    c.canonicalize();
    const std::string& target = vf::kCovTargets[static_cast<std::size_t>(k) % vf::kCovTargets.size()];
    MotFun phi = MotFun::indicator(cond(target, fs), fs, ctx);
    MotFun src = change_of_variables_1d(phi, "s", "t", term::rational(u), c, ctx);
    IntegralResult li = integrate_iterated(phi, {"s"}, {}, ctx), ri = integrate_iterated(src, {"t"}, {}, ctx);
    ASSERT_TRUE(li.integrable && ri.integrable);
    const MotFun& lhs = li.value;
    const MotFun& rhs = ri.value;
    if (is_equal(lhs, rhs) == Equality::Equal) {
      ++exact;
    } else {
      EXPECT_FALSE(refute(lhs, rhs, {Env{}}, {{p, 1}, {p, 2}})) << target << " u=" << u.get_str() << " c=" << c.get_str();
    }
    // counting: source set {t : u t + c in target}
    Formula pre = substitute(cond(target, fs), {{"s", term::add(term::mul(term::rational(u), term::var("t", Sort::vf())), term::rational(c))}});
    int shift = std::max(0L, padic_valuation(u, p)) + 2;
    oracle::HaarResult h = oracle::haar_integral({pre, nullptr, 1}, {"t"}, p, 1, 30, shift);
    oracle::HaarResult ht = oracle::haar_integral({cond(target, fs), nullptr, 1}, {"s"}, p, 1, 30, 2);
    ASSERT_EQ(h.undetermined, 0) << target;
    ASSERT_EQ(ht.undetermined, 0) << target;
    Rational jac = counting_value(ARat::L_pow(static_cast<int>(-padic_valuation(u, p))), p, 1);
    EXPECT_EQ(h.value * jac, ht.value) << target << " u=" << u.get_str() << " c=" << c.get_str();
    EXPECT_EQ(specialize(rhs, p, 1, {}), ht.value) << target << " u=" << u.get_str() << " c=" << c.get_str();
  }
  EXPECT_EQ(exact, 20);
}

TEST(VFInt, ParseIntegrand) {
  MotFun a = parse_integrand("(L - 1)/L * L^(-ord(x*y)) * [ord(x) >= 0 && ord(y) >= 0]", kXY);
  MotFun b = scale(build({"", "-ord(x*y)"}, kXY, kO2), (ARat::L() - ARat(1)).divided_by(ARat::L()));
  EXPECT_EQ(integral(a, {"x", "y"}), integral(b, {"y", "x"}));
  EXPECT_THROW(parse_integrand("L^(ord(x) * [", kXY), Error);
}
