#include <gtest/gtest.h>

#include <random>

#include "motint/formula.hpp"

using namespace motint;

namespace {

const char* kCorpus[] = {
    "ord(x) >= 0 || x = 0",
    "ac_2(x) = xi && ord(x) = z",
    "ord(x*y) = i",
    "ord(x - 1) >= 2",
    "ac_1(x - 1) = 1",
    "ord(x) = 2*z + 1",
    "z = 1 mod 3",
    "!(z <= 3 || z = 1 mod 2)",
    "x^2 + y^2 = 0",
    "decl x:vf; x^2 = 2",
    "exists xi:res(1). ac_1(x) = xi && xi != 0",
    "forall k:vg in [0, 5]. ord(x) != k",
    "exists k:vg in [-inf, 3]. ord(x) = k",
    "proj_2_1(ac_2(x)) = 1",
    "ord(pi*x) = 1",
    "ord(x) < ord(y)",
    "ord(x) > ord(y) + 2",
    "ord(x) - ord(y) = z",
    "ac_3(x*y) = ac_3(x)*ac_3(y)",
    "true",
    "false",
    "!true",
    "x = 1/2",
    "ord(x - 1/3) >= 1",
    "ord(3*x^2 - 2*x + 1) = 0",
    "xi = 2 && eta = xi^2",
    "ac_1(x) + ac_1(y) = 0",
    "ord(x) >= z && ord(y) >= z",
    "(ord(x) >= 0 && ord(y) >= 0) || ord(x*y) = 0",
    "ord(x) = 0 && ac_1(x) != 1",
    "2*z = 0 mod 4",
    "-z + 3 >= 0",
    "exists xi:res(2). ac_2(x) = xi && proj_2_1(xi) = 1",
    "forall eta:res(1). eta = 0 || eta^2 != ac_1(x)",
    "ord(x - y) >= ord(x)",
    "ord(pi^3) = 3",
    "ac_1(pi + 1) = 1",
    "ord(x) != 5",
    "z + w <= 2*z - w",
    "x*y - 1 = 0",
    "ord(x^3 - y^2) >= 1",
    "!(ac_1(x) = 1) && ord(x) = 0",
    "exists k:vg in [0, inf]. ord(x) = 2*k",
    "ord(x) = 0 mod 2",
    "ac_2(x) = ac_2(y) && ord(x) = ord(y)",
    "decl u:res(3), v:res(2); proj_3_2(u) = v",
    "ord(x + y + 1) >= 1 || ord(x) < 0",
    "z >= 0 && z <= 10 && z = 3 mod 7",
    "ord(-x) = ord(x)",
    "ac_1(-x) = -ac_1(x)",
    "exists xi:res(1). exists eta:res(1). xi*eta = 1 && ac_1(x) = xi",
    "ord(2*x) >= 1",
};

// Raw nodes, bypassing the checking constructors.
Term raw(TermKind k, Sort s, std::vector<Term> args = {}, std::string name = "", Rational v = 0, int n = 0, int m = 0) {
  return std::make_shared<const TermNode>(TermNode{k, s, std::move(name), v, n, m, std::move(args)});
}

Formula rawf(FormKind k, std::vector<Term> ts, std::vector<Formula> subs = {}, Integer mod = 0, std::string var = "", Sort vs = Sort::vf()) {
  return std::make_shared<const FormulaNode>(FormulaNode{k, std::move(ts), mod, std::move(subs), std::move(var), vs, std::nullopt, std::nullopt});
}

struct Gen {
  std::mt19937_64 rng;
  std::vector<FreeVar> scope{{"x", Sort::vf()}, {"y", Sort::vf()}, {"u", Sort::res(1)}, {"v", Sort::res(2)}, {"z", Sort::vg()}, {"w", Sort::vg()}};
  int bound = 0;

  explicit Gen(unsigned seed) : rng(seed) {}
  long pick(long n) { return static_cast<long>(rng() % static_cast<unsigned long>(n)); }

  Term leaf(Sort s) {
    std::vector<FreeVar> vs;
    for (const auto& v : scope) {
      if (v.sort == s) vs.push_back(v);
    }
    long r = pick(4);
    if (r < 2 && !vs.empty()) {
      const auto& v = vs[static_cast<std::size_t>(pick(static_cast<long>(vs.size())))];
      return raw(TermKind::Var, s, {}, v.name);
    }
    if (r == 2 && s.kind == Sort::VF) return pick(2) ? raw(TermKind::Pi, s) : raw(TermKind::Rat, s, {}, "", Rational(1, 2 + pick(3)));
    return raw(TermKind::Int, s, {}, "", Rational(pick(6)));
  }

  Term term(Sort s, int d) {
    if (d == 0 || pick(3) == 0) return leaf(s);
    switch (s.kind) {
      case Sort::VF:
        switch (pick(4)) {
          case 0: return raw(TermKind::Add, s, {term(s, d - 1), term(s, d - 1)});
          case 1: return raw(TermKind::Sub, s, {term(s, d - 1), term(s, d - 1)});
          case 2: return raw(TermKind::Mul, s, {term(s, d - 1), term(s, d - 1)});
          default: return raw(TermKind::Pow, s, {term(s, d - 1)}, "", 0, 2 + static_cast<int>(pick(2)));
        }
      case Sort::RES:
        switch (pick(4)) {
          case 0: return raw(TermKind::Add, s, {term(s, d - 1), term(s, d - 1)});
          case 1: return raw(TermKind::Mul, s, {term(s, d - 1), term(s, d - 1)});
          case 2: return raw(TermKind::Ac, s, {term(Sort::vf(), d - 1)}, "", 0, s.depth);
          default:
            if (s.depth == 1) return raw(TermKind::Proj, s, {term(Sort::res(2), d - 1)}, "", 0, 2, 1);
            return raw(TermKind::Neg, s, {term(s, d - 1)});
        }
      case Sort::VG:
        switch (pick(4)) {
          case 0: return raw(TermKind::Add, s, {term(s, d - 1), term(s, d - 1)});
          case 1: return raw(TermKind::Sub, s, {term(s, d - 1), term(s, d - 1)});
          case 2: return raw(TermKind::Ord, s, {term(Sort::vf(), d - 1)});
          default: return raw(TermKind::Mul, s, {raw(TermKind::Int, s, {}, "", Rational(2 + pick(3))), term(s, d - 1)});
        }
    }
    return leaf(s);
  }

  Sort any_sort() {
    switch (pick(4)) {
      case 0: return Sort::vf();
      case 1: return Sort::res(1);
      case 2: return Sort::res(2);
      default: return Sort::vg();
    }
  }

  Formula atom() {
    Sort s = any_sort();
    if (s.kind == Sort::VG) {
      const FormKind ks[] = {FormKind::Eq, FormKind::Ne, FormKind::Le, FormKind::Lt, FormKind::Ge, FormKind::Gt, FormKind::Cong};
      FormKind k = ks[pick(7)];
      return rawf(k, {term(s, 2), term(s, 2)}, {}, k == FormKind::Cong ? Integer(2 + pick(4)) : Integer(0));
    }
    return rawf(pick(2) ? FormKind::Eq : FormKind::Ne, {term(s, 2), term(s, 2)});
  }

  Formula formula(int d) {
    if (d == 0 || pick(3) == 0) return atom();
    switch (pick(4)) {
      case 0: return rawf(FormKind::Not, {}, {formula(d - 1)});
      case 1: return rawf(FormKind::And, {}, {formula(d - 1), formula(d - 1)});
      case 2: return rawf(FormKind::Or, {}, {formula(d - 1), formula(d - 1)});
      default: {
        Sort s = pick(2) ? Sort::res(1) : Sort::vg();
        std::string name = "b" + std::to_string(bound++);
        scope.push_back({name, s});
        Formula body = formula(d - 1);
        scope.pop_back();
        return rawf(pick(2) ? FormKind::Exists : FormKind::Forall, {}, {body}, 0, name, s);
      }
    }
  }

  // One sort error, possibly buried inside well-sorted context.
  Formula bad_atom() {
    const Sort vf = Sort::vf(), r1 = Sort::res(1), r2 = Sort::res(2), vg = Sort::vg();
    Term x = raw(TermKind::Var, vf, {}, "x"), u = raw(TermKind::Var, r1, {}, "u"), v = raw(TermKind::Var, r2, {}, "v"),
         z = raw(TermKind::Var, vg, {}, "z");
    auto bury = [&](Term t) {
      // wrap in sort-preserving context
      for (int k = static_cast<int>(pick(3)); k > 0; --k) {
        if (t->sort.kind == Sort::VG) {
          t = raw(TermKind::Add, t->sort, {term(t->sort, 1), t});
        } else {
          t = raw(TermKind::Mul, t->sort, {t, term(t->sort, 1)});
        }
      }
      return t;
    };
    switch (pick(14)) {
      case 0: return rawf(FormKind::Eq, {bury(raw(TermKind::Add, vf, {x, z})), x});
      case 1: return rawf(FormKind::Eq, {bury(raw(TermKind::Ord, vg, {z})), z});
      case 2: return rawf(FormKind::Eq, {bury(raw(TermKind::Ac, r1, {u}, "", 0, 1)), u});
      case 3: return rawf(FormKind::Eq, {bury(x), bury(z)});
      case 4: return rawf(FormKind::Le, {bury(u), u});
      case 5: return rawf(FormKind::Eq, {bury(raw(TermKind::Proj, r2, {u}, "", 0, 1, 2)), v});
      case 6: return rawf(FormKind::Eq, {bury(raw(TermKind::Rat, r1, {}, "", Rational(1, 2))), u});
      case 7: return rawf(FormKind::Eq, {bury(raw(TermKind::Pi, vg)), z});
      case 8: return rawf(FormKind::Eq, {bury(raw(TermKind::Add, r2, {u, u})), v});
      case 9: return rawf(FormKind::Cong, {bury(u), u}, {}, 2);
      case 10: return rawf(FormKind::Exists, {}, {rawf(FormKind::Eq, {raw(TermKind::Var, vg, {}, "b"), z})}, 0, "b", r1);
      case 11: return rawf(FormKind::Eq, {bury(raw(TermKind::Mul, vg, {z, z})), z});
      case 12: return rawf(FormKind::Eq, {bury(raw(TermKind::Proj, r1, {u}, "", 0, 2, 1)), u});
      default: return rawf(FormKind::Eq, {bury(raw(TermKind::Ord, r1, {x})), u});
    }
  }
};

}  // namespace

TEST(Formula, CorpusRoundTrip) {
  ASSERT_GE(std::size(kCorpus), 50u);
  for (const char* text : kCorpus) {
    SCOPED_TRACE(text);
    Formula f = parse_formula(text);
    const std::string canon = to_string(f);
    Formula g = parse_formula(canon);
    EXPECT_EQ(to_string(g), canon);
    EXPECT_TRUE(structurally_equal(f, g)) << canon;
    EXPECT_EQ(to_string(parse_sexpr(to_sexpr(f))), canon) << to_sexpr(f);
    EXPECT_NO_THROW(check_sorts(g));
  }
}

TEST(Formula, CanonicalPrinting) {
  EXPECT_EQ(to_string(parse_formula("ord(x) >= 0 || x = 0")), "ord(x) >= 0 || x = 0");
  EXPECT_EQ(to_string(parse_formula("x^2 = 0")), "decl x:res(1); x^2 = 0");
  EXPECT_EQ(to_string(parse_formula("ord(x-1)>=2&&ac_1(x)=1")), "ord(x - 1) >= 2 && ac_1(x) = 1");
  EXPECT_EQ(to_string(parse_formula("((z)) <= 3")), "z <= 3");
  auto q = parse_formula("(x + 1) * 2 = y && !(z <= 3 || z = 1 mod 2)");
  EXPECT_EQ(to_string(parse_formula(to_string(q))), to_string(q));
  EXPECT_EQ(to_string(parse_sexpr(to_sexpr(q))), to_string(q));
}

TEST(Formula, Frames) {
  EXPECT_EQ(frame(parse_formula("ord(x) >= 0 || x = 0")).to_string(), "h[1, (), 0]");
  EXPECT_EQ(frame(parse_formula("ac_2(x) = xi && ord(x) = z")).to_string(), "h[1, (2), 1]");
  EXPECT_EQ(frame(parse_formula("ord(x*y) = i")).to_string(), "h[2, (), 1]");
  EXPECT_EQ(frame(parse_formula("ord(x) >= 0")).to_string(), "h[1, (), 0]");
  ParseOptions o;
  o.declared = {{"xi", Sort::res(2)}, {"z", Sort::vg()}};
  Frame fr = frame(parse_formula("xi != 0 && z >= 1", o));
  EXPECT_EQ(fr.n, 0);
  EXPECT_EQ(fr.m, std::vector<int>{2});
  EXPECT_EQ(fr.r, 1);
  EXPECT_EQ(frame(parse_formula("exists k:vg in [0, 3]. k = 1")).to_string(), "h[0, (), 0]");
  EXPECT_EQ(frame(parse_formula("true")).to_string(), "h[0, (), 0]");
}

TEST(Formula, Substitute) {
  Formula f = parse_formula("ord(x) = z");
  Formula g = substitute(f, {{"x", term::rational(Rational(12))}});
  EXPECT_EQ(to_string(g), "ord(12) = z");
  EXPECT_LT(free_vars(g).size(), free_vars(f).size());
  EXPECT_TRUE(structurally_equal(substitute(f, {{"x", term::var("x", Sort::vf())}}), f));
  Formula h = substitute(parse_formula("ord(x) = 0"), {{"x", term::mul(term::pi(Sort::vf()), term::var("y", Sort::vf()))}});
  EXPECT_EQ(to_string(h), "ord(pi * y) = 0");
  EXPECT_THROW(substitute(f, {{"x", term::var("w", Sort::vg())}}), SortError);
  // capture avoidance: the bound xi is renamed away from the substituted one
  Formula q = parse_formula("exists xi:res(1). ac_1(x) = xi");
  Formula s = substitute(q, {{"x", term::pi(Sort::vf())}});
  EXPECT_TRUE(free_vars(s).empty());
  ParseOptions o;
  o.declared = {{"xi", Sort::res(1)}};
  Formula c = substitute(parse_formula("exists eta:res(1). eta = u", o), {{"u", term::var("eta", Sort::res(1))}});
  EXPECT_EQ(free_vars(c).size(), 1u);
  EXPECT_EQ(free_vars(c)[0].name, "eta");
}

TEST(Formula, SubstituteClosedShrinksFrame) {
  Gen g(17);
  for (int k = 0; k < 100; ++k) {
    Formula f = g.formula(3);
    auto fv = free_vars(f);
    if (fv.empty()) continue;
    const FreeVar& v = fv[static_cast<std::size_t>(g.pick(static_cast<long>(fv.size())))];
    Term closed = v.sort.kind == Sort::VF ? term::rational(Rational(3)) : term::integer(1, v.sort);
    EXPECT_EQ(free_vars(substitute(f, {{v.name, closed}})).size(), fv.size() - 1) << to_string(f);
  }
}

TEST(Formula, ParseErrors) {
  EXPECT_THROW(parse_formula("ord(x) = ac_1(x)"), SortError);
  EXPECT_THROW(parse_formula("exists x:vf. x = 0"), ParseError);
  EXPECT_THROW(parse_formula("ord(x) = 1/2"), SortError);
  EXPECT_THROW(parse_formula("ac_1(x) <= 1"), SortError);
  EXPECT_THROW(parse_formula("x = 1 mod 2 && ord(x) = 0"), SortError);
  EXPECT_THROW(parse_formula("ord(z) = z"), SortError);
  EXPECT_THROW(parse_formula("ord(x) * ord(y) = 0"), SortError);
  EXPECT_THROW(parse_formula("proj_1_2(ac_1(x)) = 0"), ParseError);  // no such symbol
  EXPECT_THROW(parse_formula("proj_2_1(ac_1(x)) = 0"), SortError);
  EXPECT_THROW(parse_formula("exists k:res(1) in [0, 2]. k = 0"), ParseError);
  EXPECT_THROW(parse_formula("ord(x) >="), ParseError);
  EXPECT_THROW(parse_formula("ord x = 0"), ParseError);
  try {
    parse_formula("ord(x) = 0 &&& z = 1");
    FAIL();
  } catch (const ParseError& e) {
    EXPECT_NE(std::string(e.what()).find("position"), std::string::npos);
  }
  try {
    parse_formula("ord(x) = z && ac_1(z) = 1");
    FAIL();
  } catch (const SortError& e) {
    EXPECT_NE(std::string(e.what()).find("z"), std::string::npos);
  }
}

TEST(Formula, RandomWellSortedRoundTrip) {
  Gen g(101);
  for (int k = 0; k < 300; ++k) {
    Formula f = g.formula(3);
    ASSERT_NO_THROW(check_sorts(f));
    // raw trees may hold forms the parser folds (-(-2)); one pass reaches
    // the canonical form, which is then fixed
    const std::string raw_text = to_string(f);
    Formula h;
    ASSERT_NO_THROW(h = parse_formula(raw_text)) << raw_text;
    const std::string s = to_string(h);
    EXPECT_EQ(to_string(parse_formula(s)), s);
    EXPECT_EQ(to_string(parse_sexpr(to_sexpr(f))), s);
    EXPECT_EQ(to_string(parse_sexpr(to_sexpr(h))), s);
  }
}

TEST(Formula, RandomIllSortedRejected) {
  Gen g(202);
  for (int k = 0; k < 500; ++k) {
    Formula bad = g.bad_atom();
    Formula ctx = g.formula(2);
    Formula f;
    switch (g.pick(4)) {
      case 0: f = rawf(FormKind::And, {}, {ctx, bad}); break;
      case 1: f = rawf(FormKind::Or, {}, {bad, ctx}); break;
      case 2: f = rawf(FormKind::Not, {}, {bad}); break;
      default: f = rawf(FormKind::Exists, {}, {rawf(FormKind::And, {}, {ctx, bad})}, 0, "k9", Sort::vg()); break;
    }
    EXPECT_THROW(check_sorts(f), SortError) << k;
  }
}
