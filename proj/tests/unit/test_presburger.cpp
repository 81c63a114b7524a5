#include <gtest/gtest.h>

#include "pfun_oracle.hpp"

using namespace motint;

namespace {

PCell cell(std::vector<std::string> ineqs, std::vector<std::pair<std::string, long>> congs = {}) {
  PCell c;
  for (const auto& s : ineqs) c.ineqs.push_back(parse_affine(s));
  for (const auto& [f, m] : congs) c.congs.push_back({parse_affine(f), Integer(m)});
  return c;
}

PFun fun(const std::vector<std::string>& vars, const PCell& c, const std::string& a, const std::string& beta,
         std::vector<std::string> alphas = {}) {
  PTerm t{parse_arat(a), parse_affine(beta), {}};
  for (const auto& s : alphas) t.alphas.push_back(parse_affine(s));
  return PFun::term(c, t, vars);
}

ARat total(const PFun& f, const std::vector<std::string>& fiber) { return sum_fibers(f, fiber).as_constant(); }

}  // namespace

TEST(Affine, ParsePrint) {
  Affine a = parse_affine("2*i - j + 3");
  EXPECT_EQ(a.coeff("i"), 2);
  EXPECT_EQ(a.coeff("j"), -1);
  EXPECT_EQ(a.c0, 3);
  EXPECT_EQ(parse_affine(a.to_string()), a);
  Affine b = parse_affine("i/2 + 1/2");
  EXPECT_EQ(b.coeff("i"), Rational(1, 2));
  EXPECT_EQ(parse_affine(b.to_string()), b);
  EXPECT_EQ(parse_affine("-(i - 1)"), parse_affine("1 - i"));
  EXPECT_THROW(parse_affine("i*j"), ParseError);
}

TEST(Cells, Algebra) {
  CellSet inter = cell_algebra({cell({"i"})}, {cell({"5 - i"})}, CellOp::Intersection);
  ASSERT_EQ(inter.size(), 1u);
  EXPECT_EQ(inter[0].ineqs.size(), 2u);
  CellSet tower = cell_algebra({cell({"j"})}, {cell({"i - j"})}, CellOp::Intersection);
  ASSERT_EQ(tower.size(), 1u);
  EXPECT_TRUE(tower[0].contains({{"i", 3}, {"j", 2}}));
  EXPECT_FALSE(tower[0].contains({{"i", 1}, {"j", 2}}));
  CellSet crt = cell_algebra({cell({}, {{"i", 2}})}, {cell({}, {{"i", 3}})}, CellOp::Intersection);
  ASSERT_EQ(crt.size(), 1u);
  ASSERT_EQ(crt[0].congs.size(), 1u);
  EXPECT_EQ(crt[0].congs[0].mod, 6);
  EXPECT_TRUE(cell_algebra({cell({}, {{"i", 2}})}, {cell({}, {{"i - 1", 2}})}, CellOp::Intersection).empty());
}

TEST(Cells, SetSemanticsByEnumeration) {
  // Oracle: pointwise membership over a box.
  std::vector<CellSet> a = {{cell({"i", "4 - i"}), cell({"j - i"})}, {cell({"i + j - 1"}, {{"i", 2}})}, {cell({"3 - j", "j + 2"})}};
  std::vector<CellSet> b = {{cell({"i - 2"}, {{"i + j", 3}})}, {cell({"-i"}), cell({"j"})}, {cell({}, {{"j", 2}})}};
  auto in = [](const CellSet& s, long i, long j) {
    for (const auto& c : s)
      if (c.contains({{"i", i}, {"j", j}})) return true;
    return false;
  };
  for (std::size_t k = 0; k < a.size(); ++k) {
    for (CellOp op : {CellOp::Union, CellOp::Intersection, CellOp::Difference, CellOp::Refine}) {
      CellSet r = cell_algebra(a[k], b[k], op);
      for (long i = -6; i <= 6; ++i) {
        for (long j = -6; j <= 6; ++j) {
          bool x = in(a[k], i, j), y = in(b[k], i, j);
          bool expect = op == CellOp::Union ? (x || y) : op == CellOp::Intersection ? (x && y) : op == CellOp::Difference ? (x && !y) : x;
          int hits = 0;
          for (const auto& c : r) hits += c.contains({{"i", i}, {"j", j}}) ? 1 : 0;
          EXPECT_EQ(hits, expect ? 1 : 0) << "case " << k << " op " << static_cast<int>(op) << " at " << i << "," << j;
        }
      }
    }
  }
}

TEST(Cells, FromFormula) {
  CellSet s = cells_of(parse_formula("decl z:vg, w:vg; (z >= 0 && z != 3) || (w < z && z = 1 mod 2)"));
  for (long z = -5; z <= 8; ++z) {
    for (long w = -5; w <= 8; ++w) {
      bool expect = (z >= 0 && z != 3) || (w < z && z % 2 != 0);
      int hits = 0;
      for (const auto& c : s) hits += c.contains({{"z", z}, {"w", w}}) ? 1 : 0;
      EXPECT_EQ(hits, expect ? 1 : 0);
    }
  }
  EXPECT_THROW(cells_of(parse_formula("decl x:vf, z:vg; ord(x) = z")), OutsideFragment);
}

TEST(PFunEval, WorkedExamples) {
  PFun f = fun({"i"}, cell({"i"}), "1", "-i");
  EXPECT_EQ(f.eval({{"i", 3}}, 2), Rational(1, 8));
  EXPECT_EQ(f.eval({{"i", -1}}, 2), 0);
  PFun g = fun({"i"}, cell({"i"}), "1", "-i", {"i + 1"});
  EXPECT_EQ(g.eval({{"i", 2}}, 3), Rational(1, 3));
  EXPECT_THROW(g.eval({{"i", 2}}, 1), QOutOfRange);
}

TEST(PFunSum, WorkedExamples) {
  EXPECT_EQ(total(fun({"i"}, cell({"i"}), "1 - L^-1", "-i"), {"i"}), ARat(1));
  EXPECT_EQ(total(fun({"i"}, cell({"i"}), "1", "-i"), {"i"}), parse_arat("L/(L - 1)"));
  EXPECT_EQ(total(fun({"i"}, cell({"i"}), "1", "-i", {"i + 1"}), {"i"}), parse_arat("L^2/(L - 1)^2"));
  EXPECT_THROW(total(fun({"i"}, cell({"i"}), "1", "i"), {"i"}), NotIntegrable);
}

TEST(PFunSum, Integrability) {
  EXPECT_TRUE(is_integrable(fun({"i"}, cell({"i"}), "1", "-i"), {"i"}));
  EXPECT_FALSE(is_integrable(fun({"i"}, cell({"i"}), "1", "i"), {"i"}));
  PFun tri = fun({"i", "j"}, cell({"j", "i - j"}), "1", "-i");
  EXPECT_TRUE(is_integrable(tri, {"i", "j"}));
  EXPECT_FALSE(is_integrable(fun({"i", "j"}, cell({"j", "i"}), "1", "-i"), {"i", "j"}));
  EXPECT_TRUE(is_integrable(fun({"i"}, cell({"i", "7 - i"}), "1", "i"), {"i"}));
  // numeric oracle for the triangle: sum_i (i + 1) 2^-i = 4
  EXPECT_EQ(total(tri, {"j", "i"}).theta(2), 4);
}

TEST(PFunSum, FiniteAndParametric) {
  // sum_{i=0}^{n} L^i with parameter n, checked pointwise by direct summation
  PFun f = fun({"n", "i"}, cell({"i", "n - i"}), "1", "i");
  PFun s = sum_fibers(f, {"i"});
  for (long n = -2; n <= 8; ++n) {
    ARat direct;
    for (long i = 0; i <= n; ++i) direct += ARat::L_pow(i);
    EXPECT_EQ(s.value({{"n", n}}), direct) << n;
  }
  // polynomial factors and congruences: sum over 0 <= i <= n, i = 1 mod 3 of (2i - n) L^-i
  PFun g = fun({"n", "i"}, cell({"i", "n - i"}, {{"i - 1", 3}}), "L + 1", "-i", {"2*i - n", "i + 2"});
  PFun sg = sum_fibers(g, {"i"});
  for (long n = -1; n <= 14; ++n) {
    ARat direct;
    for (long i = 0; i <= n; ++i) {
      if (i % 3 == 1) direct += parse_arat("L + 1") * ARat::L_pow(-i) * ARat((2 * i - n) * (i + 2));
    }
    EXPECT_EQ(sg.value({{"n", n}}), direct) << n;
  }
}

TEST(PFunSum, TwoSidedAndUpperOnly) {
  // sum over i <= 3 of L^i
  PFun f = fun({"i"}, cell({"3 - i"}), "1", "i");
  ARat v = total(f, {"i"});
  EXPECT_EQ(v, ARat::L_pow(3) * parse_arat("L/(L - 1)"));
  // sum over all i of L^-|i| as two pieces
  PFun g = fun({"i"}, cell({"i"}), "1", "-i") + fun({"i"}, cell({"-i - 1"}), "1", "i");
  EXPECT_EQ(total(g, {"i"}), parse_arat("(L + 1)/(L - 1)"));
  EXPECT_THROW(total(fun({"i"}, PCell(), "1", "-i"), {"i"}), NotIntegrable);
}

TEST(PFunSum, RandomAgainstNumericOracle) {
  std::mt19937_64 rng(2024);
  for (int k = 0; k < 30; ++k) {
    auto in = oracle::random_instance(rng, k % 2 + 1);
    ARat closed = total(in.f, in.fiber);
    for (long q : {2L, 3L}) {
      auto num = oracle::numeric_sum_to(in, Rational(q), 1e-13, in.f.vars.size() == 1 ? 400 : 150);
      double diff = std::fabs(Rational(closed.theta(Rational(q)) - num.partial).get_d());
      EXPECT_LE(num.tail_bound, 1e-12);
      EXPECT_LE(diff, num.tail_bound * (1 + 1e-9)) << in.f.to_string() << " q=" << q;
    }
  }
}

TEST(PFunSum, FubiniOrders) {
  std::mt19937_64 rng(99);
  for (int k = 0; k < 10; ++k) {
    auto in = oracle::random_instance(rng, 2);
    EXPECT_EQ(total(in.f, {"i", "j"}), total(in.f, {"j", "i"})) << in.f.to_string();
  }
}

TEST(PFunSum, Linearity) {
  std::mt19937_64 rng(5);
  for (int k = 0; k < 10; ++k) {
    auto a = oracle::random_instance(rng, 1), b = oracle::random_instance(rng, 1);
    ARat c = oracle::random_coeff(rng);
    ARat lhs = total(scale(a.f, c) + b.f, {"i"});
    EXPECT_EQ(lhs, c * total(a.f, {"i"}) + total(b.f, {"i"}));
  }
}

TEST(PFunSum, PartialEvaluationConsistency) {
  // sum over j then fixing i equals summing the restriction.
  PFun f = fun({"i", "j"}, cell({"j", "i - j"}, {{"i + j", 2}}), "1 - L^-1", "-i - j", {"j + 1"});
  PFun s = sum_fibers(f, {"j"});
  for (long i = -1; i <= 9; ++i) {
    ARat direct = total(f.restrict_to({{"i", i}}), {"j"});
    EXPECT_EQ(s.value({{"i", i}}), direct) << i;
  }
}

TEST(PFunRefine, DisjointSameValues) {
  PFun f = fun({"i"}, cell({"i"}), "1", "-i") + fun({"i"}, cell({"5 - i"}), "L", "0") + fun({"i"}, cell({}, {{"i", 2}}), "2", "0");
  PFun r = refine(f);
  for (long i = -6; i <= 12; ++i) {
    int hits = 0;
    for (const auto& pc : r.pieces) hits += pc.cell.contains({{"i", i}}) ? 1 : 0;
    EXPECT_LE(hits, 1);
    EXPECT_EQ(r.value({{"i", i}}), f.value({{"i", i}}));
  }
}
