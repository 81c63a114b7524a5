#pragma once

#include <random>
#include <string>

#include "motint/qplus.hpp"

namespace res_corpus {

using namespace motint;

// Random generator over coordinates x:res(2), y:res(1).
inline std::string random_atom(std::mt19937_64& rng) {
  static const char* atoms[] = {"proj_2_1(x) = 0", "proj_2_1(x) != 0", "x = 1",      "x != 3",      "y = 0",
                                "y != 0",          "y^2 = 1",          "x*x = x",    "proj_2_1(x) = y", "y + 1 = 0",
                                "x = 2*x",         "y*y*y = y",        "proj_2_1(x) + y = 0",  "y != 1",      "x^2 = 0"};
  return atoms[rng() % 15];
}

inline std::string random_formula(std::mt19937_64& rng) {
  int n = static_cast<int>(rng() % 3) + 1;
  std::string s = random_atom(rng);
  for (int i = 1; i < n; ++i) s = "(" + s + (rng() % 3 == 0 ? " || " : " && ") + random_atom(rng) + ")";
  return s;
}

inline ResClass random_class(std::mt19937_64& rng) {
  ResClass out;
  int n = static_cast<int>(rng() % 2) + 1;
  for (int i = 0; i < n; ++i) {
    std::string f = "decl x:res(2), y:res(1); " + random_formula(rng);
    Formula g = parse_formula(f);
    ResClass c = ResClass::gen({{"x", Sort::res(2)}, {"y", Sort::res(1)}}, g);
    out = out + c;
  }
  return out;
}

// Fixed classes that exercise every rewrite rule at least once.
inline void exercise_rules() {
  auto cls = [](const char* t) { return ResClass::parse(t); };
  (void)cls("proj_2_1(x) = 0");
  (void)(cls("decl x:res(1); x != 0") + cls("decl x:res(1); x = 0"));
  (void)cls("decl x:res(3); proj_3_1(x) != 0");
  (void)(cls("decl x:res(1), y:res(1); x^2 = y && y != x") + cls("decl x:res(1), y:res(1); x^2 = y && y = x"));
  (void)(cls("decl x:res(1), y:res(1); x*y = 1 && x^3 = y^2") + cls("decl x:res(1), y:res(1); x*y = 1 && x^3 != y^2"));
  (void)(cls("x^2 = x + 1") * cls("x = 0"));
  (void)cls("false");
}

}  // namespace res_corpus
