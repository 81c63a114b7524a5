#pragma once

// Random elements of A built as expression trees; the tree is evaluated at q
// directly with rationals, independently of ARat, as the theta oracle.

#include <functional>
#include <random>
#include <string>
#include <vector>

#include "motint/arat.hpp"

namespace ring_suite {

using namespace motint;

struct Expr {
  ARat value;
  std::function<Rational(const Rational&)> at;
  std::string text;
};

inline Rational qpow(const Rational& q, long k) {
  Rational r = 1, b = k >= 0 ? q : Rational(1) / q;
  for (long i = 0; i < (k >= 0 ? k : -k); ++i) r *= b;
  return r;
}

inline Expr leaf(std::mt19937_64& rng) {
  switch (rng() % 4) {
    case 0: {
      long c = static_cast<long>(rng() % 11) - 5;
      return {ARat(c), [c](const Rational&) -> Rational { return Rational(c); }, std::to_string(c)};
    }
    case 1: {
      long k = static_cast<long>(rng() % 7) - 3;
      return {ARat::L_pow(k), [k](const Rational& q) -> Rational { return qpow(q, k); }, "L^" + std::to_string(k)};
    }
    case 2: {
      long c = static_cast<long>(rng() % 4) + 1;
      if (rng() % 2) c = -c;
      return {ARat::geometric(c), [c](const Rational& q) -> Rational { return Rational(1) / (Rational(1) - qpow(q, c)); },
              "1/(1 - L^" + std::to_string(c) + ")"};
    }
    default: {
      long a = static_cast<long>(rng() % 7) - 3, b = static_cast<long>(rng() % 7) - 3;
      return {ARat(a) * ARat::L() + ARat(b), [a, b](const Rational& q) -> Rational { return Rational(a) * q + Rational(b); },
              "(" + std::to_string(a) + "*L + " + std::to_string(b) + ")"};
    }
  }
}

inline Expr random_expr(std::mt19937_64& rng, int depth) {
  if (depth == 0 || rng() % 4 == 0) return leaf(rng);
  Expr a = random_expr(rng, depth - 1), b = random_expr(rng, depth - 1);
  switch (rng() % 3) {
    case 0:
      return {a.value + b.value, [a, b](const Rational& q) -> Rational { return a.at(q) + b.at(q); }, "(" + a.text + " + " + b.text + ")"};
    case 1:
      return {a.value - b.value, [a, b](const Rational& q) -> Rational { return a.at(q) - b.at(q); }, "(" + a.text + " - " + b.text + ")"};
    default:
      return {a.value * b.value, [a, b](const Rational& q) -> Rational { return a.at(q) * b.at(q); }, "(" + a.text + " * " + b.text + ")"};
  }
}

inline const std::vector<Rational>& sample_qs() {
  static const std::vector<Rational> qs{Rational(2), Rational(3), Rational(5, 2)};
  return qs;
}

// theta_q(a op b) against theta_q(a) op theta_q(b) and the tree value, for
// n random triples; returns the failing cases.
inline std::vector<std::string> homomorphism_failures(unsigned seed, int n) {
  std::mt19937_64 rng(seed);
  std::vector<std::string> bad;
  for (int k = 0; k < n; ++k) {
    Expr a = random_expr(rng, 3), b = random_expr(rng, 3), c = random_expr(rng, 3);
    for (const Rational& q : sample_qs()) {
      const Rational ta = a.value.theta(q), tb = b.value.theta(q), tc = c.value.theta(q);
      bool ok = ta == a.at(q) && tb == b.at(q) && tc == c.at(q);
      ok = ok && (a.value + b.value).theta(q) == ta + tb;
      ok = ok && (a.value - c.value).theta(q) == ta - tc;
      ok = ok && (a.value * b.value).theta(q) == ta * tb;
      ok = ok && ((a.value + b.value) * c.value).theta(q) == (ta + tb) * tc;
      ok = ok && (a.value * b.value * c.value).theta(q) == ta * tb * tc;
      if (!ok) bad.push_back(a.text + " | " + b.text + " | " + c.text + " at q=" + q.get_str());
    }
  }
  return bad;
}

struct Labeled {
  const char* text;
  bool nonneg;
};

// Labels worked out by hand: factor, then look at (1, oo).
inline const std::vector<Labeled>& nonneg_corpus() {
  static const std::vector<Labeled> c{
      {"L - 2", false},                              // -1/2 at 3/2
      {"L - 1", true},
      {"(L - 2)^2 / (L - 1)", true},                 // square over positive
      {"0", true},
      {"-1", false},
      {"L^-1", true},
      {"1 - L^-1", true},
      {"L - 1 - L^-1", false},                       // -> -1 as q -> 1
      {"(L - 3)*(L - 4)", false},                    // negative on (3, 4)
      {"(L - 3)^2", true},
      {"L^2 - 3*L + 3", true},                       // discriminant -3
      {"(L - 1)*(L - 2)", false},
      {"1/(1 - L^-2)", true},
      {"(L - 2)/(L + 1)", false},
      {"(L - 2)^2*(L + 1)/(L^2 + L + 1)", true},
      {"L^3 - 2", false},                            // q = 1.1
      {"2 - L", false},                              // large q
      {"(L - 1)^3", true},
      {"(10*L - 9)*(10*L - 11)", false},             // roots 0.9 and 1.1
      {"100*L^2 - 200*L + 101", true},               // (10L - 10)^2 + 1
      {"(L - 2)^2*(L - 3)", false},
      {"L^5 - 1000", false},
      {"(4*L^2 - 12*L + 9)/(L^3 - L^2)", true},      // (2L - 3)^2 / (L^2 (L - 1))
  };
  return c;
}

inline std::vector<std::string> nonneg_failures() {
  std::vector<std::string> bad;
  for (const auto& [t, want] : nonneg_corpus()) {
    if (parse_arat(t).is_nonneg() != want) bad.push_back(std::string(t) + " expected " + (want ? "true" : "false"));
  }
  return bad;
}

}  // namespace ring_suite
