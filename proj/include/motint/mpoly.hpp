#pragma once

#include <map>
#include <string>
#include <vector>

#include "motint/padic.hpp"

namespace motint {

/// Multivariate polynomial with rational coefficients; exponent vectors are
/// indexed by `vars`.
struct MPoly {
  std::vector<std::string> vars;
  std::map<std::vector<int>, Rational> terms;

  int nvars() const { return static_cast<int>(vars.size()); }
  bool is_zero() const { return terms.empty(); }
  /// c * x_1^k_1 ... x_n^k_n (a single term).
  bool is_monomial() const { return terms.size() == 1; }
  int total_degree() const;
  std::string to_string() const;
};

/// Parses e.g. "x^2*y^3 - 3*x + 1" (variables in first-occurrence order).
MPoly parse_mpoly(const std::string& text);
MPoly mpoly_from_term(const Term& t);
/// Valued-field term for the polynomial.
Term mpoly_to_term(const MPoly& h);

}  // namespace motint
