#pragma once

#include <map>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "motint/arat.hpp"
#include "motint/formula.hpp"

namespace motint {

/// c0 + sum coef[v] * v with rational coefficients. Forms used as bounds
/// have integer coefficients; forms inside terms are integer-valued on their
/// cell.
struct Affine {
  Rational c0 = 0;
  std::map<std::string, Rational> coef;  // no zero entries

  Affine() = default;
  Affine(const Rational& c) : c0(c) {}
  static Affine var(const std::string& v, const Rational& k = 1);

  bool is_const() const { return coef.empty(); }
  Rational coeff(const std::string& v) const;
  std::set<std::string> vars() const;
  bool mentions(const std::string& v) const { return coef.count(v) > 0; }

  Affine operator-() const;
  friend Affine operator+(const Affine& a, const Affine& b);
  friend Affine operator-(const Affine& a, const Affine& b);
  friend Affine operator*(const Rational& k, const Affine& a);
  Affine substitute(const std::string& v, const Affine& by) const;
  Affine substitute(const std::map<std::string, Affine>& m) const;
  Rational eval(const std::map<std::string, Integer>& point) const;
  /// Scaled by a positive rational so that all coefficients are coprime integers.
  Affine primitive() const;
  /// lcm of the coefficient and constant denominators.
  Integer denominator() const;

  friend bool operator==(const Affine& a, const Affine& b) { return a.c0 == b.c0 && a.coef == b.coef; }
  friend bool operator!=(const Affine& a, const Affine& b) { return !(a == b); }
  friend bool operator<(const Affine& a, const Affine& b);
  std::string to_string() const;
};

/// Parses "2*i - j + 3", "i/2 + 1/2", "-(i - 1)".
Affine parse_affine(const std::string& text);
/// Affine form of a value-group term (OutsideFragment for ord(...)).
Affine affine_of_term(const Term& t);

/// Presburger cell in H-representation: conjunction of integer inequalities
/// form >= 0 and congruences form = 0 mod m.
struct Congruence {
  Affine form;
  Integer mod;
  friend bool operator==(const Congruence& a, const Congruence& b) { return a.form == b.form && a.mod == b.mod; }
  friend bool operator<(const Congruence& a, const Congruence& b) {
    if (a.mod != b.mod) return a.mod < b.mod;
    return a.form < b.form;
  }
};

struct PCell {
  std::vector<Affine> ineqs;
  std::vector<Congruence> congs;

  static PCell universe() { return {}; }
  /// Tower form helper: lo <= v <= hi (either side may be absent).
  static PCell bounds(const std::string& v, const std::optional<Affine>& lo, const std::optional<Affine>& hi);
  bool contains(const std::map<std::string, Integer>& point) const;
  std::set<std::string> vars() const;
  PCell substitute(const std::string& v, const Affine& by) const;
  PCell substitute(const std::map<std::string, Affine>& m) const;
  /// Primitive integer inequalities (rounded constants), duplicates and
  /// dominated parallel inequalities removed, congruences merged by CRT.
  /// Returns false if the cell is detected empty.
  bool normalize();
  friend bool operator==(const PCell& a, const PCell& b) { return a.ineqs == b.ineqs && a.congs == b.congs; }
  std::string to_string() const;
};

PCell intersect(const PCell& a, const PCell& b);
/// Rational relaxation check (plus exact evaluation when no variables remain).
bool is_empty(const PCell& c);

using CellSet = std::vector<PCell>;
enum class CellOp { Union, Intersection, Difference, Refine };
/// Disjoint union of cells denoting the combination. Refine returns a
/// disjoint cover of the union of all cells in `a` (b ignored).
CellSet cell_algebra(const CellSet& a, const CellSet& b, CellOp op);
CellSet complement(const PCell& c);

/// Cells of a quantifier-free value-group formula (linear atoms and
/// congruences, any boolean structure).
CellSet cells_of(const Formula& f);

/// a * L^beta * prod alphas.
struct PTerm {
  ARat a;
  Affine beta;
  std::vector<Affine> alphas;

  std::string to_string() const;
};

struct Piece {
  PCell cell;
  std::vector<PTerm> terms;
};

/// Constructible Presburger function: the value at a point is the sum of the
/// terms of every piece whose cell contains it.
struct PFun {
  std::vector<std::string> vars;
  std::vector<Piece> pieces;

  static PFun constant(const ARat& a, std::vector<std::string> vars = {});
  static PFun indicator(const PCell& c, std::vector<std::string> vars);
  static PFun term(const PCell& c, const PTerm& t, std::vector<std::string> vars);

  bool is_zero() const { return pieces.empty(); }
  /// theta_q of the value; QOutOfRange for q <= 1.
  Rational eval(const std::map<std::string, Integer>& point, const Rational& q) const;
  /// Symbolic value at a point.
  ARat value(const std::map<std::string, Integer>& point) const;
  /// For a function without variables: the constant.
  ARat as_constant() const;

  PFun substitute(const std::map<std::string, Affine>& m, std::vector<std::string> new_vars) const;
  /// Fix some variables to integers (drops them from vars).
  PFun restrict_to(const std::map<std::string, Integer>& point) const;

  std::string to_string() const;
};

PFun operator+(const PFun& a, const PFun& b);
PFun operator*(const PFun& a, const PFun& b);
PFun scale(const PFun& f, const ARat& a);
/// Merges terms, drops zero terms and empty cells, sorts pieces.
PFun simplify(const PFun& f);
/// Disjoint refinement with the same values.
PFun refine(const PFun& f);

/// True iff every nonempty piece has beta strictly decreasing on every
/// nonzero direction of the recession cone of its fiber.
bool is_integrable(const PFun& f, const std::vector<std::string>& fiber_vars);

/// Closed-form summation over the fiber variables, one at a time in the
/// listed order. Throws NotIntegrable.
PFun sum_fibers(const PFun& f, const std::vector<std::string>& fiber_vars);

}  // namespace motint
