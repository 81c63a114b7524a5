#pragma once

#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <set>
#include <string>
#include <vector>

#include "motint/errors.hpp"
#include "motint/poly.hpp"

namespace motint {

/// Sorts of the three-sorted language: valued field, residue ring mod pi^n,
/// value group.
struct Sort {
  enum Kind { VF, RES, VG };
  Kind kind = VF;
  int depth = 0;  // only for RES, >= 1

  static Sort vf() { return {VF, 0}; }
  static Sort res(int n) { return {RES, n}; }
  static Sort vg() { return {VG, 0}; }

  bool operator==(const Sort& o) const { return kind == o.kind && depth == o.depth; }
  bool operator!=(const Sort& o) const { return !(*this == o); }
  bool operator<(const Sort& o) const { return kind != o.kind ? kind < o.kind : depth < o.depth; }
  std::string to_string() const;
};

struct TermNode;
using Term = std::shared_ptr<const TermNode>;

enum class TermKind { Var, Int, Rat, Pi, Add, Sub, Mul, Neg, Pow, Ord, Ac, Proj };

struct TermNode {
  TermKind kind;
  Sort sort;
  std::string name;       // Var
  Rational value;         // Int / Rat literal
  int n = 0, m = 0;       // Ac depth, Proj (n, m), Pow exponent in n
  std::vector<Term> args;
};

namespace term {
Term var(const std::string& name, Sort s);
Term integer(const Integer& v, Sort s);
Term rational(const Rational& v);  // VF literal
Term pi(Sort s);
Term add(Term a, Term b);
Term sub(Term a, Term b);
Term mul(Term a, Term b);
Term neg(Term a);
Term pow(Term a, int e);
Term ord(Term a);
Term ac(int n, Term a);
Term proj(int n, int m, Term a);
}  // namespace term

struct FormulaNode;
using Formula = std::shared_ptr<const FormulaNode>;

enum class FormKind { True, False, Eq, Ne, Le, Lt, Ge, Gt, Cong, Not, And, Or, Exists, Forall };

struct FormulaNode {
  FormKind kind;
  std::vector<Term> terms;       // atoms: two terms
  Integer modulus;               // Cong
  std::vector<Formula> subs;     // Not/And/Or/quantifiers (one body)
  std::string var;               // quantified variable
  Sort var_sort;
  std::optional<Integer> lo, hi; // VG quantifier bounds
};

namespace fm {
Formula truth();
Formula falsity();
Formula atom(FormKind k, Term a, Term b);
Formula cong(Term a, Term b, const Integer& modulus);
Formula neg(Formula f);
Formula conj(std::vector<Formula> fs);
Formula disj(std::vector<Formula> fs);
Formula exists(const std::string& v, Sort s, Formula body, std::optional<Integer> lo = {}, std::optional<Integer> hi = {});
Formula forall(const std::string& v, Sort s, Formula body, std::optional<Integer> lo = {}, std::optional<Integer> hi = {});
}  // namespace fm

struct ParseOptions {
  /// Sort given to variables whose sort no context determines.
  Sort default_sort = Sort::res(1);
  /// Sorts fixed in advance (e.g. base parameters).
  std::map<std::string, Sort> declared;
};

Formula parse_formula(const std::string& text, const ParseOptions& opts = {});
/// Parses a single term; the expected sort fixes literals and free variables.
Term parse_term(const std::string& text, Sort expected, const ParseOptions& opts = {});

/// Canonical one-line form. A "decl" header is emitted for free variables
/// whose sort is not determined by the formula itself.
std::string to_string(const Formula& f);
std::string to_string(const Term& t);

/// S-expression block form, e.g. (and (= (ord x) z) ...).
std::string to_sexpr(const Formula& f);
Formula parse_sexpr(const std::string& text, const ParseOptions& opts = {});

struct FreeVar {
  std::string name;
  Sort sort;
};

/// Free variables in first-occurrence order.
std::vector<FreeVar> free_vars(const Formula& f);
std::vector<FreeVar> free_vars(const Term& t);

/// h[n, m, r] signature of the free variables.
struct Frame {
  int n = 0;
  std::vector<int> m;
  int r = 0;
  std::vector<FreeVar> vf, res, vg;
  std::string to_string() const;
};
Frame frame(const Formula& f);

/// Capture-avoiding substitution; throws SortError on mismatched bindings.
Formula substitute(const Formula& f, const std::map<std::string, Term>& bindings);
Term substitute(const Term& t, const std::map<std::string, Term>& bindings);
/// Renames free variables (bindings to variables of the same sort).
Formula rename(const Formula& f, const std::map<std::string, std::string>& names);

/// Constant folding of True/False, flattening of And/Or, sorting and
/// de-duplication of their arguments, folding of comparisons of literals.
Formula simplify(const Formula& f);

bool structurally_equal(const Formula& a, const Formula& b);
bool structurally_equal(const Term& a, const Term& b);

/// Well-sortedness check of a hand-built tree; throws SortError.
void check_sorts(const Formula& f);
void check_sorts(const Term& t);

/// Conjuncts of a top-level And (or the formula itself).
std::vector<Formula> conjuncts(const Formula& f);
bool mentions(const Formula& f, const std::string& var);
bool mentions(const Term& t, const std::string& var);
bool is_atom(const Formula& f);
/// K if the RES term is ac_n(K) for a nonzero constant K, built from ac
/// literals, +-1, products, powers and projections.
std::optional<Rational> res_unit_value(const Term& t);

/// Bottom-up rewriting: `fn` replaces a subterm when it returns a value,
/// otherwise children are mapped and the node rebuilt.
Term map_term(const Term& t, const std::function<std::optional<Term>(const Term&)>& fn);
Formula map_formula(const Formula& f, const std::function<std::optional<Term>(const Term&)>& fn);

}  // namespace motint
