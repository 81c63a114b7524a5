#pragma once

#include <functional>
#include <string>
#include <vector>

#include "motint/arat.hpp"
#include "motint/formula.hpp"
#include "motint/padic.hpp"

namespace motint {

/// Generator [Y]: the residue coordinates `vars` (sorts RES(m_i)) cut out by
/// `formula`, whose remaining free variables are base parameters.
struct ResGen {
  std::vector<FreeVar> vars;
  Formula formula;

  std::vector<int> signature() const;
  /// Signature plus canonical formula text; the sort key of the normal form.
  std::string key() const;
  std::string to_string() const;
};

/// Element of Q+ over a base: sum of scalar * [gen] with scalars in the
/// sub-semiring N[L - 1] (polynomials in L with nonnegative coefficients in
/// powers of L - 1).
class ResClass {
 public:
  struct Term {
    ARat scalar;
    ResGen gen;
  };

  ResClass() = default;
  explicit ResClass(std::vector<FreeVar> base) : base_(std::move(base)) {}

  static ResClass zero(std::vector<FreeVar> base = {});
  static ResClass one(std::vector<FreeVar> base = {});
  static ResClass scalar(const ARat& s, std::vector<FreeVar> base = {});
  static ResClass L_pow(int k, std::vector<FreeVar> base = {});
  /// Class of {vars : formula}; rewritten to normal form.
  static ResClass gen(std::vector<FreeVar> vars, Formula formula, std::vector<FreeVar> base = {}, const ARat& mult = ARat(1));
  /// Parses "decl x:res(2); formula" style text: variables of the formula
  /// that are not base parameters become generator coordinates.
  static ResClass parse(const std::string& formula_text, std::vector<FreeVar> base = {});

  const std::vector<FreeVar>& base() const { return base_; }
  const std::vector<Term>& terms() const { return terms_; }
  bool is_zero() const { return terms_.empty(); }
  /// The scalar if the class is scalar * 1.
  std::optional<ARat> as_scalar() const;

  friend ResClass operator+(const ResClass& a, const ResClass& b);
  friend ResClass operator*(const ResClass& a, const ResClass& b);
  ResClass times(const ARat& s) const;

  /// Substitutes base parameters (pullback along a coordinate map) and sets a
  /// new base.
  ResClass substitute(const std::map<std::string, motint::Term>& bindings, std::vector<FreeVar> new_base) const;

  /// Normal forms compared textually.
  friend bool operator==(const ResClass& a, const ResClass& b) { return a.to_string() == b.to_string(); }
  std::string to_string() const;

  /// Raw construction without rewriting (used by the rewriter and tests).
  static ResClass raw(std::vector<Term> terms, std::vector<FreeVar> base);

 private:
  std::vector<FreeVar> base_;
  std::vector<Term> terms_;
};

/// True iff s is a polynomial in L with nonnegative coefficients in the
/// basis (L - 1)^k.
bool in_scalar_semiring(const ARat& s);

/// One application of a rewrite rule: `before` and `after` denote the same
/// class.
struct RewriteEvent {
  std::string rule;  // eq0, eq1-graph, eq1-rename, eq2, eq3, torus, fullspace
  ResClass before, after;
};

/// Global observer for every rewrite performed (thread-safe; pass {} to
/// clear).
void set_rewrite_observer(std::function<void(const RewriteEvent&)> obs);

/// Applies the rewrite rules to a fixed point.
ResClass rewrite(const ResClass& a);

enum class Equality { Equal, Unknown };
Equality is_equal(const ResClass& a, const ResClass& b);

/// Integrates out the base parameters `fiber` (residue sorts): they become
/// generator coordinates.
ResClass mu_res(const ResClass& a, const std::vector<std::string>& fiber);

/// N_d at a base point: sum of theta_{p^d}(scalar) * #gen-fiber. All base
/// parameters must be bound in `point`.
Rational count_class(const ResClass& a, long p, int d, const Env& point = {}, const CountOptions& opts = {});

}  // namespace motint
