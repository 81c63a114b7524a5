#pragma once

#include <optional>
#include <string>
#include <vector>

#include "motint/presburger.hpp"
#include "motint/qplus.hpp"

namespace motint {

/// k * prod (x_i - c_i)^e_i: the shape of valued-field terms the symbolic
/// engines accept inside ord and ac_n.
struct LinearFactors {
  Rational k = 1;
  struct Factor {
    std::string var;
    Rational center;
    int exp = 1;
  };
  std::vector<Factor> factors;
};

/// OutsideFragment when the term is not a product of a constant and
/// one-variable linear polynomials.
LinearFactors linearize(const Term& vf_term);

/// Names of derived coordinates: "ord(x - c)" and "ac_n(x - c)".
std::string derived_ord_name(const std::string& var, const Rational& center);
std::string derived_ac_name(int n, const std::string& var, const Rational& center);

/// Coordinates of a presented base X plus the derived coordinates in use.
struct MotFrame {
  std::vector<FreeVar> coords;
  std::map<std::string, Term> derived;  // name -> ord(x - c) or ac_n(x - c)

  std::vector<FreeVar> of_sort(Sort::Kind k) const;
  /// Variables a Presburger part may use: VG coordinates, derived ord names.
  std::vector<std::string> vg_names() const;
  /// Base of residue parts: RES and VF coordinates, derived ac names.
  std::vector<FreeVar> res_base() const;
  bool has(const std::string& name) const;
  /// Registers ord(x - c) and returns its name.
  std::string add_ord(const std::string& var, const Rational& center);
  std::string add_ac(int n, const std::string& var, const Rational& center);
  std::string to_string() const;
};

/// Context for constants whose valuation depends on the residue
/// characteristic (ord(2) = 1 only when p = 2). p = 0: only +-1 and
/// literal-free terms are accepted.
struct PContext {
  long p = 0;
};

/// ord(term) as an affine form over derived names (registered in `frame`).
Affine ord_affine(const Term& vf_term, MotFrame& frame, const PContext& ctx);
/// ac_n(term) as a residue term over derived names.
Term ac_term(int n, const Term& vf_term, MotFrame& frame);
/// A value-group term as an affine form (ord subterms become derived names).
Affine vg_affine(const Term& vg_term, MotFrame& frame, const PContext& ctx);
/// A residue term with ac_n(VF) subterms replaced by derived names.
Term res_term(const Term& t, MotFrame& frame);

/// One summand pf (x) rc.
struct MotTerm {
  PFun pf;
  ResClass rc;
};

/// Constructible motivic function: the value at a point is the sum over
/// terms of theta(pf) * #rc-fiber.
class MotFun {
 public:
  MotFrame frame;
  std::vector<MotTerm> terms;

  static MotFun zero(MotFrame frame);
  static MotFun constant(const ARat& a, MotFrame frame);
  static MotFun from_pfun(const PFun& pf, MotFrame frame);
  static MotFun from_class(const ResClass& rc, MotFrame frame);
  /// Indicator of a quantifier-free condition: value-group atoms become
  /// cells (one term per truth assignment), residue atoms generators.
  static MotFun indicator(const Formula& cond, MotFrame frame, const PContext& ctx = {});
  /// L^(e) with e a value-group term.
  static MotFun L_power(const Term& vg_exponent, MotFrame frame, const PContext& ctx = {});

  /// Re-bases every part on `frame` (a superset of the current one).
  MotFun extended(const MotFrame& to) const;

  bool is_zero() const { return terms.empty(); }
  /// Scalars of residue parts moved to the Presburger side, terms grouped by
  /// generator, Presburger parts simplified.
  MotFun normalized() const;
  /// For a function over the point: the constant, if all generators are
  /// trivial.
  std::optional<ARat> as_constant() const;
  std::string to_string() const;
};

MotFrame merge_frames(const MotFrame& a, const MotFrame& b);
MotFun operator+(const MotFun& a, const MotFun& b);
MotFun operator*(const MotFun& a, const MotFun& b);
MotFun scale(const MotFun& a, const ARat& s);

/// Coordinate map X -> Y: target coordinate -> term over X's coordinates.
using CoordMap = std::map<std::string, Term>;
MotFun pullback(const MotFun& a, const CoordMap& f, const MotFrame& source, const PContext& ctx = {});

/// The point with the derived coordinates of `frame` evaluated. EvalError
/// on a derived ord(0).
Env with_derived(const MotFrame& frame, const Env& point);

/// a_K(x): theta_{p^d} of the Presburger parts times the residue fiber
/// counts at the point. EvalError on points of the exceptional locus
/// (a derived ord of 0).
Rational specialize(const MotFun& a, long p, int d, const Env& point, const CountOptions& opts = {});

bool is_integrable(const MotFun& a, const std::vector<std::string>& fiber);
/// Sums the value-group fiber coordinates and integrates the residue ones.
/// Throws NotIntegrable.
MotFun mu_vg_res(const MotFun& a, const std::vector<std::string>& fiber);

/// Moves residue classes to indicator functions on X[0, m, 0]: the added
/// coordinates are returned in `added`. mu_vg_res(lift(a), added) = a.
MotFun lift(const MotFun& a, std::vector<FreeVar>& added);

Equality is_equal(const MotFun& a, const MotFun& b);
/// First sample point and (p, d) where a and b specialize differently.
std::optional<std::string> refute(const MotFun& a, const MotFun& b, const std::vector<Env>& points,
                                  const std::vector<std::pair<long, int>>& grid);

}  // namespace motint
