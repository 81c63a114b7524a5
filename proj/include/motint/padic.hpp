#pragma once

#include <array>
#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "motint/arat.hpp"
#include "motint/errors.hpp"
#include "motint/formula.hpp"

namespace motint {

bool is_prime(long p);
/// v_p of a nonzero rational.
long padic_valuation(const Rational& r, long p);

constexpr int kMaxDegree = 8;

class GaloisRing;

/// Element of O_d / p^level, coefficients in the basis 1, w, ..., w^{d-1}
/// where w is a root of the ring's modulus.
struct GRElem {
  const GaloisRing* ring = nullptr;
  std::array<std::int64_t, kMaxDegree> c{};

  bool is_zero() const;
  /// Minimum p-adic valuation of the coefficients; the level if zero.
  int valuation() const;
  std::string to_string() const;
};

bool operator==(const GRElem& a, const GRElem& b);
inline bool operator!=(const GRElem& a, const GRElem& b) { return !(a == b); }
GRElem operator+(const GRElem& a, const GRElem& b);
GRElem operator-(const GRElem& a, const GRElem& b);
GRElem operator-(const GRElem& a);
GRElem operator*(const GRElem& a, const GRElem& b);

/// GR(p^level, d) = Z[w]/(p^level, f(w)) with f monic, irreducible mod p.
class GaloisRing {
 public:
  /// Cached ring with the lexicographically smallest monic irreducible
  /// modulus (compared on (a_{d-1}, ..., a_0)).
  static const GaloisRing& get(long p, int d, int level);
  /// Same p, d with an explicit modulus (ascending, monic, length d + 1).
  static const GaloisRing& with_modulus(long p, int d, int level, const std::vector<long>& modulus);
  /// Default modulus as ascending coefficients.
  static std::vector<long> default_modulus(long p, int d);

  long p() const { return p_; }
  int d() const { return d_; }
  int level() const { return level_; }
  std::int64_t modulus_pl() const { return pl_; }
  const std::vector<long>& modulus() const { return mod_; }
  /// p^(d * level), throws CapExceeded if it does not fit 63 bits.
  std::int64_t size() const;
  Integer size_exact() const;

  GRElem zero() const;
  GRElem one() const;
  GRElem from_int(const Integer& v) const;
  /// From rational with denominator prime to p.
  GRElem from_rational(const Rational& v) const;
  GRElem from_coeffs(const std::vector<Integer>& cs) const;
  /// From rational coordinates with denominators prime to p.
  GRElem from_rational_coords(const std::vector<Rational>& cs) const;
  /// Element number `idx` in lexicographic order of coefficient tuples.
  GRElem element_at(std::int64_t idx) const;

  /// Image in the ring of another level (reduction or coefficient lift).
  GRElem convert(const GRElem& x) const;
  /// Inverse of a unit (throws EvalError otherwise).
  GRElem inverse(const GRElem& x) const;
  /// x / p^k for x divisible by p^k, result in this ring (lifted by zeros).
  GRElem divide_p(const GRElem& x, int k) const;
  /// Embedding of the ring of the same (p, d) at another level.
  const GaloisRing& at_level(int level) const;

 private:
  GaloisRing(long p, int d, int level, std::vector<long> mod);
  long p_;
  int d_;
  int level_;
  std::int64_t pl_;
  std::vector<long> mod_;
  friend struct GRImpl;
};

/// Element of K_d, the unramified degree-d extension of Q_p: either exact
/// (rational coordinates in the basis 1, w, ..., w^{d-1}) or known modulo
/// p^(shift + R) as p^shift * digits with digits in GR(p^R, d).
class PadicElem {
 public:
  static PadicElem exact(long p, int d, const Rational& v);
  static PadicElem exact_coords(long p, int d, std::vector<Rational> coords, const std::vector<long>& modulus = {});
  static PadicElem truncated(const GRElem& digits, long shift = 0);

  long p() const { return p_; }
  int d() const { return d_; }
  bool is_exact() const { return exact_; }
  const std::vector<Rational>& coords() const { return coords_; }
  /// Absolute precision (INT64_MAX for exact elements).
  long abs_precision() const;

  /// nullopt for zero; throws InsufficientPrecision when undetermined.
  std::optional<long> ord() const;
  /// Known lower bound on ord (ord itself when determined).
  long ord_lower_bound() const;
  bool ord_determined() const;
  /// ac_n; ac_n(0) = 0; throws InsufficientPrecision.
  GRElem ac(int n) const;
  /// Reduction mod p^n of an element of O (throws EvalError if ord < 0).
  GRElem residue(int n) const;
  /// True/false for exact; for truncated elements, true only if provably zero
  /// is impossible, so it throws when the digits vanish at the given precision.
  bool is_zero() const;

  PadicElem operator-() const;
  friend PadicElem operator+(const PadicElem& a, const PadicElem& b);
  friend PadicElem operator-(const PadicElem& a, const PadicElem& b);
  friend PadicElem operator*(const PadicElem& a, const PadicElem& b);
  PadicElem pow(unsigned e) const;
  /// Truncation to absolute precision `prec`.
  PadicElem truncate(long prec) const;

  std::string to_string() const;

 private:
  long p_ = 2;
  int d_ = 1;
  bool exact_ = true;
  std::vector<long> modulus_;
  std::vector<Rational> coords_;  // exact
  long shift_ = 0;                // truncated
  GRElem digits_;                 // truncated, ring level = relative precision
};

/// Value-group values during evaluation: an interval of possible values.
struct VGValue {
  bool undefined = false;  // ord(0)
  std::optional<Integer> lo, hi;
  static VGValue point(const Integer& v) { return {false, v, v}; }
  bool is_point() const { return !undefined && lo && hi && *lo == *hi; }
};

/// Assignment of the free variables of a formula.
struct Env {
  long p = 2;
  int d = 1;
  std::map<std::string, PadicElem> vf;
  std::map<std::string, GRElem> res;
  std::map<std::string, Integer> vg;
  /// Galois-ring modulus for residue constants; empty means the default.
  std::vector<long> modulus;
};

/// Truth value of a formula. Atoms involving ord(0) are false. Throws
/// InsufficientPrecision when truncated inputs do not decide an atom and
/// EvalError for unbounded value-group quantifiers or missing variables.
bool evaluate(const Formula& f, const Env& env);
PadicElem eval_vf(const Term& t, const Env& env);
GRElem eval_res(const Term& t, const Env& env);
VGValue eval_vg(const Term& t, const Env& env);

struct CountOptions {
  std::int64_t cap = 100000000;
  int threads = 1;
};

/// Default cap from the MOTINT_CAP environment variable, else 10^8.
std::int64_t default_cap();

/// Number of tuples over prod GR(p^{m_i}, d) x box satisfying f (frame
/// h[0, m, r]). Box keys are the value-group variables.
Integer count_points(const Formula& f, long p, int d, const std::map<std::string, std::pair<Integer, Integer>>& box,
                     const CountOptions& opts = {}, const Env& base = {});

/// Haar volume of {x in O^n : f}, f level-determined at `level`: the count
/// of residue classes mod p^level divided by p^(d n level).
Rational vol_level(const Formula& f, long p, int d, int level, const CountOptions& opts = {});

/// Lexicographic enumeration of a Galois ring; CapExceeded past `cap`.
std::vector<GRElem> enumerate(const GaloisRing& R, std::int64_t cap);

/// N_d on scalars: theta_{p^d}.
Rational counting_value(const ARat& a, long p, int d);

}  // namespace motint
