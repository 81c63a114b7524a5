#pragma once

#include <map>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "motint/counting.hpp"
#include "motint/vfint.hpp"

namespace motint {

/// N(T) / prod (1 - L^a T^b): numerator coefficients are functions on the
/// point, denominator factors (a, b) with b >= 1, sorted, with repetition.
struct RatSeries {
  std::map<int, MotFun> numer;
  std::vector<std::pair<int, int>> denom;

  static RatSeries zero();
  bool is_zero() const { return numer.empty(); }
  /// Numerator as constants when no residue classes remain.
  std::optional<std::map<int, ARat>> constant_numer() const;

  /// Coefficients of T^0..T^i_max (formal geometric expansion).
  std::vector<MotFun> expand(int i_max) const;
  /// N_d applied to numerator and denominator, then expanded over Q.
  std::vector<Rational> expand_at(long p, int d, int i_max, const CountOptions& opts = {}) const;
  std::string to_string() const;
};

RatSeries operator+(const RatSeries& a, const RatSeries& b);
bool operator==(const RatSeries& a, const RatSeries& b);

/// sum_i f(i) T^i for f over a frame whose only coordinate is the VG
/// variable i. NonGeometricFamily for pieces unbounded below, or unbounded
/// above without a decaying L-exponent.
RatSeries series_of(const MotFun& f, const std::string& i);

/// Z_mot(T) = sum_i mu{x in O^n : ord H(x) = i} T^i for a monomial H. The
/// coefficient must have order 0, or ctx.p must fix its order.
RatSeries zmot_monomial(const MPoly& h, const PContext& ctx = {});

/// Z_mot from a cell decomposition of {ord H = i} in the VF variable dec.var
/// over a base with the VG parameter i; base VF coordinates in `rest` are
/// integrated afterwards (first entry innermost).
RatSeries zmot_from_cells(const CellDecomposition& dec, const std::string& i, const std::vector<std::string>& rest = {},
                          const PContext& ctx = {});

/// Same from a function on the VF coordinates and i (e.g. an indicator).
RatSeries zmot_from_family(const MotFun& family, const std::string& i, const std::vector<std::string>& order,
                           const PContext& ctx = {});

struct MeuserRow {
  int i = 0;
  Rational motivic, counted;
  bool match = false;
};

struct MeuserReport {
  long p = 0;
  int d = 1;
  int i_max = 0;
  std::vector<MeuserRow> rows;
  bool all_match() const;
};

/// Compares N_d(Z_mot) with Z'_d coefficientwise up to i_max.
MeuserReport verify_meuser(const RatSeries& zmot, const MPoly& h, long p, int d, int i_max, const CountOptions& opts = {});
MeuserReport verify_meuser(const MPoly& h, long p, int d, int i_max, const CountOptions& opts = {});

/// HEURISTIC, not a proof: the [m/k] Pade approximant of a rational
/// coefficient list (numerator, denominator with constant term 1), if the
/// linear system is solvable and the fit reproduces every given coefficient.
std::optional<std::pair<std::vector<Rational>, std::vector<Rational>>> heuristic_pade(const std::vector<Rational>& coeffs, int m,
                                                                                     int k);

}  // namespace motint
