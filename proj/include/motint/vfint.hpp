#pragma once

#include <string>
#include <vector>

#include "motint/cplus.hpp"

namespace motint {

/// Cell of one valued-field variable t over a base. A ball-cell is
/// {t : ord(t - c) = z, ac_n(t - c) = xi, z in z_cells, xi |= xi_cond}: every
/// (z, xi) fiber is one ball of volume q^(-z-n). A point-cell is {c} cut by
/// point_cond (a condition on the base).
struct VFCell {
  Rational center;
  bool point = false;
  int depth = 1;
  Formula xi_cond;
  CellSet z_cells;
  Formula point_cond;

  std::string to_string(const std::string& t) const;
};

inline constexpr const char* kCellZ = "_z";
inline constexpr const char* kCellXi = "_xi";

/// Cells of t with their values, functions over base + (_z, _xi).
struct CellDecomposition {
  std::string var;
  MotFrame base;
  int depth = 1;
  std::vector<Rational> centers;
  std::vector<VFCell> cells;
  std::vector<MotFun> values;
  /// Discarded measure-zero loci.
  std::vector<std::string> ledger;

  /// Frame of the cell values.
  MotFrame value_frame() const;
};

/// Centers of t: the c of every derived coordinate ord(t - c), ac_n(t - c).
std::vector<Rational> centers_of(const MotFrame& frame, const std::string& t);

/// Nearest-center decomposition of K for t (ties to the smallest index) with
/// phi's restriction to each cell. Point cells carry no value and are
/// recorded in the ledger. NotCellPresented if a residue generator mentions t
/// directly.
CellDecomposition decompose(const MotFun& phi, const std::string& t, const PContext& ctx = {});

/// Disjoint cells covering {t : cond}, point cells included; values are 1.
CellDecomposition decompose_fragment(const Formula& cond, const MotFrame& frame, const std::string& t, const PContext& ctx = {});

/// Membership of env's value of t (all base coordinates bound).
bool cell_contains(const VFCell& cell, const CellDecomposition& dec, const Env& env);

/// sum over cells of sum_{z, xi} value * L^(-z-n). Throws NotIntegrable.
MotFun integrate_cell_family(const CellDecomposition& dec);

struct IntegralResult {
  MotFun value;
  bool integrable = true;
  std::string reason;
  std::vector<std::string> ledger;
};

/// Integrates the VF coordinates in `order` (first entry innermost), then
/// the VG/RES coordinates in `fiber`.
IntegralResult integrate_iterated(const MotFun& phi, const std::vector<std::string>& order,
                                  const std::vector<std::string>& fiber = {}, const PContext& ctx = {});

/// pullback of phi along s = u*t + c, times L^(-ord u). The result lives on
/// phi's frame with s replaced by t. u = k * pi^e.
MotFun change_of_variables_1d(const MotFun& phi, const std::string& s, const std::string& t, const Term& u, const Rational& c,
                              const PContext& ctx = {});

/// Product of factors: an A-constant ("(L - 1)/L"), "L^(vg term)" and
/// "[condition]".
MotFun parse_integrand(const std::string& text, const MotFrame& frame, const PContext& ctx = {});

}  // namespace motint
