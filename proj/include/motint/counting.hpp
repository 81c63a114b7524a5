#pragma once

#include <vector>

#include "motint/mpoly.hpp"
#include "motint/padic.hpp"

namespace motint {

/// Haar volumes v_i = Vol{x in O_d^n : ord H(x) = i}, i = 0..i_max.
struct CoeffList {
  int i_max = 0;
  std::vector<Rational> v;
};

/// Exact volumes by a digit tree over GR(p^(i_max+1), d): a node fixes x mod
/// p^k; it is resolved once the constant term of H(a + p^k y) has smaller
/// order than every other coefficient. `opts.cap` bounds the node count.
CoeffList zprime_count(const MPoly& h, long p, int d, int i_max, const CountOptions& opts = {});

/// Same volumes by enumerating GR(p^(i+1), d)^n for each i.
CoeffList zprime_count_brute(const MPoly& h, long p, int d, int i_max, const CountOptions& opts = {});

/// Largest i_max whose brute-force enumeration stays within cap (-1 if none).
int feasible_imax_brute(int nvars, long p, int d, std::int64_t cap);

}  // namespace motint
