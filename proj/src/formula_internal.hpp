#pragma once

#include <set>
#include <string>

#include "motint/formula.hpp"

namespace motint {

std::string body_string(const Formula& f);

namespace detail {
/// Free variables whose sort the formula's own structure does not force.
std::set<std::string> undetermined_free_vars(const Formula& f);
}  // namespace detail

}  // namespace motint
