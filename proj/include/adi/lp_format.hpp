#pragma once

#include <string>
#include <string_view>

#include "adi/lp.hpp"

namespace adi {

// CPLEX-style LP text: objective, Subject To, Bounds, Binary, End. Every
// variable gets a bounds line unless it is a [0,1] binary. Output is stable
// for identical models.
std::string write_lp(const LinearProgram& lp);

// Reads the subset written by write_lp (plus the usual default bounds and
// "free" / "inf" spellings). Throws std::invalid_argument on malformed input.
LinearProgram parse_lp(std::string_view text);

}  // namespace adi
