#pragma once

#include <string>
#include <string_view>

#include "flatpop/relaxation.hpp"

namespace flatpop {

/// Reads the problem-file format:
///
///     # comment
///     vars: x, y
///     minimize: x^4 + y^2 - x*y
///     subject_to:
///       1 - x^2 - y^2 >= 0
///       x - y == 0
///     ball_radius: 2
///
/// Constraints may also be written `a >= b`, `a <= b` or `a == b`.
/// Throws ParseError with a 1-based line and column.
Problem parse_problem(std::string_view text);

/// Prints a problem so that parse_problem reads it back unchanged.
std::string print_problem(const Problem& prob);

}  // namespace flatpop
