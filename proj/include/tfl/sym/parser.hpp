#pragma once

#include <string_view>

#include "tfl/sym/expr.hpp"
#include "tfl/sym/varspace.hpp"

namespace tfl::sym {

// Grammar: literals (3, 1/2, 0.25), variables of `vars`, + - * / ^ (integer
// exponents only), exp sin cos ln, parentheses. ^ binds tighter than unary
// minus, which binds tighter than * and /. ^ is right associative.
// Throws SyntaxError or UnknownVariable.
Expr parse_expr(std::string_view text, const VariableSpace& vars);

} // namespace tfl::sym
