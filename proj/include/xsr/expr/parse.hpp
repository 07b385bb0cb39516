#pragma once

#include <span>
#include <string>
#include <string_view>

#include "xsr/expr/node.hpp"

namespace xsr::expr {

// Parses infix arithmetic: + - * / with ^ for powers, named unary functions,
// parentheses, and `pi` as a built-in constant. Identifiers that are not
// function names resolve to variables by their position in `variables`.
// Integer exponents with |k| <= 12 expand to repeated multiplication.
// Errors are position-annotated ParseError exceptions.
ExprTree parse(std::string_view text, std::span<const std::string> variables);

// Reads the canonical prefix notation produced by format_prefix().
ExprTree parse_prefix(std::string_view text);

// Infix rendering, re-parseable by parse() when variable names are supplied.
// Without names, variables render as x0, x1, ...
std::string format_infix(const ExprTree& tree, std::span<const std::string> names = {});

// Canonical prefix s-expression, one line, lossless for doubles.
std::string format_prefix(const ExprTree& tree);

}  // namespace xsr::expr
