#ifndef IDEALKIT_PARSER_HPP
#define IDEALKIT_PARSER_HPP

#include <string>
#include <vector>

#include "idealkit/expr.hpp"

namespace idealkit {

/// Parses one expression in the s-expression DSL. Atoms are naturals,
/// rationals `p/q`, and keywords; `;` starts a comment running to end of line.
ExprPtr parse_expr(const std::string& text, Nat window = SubmeasureExpr::kDefaultWindow);

/// Parses every expression in the input, in order.
std::vector<ExprPtr> parse_exprs(const std::string& text,
                                 Nat window = SubmeasureExpr::kDefaultWindow);

/// Parses a SET form: `(set n ...)`, `(block lo hi)` or `(grid (r c) ...)`.
AnySet parse_set(const std::string& text);

}  // namespace idealkit

#endif
