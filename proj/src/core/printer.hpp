#pragma once

#include <string>

#include "ast.hpp"
#include "diagnostics.hpp"

namespace ppg {

class Registry;

/// Prints an expression exactly as structured: parentheses appear only where
/// the tree has Paren nodes.
std::string print_expr(const ast::Expr& e);

/// Strips all grouping parentheses, then adds back the minimal set the
/// precedence table requires.
ast::Expr normalize_parens(const ast::Expr& e, const Registry& registry);

/// Canonical source text: one statement per line, minimal parentheses.
std::string pretty_print(const ast::Program& program, const Registry& registry);

/// One error per grouping pair whose removal re-parses to the same tree.
Diagnostics check_redundant_parens(const ast::Expr& e, const Registry& registry);
Diagnostics check_redundant_parens(const ast::Program& program, const Registry& registry);

}  // namespace ppg
