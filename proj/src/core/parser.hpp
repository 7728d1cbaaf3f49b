#pragma once

#include <optional>
#include <string_view>
#include <vector>

#include "ast.hpp"
#include "diagnostics.hpp"
#include "lexer.hpp"

namespace ppg {

class Registry;

struct ParseResult {
  std::optional<ast::Program> program;  // absent when there were errors
  Diagnostics diagnostics;
};

ParseResult parse(const std::vector<Token>& tokens, const Registry& registry);

/// tokenize + parse; lexer diagnostics come first.
ParseResult parse_source(std::string_view text, const Registry& registry);

struct ExprParseResult {
  std::optional<ast::Expr> expr;
  Diagnostics diagnostics;
};

/// Parses a lone expression (no trailing ';' needed). Used by tools and tests.
ExprParseResult parse_expression(std::string_view text, const Registry& registry);

}  // namespace ppg
