#pragma once

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

#include "diagnostics.hpp"

namespace ppg {

class Registry;

enum class TokenKind { keyword, identifier, integer_literal, real_literal, string_literal, punctuation, op };

enum class Keyword {
  none,
  program_,
  type_,
  endtype_,
  var_,
  endvar_,
  endprogram_,
  if_,
  else_,
  endif_,
  case_,
  on_,
  onelse_,
  endcase_,
  goto_,
  exit_,
};

const char* keyword_text(Keyword k);

struct Token {
  TokenKind kind = TokenKind::punctuation;
  std::string text;  // source spelling; unescaped contents for strings
  SourcePos pos;
  Keyword keyword = Keyword::none;
  std::int64_t int_value = 0;
  double real_value = 0;

  bool is(TokenKind k, std::string_view t) const { return kind == k && text == t; }
  bool is_punct(std::string_view t) const { return kind == TokenKind::punctuation && text == t; }
  bool is_op(std::string_view t) const { return kind == TokenKind::op && text == t; }
  bool is_keyword(Keyword k) const { return kind == TokenKind::keyword && keyword == k; }
};

struct LexResult {
  std::vector<Token> tokens;
  Diagnostics diagnostics;
};

inline constexpr std::size_t kMaxIdentifierLength = 30;

/// Splits UTF-8 source into tokens. Braced comments are skipped. Also enforces
/// the line rule: every non-empty line must end with ';'.
LexResult tokenize(std::string_view text, const Registry& registry);

}  // namespace ppg
