#include "lexer.hpp"

#include <charconv>
#include <map>

#include "builtins.hpp"
#include "text.hpp"

namespace ppg {

namespace {

struct KeywordSpelling {
  const char* text;
  Keyword kw;
};

constexpr KeywordSpelling kKeywords[] = {
    {"PROGRAM", Keyword::program_}, {"TYPE", Keyword::type_},       {"ENDTYPE", Keyword::endtype_},
    {"VAR", Keyword::var_},         {"ENDVAR", Keyword::endvar_},   {"ENDPROGRAM", Keyword::endprogram_},
    {"IF", Keyword::if_},           {"ELSE", Keyword::else_},       {"ENDIF", Keyword::endif_},
    {"CASE", Keyword::case_},       {"ON", Keyword::on_},           {"ONELSE", Keyword::onelse_},
    {"ENDCASE", Keyword::endcase_}, {"GOTO", Keyword::goto_},       {"EXIT", Keyword::exit_},
};

const std::map<std::string, Keyword>& keyword_table() {
  static const std::map<std::string, Keyword> table = [] {
    std::map<std::string, Keyword> t;
    for (const auto& k : kKeywords) t[name_key(k.text)] = k.kw;
    return t;
  }();
  return table;
}

bool is_digit(char32_t c) { return c >= U'0' && c <= U'9'; }
bool is_space(char32_t c) { return c == U' ' || c == U'\t' || c == U'\r' || c == U'\f' || c == U'\v'; }

/// Letters that could plausibly be meant as part of a name but are outside
/// the permitted set (ё, Latin accents, ...). Reported as bad identifier chars.
bool is_foreign_letter(char32_t c) { return c >= 0x80 && !is_identifier_char(c) && c != 0xFEFF; }

class Lexer {
 public:
  Lexer(std::string_view text, const Registry& registry) : cps_(utf8_decode(text)), registry_(registry) {}

  LexResult run() {
    if (!cps_.empty() && cps_[0] == 0xFEFF) advance();
    while (!at_end()) {
      char32_t c = peek();
      if (c == U'\n') {
        end_line();
        advance();
      } else if (is_space(c)) {
        advance();
      } else if (c == U'{') {
        skip_comment();
      } else if (is_identifier_start(c)) {
        word();
      } else if (is_digit(c)) {
        number();
      } else if (c == U'\'') {
        string_literal();
      } else {
        symbol();
      }
    }
    end_line();
    return std::move(out_);
  }

 private:
  bool at_end() const { return i_ >= cps_.size(); }
  char32_t peek(std::size_t ahead = 0) const { return i_ + ahead < cps_.size() ? cps_[i_ + ahead] : U'\0'; }
  SourcePos here() const { return {line_, col_}; }

  void advance() {
    if (cps_[i_] == U'\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++i_;
  }

  void error(SourcePos pos, std::string message) {
    out_.diagnostics.push_back({Severity::error, std::move(message), pos});
  }

  void emit(Token t) {
    last_on_line_ = out_.tokens.size();
    line_has_tokens_ = true;
    out_.tokens.push_back(std::move(t));
  }

  // One line, one statement: each line holding tokens must end with ';'.
  void end_line() {
    if (line_has_tokens_) {
      const Token& last = out_.tokens[last_on_line_];
      if (!last.is_punct(";")) error(last.pos, "statement not terminated by ';' at end of line");
    }
    line_has_tokens_ = false;
  }

  void skip_comment() {
    SourcePos start = here();
    advance();
    while (!at_end() && peek() != U'}') {
      if (peek() == U'\n') end_line();
      advance();
    }
    if (at_end()) {
      error(start, "unterminated comment");
      return;
    }
    advance();
  }

  void word() {
    SourcePos start = here();
    std::u32string text;
    while (!at_end() && (is_identifier_char(peek()) || is_foreign_letter(peek()))) {
      if (is_foreign_letter(peek())) {
        error(here(), "character '" + utf8_encode(peek()) + "' is not allowed in identifiers");
      }
      text += peek();
      advance();
    }
    Token t;
    t.text = utf8_encode(text);
    t.pos = start;
    std::string key = name_key(t.text);
    if (auto it = keyword_table().find(key); it != keyword_table().end()) {
      t.kind = TokenKind::keyword;
      t.keyword = it->second;
    } else if (registry_.is_word_operator(t.text)) {
      t.kind = TokenKind::op;
    } else {
      t.kind = TokenKind::identifier;
      if (text.size() > kMaxIdentifierLength) {
        error(start, "identifier '" + t.text + "' is longer than " + std::to_string(kMaxIdentifierLength) +
                         " characters (" + std::to_string(text.size()) + ")");
      }
    }
    emit(std::move(t));
  }

  void number() {
    SourcePos start = here();
    std::string digits;
    while (is_digit(peek())) {
      digits += static_cast<char>(peek());
      advance();
    }
    bool real = false;
    if (peek() == U'.' && is_digit(peek(1))) {
      real = true;
      digits += '.';
      advance();
      while (is_digit(peek())) {
        digits += static_cast<char>(peek());
        advance();
      }
    }
    if (is_identifier_start(peek())) {
      error(here(), "unexpected character '" + utf8_encode(peek()) + "' after number");
    }
    Token t;
    t.text = digits;
    t.pos = start;
    const char* b = digits.data();
    const char* e = digits.data() + digits.size();
    if (real) {
      t.kind = TokenKind::real_literal;
      auto r = std::from_chars(b, e, t.real_value, std::chars_format::fixed);
      if (r.ec != std::errc()) error(start, "real literal '" + digits + "' out of range");
    } else {
      t.kind = TokenKind::integer_literal;
      auto r = std::from_chars(b, e, t.int_value);
      if (r.ec != std::errc()) error(start, "integer literal '" + digits + "' out of range");
    }
    emit(std::move(t));
  }

  void string_literal() {
    SourcePos start = here();
    advance();
    std::u32string value;
    for (;;) {
      if (at_end() || peek() == U'\n') {
        error(start, "unterminated string literal");
        break;
      }
      if (peek() == U'\'') {
        if (peek(1) == U'\'') {
          value += U'\'';
          advance();
          advance();
          continue;
        }
        advance();
        break;
      }
      value += peek();
      advance();
    }
    Token t;
    t.kind = TokenKind::string_literal;
    t.text = utf8_encode(value);
    t.pos = start;
    emit(std::move(t));
  }

  void symbol() {
    SourcePos start = here();
    char32_t c = peek();
    char32_t n = peek(1);
    auto two = [&](const char* text, TokenKind kind) {
      advance();
      advance();
      emit(Token{kind, text, start});
    };
    auto one = [&](TokenKind kind) {
      std::string text = utf8_encode(c);
      advance();
      emit(Token{kind, std::move(text), start});
    };
    switch (c) {
      case U':':
        if (n == U'=') return two(":=", TokenKind::op);
        return one(TokenKind::punctuation);
      case U'.':
        if (n == U'.') return two("..", TokenKind::punctuation);
        return one(TokenKind::punctuation);
      case U'<':
        if (n == U'>') return two("<>", TokenKind::op);
        if (n == U'=') return two("<=", TokenKind::op);
        return one(TokenKind::op);
      case U'>':
        if (n == U'=') return two(">=", TokenKind::op);
        return one(TokenKind::op);
      case U';':
      case U',':
      case U'(':
      case U')':
      case U'[':
      case U']':
        return one(TokenKind::punctuation);
      case U'+':
      case U'-':
      case U'*':
      case U'/':
      case U'^':
      case U'=':
        return one(TokenKind::op);
      case U'}':
        error(start, "'}' without an opening '{'");
        advance();
        return;
      default:
        if (is_foreign_letter(c)) {
          error(start, "character '" + utf8_encode(c) + "' is not allowed in identifiers");
        } else {
          error(start, "unexpected character '" + utf8_encode(c) + "'");
        }
        advance();
        return;
    }
  }

  std::u32string cps_;
  const Registry& registry_;
  std::size_t i_ = 0;
  int line_ = 1;
  int col_ = 1;
  bool line_has_tokens_ = false;
  std::size_t last_on_line_ = 0;
  LexResult out_;
};

}  // namespace

const char* keyword_text(Keyword k) {
  for (const auto& s : kKeywords) {
    if (s.kw == k) return s.text;
  }
  return "";
}

LexResult tokenize(std::string_view text, const Registry& registry) { return Lexer(text, registry).run(); }

}  // namespace ppg
