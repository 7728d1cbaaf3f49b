#include <string>

#include "doctest.h"
#include "lexer.hpp"
#include "parser.hpp"
#include "printer.hpp"
#include "support.hpp"

using namespace ppg;

namespace {

const Registry& reg() { return Registry::standard(); }

Diagnostics compile_diags(const std::string& src) { return compile_source(src, reg()).diagnostics(); }

bool has_error_at(const Diagnostics& d, int line, int col) {
  for (const auto& x : d) {
    if (x.severity == Severity::error && x.pos.line == line && x.pos.column == col) return true;
  }
  return false;
}

ast::Expr expr(const std::string& text) {
  auto r = parse_expression(text, reg());
  REQUIRE_MESSAGE(r.expr.has_value(), text);
  return *r.expr;
}

}  // namespace

TEST_CASE("lexer classifies tokens") {
  auto r = tokenize("a := 12 + 3.5 * b DIV 2; s := 'it''s';\n", reg());
  REQUIRE_FALSE(has_errors(r.diagnostics));
  const auto& t = r.tokens;
  CHECK(t[0].kind == TokenKind::identifier);
  CHECK(t[1].is_op(":="));
  CHECK(t[2].kind == TokenKind::integer_literal);
  CHECK(t[2].int_value == 12);
  CHECK(t[4].kind == TokenKind::real_literal);
  CHECK(t[4].real_value == 3.5);
  CHECK(t[7].is_op("DIV"));
  bool found = false;
  for (const auto& tok : t) {
    if (tok.kind == TokenKind::string_literal) {
      CHECK(tok.text == "it's");
      found = true;
    }
  }
  CHECK(found);
}

TEST_CASE("keywords are case-insensitive and comments are skipped") {
  auto r = tokenize("ENDIF; EndCase; { note ; } goto;\n", reg());
  REQUIRE_FALSE(has_errors(r.diagnostics));
  CHECK(r.tokens[0].is_keyword(Keyword::endif_));
  CHECK(r.tokens[2].is_keyword(Keyword::endcase_));
  CHECK(r.tokens[4].is_keyword(Keyword::goto_));
}

TEST_CASE("every line must end with a semicolon") {
  auto r = tokenize("a := 1\nb := 2;\n", reg());
  REQUIRE(has_errors(r.diagnostics));
  CHECK(r.diagnostics[0].pos.line == 1);
}

TEST_CASE("identifier length limit is 30 characters") {
  std::string ok(30, 'x'), bad(31, 'y');
  CHECK_FALSE(has_errors(tokenize(ok + ";\n", reg()).diagnostics));
  auto r = tokenize("  " + bad + ";\n", reg());
  REQUIRE(has_errors(r.diagnostics));
  CHECK(r.diagnostics[0].pos.line == 1);
  CHECK(r.diagnostics[0].pos.column == 3);
  // Cyrillic letters count as one character each.
  std::string cyr;
  for (int i = 0; i < 30; ++i) cyr += "ж";
  CHECK_FALSE(has_errors(tokenize(cyr + ";\n", reg()).diagnostics));
}

TEST_CASE("letter yo is rejected in identifiers") {
  auto r = tokenize("Объём := 1;\n", reg());
  CHECK(has_errors(r.diagnostics));
}

TEST_CASE("operator precedence and associativity") {
  using ast::equal;
  CHECK(print_expr(normalize_parens(expr("a + b * c"), reg())) == "a + b * c");
  CHECK(print_expr(normalize_parens(expr("(a + b) * c"), reg())) == "(a + b) * c");
  CHECK(print_expr(normalize_parens(expr("a - (b - c)"), reg())) == "a - (b - c)");
  CHECK(print_expr(normalize_parens(expr("(a - b) - c"), reg())) == "a - b - c");
  CHECK(print_expr(normalize_parens(expr("(a ^ b) ^ c"), reg())) == "(a ^ b) ^ c");
  CHECK(print_expr(normalize_parens(expr("a ^ (b ^ c)"), reg())) == "a ^ b ^ c");
  CHECK(print_expr(normalize_parens(expr("(-a) ^ b"), reg())) == "(-a) ^ b");
  CHECK(print_expr(normalize_parens(expr("-(a ^ b)"), reg())) == "-a ^ b");
  CHECK(print_expr(normalize_parens(expr("NOT (a AND b)"), reg())) == "NOT (a AND b)");
  CHECK(print_expr(normalize_parens(expr("(a < b) AND (c >= d)"), reg())) == "a < b AND c >= d");
  CHECK(print_expr(normalize_parens(expr("(a OR b) AND c"), reg())) == "(a OR b) AND c");

  auto t = expr("1 + 2 * 3 ^ 2");
  const auto* b = std::get_if<ast::Binary>(&t.node);
  REQUIRE(b);
  CHECK(b->op == "+");
}

TEST_CASE("redundant parentheses are errors with a position") {
  auto d1 = check_redundant_parens(expr("a + (b * c)"), reg());
  REQUIRE(d1.size() == 1);
  CHECK(d1[0].pos.column == 5);
  CHECK(check_redundant_parens(expr("((a))"), reg()).size() == 2);
  CHECK(check_redundant_parens(expr("(a + b) * c"), reg()).empty());
  CHECK(check_redundant_parens(expr("SQRT (a + b)"), reg()).empty());
  // comparisons bind tighter than AND
  CHECK(check_redundant_parens(expr("(a < b) AND c"), reg()).size() == 1);
  CHECK(check_redundant_parens(expr("(a OR b) AND c"), reg()).empty());
}

TEST_CASE("compiler rejects redundant parentheses in a program") {
  auto d = compile_diags(test::wrap("a, b, c : Целое;", "a := 1; b := 2;\nc := a + (b * 2);"));
  CHECK(has_error_at(d, 6, 10));
}

TEST_CASE("structural errors carry positions") {
  SUBCASE("unknown label") {
    auto d = compile_diags(test::wrap("", "goto нигде;"));
    CHECK(has_error_at(d, 2, 1));
  }
  SUBCASE("missing endif") {
    auto d = compile_diags("program П;\nvar;\na : Целое;\nendvar;\nif Да; a := 1;\nendprogram;\n");
    CHECK(has_errors(d));
  }
  SUBCASE("duplicate label") {
    auto d = compile_diags(test::wrap("", "м:;\nм:;"));
    CHECK(has_error_at(d, 3, 1));
  }
  SUBCASE("empty executable part") {
    CHECK(has_errors(compile_diags("program П;\nendprogram;\n")));
  }
  SUBCASE("sections out of order") {
    auto d = compile_diags(
        "program П;\nvar;\na : Целое;\nendvar;\ntype;\nT = array [1..2] of Целое;\nendtype;\na := 1;\nendprogram;\n");
    CHECK(has_errors(d));
  }
}

TEST_CASE("pretty printer output re-parses to the same tree") {
  std::string src = test::fixture("fixtures/ogolovok.ppg");
  auto p1 = parse_source(src, reg());
  REQUIRE(p1.program);
  std::string printed = pretty_print(*p1.program, reg());
  auto p2 = parse_source(printed, reg());
  REQUIRE_MESSAGE(p2.program, printed);
  CHECK(ast::equal(*p1.program, *p2.program));
  CHECK(pretty_print(*p2.program, reg()) == printed);
}

TEST_CASE("strip_parens and equal ignore positions") {
  auto a = expr("(a + b) * c");
  auto b = expr("(a+b)*c");
  CHECK(ast::equal(a, b));
  CHECK_FALSE(ast::equal(a, expr("a + b * c")));
  CHECK(ast::equal(ast::strip_parens(expr("((a))")), expr("a")));
}
