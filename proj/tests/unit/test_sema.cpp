#include "doctest.h"
#include "sema.hpp"
#include "support.hpp"

using namespace ppg;

namespace {

Diagnostics diags(const std::string& vars, const std::string& body) {
  return compile_source(test::wrap(vars, body), Registry::standard()).diagnostics();
}

bool error_on_line(const Diagnostics& d, int line) {
  for (const auto& x : d) {
    if (x.severity == Severity::error && x.pos.line == line) return true;
  }
  return false;
}

}  // namespace

TEST_CASE("well-typed programs pass") {
  CHECK_FALSE(has_errors(diags("a : Целое; x : Вещественное; s : Строка;",
                               "a := 7 MOD 3; x := a; x := x / 2; s := 'a' + ЧислоВСтроку (x);")));
}

TEST_CASE("type mismatches") {
  CHECK(error_on_line(diags("a : Целое;", "a := 'текст';"), 5));
  CHECK(error_on_line(diags("a : Целое; x : Вещественное;", "x := 1.5;\na := x;"), 6));
  CHECK(error_on_line(diags("a : Целое;", "if a; a := 1; endif;"), 5));
  CHECK(error_on_line(diags("b : Логическое;", "b := 1 + Да;"), 5));
}

TEST_CASE("undeclared names and wrong arity") {
  CHECK(error_on_line(diags("a : Целое;", "a := b;"), 5));
  CHECK(error_on_line(diags("a : Целое; Ш : Атрибут;", "Ш := Глоб_Атр;\na := Прямоуг (Ш, 0, 0, 10, 10, 5);"), 6));
  CHECK(error_on_line(diags("a : Целое;", "a := НетТакой (1);"), 5));
}

TEST_CASE("declaration rules") {
  CHECK(has_errors(diags("a : Целое; a : Целое;", "a := 1;")));
  CHECK(has_errors(diags("Длина : Целое;", "Длина := 1;")));
  CHECK(has_errors(diags("Pi : Вещественное;", "Pi := 1;")));
  CHECK(has_errors(diags("a : Неведомый;", "a := 1;")));
}

TEST_CASE("record and array paths") {
  std::string src =
      "program П;\ntype;\nR = record;\nf : Целое;\nendrecord;\nA = array [1..3] of R;\nendtype;\n"
      "var;\nm : A;\nk : Целое;\nendvar;\nm [2].f := 5;\nk := m [2].f;\nk := m [2].g;\nendprogram;\n";
  auto d = compile_source(src, Registry::standard()).diagnostics();
  CHECK(error_on_line(d, 14));
  CHECK_FALSE(error_on_line(d, 13));
}

TEST_CASE("case conditions must be boolean") {
  CHECK(has_errors(diags("a : Целое;", "case;\non a;\na := 1;\nendcase;")));
  CHECK_FALSE(has_errors(diags("a : Целое;", "a := 1;\ncase;\non a = 1;\na := 2;\nonelse;\na := 3;\nendcase;")));
}
