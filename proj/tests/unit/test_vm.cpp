#include <cmath>
#include <cstdlib>

#include "doctest.h"
#include "support.hpp"

using namespace ppg;
using test::run_source;
using test::wrap;

TEST_CASE("arithmetic and control flow") {
  auto r = run_source(wrap("i, s : Целое;", "i := 1; s := 0;\nм:;\ns := s + i; i := i + 1;\nif i <= 10; goto м; endif;"));
  REQUIRE(r.outcome.status == RunStatus::completed);
  CHECK(r.var("s")->as_int() == 55);
}

TEST_CASE("case picks the first true arm") {
  auto r = run_source(wrap("a, b : Целое;",
                           "a := 5;\ncase;\non a > 10; b := 1;\non a > 3; b := 2;\non a > 1; b := 3;\nonelse; b := 4;\n"
                           "endcase;"));
  CHECK(r.var("b")->as_int() == 2);
}

TEST_CASE("exit halts without error") {
  auto r = run_source(wrap("a : Целое;", "a := 1;\nexit;\na := 2;"));
  CHECK(r.outcome.status == RunStatus::halted);
  CHECK(r.var("a")->as_int() == 1);
}

TEST_CASE("reading an undefined variable names the slot") {
  auto r = run_source(wrap("a, b : Целое;", "a := b + 1;"));
  REQUIRE(r.outcome.status == RunStatus::error);
  CHECK(r.outcome.error->kind() == ErrorKind::undefined_operand);
  CHECK(r.outcome.error->describe().find("b") != std::string::npos);
  CHECK(r.outcome.error->located());
}

TEST_CASE("partially defined records cannot be read whole") {
  auto r = run_source(wrap("p, q : Точка;", "p.X := 1;\nq := p;"));
  REQUIRE(r.outcome.status == RunStatus::error);
  CHECK(r.outcome.error->kind() == ErrorKind::undefined_operand);
  auto ok = run_source(wrap("p, q : Точка;", "p.X := 1; p.Y := 2;\nq := p;"));
  CHECK(ok.outcome.status == RunStatus::completed);
}

TEST_CASE("array index out of bounds") {
  std::string src = "program П;\ntype;\nA = array [1..3] of Целое;\nendtype;\nvar;\nm : A;\nk : Целое;\nendvar;\n"
                    "k := 4;\nm [k] := 1;\nendprogram;\n";
  auto r = run_source(src);
  REQUIRE(r.outcome.status == RunStatus::error);
  CHECK(r.outcome.error->kind() == ErrorKind::range_violation);
}

TEST_CASE("step limit stops an endless loop") {
  Limits lim;
  lim.max_steps = 1000;
  auto r = run_source(wrap("", "м:;\ngoto м;"), "[]", lim);
  REQUIRE(r.outcome.status == RunStatus::error);
  CHECK(r.outcome.error->kind() == ErrorKind::step_limit);
  CHECK(r.outcome.steps <= 1001);
}

TEST_CASE("PGEN_STEP_LIMIT overrides the default") {
  ::setenv("PGEN_STEP_LIMIT", "1234", 1);
  CHECK(Limits::from_environment().max_steps == 1234);
  ::setenv("PGEN_STEP_LIMIT", "garbage", 1);
  CHECK(Limits::from_environment().max_steps == Limits{}.max_steps);
  ::unsetenv("PGEN_STEP_LIMIT");
  CHECK(Limits::from_environment().max_steps == Limits{}.max_steps);
}

TEST_CASE("settings are restored after a run, even after an error") {
  std::string body = "ЛРазмТочн (3); ЛРазмШрифт (7, 0, 1); ТекстШрифт (9, 0, 1, 12);\n"
                     "Ш := Глоб_Атр; Ш.Цвет := Красный; Уст_Атр (Ш);\nа := б;";
  Canvas canvas;
  auto before = canvas.snapshot_settings();
  ScriptedProvider provider({});
  auto out = run(test::compile_ok(wrap("Ш : Атрибут; а, б : Целое;", body)), Registry::standard(), canvas, provider);
  CHECK(out.status == RunStatus::error);
  CHECK(canvas.settings() == before);
}

TEST_CASE("elements created before an error remain") {
  auto r = run_source(wrap("Ш : Атрибут; н, а, б : Целое;", "Ш := Глоб_Атр;\nн := Прямоуг (Ш, 0, 0, 1, 1);\nа := б;"));
  CHECK(r.outcome.status == RunStatus::error);
  CHECK(r.canvas.visible_count() == 1);
  CHECK(r.outcome.batch.size() == 1);
}

TEST_CASE("interaction abort when the script runs out") {
  auto r = run_source(wrap("а : Логическое; о : Целое;", "о := Запрос ('?');"));
  REQUIRE(r.outcome.status == RunStatus::error);
  CHECK(r.outcome.error->kind() == ErrorKind::interaction_abort);
}

TEST_CASE("runtime errors carry the operation and a code position") {
  auto r = run_source(wrap("Ш : Атрибут;", "Ш := Глоб_Атр;\nШ.Цвет := 16;\nУст_Атр (Ш);"));
  REQUIRE(r.outcome.status == RunStatus::error);
  CHECK(r.outcome.error->kind() == ErrorKind::range_violation);
  CHECK(r.outcome.error->operation() == "Уст_Атр");
  CHECK(r.outcome.error->position() > 0);
  CHECK(std::string(to_string(ErrorKind::range_violation)) == "range-violation");
}
