#include <cmath>
#include <numbers>

#include "doctest.h"
#include "support.hpp"

using namespace ppg;
using test::run_source;
using test::wrap;

namespace {

test::Ran eval(const std::string& type, const std::string& expr) {
  return run_source(wrap("р : " + type + ";", "р := " + expr + ";"));
}

std::int64_t eval_int(const std::string& e) {
  auto r = eval("Целое", e);
  REQUIRE_MESSAGE(r.outcome.status == RunStatus::completed, e);
  return r.var("р")->as_int();
}

double eval_real(const std::string& e) {
  auto r = eval("Вещественное", e);
  REQUIRE_MESSAGE(r.outcome.status == RunStatus::completed, e);
  return r.var("р")->as_real();
}

std::string eval_str(const std::string& e) {
  auto r = eval("Строка", e);
  REQUIRE_MESSAGE(r.outcome.status == RunStatus::completed, e);
  return r.var("р")->as_string();
}

bool eval_bool(const std::string& e) {
  auto r = eval("Логическое", e);
  REQUIRE_MESSAGE(r.outcome.status == RunStatus::completed, e);
  return r.var("р")->as_bool();
}

ErrorKind eval_error(const std::string& type, const std::string& e) {
  auto r = eval(type, e);
  REQUIRE_MESSAGE(r.outcome.status == RunStatus::error, e);
  return r.outcome.error->kind();
}

}  // namespace

TEST_CASE("integer arithmetic") {
  CHECK(eval_int("7 MOD 3") == 1);
  CHECK(eval_int("-7 MOD 3") == -1);
  CHECK(eval_int("7 MOD -3") == 1);
  CHECK(eval_int("-7 DIV 2") == -3);
  CHECK(eval_int("17 DIV 4") == 4);
  CHECK(eval_int("2 + 3 * 4") == 14);
  CHECK(eval_error("Целое", "1 DIV 0") == ErrorKind::division_by_zero);
  CHECK(eval_error("Целое", "1 MOD 0") == ErrorKind::division_by_zero);
  CHECK(eval_error("Вещественное", "1 / 0") == ErrorKind::division_by_zero);
}

TEST_CASE("rounding family") {
  CHECK(eval_int("ROUND (2.5)") == 3);
  CHECK(eval_int("ROUND (-2.5)") == -3);
  CHECK(eval_int("ROUND (2.4)") == 2);
  CHECK(eval_real("INT (-3.7)") == -3.0);
  CHECK(eval_real("FRAC (3.75)") == 0.75);
  CHECK(eval_real("FRAC (-3.75)") == -0.75);
  CHECK(eval_real("ABS (-4.5)") == 4.5);
}

TEST_CASE("real functions") {
  CHECK(eval_real("SQRT (2)") == 1.4142135623730951);
  CHECK(eval_real("ИзГрадВРад (180)") == std::numbers::pi);
  CHECK(eval_real("ИзРадВГрад (Pi)") == doctest::Approx(180.0).epsilon(1e-15));
  CHECK(eval_real("2 ^ 10") == 1024.0);
  CHECK(eval_real("2 ^ 3 ^ 2") == 512.0);
  CHECK(eval_real("LG (1000)") == doctest::Approx(3.0));
  CHECK(eval_real("EXP (LN (5))") == doctest::Approx(5.0));
  CHECK(eval_real("TH (0)") == 0.0);
  for (double x : {-1.5, -0.7, 0.0, 0.3, 1.5}) {
    auto e = "ARCSIN (SIN (" + std::string(x < 0 ? "-" : "") + std::to_string(std::fabs(x)) + "))";
    CHECK(std::fabs(eval_real(e) - x) < 1e-12);
  }
}

TEST_CASE("domain errors instead of NaN") {
  CHECK(eval_error("Вещественное", "SQRT (-1)") == ErrorKind::domain_error);
  CHECK(eval_error("Вещественное", "LN (0)") == ErrorKind::domain_error);
  CHECK(eval_error("Вещественное", "LG (-2)") == ErrorKind::domain_error);
  CHECK(eval_error("Вещественное", "ARCCOS (1.5)") == ErrorKind::domain_error);
  CHECK(eval_error("Вещественное", "ARCH (0.5)") == ErrorKind::domain_error);
  CHECK(eval_error("Вещественное", "(-8) ^ 0.5") == ErrorKind::domain_error);
}

TEST_CASE("logic and comparison") {
  CHECK(eval_bool("NOT Нет AND Да"));
  CHECK(eval_bool("Да XOR Нет"));
  CHECK_FALSE(eval_bool("Да XOR Да"));
  CHECK(eval_bool("1 < 2 OR 1 > 2"));
  CHECK(eval_bool("'а' < 'б'"));
  CHECK(eval_bool("2 <> 3"));
  CHECK(eval_bool("1 = 1.0"));
}

TEST_CASE("IIF selects an arm") {
  CHECK(eval_int("IIF (Да, 10, 20)") == 10);
  CHECK(eval_int("IIF (Нет, 10, 20)") == 20);
  CHECK(eval_str("IIF (1 > 2, 'a', 'b')") == "b");
}

TEST_CASE("string operations") {
  CHECK(eval_str("'аб' + 'в'") == "абв");
  CHECK(eval_str("Подстрока ('фундамент', 1, 4)") == "фунд");
  CHECK(eval_str("Подстрока ('фундамент', 6, 100)") == "мент");
  CHECK(eval_str("Подстрока ('фундамент', 20, 2)") == "");
  CHECK(eval_error("Строка", "Подстрока ('аб', 0, 1)") == ErrorKind::range_violation);
  CHECK(eval_error("Строка", "Подстрока ('аб', 1, -1)") == ErrorKind::range_violation);
}

TEST_CASE("conversions") {
  CHECK(eval_str("ЧислоВСтроку (880)") == "880");
  CHECK(eval_str("ЧислоВСтроку (112.5)") == "112.5");
  CHECK(eval_str("ЧислоВСтроку (1 / 3)") == "0.333333");
  CHECK(eval_str("ЧислоВСтроку (-0.25)") == "-0.25");
  CHECK(eval_int("СтрокаВЦелое ('25')") == 25);
  CHECK(eval_int("СтрокаВЦелое ('-7')") == -7);
  CHECK(eval_error("Целое", "СтрокаВЦелое ('1:25')") == ErrorKind::domain_error);
  CHECK(eval_real("СтрокаВЧисло ('+2.75')") == 2.75);
  CHECK(eval_error("Вещественное", "СтрокаВЧисло ('abc')") == ErrorKind::domain_error);
}

TEST_CASE("registry rejects duplicates") {
  Registry r = Registry::standard();
  BuiltinDescriptor d;
  d.name = "SQRT";
  d.params = {number_param()};
  CHECK_THROWS_AS(r.register_builtin(d), std::invalid_argument);
}

TEST_CASE("a new builtin works end to end without touching the toolchain") {
  Registry r = Registry::standard();
  BuiltinDescriptor d;
  d.name = "ОтрезПунктир";
  d.params = {param(types::real()), param(types::real()), param(types::real()), param(types::real())};
  d.result = types::integer();
  d.returns_value = true;
  d.execute = [](const CallArgs& a) {
    Attribute attr = a.env().canvas.global_attribute();
    attr.line_type = 4;
    return Value::of_int(a.env().canvas.add_segment(attr, {a.real(0), a.real(1)}, {a.real(2), a.real(3)}));
  };
  r.register_builtin(d);

  auto c = compile_source(wrap("н : Целое;", "н := ОтрезПунктир (0, 0, 10, 0);"), r);
  REQUIRE_MESSAGE(c.ok(), test::diagnostics_text(c));
  Canvas canvas;
  ScriptedProvider provider({});
  auto out = run(*c.program, r, canvas, provider);
  CHECK(out.status == RunStatus::completed);
  REQUIRE(canvas.elements().size() == 1);
  CHECK(canvas.elements()[0].attribute.line_type == 4);

  // The standard registry does not know it.
  CHECK_FALSE(compile_source(wrap("н : Целое;", "н := ОтрезПунктир (0, 0, 10, 0);"), Registry::standard()).ok());
}
