#include <sstream>

#include "doctest.h"
#include "errors.hpp"
#include "support.hpp"

using namespace ppg;
using test::run_source;
using test::wrap;

TEST_CASE("answer codec round trips") {
  std::vector<Answer> all = {AckAnswer{}, QueryAnswer{QueryReply::no}, MenuAnswer{2},
                             FormAnswer{true, {{"a", std::string("x")}, {"b", 2.5}, {"c", std::int64_t{3}},
                                               {"m", std::string("1 : 25")}}}};
  for (const auto& a : all) {
    auto back = answer_from_json(answer_to_json(a));
    CHECK(back == a);
  }
}

TEST_CASE("answer decoding is strict") {
  CHECK_THROWS_AS(answer_from_json("{\"menu\":\"one\"}"), FormatError);
  CHECK_THROWS_AS(answer_from_json("{\"menu\":1,\"extra\":2}"), FormatError);
  CHECK_THROWS_AS(answer_from_json("{\"query\":\"maybe\"}"), FormatError);
  CHECK_THROWS_AS(answer_from_json("[1]"), FormatError);
  CHECK_THROWS_AS(answer_from_json("not json"), FormatError);
  CHECK_THROWS_AS(answers_from_json("{\"menu\":1}"), FormatError);
  CHECK(answers_from_json("[{\"menu\":1},{\"ack\":true}]").size() == 2);
}

TEST_CASE("prompt codec round trips") {
  MenuPrompt m{"Вид", {{"сверху", 1, true}, {"сбоку", 3, false}}, 1};
  CHECK(std::get<MenuPrompt>(prompt_from_json(prompt_to_json(m))) == m);
  FormField f;
  f.label = "Масштаб";
  f.kind = FieldKind::scale;
  f.variable = "Числ";
  f.denominator = "Знам";
  f.current = Scale{1, 50};
  FormPrompt form{"Фундамент", {f}};
  CHECK(std::get<FormPrompt>(prompt_from_json(prompt_to_json(form))) == form);
  CHECK(prompt_to_json(QueryPrompt{"?"}).find("\"kind\":\"query\"") != std::string::npos);
}

TEST_CASE("scale text") {
  CHECK(parse_scale("1 : 25") == Scale{1, 25});
  CHECK(parse_scale("2:1") == Scale{2, 1});
  CHECK_FALSE(parse_scale("0:5"));
  CHECK_FALSE(parse_scale("1/25"));
  CHECK(format_scale({1, 25}) == "1 : 25");
  CHECK_FALSE(standard_scales().empty());
}

TEST_CASE("scripted provider auto-acknowledges messages") {
  ScriptedProvider p({MenuAnswer{3}});
  CHECK(std::holds_alternative<AckAnswer>(p.ask(MessagePrompt{"hi"})));
  CHECK(std::get<MenuAnswer>(p.ask(MenuPrompt{"m", {{"a", 3, true}}, 1})).value == 3);
  CHECK_THROWS_AS(p.ask(QueryPrompt{"?"}), RuntimeError);
}

TEST_CASE("scripted answer of the wrong kind aborts") {
  auto r = run_source(wrap("в : Целое;", "НовоеМеню ('М'); ДобОпцию ('а', 1, Да);\nв := ПоказМеню (1);"),
                      R"([{"query":"yes"}])");
  REQUIRE(r.outcome.status == RunStatus::error);
  CHECK(r.outcome.error->kind() == ErrorKind::interaction_abort);
}

TEST_CASE("scale values travel as text") {
  FormAnswer a{true, {{"m", Scale{1, 25}}}};
  auto back = std::get<FormAnswer>(answer_from_json(answer_to_json(a)));
  CHECK(std::get<std::string>(back.values.at("m")) == "1 : 25");
}

TEST_CASE("query replies map to 1, 2 and 0") {
  std::string src = wrap("о : Целое;", "о := Запрос ('?');");
  CHECK(run_source(src, R"([{"query":"yes"}])").var("о")->as_int() == 1);
  CHECK(run_source(src, R"([{"query":"no"}])").var("о")->as_int() == 2);
  CHECK(run_source(src, R"([{"query":"cancel"}])").var("о")->as_int() == 0);
}

TEST_CASE("menu answers must name an enabled option") {
  std::string src = wrap("в : Целое;",
                         "НовоеМеню ('М'); ДобОпцию ('а', 1, Да); ДобОпцию ('б', 2, Нет);\nв := ПоказМеню (1);");
  CHECK(run_source(src, R"([{"menu":1}])").var("в")->as_int() == 1);
  CHECK(run_source(src, R"([{"menu":0}])").var("в")->as_int() == 0);
  auto bad = run_source(src, R"([{"menu":2}])");
  REQUIRE(bad.outcome.status == RunStatus::error);
  CHECK(bad.outcome.error->kind() == ErrorKind::interaction_abort);
}

TEST_CASE("selected option text is available") {
  auto r = run_source(wrap("в : Целое; т : Строка;",
                           "НовоеМеню ('М'); ДобОпцию ('первый', 1, Да); ДобОпцию ('второй', 2, Да);\n"
                           "в := ПоказМеню (1); т := ТекстОпции;"),
                      R"([{"menu":2}])");
  REQUIRE(r.outcome.status == RunStatus::completed);
  CHECK(r.var("т")->as_string() == "второй");
}

TEST_CASE("form answers are written back to bound variables") {
  std::string src = test::fixture("corpus/02_fundament.ppg");
  std::string answers = test::fixture("corpus/02_fundament.answers.json");
  auto r = run_source(src, answers);
  REQUIRE(r.outcome.status == RunStatus::completed);
  CHECK(r.var("ПоX")->as_real() == 700.0);
  CHECK(r.var("Высота")->as_real() == 800.0);
  CHECK(r.canvas.elements().front().scale == Scale{1, 25});
}

TEST_CASE("terminal provider reads menu choices") {
  std::istringstream in("2\n");
  std::ostringstream out;
  TerminalProvider p(in, out);
  auto a = p.ask(MenuPrompt{"Вид", {{"сверху", 1, true}, {"спереди", 2, true}}, 1});
  CHECK(std::get<MenuAnswer>(a).value == 2);
  CHECK(out.str().find("спереди") != std::string::npos);
}
