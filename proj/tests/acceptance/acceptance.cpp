// Acceptance checks A1..A10: one PASS/FAIL line each, nonzero exit on any failure.
#include <unistd.h>

#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <random>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include "errors.hpp"
#include "generators.hpp"
#include "lexer.hpp"
#include "library.hpp"
#include "parser.hpp"
#include "printer.hpp"
#include "support.hpp"
#include "svg.hpp"

using namespace ppg;
namespace fs = std::filesystem;

namespace {

struct Failed {
  std::string why;
};

void expect(bool ok, const std::string& why) {
  if (!ok) throw Failed{why};
}

const Registry& reg() { return Registry::standard(); }

CompiledProgram listing() { return test::compile_ok(test::fixture("fixtures/ogolovok.ppg")); }

std::vector<const RectangleShape*> rectangles(const Canvas& c) {
  std::vector<const RectangleShape*> out;
  for (const auto& e : c.elements()) {
    if (e.removed) continue;
    if (const auto* r = std::get_if<RectangleShape>(&e.shape)) out.push_back(r);
  }
  return out;
}

bool close(double got, double want) { return std::fabs(got - want) <= 1e-9 * std::max(1.0, std::fabs(want)); }

double fraction(const std::string& s) {
  auto slash = s.find('/');
  if (slash == std::string::npos) return std::stod(s);
  return std::stod(s.substr(0, slash)) / std::stod(s.substr(slash + 1));
}

std::vector<std::vector<double>> read_oracle(const std::string& rel) {
  std::istringstream in(test::fixture(rel));
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::istringstream ls(line);
    std::vector<double> row;
    std::string tok;
    while (ls >> tok) row.push_back(fraction(tok));
    rows.push_back(row);
  }
  return rows;
}

void expect_rects(const Canvas& c, const std::vector<std::vector<double>>& want) {
  auto got = rectangles(c);
  expect(c.visible_count() == want.size(), "expected " + std::to_string(want.size()) + " element(s), got " +
                                               std::to_string(c.visible_count()));
  expect(got.size() == want.size(), "expected " + std::to_string(want.size()) + " rectangle(s)");
  for (std::size_t i = 0; i < want.size(); ++i) {
    const auto& r = *got[i];
    double v[4] = {r.origin.x, r.origin.y, r.width, r.height};
    for (int k = 0; k < 4; ++k) {
      if (!close(v[k], want[i][static_cast<std::size_t>(k)])) {
        std::ostringstream m;
        m.precision(17);
        m << "rectangle " << i + 1 << " field " << k << ": got " << v[k] << ", want " << want[i][static_cast<std::size_t>(k)];
        throw Failed{m.str()};
      }
    }
  }
}

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ppg-accept-" + std::to_string(::getpid()));
    fs::remove_all(path);
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
};

// ---------------------------------------------------------------------------

std::string a1() {
  auto oracle = read_oracle("fixtures/ogolovok_top.oracle");
  expect(oracle.size() == 4, "oracle fixture must list 4 rectangles");
  auto t0 = std::chrono::steady_clock::now();
  auto cp = listing();
  auto r = test::run_program(cp, R"([{"menu":1}])");
  auto elapsed = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  expect(r.outcome.status == RunStatus::completed, "run did not complete");
  expect_rects(r.canvas, oracle);
  expect(elapsed < 1.0, "took " + std::to_string(elapsed) + " s");
  return "4 rectangles match the hand oracle; compile+run " + std::to_string(static_cast<int>(elapsed * 1000)) + " ms";
}

std::string a2() {
  auto cp = listing();
  auto r2 = test::run_program(cp, R"([{"menu":2}])");
  expect(r2.outcome.status == RunStatus::completed, "menu 2 did not complete");
  expect_rects(r2.canvas, {{0, 0, 880, 600}});
  auto r3 = test::run_program(cp, R"([{"menu":3}])");
  expect(r3.outcome.status == RunStatus::completed, "menu 3 did not complete");
  expect_rects(r3.canvas, {{0, 0, 450, 600}});
  auto r0 = test::run_program(cp, R"([{"menu":0}])");
  expect(r0.outcome.status == RunStatus::halted, std::string("menu 0 gave ") + to_string(r0.outcome.status));
  expect(r0.canvas.elements().empty(), "menu 0 drew something");
  return "menu 2 -> (0,0,880,600), menu 3 -> (0,0,450,600), menu 0 -> halted-by-exit, 0 elements";
}

std::string a3() {
  auto cp = listing();
  const GlobalSettings pristine;
  {
    Canvas canvas;
    auto before = canvas.snapshot_settings();
    expect(before == pristine, "fresh canvas does not hold the defaults");
    ScriptedProvider provider(answers_from_json(R"([{"menu":1}])"));
    auto out = run(cp, reg(), canvas, provider);
    expect(out.status == RunStatus::completed, "A1 run did not complete");
    expect(canvas.settings() == before, "settings changed by the A1 run");
  }
  {
    // The listing changes the dimension settings before it asks; no answer -> interaction abort.
    Canvas canvas;
    auto before = canvas.snapshot_settings();
    ScriptedProvider provider({});
    auto out = run(cp, reg(), canvas, provider);
    expect(out.status == RunStatus::error, "injected error did not happen");
    expect(canvas.settings() == before, "settings changed by the failed run");
  }
  {
    auto cp2 = test::compile_ok(test::wrap("Ш : Атрибут; а, б : Вещественное;",
                                           "ЛРазмТочн (4); ТекстШрифт (8, 10, 1.5, 12);\n"
                                           "Ш := Глоб_Атр; Ш.Слой := 9; Уст_Атр (Ш);\nа := 1 / (б - б);"));
    Canvas canvas;
    auto before = canvas.snapshot_settings();
    ScriptedProvider provider({});
    auto out = run(cp2, reg(), canvas, provider);
    expect(out.status == RunStatus::error, "division run did not fail");
    expect(canvas.settings() == before, "settings changed by a run failing mid-way");
  }
  return "settings equal the pre-run snapshot after completion and after two injected errors";
}

std::string a4() {
  std::string detail;
  {
    auto r = test::run_source(test::wrap("а, неопр : Целое;", "а := неопр + 1;"));
    expect(r.outcome.status == RunStatus::error && r.outcome.error, "(a) no error");
    const auto& e = *r.outcome.error;
    expect(e.kind() == ErrorKind::undefined_operand, std::string("(a) kind ") + to_string(e.kind()));
    expect(e.describe().find("неопр") != std::string::npos, "(a) slot not named: " + e.describe());
    expect(e.located(), "(a) no code position");
    detail += "(a) " + e.describe();
  }
  {
    auto r = test::run_source(test::wrap("Ш : Атрибут;", "Ш := Глоб_Атр;\nШ.Цвет := 16;\nУст_Атр (Ш);"));
    expect(r.outcome.status == RunStatus::error && r.outcome.error, "(b) no error");
    const auto& e = *r.outcome.error;
    expect(e.kind() == ErrorKind::range_violation, std::string("(b) kind ") + to_string(e.kind()));
    expect(e.located(), "(b) no code position");
    detail += "; (b) " + e.describe();
  }
  {
    ::setenv("PGEN_STEP_LIMIT", "1000", 1);
    auto limits = Limits::from_environment();
    ::unsetenv("PGEN_STEP_LIMIT");
    expect(limits.max_steps == 1000, "PGEN_STEP_LIMIT not honoured");
    auto cp = test::compile_ok("program Петля;\nm:; goto m;\nendprogram;\n");
    auto r = test::run_program(cp, "[]", limits);
    expect(r.outcome.status == RunStatus::error && r.outcome.error, "(c) no error");
    const auto& e = *r.outcome.error;
    expect(e.kind() == ErrorKind::step_limit, std::string("(c) kind ") + to_string(e.kind()));
    expect(e.located(), "(c) no code position");
    detail += "; (c) " + e.describe();
  }
  return detail;
}

std::string a5() {
  struct Case {
    std::string what, src;
    std::set<std::pair<int, int>> at;  // every listed position must be reported
  };
  const std::string id31(31, 'q');
  // wrap(): the body starts on line 5 when there are variables.
  std::vector<Case> cases = {
      {"31-char identifier", test::wrap("x : Целое;", "x := 1;\n  " + id31 + " := 2;"), {{6, 3}}},
      {"a + (b * c)", test::wrap("x, a, b, c : Целое;", "a := 1; b := 2; c := 3;\nx := a + (b * c);"), {{6, 10}}},
      {"((a))", test::wrap("x, a : Целое;", "a := 1;\nx := ((a));"), {{6, 6}, {6, 7}}},
      {"type mismatch", test::wrap("x : Целое;", "x := 'строка';"), {{5, 6}}},
      {"unknown label", test::wrap("x : Целое;", "x := 1;\ngoto нигде;"), {{6, 1}}},
      {"Прямоуг with 6 args", test::wrap("Ш : Атрибут; н : Целое;", "Ш := Глоб_Атр;\nн := Прямоуг (Ш, 0, 0, 10, 10, 5);"),
       {{6, 6}}},
  };
  std::string detail;
  for (const auto& c : cases) {
    auto r = compile_source(c.src, reg(), "t.ppg");
    expect(!r.ok(), c.what + ": accepted");
    std::set<std::pair<int, int>> got;
    for (const auto& d : r.diagnostics()) got.insert({d.pos.line, d.pos.column});
    for (auto want : c.at) {
      expect(got.count(want), c.what + ": no error at " + std::to_string(want.first) + ":" + std::to_string(want.second) +
                                  "\n" + test::diagnostics_text(r));
    }
    if (c.what == "((a))") {
      std::size_t paren_errors = 0;
      for (const auto& d : r.diagnostics()) paren_errors += d.pos.line == 6 ? 1 : 0;
      expect(paren_errors == 2, "((a)): expected 2 errors, got " + std::to_string(paren_errors));
    }
    detail += c.what + " @" + std::to_string(c.at.begin()->first) + ":" + std::to_string(c.at.begin()->second) + "; ";
  }
  auto ok = compile_source(test::fixture("fixtures/ogolovok.ppg"), reg());
  expect(ok.ok() && ok.diagnostics().empty(), "listing does not compile clean:\n" + test::diagnostics_text(ok));
  return detail + "listing compiles clean";
}

std::string a6() {
  std::vector<fs::path> sources = {test::source_dir() / "tests/fixtures/ogolovok.ppg"};
  for (const auto& e : fs::directory_iterator(test::source_dir() / "tests/corpus")) {
    if (e.path().extension() == ".ppg") sources.push_back(e.path());
  }
  std::sort(sources.begin() + 1, sources.end());
  expect(sources.size() >= 11, "corpus has fewer than 10 programs");
  std::size_t words = 0;
  for (const auto& src : sources) {
    const std::string name = src.filename().string();
    auto cp = test::compile_ok(test::read_file(src));
    auto bytes = encode(cp);
    auto back = decode(bytes, reg());
    expect(back == cp, name + ": decoded structure differs");
    expect(encode(back) == bytes, name + ": re-encoded bytes differ");

    std::vector<int> owner(cp.code.size(), 0);
    for (auto s : command_starts(cp, reg())) {
      auto info = opcode_info(cp.code[s], reg());
      expect(info.has_value(), name + ": unknown opcode in walk");
      for (std::size_t k = s; k <= s + info->roles.size(); ++k) {
        expect(k < owner.size(), name + ": command runs past the end");
        ++owner[k];
      }
    }
    for (std::size_t k = 0; k < owner.size(); ++k) {
      expect(owner[k] == 1, name + ": word " + std::to_string(k) + " covered " + std::to_string(owner[k]) + " times");
    }
    words += cp.code.size();

    // Point the first slot operand past the frame.
    auto doctored = cp;
    bool changed = false;
    for (auto s : command_starts(doctored, reg())) {
      auto info = opcode_info(doctored.code[s], reg());
      for (std::size_t k = 0; k < info->roles.size() && !changed; ++k) {
        auto role = info->roles[k];
        if (role == OperandRole::target || role == OperandRole::field) continue;
        doctored.code[s + 1 + k] = static_cast<std::uint16_t>(doctored.slots.size() + 7);
        changed = true;
      }
      if (changed) break;
    }
    expect(changed, name + ": nothing to doctor");
    bool rejected = false;
    try {
      decode(encode(doctored), reg());
    } catch (const FormatError&) {
      rejected = true;
    }
    expect(rejected, name + ": doctored operand accepted");
  }
  return std::to_string(sources.size()) + " programs, " + std::to_string(words) +
         " words walked once each, doctored operands rejected";
}

std::string a7() {
  TempDir dir;
  fs::path path = dir.path / "ventpanels.ppglib";
  Library lib(path);
  lib.add("Оголовок", "вентпанели, три вида", listing());
  lib.add("Запас", "", listing());

  auto direct = test::run_program(listing(), R"([{"menu":1}])");
  auto loaded = test::run_program(lib.load("Оголовок", reg()), R"([{"menu":1}])");
  expect(dump_canvas(loaded.canvas) == dump_canvas(direct.canvas), "library run differs from direct run");
  expect_rects(loaded.canvas, read_oracle("fixtures/ogolovok_top.oracle"));

  lib.remove("Оголовок");
  bool failed = false;
  try {
    lib.load("Оголовок", reg());
  } catch (const LibraryError&) {
    failed = true;
  }
  expect(failed, "load after remove succeeded");

  auto before = test::read_file(path);
  testing::interrupt_next_library_write(64);
  bool torn = false;
  try {
    lib.add("Новый", "", listing());
  } catch (const IoError&) {
    torn = true;
  }
  expect(torn, "torn write was not reported");
  expect(test::read_file(path) == before, "library file changed by a torn write");
  auto entries = lib.entries();
  expect(entries.size() == 1 && entries[0].name == "Запас", "library contents changed by a torn write");
  return "load+run equals A1, remove -> load fails, torn write leaves the file intact";
}

std::string a8() {
  auto render_once = [] {
    auto r = test::run_program(listing(), R"([{"menu":1}])");
    return render_svg(r.canvas);
  };
  std::string a = render_once(), b = render_once();
  expect(a == b, "renderings differ");
  std::size_t rects = 0;
  for (auto p = a.find("<rect"); p != std::string::npos; p = a.find("<rect", p + 1)) ++rects;
  expect(rects == 4, "SVG has " + std::to_string(rects) + " <rect nodes");
  return "two runs give identical SVG (" + std::to_string(a.size()) + " bytes), 4 <rect nodes";
}

std::string a9() {
  std::mt19937 rng(20240517);
  for (int i = 0; i < 200; ++i) {
    ast::Program p = gen::program(rng);
    std::string text = pretty_print(p, reg());
    auto back = parse_source(text, reg());
    expect(back.program.has_value(), "program " + std::to_string(i) + " does not re-parse:\n" + text +
                                         (back.diagnostics.empty() ? "" : back.diagnostics[0].message));
    expect(ast::equal(*back.program, p), "program " + std::to_string(i) + " differs after re-parse:\n" + text);
  }
  for (int i = 0; i < 200; ++i) {
    auto e = gen::expression_text(rng, 3);
    auto plain = parse_expression(e.plain, reg());
    auto full = parse_expression(e.full, reg());
    expect(plain.expr.has_value(), "cannot parse: " + e.plain);
    expect(full.expr.has_value(), "cannot parse oracle: " + e.full);
    expect(ast::equal(ast::strip_parens(*plain.expr), ast::strip_parens(*full.expr)),
           "precedence mismatch:\n  " + e.plain + "\n  oracle " + e.full);
  }
  return "200 programs round-trip through the printer; 200 expressions match the parenthesized oracle";
}

std::string a10() {
  struct Want {
    const char* name;
    std::size_t arity;
    bool bare = false;
  };
  const std::vector<Want> infix = {{"*", 2}, {"+", 2},   {"-", 2},  {"/", 2},  {"DIV", 2}, {"MOD", 2},
                                   {"^", 2}, {"<", 2},   {"<=", 2}, {"<>", 2}, {"=", 2},   {">", 2},
                                   {">=", 2}, {"AND", 2}, {"OR", 2}, {"XOR", 2}};
  const std::vector<Want> prefix = {{"NOT", 1}, {"-", 1}};
  const std::vector<Want> calls = {
      {"INT", 1}, {"FRAC", 1}, {"ROUND", 1}, {"ABS", 1}, {"SQRT", 1}, {"LN", 1}, {"EXP", 1}, {"LG", 1},
      {"SIN", 1}, {"COS", 1}, {"TG", 1}, {"ARCSIN", 1}, {"ARCCOS", 1}, {"ARCTG", 1}, {"SH", 1}, {"CH", 1},
      {"TH", 1}, {"ARSH", 1}, {"ARCH", 1}, {"ARTH", 1}, {"ИзГрадВРад", 1}, {"ИзРадВГрад", 1},
      {"ЧислоВСтроку", 1}, {"СтрокаВЦелое", 1}, {"СтрокаВЧисло", 1}, {"IIF", 3}, {"Подстрока", 3},
      // dialogs
      {"Сообщение", 1}, {"Информация", 1}, {"Запрос", 1}, {"НовоеМеню", 1}, {"ДобОпцию", 3},
      {"Доб_5_Опций", 5}, {"ПоказМеню", 1}, {"МенюИзФайла", 1}, {"ТекстОпции", 0, true}, {"Новая_форма", 1},
      {"Новое_поле", 2}, {"Новое_полеXY", 4}, {"Масштаб_поле", 5}, {"Редактор", 0, true},
      // drawing
      {"Глоб_Атр", 0, true}, {"Уст_Атр", 1}, {"Отрез", 5}, {"Прямоуг", 5}, {"ДугаОкружн", 6},
      {"ЛРазмСноски", 1}, {"ЛРазмТочн", 1}, {"ЛРазмВынос", 3}, {"ЛРазмШрифт", 3}, {"ЛРазмСтрелки", 4},
      {"ГорРазмер1", 4}, {"ВерРазмер1", 4}, {"РамкаРазм", 6}, {"ТекстСноска", 1}, {"ТекстШрифт", 4},
      {"ДлинаСтроки", 1}, {"НачатьТекст", 1}, {"ДобСтроку", 1}, {"ОтмВысоты", 3}, {"ОбрывТрубы", 4},
      {"ОбрывПоДуге", 4}, {"УбратьИзЧерт", 1}};

  std::size_t n = 0;
  for (const auto& w : infix) {
    const auto* d = reg().lookup(w.name);
    expect(d && d->fixity == Fixity::infix, std::string("infix '") + w.name + "' missing");
    expect(d->arity() == w.arity, std::string("'") + w.name + "' arity " + std::to_string(d->arity()));
    ++n;
  }
  for (const auto& w : prefix) {
    const auto* d = reg().lookup_prefix(w.name);
    expect(d && d->fixity == Fixity::prefix, std::string("prefix '") + w.name + "' missing");
    expect(d->arity() == w.arity, std::string("prefix '") + w.name + "' arity " + std::to_string(d->arity()));
    ++n;
  }
  for (const auto& w : calls) {
    const auto* d = reg().lookup(w.name);
    expect(d != nullptr, std::string("'") + w.name + "' missing");
    expect(d->arity() == w.arity, std::string("'") + w.name + "' arity " + std::to_string(d->arity()) + ", want " +
                                      std::to_string(w.arity));
    expect((d->fixity == Fixity::bare) == w.bare, std::string("'") + w.name + "' bare/call form differs");
    ++n;
  }
  // Control words belong to the grammar, not to the registry.
  const char* control[] = {"GOTO", "EXIT", "IF", "ELSE", "ENDIF", "CASE", "ON", "ONELSE", "ENDCASE"};
  for (const char* w : control) {
    auto toks = tokenize(std::string(w) + ";\n", reg());
    expect(!toks.tokens.empty() && toks.tokens[0].kind == TokenKind::keyword, std::string(w) + " is not a keyword");
  }
  return std::to_string(n) + " operations resolve with the documented arity; 9 control words are keywords";
}

}  // namespace

int main() {
  const std::vector<std::pair<const char*, std::function<std::string()>>> checks = {
      {"A1", a1}, {"A2", a2}, {"A3", a3}, {"A4", a4}, {"A5", a5},
      {"A6", a6}, {"A7", a7}, {"A8", a8}, {"A9", a9}, {"A10", a10}};
  int failures = 0;
  for (const auto& [id, fn] : checks) {
    try {
      std::string detail = fn();
      std::cout << id << " PASS " << detail << "\n";
    } catch (const Failed& f) {
      ++failures;
      std::cout << id << " FAIL " << f.why << "\n";
    } catch (const std::exception& e) {
      ++failures;
      std::cout << id << " FAIL exception: " << e.what() << "\n";
    }
  }
  std::cout << (failures ? "acceptance: FAILED (" + std::to_string(failures) + ")" : std::string("acceptance: all passed"))
            << "\n";
  return failures ? 1 : 0;
}
