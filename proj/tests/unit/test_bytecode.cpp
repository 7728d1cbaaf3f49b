#include <unistd.h>

#include <filesystem>

#include "doctest.h"
#include "errors.hpp"
#include "library.hpp"
#include "support.hpp"

using namespace ppg;
namespace fs = std::filesystem;

namespace {

CompiledProgram listing() { return test::compile_ok(test::fixture("fixtures/ogolovok.ppg")); }

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() / ("ppg-unit-" + std::to_string(::getpid()) + "-" + std::to_string(counter()++));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  static int& counter() {
    static int n = 0;
    return n;
  }
};

}  // namespace

TEST_CASE("encode/decode is lossless") {
  auto cp = listing();
  auto bytes = encode(cp);
  auto back = decode(bytes, Registry::standard());
  CHECK(back == cp);
  CHECK(encode(back) == bytes);
}

TEST_CASE("every code word belongs to exactly one command") {
  auto cp = listing();
  auto starts = command_starts(cp, Registry::standard());
  REQUIRE_FALSE(starts.empty());
  CHECK(starts.front() == 0);
  std::size_t covered = 0;
  for (std::size_t i = 0; i < starts.size(); ++i) {
    auto info = opcode_info(cp.code[starts[i]], Registry::standard());
    REQUIRE(info);
    std::size_t len = 1 + info->roles.size();
    if (i + 1 < starts.size()) CHECK(starts[i + 1] == starts[i] + len);
    covered += len;
  }
  CHECK(covered == cp.code.size());
}

TEST_CASE("disassembly names variables") {
  auto text = disassemble(listing(), Registry::standard());
  CHECK(text.find("Прямоуг") != std::string::npos);
  CHECK(text.find("НомерЭл") != std::string::npos);
}

TEST_CASE("corrupt containers are rejected") {
  auto cp = listing();
  auto bytes = encode(cp);
  SUBCASE("bad magic") {
    bytes[0] ^= 0xFF;
    CHECK_THROWS_AS(decode(bytes, Registry::standard()), FormatError);
  }
  SUBCASE("truncated") {
    bytes.resize(bytes.size() / 2);
    CHECK_THROWS_AS(decode(bytes, Registry::standard()), FormatError);
  }
  SUBCASE("slot operand out of range") {
    auto bad = cp;
    auto starts = command_starts(bad, Registry::standard());
    for (auto s : starts) {
      auto info = opcode_info(bad.code[s], Registry::standard());
      if (!info->roles.empty() && info->roles[0] != OperandRole::target && info->roles[0] != OperandRole::field) {
        bad.code[s + 1] = static_cast<std::uint16_t>(bad.slots.size() + 5);
        break;
      }
    }
    CHECK_THROWS_AS(validate(bad, Registry::standard()), FormatError);
    CHECK_THROWS_AS(decode(encode(bad), Registry::standard()), FormatError);
  }
  SUBCASE("unknown opcode") {
    auto bad = cp;
    bad.code[0] = 60;
    CHECK_THROWS_AS(validate(bad, Registry::standard()), FormatError);
  }
  SUBCASE("jump outside the code") {
    auto bad = cp;
    for (auto s : command_starts(bad, Registry::standard())) {
      if (bad.code[s] == static_cast<std::uint16_t>(CoreOp::jmp)) {
        bad.code[s + 1] = static_cast<std::uint16_t>(bad.code.size() + 10);
        break;
      }
    }
    CHECK_THROWS_AS(validate(bad, Registry::standard()), FormatError);
  }
}

TEST_CASE("slot labels") {
  auto cp = listing();
  CHECK(slot_label(cp, 0) == "Вид");
  bool const_seen = false;
  for (std::size_t i = 0; i < cp.slots.size(); ++i) {
    if (cp.slots[i].kind == SlotKind::constant) {
      CHECK(slot_label(cp, i).rfind("#", 0) == 0);
      const_seen = true;
    }
  }
  CHECK(const_seen);
}

TEST_CASE("compile log is deterministic without timestamps") {
  std::string src = test::fixture("fixtures/ogolovok.ppg");
  auto a = compile_source(src, Registry::standard(), "o.ppg");
  auto b = compile_source(src, Registry::standard(), "o.ppg");
  CHECK(format_compile_log(a.log) == format_compile_log(b.log));
  CHECK(a.log.ok);
  CHECK(a.log.code_words == a.program->code.size());
}

TEST_CASE("library add, list, load, remove") {
  TempDir dir;
  Library lib(dir.path / "a.ppglib");
  auto cp = listing();
  lib.add("оголовок", "вентпанели", cp);
  lib.add("второй", "", cp);
  CHECK_THROWS_AS(lib.add("оголовок", "", cp), LibraryError);
  auto entries = lib.entries();
  REQUIRE(entries.size() == 2);
  CHECK(entries[0].name == "оголовок");
  CHECK(entries[0].comment == "вентпанели");
  CHECK(lib.load("оголовок", Registry::standard()) == cp);
  lib.remove("оголовок");
  CHECK_THROWS_AS(lib.load("оголовок", Registry::standard()), LibraryError);
  CHECK_THROWS_AS(lib.remove("нет"), LibraryError);
  CHECK(lib.entries().size() == 1);
}

TEST_CASE("library container checks") {
  std::vector<LibraryEntry> e = {{"x", "c", encode(listing())}};
  auto bytes = encode_library(e);
  CHECK(decode_library(bytes) == e);
  auto flipped = bytes;
  flipped[flipped.size() - 10] ^= 0x01;
  CHECK_THROWS_AS(decode_library(flipped), FormatError);
  auto shortened = bytes;
  shortened.resize(8);
  CHECK_THROWS_AS(decode_library(shortened), FormatError);
}

TEST_CASE("interrupted write keeps the previous file") {
  TempDir dir;
  fs::path p = dir.path / "b.ppglib";
  Library lib(p);
  lib.add("один", "", listing());
  auto before = test::read_file(p);
  testing::interrupt_next_library_write(20);
  CHECK_THROWS_AS(lib.add("два", "", listing()), IoError);
  CHECK(test::read_file(p) == before);
  CHECK(lib.entries().size() == 1);
  lib.add("два", "", listing());
  CHECK(lib.entries().size() == 2);
}

TEST_CASE("missing library file") {
  Library lib("/nonexistent/dir/x.ppglib");
  CHECK_THROWS_AS(lib.entries(), IoError);
}
