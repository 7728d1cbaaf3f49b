// Shared helpers for the test binaries.
#pragma once

#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <string>

#include "builtins.hpp"
#include "canvas.hpp"
#include "compiler.hpp"
#include "interaction.hpp"
#include "program.hpp"
#include "vm.hpp"

namespace ppg::test {

inline std::filesystem::path source_dir() { return PPG_SOURCE_DIR; }

inline std::string read_file(const std::filesystem::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) throw std::runtime_error("cannot read " + p.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline std::string fixture(const std::string& rel) { return read_file(source_dir() / "tests" / rel); }

inline std::string diagnostics_text(const CompileResult& r) {
  std::string s;
  for (const auto& d : r.diagnostics()) s += format_diagnostic(d, "<input>") + "\n";
  return s;
}

/// Compiles or throws with the diagnostics as message.
inline CompiledProgram compile_ok(const std::string& src) {
  auto r = compile_source(src, Registry::standard());
  if (!r.ok()) throw std::runtime_error("compile failed:\n" + diagnostics_text(r));
  return *r.program;
}

/// `program T; var; <vars> endvar; <body> endprogram;`
inline std::string wrap(const std::string& vars, const std::string& body) {
  std::string s = "program Проба;\n";
  if (!vars.empty()) s += "var;\n" + vars + "\nendvar;\n";
  return s + body + "\nendprogram;\n";
}

struct Ran {
  Canvas canvas;
  RunOutcome outcome;

  const Value* var(const std::string& name) const {
    for (const auto& [n, v] : outcome.variables) {
      if (n == name) return &v;
    }
    return nullptr;
  }
};

inline Ran run_program(const CompiledProgram& cp, const std::string& answers = "[]", Limits limits = {}) {
  Ran r;
  ScriptedProvider provider(answers_from_json(answers));
  r.outcome = run(cp, Registry::standard(), r.canvas, provider, limits);
  return r;
}

inline Ran run_source(const std::string& src, const std::string& answers = "[]", Limits limits = {}) {
  return run_program(compile_ok(src), answers, limits);
}

}  // namespace ppg::test
