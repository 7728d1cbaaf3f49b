#pragma once

#include <chrono>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "diagnostics.hpp"
#include "program.hpp"
#include "sema.hpp"

namespace ppg {

/// Code generation limit exceeded (too many words or slots).
class CompileError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Lowers a checked program to three-address commands over frame slots.
/// Frame layout: variables, then temporaries, then constants.
CompiledProgram compile(const TypedProgram& typed, const Registry& registry);

struct CompileStage {
  std::string name;
  bool ok = true;
  std::chrono::system_clock::time_point started;
  std::chrono::microseconds elapsed{0};
};

/// Protocol of one compilation attempt.
struct CompileLog {
  std::string source;  // file name or "<input>"
  std::string program_name;
  std::vector<CompileStage> stages;
  Diagnostics diagnostics;
  bool ok = false;
  std::size_t code_words = 0;
  std::size_t slot_count = 0;
};

/// Stage times are printed only when `timestamps` is set, so that logs of
/// identical inputs are identical by default.
std::string format_compile_log(const CompileLog& log, bool timestamps = false);
/// Throws IoError.
void write_compile_log(const CompileLog& log, const std::string& path, bool timestamps = false);

struct CompileResult {
  std::optional<CompiledProgram> program;
  CompileLog log;
  bool ok() const { return program.has_value(); }
  const Diagnostics& diagnostics() const { return log.diagnostics; }
};

/// Full pipeline: lexing, parsing, parenthesis check, semantic analysis and
/// code generation.
CompileResult compile_source(const std::string& text, const Registry& registry,
                             const std::string& source_name = "<input>");

}  // namespace ppg
