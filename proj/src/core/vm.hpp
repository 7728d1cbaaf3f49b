#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "canvas.hpp"
#include "errors.hpp"
#include "interaction.hpp"
#include "program.hpp"
#include "value.hpp"

namespace ppg {

class Registry;

struct Limits {
  std::uint64_t max_steps = 10'000'000;
  std::size_t max_elements = 100'000;

  /// Defaults, with PGEN_STEP_LIMIT overriding max_steps when set to a positive integer.
  static Limits from_environment();
};

enum class RunStatus { completed, halted, error };

const char* to_string(RunStatus s);

struct RunOutcome {
  RunStatus status = RunStatus::completed;
  std::optional<RuntimeError> error;
  std::uint64_t steps = 0;
  std::vector<int> batch;                                // elements added by this run
  std::vector<std::pair<std::string, Value>> variables;  // final values, in slot order
};

/// Executes a compiled program against a canvas. Global settings are restored
/// afterwards whatever the outcome; elements added before an error remain.
/// Throws FormatError when the program fails validation.
RunOutcome run(const CompiledProgram& cp, const Registry& registry, Canvas& canvas, InteractionProvider& interactor,
               const Limits& limits = Limits::from_environment());

}  // namespace ppg
