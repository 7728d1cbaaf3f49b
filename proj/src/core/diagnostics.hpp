#pragma once

#include <string>
#include <vector>

namespace ppg {

struct SourcePos {
  int line = 1;
  int column = 1;

  friend bool operator==(const SourcePos&, const SourcePos&) = default;
};

enum class Severity { error, warning };

struct Diagnostic {
  Severity severity = Severity::error;
  std::string message;
  SourcePos pos;
};

using Diagnostics = std::vector<Diagnostic>;

inline bool has_errors(const Diagnostics& diags) {
  for (const auto& d : diags) {
    if (d.severity == Severity::error) return true;
  }
  return false;
}

/// "path:line:col: error: message"
std::string format_diagnostic(const Diagnostic& d, const std::string& path);

}  // namespace ppg
