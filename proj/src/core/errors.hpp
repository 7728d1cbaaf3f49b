#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace ppg {

enum class ErrorKind {
  undefined_operand,
  type_violation,
  range_violation,
  division_by_zero,
  domain_error,
  step_limit,
  interaction_abort,
};

const char* to_string(ErrorKind k);

/// Raised by the VM and by builtin handlers. The VM fills in the operation
/// name and code position before the error leaves `run`.
class RuntimeError : public std::runtime_error {
 public:
  RuntimeError(ErrorKind kind, const std::string& message)
      : std::runtime_error(message), kind_(kind), detail_(message) {}

  ErrorKind kind() const { return kind_; }
  const std::string& detail() const { return detail_; }
  const std::string& operation() const { return operation_; }
  std::uint32_t position() const { return position_; }
  bool located() const { return located_; }

  void locate(std::string operation, std::uint32_t position) {
    operation_ = std::move(operation);
    position_ = position;
    located_ = true;
  }

  /// "range-violation in 'Уст_Атр' at word 42: цвет 16 outside 0..15"
  std::string describe() const;

 private:
  ErrorKind kind_;
  std::string detail_;
  std::string operation_;
  std::uint32_t position_ = 0;
  bool located_ = false;
};

[[noreturn]] inline void fail(ErrorKind kind, const std::string& message) { throw RuntimeError(kind, message); }

/// Failure of file or container handling (bad magic, truncated data, I/O).
class FormatError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace ppg
