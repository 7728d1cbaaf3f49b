#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "types.hpp"
#include "value.hpp"

namespace ppg {

class Canvas;
class InteractionProvider;
struct DialogState;

enum class Fixity { infix, prefix, call, bare };

enum class ParamClass {
  exact,   // the given type; Целое is accepted where Вещественное is expected
  number,  // Целое or Вещественное
  any,     // checked by the descriptor's resolve step
};

struct ParamSpec {
  ParamClass cls = ParamClass::exact;
  TypePtr type;
};

inline ParamSpec param(TypePtr t) { return {ParamClass::exact, std::move(t)}; }
inline ParamSpec number_param() { return {ParamClass::number, nullptr}; }
inline ParamSpec any_param() { return {ParamClass::any, nullptr}; }

/// Access to named program variables, used by form binding.
class VariableBinder {
 public:
  virtual ~VariableBinder() = default;
  /// Slot value for a declared variable, or nullptr if no such variable.
  virtual Value* find_variable(const std::string& name) = 0;
};

/// Everything a handler may touch while executing.
struct ExecEnv {
  Canvas& canvas;
  InteractionProvider& interactor;
  DialogState& dialog;
  VariableBinder& variables;
};

/// Arguments of one executing command.
class CallArgs {
 public:
  CallArgs(std::span<const Value* const> args, ExecEnv& env) : args_(args), env_(env) {}

  std::size_t size() const { return args_.size(); }
  const Value& operator[](std::size_t i) const { return *args_[i]; }
  double real(std::size_t i) const { return args_[i]->as_real(); }
  std::int64_t integer(std::size_t i) const { return args_[i]->as_int(); }
  bool boolean(std::size_t i) const { return args_[i]->as_bool(); }
  const std::string& str(std::size_t i) const { return args_[i]->as_string(); }
  ExecEnv& env() const { return env_; }

 private:
  std::span<const Value* const> args_;
  ExecEnv& env_;
};

/// Computes the result type for the given argument types, or returns nullptr
/// and sets `error`. Used by operations whose signature is not a fixed list.
using ResolveFn = std::function<TypePtr(std::span<const TypePtr> args, std::string& error)>;
using ExecuteFn = std::function<Value(const CallArgs& args)>;

/// One built-in operation: its name, opcode and precedence are all that the
/// rest of the toolchain knows; checking and evaluation live in the handler.
struct BuiltinDescriptor {
  std::string name;
  std::uint16_t opcode = 0;  // 0: assigned on registration
  Fixity fixity = Fixity::call;
  int precedence = 0;
  bool right_assoc = false;
  std::vector<ParamSpec> params;
  TypePtr result;              // fixed result type, if any
  bool returns_value = false;  // true when `result` or `resolve` yields a value
  ResolveFn resolve;
  ExecuteFn execute;
  std::string summary;

  std::size_t arity() const { return params.size(); }
  std::size_t operand_count() const { return params.size() + (returns_value ? 1 : 0); }

  /// Compile-time signature check. Returns the result type (types::boolean etc.),
  /// nullptr for procedures; sets `error` on mismatch.
  TypePtr check(std::span<const TypePtr> args, std::string& error) const;
};

struct BuiltinConstant {
  std::string name;
  Value value;
};

/// First opcode handed out to registered builtins; lower ids are VM core ops.
inline constexpr std::uint16_t kFirstBuiltinOpcode = 64;

/// Registry of built-in operations and constants, keyed by name_key.
/// Built once, then shared read-only; copy it to extend.
class Registry {
 public:
  Registry() = default;

  /// All operations and constants of the language.
  static const Registry& standard();

  /// Throws std::invalid_argument on a duplicate name or opcode.
  const BuiltinDescriptor& register_builtin(BuiltinDescriptor desc);
  void register_constant(std::string name, Value value);

  /// Infix, call and bare operations by name.
  const BuiltinDescriptor* lookup(const std::string& name) const;
  const BuiltinDescriptor* lookup_prefix(const std::string& name) const;
  const BuiltinDescriptor* by_opcode(std::uint16_t opcode) const;
  const BuiltinConstant* constant(const std::string& name) const;

  /// Word operators (DIV, NOT, ...) that the lexer classifies as operators.
  bool is_word_operator(const std::string& name) const;

  std::vector<const BuiltinDescriptor*> all() const;
  const std::vector<BuiltinConstant>& constants() const { return constants_; }

 private:
  std::vector<std::shared_ptr<const BuiltinDescriptor>> descriptors_;
  std::map<std::string, std::size_t> by_name_;
  std::map<std::string, std::size_t> prefix_by_name_;
  std::map<std::uint16_t, std::size_t> by_opcode_;
  std::vector<BuiltinConstant> constants_;
  std::map<std::string, std::size_t> constant_by_name_;
  std::uint16_t next_opcode_ = kFirstBuiltinOpcode;
};

void register_operator_builtins(Registry& r);
void register_math_builtins(Registry& r);
void register_drawing_builtins(Registry& r);
void register_dialog_builtins(Registry& r);
void register_constants(Registry& r);

}  // namespace ppg
