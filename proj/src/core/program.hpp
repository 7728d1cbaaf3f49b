#pragma once

#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <vector>

#include "types.hpp"

namespace ppg {

class Registry;

/// VM core operations. Builtins take opcodes from kFirstBuiltinOpcode up.
enum class CoreOp : std::uint16_t {
  halt = 0,   // EXIT
  end = 1,    // normal completion
  mov = 2,    // src dst
  jmp = 3,    // target
  jmpf = 4,   // cond target
  getf = 5,   // record field# dst      (field must be defined)
  setf = 6,   // record field# src
  geti = 7,   // array index dst
  seti = 8,   // array index src
  ldfu = 9,   // record field# dst      (no definedness check; path traversal)
  ldiu = 10,  // array index dst
  stfu = 11,  // record field# src      (write-back of a partially defined part)
  stiu = 12,  // array index src
};

inline constexpr std::uint16_t kCoreOpCount = 13;

/// How an operand word is interpreted.
enum class OperandRole : std::uint8_t {
  in,         // slot read; must be defined
  in_raw,     // slot read without a definedness check
  out,        // slot written
  inout,      // composite slot updated in place
  field,      // immediate field number
  target,     // code word index
};

struct OpcodeInfo {
  std::uint16_t opcode = 0;
  std::string mnemonic;
  std::vector<OperandRole> roles;
};

/// Operand layout of a core or registered opcode; nullopt if unknown.
std::optional<OpcodeInfo> opcode_info(std::uint16_t opcode, const Registry& registry);

inline constexpr std::uint16_t kNoIndex = 0xFFFF;

struct TypeEntry {
  TypeKind kind = TypeKind::integer;
  std::uint16_t name = kNoIndex;                                   // string pool
  std::vector<std::pair<std::uint16_t, std::uint16_t>> fields;     // (name, type)
  std::int32_t lo = 0;
  std::int32_t hi = -1;
  std::uint16_t element = kNoIndex;
  friend bool operator==(const TypeEntry&, const TypeEntry&) = default;
};

struct ConstEntry {
  std::uint16_t type = 0;  // a base type entry
  bool boolean = false;
  std::int64_t integer = 0;
  std::uint64_t real_bits = 0;
  std::uint16_t string = kNoIndex;
  friend bool operator==(const ConstEntry&, const ConstEntry&) = default;
};

enum class SlotKind : std::uint8_t { variable = 0, temp = 1, constant = 2 };

struct SlotEntry {
  std::uint16_t type = 0;
  SlotKind kind = SlotKind::variable;
  std::uint16_t name = kNoIndex;      // variables only
  std::uint16_t constant = kNoIndex;  // constants only
  friend bool operator==(const SlotEntry&, const SlotEntry&) = default;
};

/// Executable form of a program: pools, frame layout and 16-bit code words.
/// Every command is an opcode word followed by its operand words.
struct CompiledProgram {
  std::string name;
  std::uint16_t version = 1;
  std::vector<std::string> strings;
  std::vector<TypeEntry> types;
  std::vector<ConstEntry> constants;
  std::vector<SlotEntry> slots;
  std::vector<std::uint16_t> code;
  friend bool operator==(const CompiledProgram&, const CompiledProgram&) = default;
};

inline constexpr std::uint16_t kFormatVersion = 1;

std::vector<std::uint8_t> encode(const CompiledProgram& cp);

/// Parses and validates a container; throws FormatError.
CompiledProgram decode(std::span<const std::uint8_t> bytes, const Registry& registry);

/// Structural validation shared by decode and the VM; throws FormatError.
void validate(const CompiledProgram& cp, const Registry& registry);

/// Start offsets of all commands, in order. Throws FormatError on an unknown
/// opcode or a command running past the end.
std::vector<std::size_t> command_starts(const CompiledProgram& cp, const Registry& registry);

/// Human-readable listing, one command per line.
std::string disassemble(const CompiledProgram& cp, const Registry& registry);

/// Display name of a slot: variable name, `#k` for constants or `~k` for temporaries.
std::string slot_label(const CompiledProgram& cp, std::size_t slot);

/// Rebuilds type descriptors from the type table. Built-in composite types map
/// back to the catalog's shared descriptors.
std::vector<TypePtr> materialize_types(const CompiledProgram& cp);

}  // namespace ppg
