#include "program.hpp"

#include <bit>
#include <cstring>
#include <set>

#include "builtins.hpp"
#include "errors.hpp"
#include "text.hpp"

namespace ppg {

namespace {

using R = OperandRole;

const std::vector<OpcodeInfo>& core_table() {
  static const std::vector<OpcodeInfo> table = {
      {0, "HALT", {}},
      {1, "END", {}},
      {2, "MOV", {R::in, R::out}},
      {3, "JMP", {R::target}},
      {4, "JMPF", {R::in, R::target}},
      {5, "GETF", {R::in_raw, R::field, R::out}},
      {6, "SETF", {R::inout, R::field, R::in}},
      {7, "GETI", {R::in_raw, R::in, R::out}},
      {8, "SETI", {R::inout, R::in, R::in}},
      {9, "LDFU", {R::in_raw, R::field, R::out}},
      {10, "LDIU", {R::in_raw, R::in, R::out}},
      {11, "STFU", {R::inout, R::field, R::in_raw}},
      {12, "STIU", {R::inout, R::in, R::in_raw}},
  };
  return table;
}

// ---- byte streams ------------------------------------------------------------

class Writer {
 public:
  void u8(std::uint8_t v) { out_.push_back(v); }
  void u16(std::uint16_t v) {
    u8(static_cast<std::uint8_t>(v & 0xFF));
    u8(static_cast<std::uint8_t>(v >> 8));
  }
  void u32(std::uint32_t v) {
    u16(static_cast<std::uint16_t>(v & 0xFFFF));
    u16(static_cast<std::uint16_t>(v >> 16));
  }
  void u64(std::uint64_t v) {
    u32(static_cast<std::uint32_t>(v & 0xFFFFFFFFu));
    u32(static_cast<std::uint32_t>(v >> 32));
  }
  void str(const std::string& s) {
    if (s.size() > 0xFFFF) throw FormatError("string longer than 65535 bytes");
    u16(static_cast<std::uint16_t>(s.size()));
    out_.insert(out_.end(), s.begin(), s.end());
  }
  void raw(const char* p, std::size_t n) { out_.insert(out_.end(), p, p + n); }
  std::vector<std::uint8_t> take() { return std::move(out_); }

 private:
  std::vector<std::uint8_t> out_;
};

class Reader {
 public:
  explicit Reader(std::span<const std::uint8_t> bytes) : b_(bytes) {}

  void need(std::size_t n) const {
    if (b_.size() - i_ < n) throw FormatError("unexpected end of data at byte " + std::to_string(i_));
  }
  std::uint8_t u8() {
    need(1);
    return b_[i_++];
  }
  std::uint16_t u16() {
    std::uint16_t lo = u8();
    return static_cast<std::uint16_t>(lo | (u8() << 8));
  }
  std::uint32_t u32() {
    std::uint32_t lo = u16();
    return lo | (static_cast<std::uint32_t>(u16()) << 16);
  }
  std::uint64_t u64() {
    std::uint64_t lo = u32();
    return lo | (static_cast<std::uint64_t>(u32()) << 32);
  }
  std::string str() {
    std::size_t n = u16();
    need(n);
    std::string s(reinterpret_cast<const char*>(b_.data() + i_), n);
    i_ += n;
    return s;
  }
  /// Element count that must fit in the remaining bytes at `min_size` each.
  std::size_t count(std::size_t min_size) {
    std::uint32_t n = u32();
    if (min_size && n > (b_.size() - i_) / min_size) {
      throw FormatError("unexpected end of data: section claims " + std::to_string(n) + " entries");
    }
    return n;
  }
  bool done() const { return i_ == b_.size(); }
  std::size_t offset() const { return i_; }

 private:
  std::span<const std::uint8_t> b_;
  std::size_t i_ = 0;
};

bool is_base(TypeKind k) {
  return k == TypeKind::boolean || k == TypeKind::integer || k == TypeKind::real || k == TypeKind::string ||
         k == TypeKind::address;
}

[[noreturn]] void invalid(const std::string& what) { throw FormatError(what); }

}  // namespace

std::optional<OpcodeInfo> opcode_info(std::uint16_t opcode, const Registry& registry) {
  if (opcode < kCoreOpCount) return core_table()[opcode];
  const auto* d = registry.by_opcode(opcode);
  if (!d) return std::nullopt;
  OpcodeInfo info{opcode, d->name, std::vector<OperandRole>(d->arity(), R::in)};
  if (d->returns_value) info.roles.push_back(R::out);
  return info;
}

std::vector<std::uint8_t> encode(const CompiledProgram& cp) {
  Writer w;
  w.raw("PPGX", 4);
  w.u16(cp.version);
  w.str(cp.name);
  w.u32(static_cast<std::uint32_t>(cp.strings.size()));
  for (const auto& s : cp.strings) w.str(s);
  w.u32(static_cast<std::uint32_t>(cp.types.size()));
  for (const auto& t : cp.types) {
    w.u8(static_cast<std::uint8_t>(t.kind));
    w.u16(t.name);
    w.u16(static_cast<std::uint16_t>(t.fields.size()));
    for (const auto& [n, ty] : t.fields) {
      w.u16(n);
      w.u16(ty);
    }
    w.u32(static_cast<std::uint32_t>(t.lo));
    w.u32(static_cast<std::uint32_t>(t.hi));
    w.u16(t.element);
  }
  w.u32(static_cast<std::uint32_t>(cp.constants.size()));
  for (const auto& c : cp.constants) {
    w.u16(c.type);
    TypeKind k = c.type < cp.types.size() ? cp.types[c.type].kind : TypeKind::integer;
    switch (k) {
      case TypeKind::boolean: w.u8(c.boolean ? 1 : 0); break;
      case TypeKind::integer: w.u64(static_cast<std::uint64_t>(c.integer)); break;
      case TypeKind::real: w.u64(c.real_bits); break;
      case TypeKind::string: w.u16(c.string); break;
      default: throw FormatError("constant of non-base type");
    }
  }
  w.u32(static_cast<std::uint32_t>(cp.slots.size()));
  for (const auto& s : cp.slots) {
    w.u16(s.type);
    w.u8(static_cast<std::uint8_t>(s.kind));
    w.u16(s.name);
    w.u16(s.constant);
  }
  w.u32(static_cast<std::uint32_t>(cp.code.size()));
  for (auto word : cp.code) w.u16(word);
  return w.take();
}

CompiledProgram decode(std::span<const std::uint8_t> bytes, const Registry& registry) {
  Reader r(bytes);
  r.need(4);
  char magic[4];
  for (char& c : magic) c = static_cast<char>(r.u8());
  if (std::memcmp(magic, "PPGX", 4) != 0) throw FormatError("bad magic: not a compiled program");
  CompiledProgram cp;
  cp.version = r.u16();
  if (cp.version != kFormatVersion) throw FormatError("unsupported version " + std::to_string(cp.version));
  cp.name = r.str();
  std::size_t n = r.count(2);
  for (std::size_t i = 0; i < n; ++i) cp.strings.push_back(r.str());
  n = r.count(15);
  for (std::size_t i = 0; i < n; ++i) {
    TypeEntry t;
    std::uint8_t kind = r.u8();
    if (kind > static_cast<std::uint8_t>(TypeKind::array)) invalid("type " + std::to_string(i) + ": bad kind");
    t.kind = static_cast<TypeKind>(kind);
    t.name = r.u16();
    std::size_t nf = r.u16();
    for (std::size_t f = 0; f < nf; ++f) {
      std::uint16_t fname = r.u16();
      std::uint16_t ftype = r.u16();
      t.fields.emplace_back(fname, ftype);
    }
    t.lo = static_cast<std::int32_t>(r.u32());
    t.hi = static_cast<std::int32_t>(r.u32());
    t.element = r.u16();
    cp.types.push_back(std::move(t));
  }
  n = r.count(3);
  for (std::size_t i = 0; i < n; ++i) {
    ConstEntry c;
    c.type = r.u16();
    if (c.type >= cp.types.size()) invalid("constant " + std::to_string(i) + ": type index out of range");
    switch (cp.types[c.type].kind) {
      case TypeKind::boolean: {
        std::uint8_t b = r.u8();
        if (b > 1) invalid("constant " + std::to_string(i) + ": bad boolean");
        c.boolean = b == 1;
        break;
      }
      case TypeKind::integer: c.integer = static_cast<std::int64_t>(r.u64()); break;
      case TypeKind::real: c.real_bits = r.u64(); break;
      case TypeKind::string: c.string = r.u16(); break;
      default: invalid("constant " + std::to_string(i) + ": non-base type");
    }
    cp.constants.push_back(c);
  }
  n = r.count(7);
  for (std::size_t i = 0; i < n; ++i) {
    SlotEntry s;
    s.type = r.u16();
    std::uint8_t kind = r.u8();
    if (kind > 2) invalid("slot " + std::to_string(i) + ": bad kind");
    s.kind = static_cast<SlotKind>(kind);
    s.name = r.u16();
    s.constant = r.u16();
    cp.slots.push_back(s);
  }
  n = r.count(2);
  for (std::size_t i = 0; i < n; ++i) cp.code.push_back(r.u16());
  if (!r.done()) invalid("trailing data after code section");
  validate(cp, registry);
  return cp;
}

std::vector<std::size_t> command_starts(const CompiledProgram& cp, const Registry& registry) {
  std::vector<std::size_t> starts;
  std::size_t ip = 0;
  while (ip < cp.code.size()) {
    auto info = opcode_info(cp.code[ip], registry);
    if (!info) invalid("unknown opcode " + std::to_string(cp.code[ip]) + " at word " + std::to_string(ip));
    if (ip + 1 + info->roles.size() > cp.code.size()) {
      invalid("command " + info->mnemonic + " at word " + std::to_string(ip) + " runs past the end of code");
    }
    starts.push_back(ip);
    ip += 1 + info->roles.size();
  }
  return starts;
}

void validate(const CompiledProgram& cp, const Registry& registry) {
  auto str_ok = [&](std::uint16_t i) { return i < cp.strings.size(); };
  if (cp.code.size() > 0xFFFF) invalid("code longer than 65535 words");
  if (cp.slots.size() > 0xFFFF) invalid("more than 65535 slots");

  for (std::size_t i = 0; i < cp.types.size(); ++i) {
    const auto& t = cp.types[i];
    std::string where = "type " + std::to_string(i);
    if (t.name != kNoIndex && !str_ok(t.name)) invalid(where + ": name index out of range");
    if (is_base(t.kind)) {
      if (!t.fields.empty() || t.element != kNoIndex) invalid(where + ": base type with components");
    } else if (t.kind == TypeKind::record) {
      if (t.fields.empty()) invalid(where + ": record without fields");
      for (const auto& [fn, ft] : t.fields) {
        if (!str_ok(fn)) invalid(where + ": field name index out of range");
        if (ft >= i) invalid(where + ": field type index out of range");
      }
    } else {
      if (t.lo > t.hi) invalid(where + ": empty array bounds");
      if (static_cast<std::int64_t>(t.hi) - t.lo + 1 > 0xFFFF) invalid(where + ": array too large");
      if (t.element >= i) invalid(where + ": element type index out of range");
    }
  }
  for (std::size_t i = 0; i < cp.constants.size(); ++i) {
    const auto& c = cp.constants[i];
    std::string where = "constant " + std::to_string(i);
    if (c.type >= cp.types.size()) invalid(where + ": type index out of range");
    auto k = cp.types[c.type].kind;
    if (k == TypeKind::string && !str_ok(c.string)) invalid(where + ": string index out of range");
    if (k != TypeKind::boolean && k != TypeKind::integer && k != TypeKind::real && k != TypeKind::string) {
      invalid(where + ": constant of non-base type");
    }
  }
  for (std::size_t i = 0; i < cp.slots.size(); ++i) {
    const auto& s = cp.slots[i];
    std::string where = "slot " + std::to_string(i);
    if (s.type >= cp.types.size()) invalid(where + ": type index out of range");
    if (cp.types[s.type].kind == TypeKind::address) invalid(where + ": slot of internal type");
    switch (s.kind) {
      case SlotKind::variable:
        if (!str_ok(s.name)) invalid(where + ": variable name index out of range");
        if (s.constant != kNoIndex) invalid(where + ": variable with a constant");
        break;
      case SlotKind::temp:
        if (s.name != kNoIndex || s.constant != kNoIndex) invalid(where + ": temporary with name or constant");
        break;
      case SlotKind::constant:
        if (s.constant >= cp.constants.size()) invalid(where + ": constant index out of range");
        if (cp.constants[s.constant].type != s.type) invalid(where + ": constant type differs from slot type");
        break;
    }
  }

  auto starts = command_starts(cp, registry);
  if (starts.empty()) invalid("empty code");
  switch (static_cast<CoreOp>(cp.code[starts.back()])) {
    case CoreOp::halt:
    case CoreOp::end:
    case CoreOp::jmp: break;
    default: invalid("code does not end with END, HALT or JMP");
  }
  std::set<std::size_t> boundaries(starts.begin(), starts.end());
  for (std::size_t ip : starts) {
    auto info = *opcode_info(cp.code[ip], registry);
    for (std::size_t k = 0; k < info.roles.size(); ++k) {
      std::uint16_t w = cp.code[ip + 1 + k];
      std::string where = info.mnemonic + " at word " + std::to_string(ip) + ", operand " + std::to_string(k + 1);
      switch (info.roles[k]) {
        case R::in:
        case R::in_raw:
          if (w >= cp.slots.size()) invalid(where + ": slot " + std::to_string(w) + " out of range");
          break;
        case R::out:
        case R::inout:
          if (w >= cp.slots.size()) invalid(where + ": slot " + std::to_string(w) + " out of range");
          if (cp.slots[w].kind == SlotKind::constant) invalid(where + ": writes a constant slot");
          break;
        case R::field: {
          std::uint16_t rec = cp.code[ip + 1];
          const auto& t = cp.types[cp.slots[rec].type];
          if (t.kind != TypeKind::record) invalid(where + ": field access on a non-record slot");
          if (w >= t.fields.size()) invalid(where + ": field " + std::to_string(w) + " out of range");
          break;
        }
        case R::target:
          if (!boundaries.count(w)) invalid(where + ": jump target " + std::to_string(w) + " is not a command start");
          break;
      }
    }
  }
}

std::string slot_label(const CompiledProgram& cp, std::size_t slot) {
  if (slot >= cp.slots.size()) return "?" + std::to_string(slot);
  const auto& s = cp.slots[slot];
  switch (s.kind) {
    case SlotKind::variable: return s.name < cp.strings.size() ? cp.strings[s.name] : "?";
    case SlotKind::temp: return "~" + std::to_string(slot);
    case SlotKind::constant: {
      std::string out = "#" + std::to_string(slot);
      if (s.constant >= cp.constants.size()) return out;
      const auto& c = cp.constants[s.constant];
      switch (cp.types[c.type].kind) {
        case TypeKind::boolean: return out + "=" + (c.boolean ? "Да" : "Нет");
        case TypeKind::integer: return out + "=" + std::to_string(c.integer);
        case TypeKind::real: return out + "=" + format_shortest(std::bit_cast<double>(c.real_bits));
        case TypeKind::string:
          return out + "='" + (c.string < cp.strings.size() ? cp.strings[c.string] : std::string("?")) + "'";
        default: return out;
      }
    }
  }
  return "?";
}

std::string disassemble(const CompiledProgram& cp, const Registry& registry) {
  std::string out;
  for (std::size_t ip : command_starts(cp, registry)) {
    auto info = *opcode_info(cp.code[ip], registry);
    std::string line = std::to_string(ip);
    line.insert(0, line.size() < 5 ? 5 - line.size() : 0, ' ');
    line += "  " + info.mnemonic;
    std::string inputs;
    std::string outputs;
    for (std::size_t k = 0; k < info.roles.size(); ++k) {
      std::uint16_t w = cp.code[ip + 1 + k];
      std::string text;
      switch (info.roles[k]) {
        case R::field: {
          const auto& t = cp.types[cp.slots[cp.code[ip + 1]].type];
          text = "." + cp.strings[t.fields[w].first];
          break;
        }
        case R::target: text = "@" + std::to_string(w); break;
        default: text = slot_label(cp, w);
      }
      if (info.roles[k] == R::out) {
        outputs = text;
      } else {
        inputs += (inputs.empty() ? " " : ", ") + text;
      }
    }
    line += inputs;
    if (!outputs.empty()) line += " -> " + outputs;
    out += line + "\n";
  }
  return out;
}

std::vector<TypePtr> materialize_types(const CompiledProgram& cp) {
  const auto& catalog = TypeCatalog::instance();
  std::vector<TypePtr> out;
  out.reserve(cp.types.size());
  auto name_of = [&](std::uint16_t i) { return i < cp.strings.size() ? cp.strings[i] : std::string(); };
  for (const auto& t : cp.types) {
    TypePtr built;
    switch (t.kind) {
      case TypeKind::boolean: built = types::boolean(); break;
      case TypeKind::integer: built = types::integer(); break;
      case TypeKind::real: built = types::real(); break;
      case TypeKind::string: built = types::string(); break;
      case TypeKind::address: built = types::address(); break;
      case TypeKind::record: {
        std::vector<Field> fields;
        for (const auto& [fn, ft] : t.fields) fields.push_back({name_of(fn), out[ft]});
        built = types::make_record(name_of(t.name), std::move(fields));
        break;
      }
      case TypeKind::array:
        built = types::make_array(t.lo, t.hi, out[t.element], name_of(t.name));
        break;
    }
    if (!built->name.empty() && built->is_composite()) {
      if (TypePtr known = catalog.find(built->name); known && types::same(known, built)) built = known;
    }
    out.push_back(built);
  }
  return out;
}

}  // namespace ppg
