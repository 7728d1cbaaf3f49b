#include "vm.hpp"

#include <bit>
#include <charconv>
#include <cstdlib>
#include <cstring>
#include <variant>

#include "builtins.hpp"
#include "text.hpp"

namespace ppg {

Limits Limits::from_environment() {
  Limits l;
  if (const char* env = std::getenv("PGEN_STEP_LIMIT")) {
    std::uint64_t v = 0;
    auto [ptr, ec] = std::from_chars(env, env + std::strlen(env), v);
    if (ec == std::errc() && *ptr == '\0' && v > 0) l.max_steps = v;
  }
  return l;
}

const char* to_string(RunStatus s) {
  switch (s) {
    case RunStatus::completed: return "completed";
    case RunStatus::halted: return "halted-by-exit";
    case RunStatus::error: return "error";
  }
  return "error";
}

namespace {

/// Restores the canvas settings and element limit when a run ends.
class SettingsGuard {
 public:
  SettingsGuard(Canvas& canvas, std::size_t element_limit)
      : canvas_(canvas), saved_(canvas.snapshot_settings()) {
    canvas_.set_element_limit(element_limit);
  }
  ~SettingsGuard() {
    canvas_.restore_settings(saved_);
    canvas_.set_element_limit(100'000);
  }
  SettingsGuard(const SettingsGuard&) = delete;
  SettingsGuard& operator=(const SettingsGuard&) = delete;

 private:
  Canvas& canvas_;
  GlobalSettings saved_;
};

class Machine : public VariableBinder {
 public:
  Machine(const CompiledProgram& cp, const Registry& registry, Canvas& canvas, InteractionProvider& interactor,
          const Limits& limits)
      : cp_(cp), registry_(registry), limits_(limits), env_{canvas, interactor, dialog_, *this} {
    types_ = materialize_types(cp);
    frame_.reserve(cp.slots.size());
    for (const auto& s : cp.slots) {
      if (s.kind == SlotKind::constant) {
        frame_.push_back(constant_value(cp.constants[s.constant]));
      } else {
        frame_.push_back(Value::undefined(types_[s.type]));
      }
    }
  }

  Value* find_variable(const std::string& name) override {
    auto key = name_key(name);
    for (std::size_t i = 0; i < cp_.slots.size(); ++i) {
      const auto& s = cp_.slots[i];
      if (s.kind == SlotKind::variable && name_key(cp_.strings[s.name]) == key) return &frame_[i];
    }
    return nullptr;
  }

  RunOutcome execute() {
    RunOutcome out;
    std::size_t ip = 0;
    std::string op_name;
    try {
      while (true) {
        if (++out.steps > limits_.max_steps) {
          --out.steps;
          op_name = mnemonic(cp_.code[ip]);
          fail(ErrorKind::step_limit, "step limit of " + std::to_string(limits_.max_steps) + " commands exceeded");
        }
        std::uint16_t opcode = cp_.code[ip];
        op_name.clear();
        if (opcode >= kCoreOpCount) {
          ip = call_builtin(ip, op_name);
          continue;
        }
        const std::uint16_t* w = &cp_.code[ip + 1];
        switch (static_cast<CoreOp>(opcode)) {
          case CoreOp::halt:
            out.status = RunStatus::halted;
            return finish(std::move(out));
          case CoreOp::end:
            out.status = RunStatus::completed;
            return finish(std::move(out));
          case CoreOp::mov:
            store(w[1], read(w[0], "MOV"));
            ip += 3;
            break;
          case CoreOp::jmp:
            ip = w[0];
            break;
          case CoreOp::jmpf: {
            const Value& c = read(w[0], "JMPF");
            if (c.type()->kind != TypeKind::boolean) {
              fail(ErrorKind::type_violation, "condition '" + slot_label(cp_, w[0]) + "' is not Логическое");
            }
            ip = c.as_bool() ? ip + 3 : w[1];
            break;
          }
          case CoreOp::getf: {
            const Value& field = record_field(w[0], w[1]);
            if (!field.is_defined()) {
              fail(ErrorKind::undefined_operand, "field '" + field_name(w[0], w[1]) + "' of '" +
                                                     slot_label(cp_, w[0]) + "' is undefined");
            }
            store(w[2], Value(field));
            ip += 4;
            break;
          }
          case CoreOp::setf:
            assign_component(record_field(w[0], w[1]), read(w[2], "SETF"));
            ip += 4;
            break;
          case CoreOp::geti: {
            const Value& elem = element(w[0], w[1], "GETI");
            if (!elem.is_defined()) {
              fail(ErrorKind::undefined_operand, "element [" + std::to_string(frame_[w[1]].as_int()) + "] of '" +
                                                     slot_label(cp_, w[0]) + "' is undefined");
            }
            store(w[2], Value(elem));
            ip += 4;
            break;
          }
          case CoreOp::seti:
            assign_component(element(w[0], w[1], "SETI"), read(w[2], "SETI"));
            ip += 4;
            break;
          case CoreOp::ldfu:
            frame_[w[2]] = record_field(w[0], w[1]);
            ip += 4;
            break;
          case CoreOp::ldiu:
            frame_[w[2]] = element(w[0], w[1], "LDIU");
            ip += 4;
            break;
          case CoreOp::stfu:
            record_field(w[0], w[1]) = frame_[w[2]];
            ip += 4;
            break;
          case CoreOp::stiu:
            element(w[0], w[1], "STIU") = frame_[w[2]];
            ip += 4;
            break;
        }
      }
    } catch (RuntimeError& e) {
      if (!e.located()) e.locate(op_name.empty() ? mnemonic(cp_.code[ip]) : op_name, static_cast<std::uint32_t>(ip));
      out.status = RunStatus::error;
      out.error = e;
    } catch (const std::bad_variant_access&) {
      RuntimeError e(ErrorKind::type_violation, "operand has an unexpected representation");
      e.locate(mnemonic(cp_.code[ip]), static_cast<std::uint32_t>(ip));
      out.status = RunStatus::error;
      out.error = e;
    }
    return finish(std::move(out));
  }

 private:
  Value constant_value(const ConstEntry& c) const {
    switch (cp_.types[c.type].kind) {
      case TypeKind::boolean: return Value::of_bool(c.boolean);
      case TypeKind::integer: return Value::of_int(c.integer);
      case TypeKind::real: return Value::of_real(std::bit_cast<double>(c.real_bits));
      default: return Value::of_string(cp_.strings[c.string]);
    }
  }

  std::string mnemonic(std::uint16_t opcode) const {
    auto info = opcode_info(opcode, registry_);
    return info ? info->mnemonic : "?";
  }

  RunOutcome finish(RunOutcome out) {
    out.batch = env_.canvas.batch();
    for (std::size_t i = 0; i < cp_.slots.size(); ++i) {
      if (cp_.slots[i].kind == SlotKind::variable) out.variables.emplace_back(cp_.strings[cp_.slots[i].name], frame_[i]);
    }
    return out;
  }

  /// Input operand: must be defined.
  const Value& read(std::uint16_t slot, const std::string& op) const {
    const Value& v = frame_[slot];
    if (!v.is_defined()) {
      fail(ErrorKind::undefined_operand, "operand '" + slot_label(cp_, slot) + "' of '" + op + "' is undefined");
    }
    return v;
  }

  void store(std::uint16_t slot, const Value& v) {
    const TypePtr& t = types_[cp_.slots[slot].type];
    if (!types::assignable(t, v.type())) {
      fail(ErrorKind::type_violation, "cannot store " + types::display(v.type()) + " into '" + slot_label(cp_, slot) +
                                          "' of type " + types::display(t));
    }
    frame_[slot] = v.coerced_to(t);
  }

  static void assign_component(Value& target, const Value& v) {
    const TypePtr& t = target.type();
    if (!types::assignable(t, v.type())) {
      fail(ErrorKind::type_violation, "cannot store " + types::display(v.type()) + " into a component of type " +
                                          types::display(t));
    }
    target = v.coerced_to(t);
  }

  Value& record_field(std::uint16_t slot, std::uint16_t field) {
    Value& rec = frame_[slot];
    if (rec.type()->kind != TypeKind::record || field >= rec.items().size()) {
      fail(ErrorKind::type_violation, "'" + slot_label(cp_, slot) + "' has no field #" + std::to_string(field));
    }
    return rec.items()[field];
  }

  std::string field_name(std::uint16_t slot, std::uint16_t field) const {
    return frame_[slot].type()->fields[field].name;
  }

  Value& element(std::uint16_t slot, std::uint16_t index_slot, const char* op) {
    Value& arr = frame_[slot];
    if (arr.type()->kind != TypeKind::array) {
      fail(ErrorKind::type_violation, "'" + slot_label(cp_, slot) + "' is not an array");
    }
    const Value& idx = read(index_slot, op);
    if (idx.type()->kind != TypeKind::integer) {
      fail(ErrorKind::type_violation, "index '" + slot_label(cp_, index_slot) + "' is not Целое");
    }
    std::int64_t i = idx.as_int();
    const auto& t = *arr.type();
    if (i < t.lo || i > t.hi) {
      fail(ErrorKind::range_violation, "index " + std::to_string(i) + " of '" + slot_label(cp_, slot) + "' outside " +
                                           std::to_string(t.lo) + ".." + std::to_string(t.hi));
    }
    return arr.items()[static_cast<std::size_t>(i - t.lo)];
  }

  std::size_t call_builtin(std::size_t ip, std::string& op_name) {
    const BuiltinDescriptor* d = registry_.by_opcode(cp_.code[ip]);
    op_name = d->name;
    std::size_t n = d->arity();
    args_.clear();
    for (std::size_t i = 0; i < n; ++i) {
      std::uint16_t slot = cp_.code[ip + 1 + i];
      const Value& v = frame_[slot];
      if (!v.is_defined()) {
        fail(ErrorKind::undefined_operand, "argument " + std::to_string(i + 1) + " ('" + slot_label(cp_, slot) +
                                               "') of '" + d->name + "' is undefined");
      }
      const auto& p = d->params[i];
      bool ok = p.cls == ParamClass::any || (p.cls == ParamClass::number ? v.type()->is_numeric()
                                                                          : types::assignable(p.type, v.type()));
      if (!ok) {
        fail(ErrorKind::type_violation, "argument " + std::to_string(i + 1) + " ('" + slot_label(cp_, slot) +
                                            "') of '" + d->name + "' has type " + types::display(v.type()));
      }
      args_.push_back(&v);
    }
    CallArgs call(std::span<const Value* const>(args_.data(), args_.size()), env_);
    Value result = d->execute(call);
    if (d->returns_value) {
      std::uint16_t out = cp_.code[ip + 1 + n];
      if (!result.is_defined()) fail(ErrorKind::undefined_operand, "'" + d->name + "' produced no value");
      store(out, result);
      return ip + 2 + n;
    }
    return ip + 1 + n;
  }

  const CompiledProgram& cp_;
  const Registry& registry_;
  Limits limits_;
  DialogState dialog_;
  ExecEnv env_;
  std::vector<TypePtr> types_;
  std::vector<Value> frame_;
  std::vector<const Value*> args_;
};

}  // namespace

RunOutcome run(const CompiledProgram& cp, const Registry& registry, Canvas& canvas, InteractionProvider& interactor,
               const Limits& limits) {
  validate(cp, registry);
  SettingsGuard guard(canvas, limits.max_elements);
  canvas.begin_batch();
  Machine m(cp, registry, canvas, interactor, limits);
  return m.execute();
}

}  // namespace ppg
