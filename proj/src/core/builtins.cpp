#include "builtins.hpp"

#include <stdexcept>

#include "errors.hpp"
#include "text.hpp"

namespace ppg {

const char* to_string(ErrorKind k) {
  switch (k) {
    case ErrorKind::undefined_operand: return "undefined-operand";
    case ErrorKind::type_violation: return "type-violation";
    case ErrorKind::range_violation: return "range-violation";
    case ErrorKind::division_by_zero: return "division-by-zero";
    case ErrorKind::domain_error: return "domain-error";
    case ErrorKind::step_limit: return "step-limit";
    case ErrorKind::interaction_abort: return "interaction-abort";
  }
  return "error";
}

std::string RuntimeError::describe() const {
  std::string out = to_string(kind_);
  if (located_) out += " in '" + operation_ + "' at word " + std::to_string(position_);
  return out + ": " + detail_;
}

TypePtr BuiltinDescriptor::check(std::span<const TypePtr> args, std::string& error) const {
  if (args.size() != params.size()) {
    error = "'" + name + "' expects " + std::to_string(params.size()) + " argument(s), got " +
            std::to_string(args.size());
    return nullptr;
  }
  for (std::size_t i = 0; i < args.size(); ++i) {
    const auto& p = params[i];
    const auto& a = args[i];
    bool ok = true;
    switch (p.cls) {
      case ParamClass::exact: ok = types::assignable(p.type, a); break;
      case ParamClass::number: ok = a && a->is_numeric(); break;
      case ParamClass::any: ok = a != nullptr; break;
    }
    if (!ok) {
      error = "argument " + std::to_string(i + 1) + " of '" + name + "': expected " +
              (p.cls == ParamClass::number ? std::string("number") : types::display(p.type)) + ", got " +
              types::display(a);
      return nullptr;
    }
  }
  if (resolve) return resolve(args, error);
  return result;
}

const BuiltinDescriptor& Registry::register_builtin(BuiltinDescriptor desc) {
  if (desc.name.empty()) throw std::invalid_argument("builtin without a name");
  if (!desc.execute) throw std::invalid_argument("builtin '" + desc.name + "' has no handler");
  if (desc.result) desc.returns_value = true;
  if (desc.opcode == 0) {
    while (by_opcode_.count(next_opcode_)) ++next_opcode_;
    desc.opcode = next_opcode_++;
  }
  if (desc.opcode < kFirstBuiltinOpcode) {
    throw std::invalid_argument("opcode " + std::to_string(desc.opcode) + " is reserved for core operations");
  }
  if (by_opcode_.count(desc.opcode)) {
    throw std::invalid_argument("duplicate opcode " + std::to_string(desc.opcode) + " for '" + desc.name + "'");
  }
  auto key = name_key(desc.name);
  auto& index = desc.fixity == Fixity::prefix ? prefix_by_name_ : by_name_;
  if (index.count(key) || (desc.fixity != Fixity::prefix && constant_by_name_.count(key))) {
    throw std::invalid_argument("duplicate builtin '" + desc.name + "'");
  }
  std::size_t slot = descriptors_.size();
  descriptors_.push_back(std::make_shared<const BuiltinDescriptor>(std::move(desc)));
  const auto& stored = *descriptors_.back();
  index[key] = slot;
  by_opcode_[stored.opcode] = slot;
  return stored;
}

void Registry::register_constant(std::string name, Value value) {
  auto key = name_key(name);
  if (constant_by_name_.count(key) || by_name_.count(key)) {
    throw std::invalid_argument("duplicate constant '" + name + "'");
  }
  constant_by_name_[key] = constants_.size();
  constants_.push_back({std::move(name), std::move(value)});
}

const BuiltinDescriptor* Registry::lookup(const std::string& name) const {
  auto it = by_name_.find(name_key(name));
  return it == by_name_.end() ? nullptr : descriptors_[it->second].get();
}

const BuiltinDescriptor* Registry::lookup_prefix(const std::string& name) const {
  auto it = prefix_by_name_.find(name_key(name));
  return it == prefix_by_name_.end() ? nullptr : descriptors_[it->second].get();
}

const BuiltinDescriptor* Registry::by_opcode(std::uint16_t opcode) const {
  auto it = by_opcode_.find(opcode);
  return it == by_opcode_.end() ? nullptr : descriptors_[it->second].get();
}

const BuiltinConstant* Registry::constant(const std::string& name) const {
  auto it = constant_by_name_.find(name_key(name));
  return it == constant_by_name_.end() ? nullptr : &constants_[it->second];
}

bool Registry::is_word_operator(const std::string& name) const {
  if (auto d = lookup(name); d && d->fixity == Fixity::infix) return true;
  return lookup_prefix(name) != nullptr;
}

std::vector<const BuiltinDescriptor*> Registry::all() const {
  std::vector<const BuiltinDescriptor*> out;
  out.reserve(descriptors_.size());
  for (const auto& d : descriptors_) out.push_back(d.get());
  return out;
}

const Registry& Registry::standard() {
  static const Registry registry = [] {
    Registry r;
    register_operator_builtins(r);
    register_math_builtins(r);
    register_drawing_builtins(r);
    register_dialog_builtins(r);
    register_constants(r);
    return r;
  }();
  return registry;
}

}  // namespace ppg
