#include "value.hpp"

#include <bit>

#include "text.hpp"

namespace ppg {

Value Value::undefined(TypePtr t) {
  Value v;
  v.type_ = std::move(t);
  if (v.type_ && v.type_->is_composite()) {
    Composite c;
    if (v.type_->kind == TypeKind::record) {
      for (const auto& f : v.type_->fields) c.items.push_back(undefined(f.type));
    } else {
      c.items.assign(v.type_->length(), undefined(v.type_->element));
    }
    v.payload_ = std::move(c);
  }
  return v;
}

Value Value::of_bool(bool b) {
  Value v;
  v.type_ = types::boolean();
  v.payload_ = b;
  return v;
}

Value Value::of_int(std::int64_t i) {
  Value v;
  v.type_ = types::integer();
  v.payload_ = i;
  return v;
}

Value Value::of_real(double d) {
  Value v;
  v.type_ = types::real();
  v.payload_ = d;
  return v;
}

Value Value::of_string(std::string s) {
  Value v;
  v.type_ = types::string();
  v.payload_ = std::move(s);
  return v;
}

bool Value::is_defined() const {
  if (std::holds_alternative<std::monostate>(payload_)) return false;
  if (const auto* c = std::get_if<Composite>(&payload_)) {
    for (const auto& item : c->items) {
      if (!item.is_defined()) return false;
    }
  }
  return true;
}

double Value::as_real() const {
  if (const auto* i = std::get_if<std::int64_t>(&payload_)) return static_cast<double>(*i);
  return std::get<double>(payload_);
}

Value Value::coerced_to(const TypePtr& target) const {
  if (target && target->kind == TypeKind::real && std::holds_alternative<std::int64_t>(payload_)) {
    return of_real(static_cast<double>(as_int()));
  }
  if (target && target->kind == TypeKind::real && std::holds_alternative<std::monostate>(payload_)) {
    return undefined(target);
  }
  if (target && target->is_composite() && std::holds_alternative<Composite>(payload_)) {
    Value v;
    v.type_ = target;
    Composite c;
    const auto& src = items();
    for (std::size_t i = 0; i < src.size(); ++i) {
      const TypePtr& et = target->kind == TypeKind::record ? target->fields[i].type : target->element;
      c.items.push_back(src[i].coerced_to(et));
    }
    v.payload_ = std::move(c);
    return v;
  }
  Value v = *this;
  if (target) v.type_ = target;
  return v;
}

bool operator==(const Value& a, const Value& b) {
  if (!types::same(a.type_, b.type_)) return false;
  if (a.payload_.index() != b.payload_.index()) return false;
  if (const auto* d = std::get_if<double>(&a.payload_)) {
    return std::bit_cast<std::uint64_t>(*d) == std::bit_cast<std::uint64_t>(std::get<double>(b.payload_));
  }
  if (const auto* c = std::get_if<Composite>(&a.payload_)) return c->items == std::get<Composite>(b.payload_).items;
  return a.payload_ == b.payload_;
}

bool operator==(const Composite& a, const Composite& b) { return a.items == b.items; }

std::string to_display(const Value& v) {
  if (!v.type()) return "<нет>";
  if (v.type()->is_composite()) {
    std::string out = "{";
    const auto& items = v.items();
    for (std::size_t i = 0; i < items.size(); ++i) {
      if (i) out += ", ";
      if (v.type()->kind == TypeKind::record) out += v.type()->fields[i].name + "=";
      out += to_display(items[i]);
    }
    return out + "}";
  }
  if (!v.is_defined()) return "<не определено>";
  switch (v.type()->kind) {
    case TypeKind::boolean: return v.as_bool() ? "Да" : "Нет";
    case TypeKind::integer: return std::to_string(v.as_int());
    case TypeKind::real: return format_shortest(v.as_real());
    case TypeKind::string: return "'" + v.as_string() + "'";
    default: return "<адрес>";
  }
}

}  // namespace ppg
