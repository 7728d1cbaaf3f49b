#pragma once

#include <cstdint>
#include <string>
#include <variant>
#include <vector>

#include "types.hpp"

namespace ppg {

class Value;

/// Record fields or array elements, in declaration / index order.
struct Composite {
  std::vector<Value> items;
  friend bool operator==(const Composite& a, const Composite& b);
};

/// Runtime cell: a type tag plus a payload that is absent while the value is
/// undefined. Composite values always carry their components; they count as
/// defined only when every component is.
class Value {
 public:
  Value() = default;

  /// An undefined value of type `t` (composites get undefined components).
  static Value undefined(TypePtr t);
  static Value of_bool(bool b);
  static Value of_int(std::int64_t i);
  static Value of_real(double d);
  static Value of_string(std::string s);

  const TypePtr& type() const { return type_; }
  bool is_defined() const;

  bool as_bool() const { return std::get<bool>(payload_); }
  std::int64_t as_int() const { return std::get<std::int64_t>(payload_); }
  /// Reads Целое or Вещественное as a double.
  double as_real() const;
  const std::string& as_string() const { return std::get<std::string>(payload_); }

  std::vector<Value>& items() { return std::get<Composite>(payload_).items; }
  const std::vector<Value>& items() const { return std::get<Composite>(payload_).items; }

  /// Converts to `target` (identity or Целое→Вещественное). Precondition:
  /// types::assignable(target, type()).
  Value coerced_to(const TypePtr& target) const;

  friend bool operator==(const Value& a, const Value& b);

 private:
  TypePtr type_;
  std::variant<std::monostate, bool, std::int64_t, double, std::string, Composite> payload_;
};

/// Debug rendering, e.g. `{Слой=0, Цвет=0, ...}` or `<не определено>`.
std::string to_display(const Value& v);

}  // namespace ppg
