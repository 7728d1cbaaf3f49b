#pragma once

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <vector>

namespace ppg {

enum class TypeKind : std::uint8_t { boolean = 0, integer = 1, real = 2, string = 3, address = 4, record = 5, array = 6 };

struct TypeDescriptor;
using TypePtr = std::shared_ptr<const TypeDescriptor>;

struct Field {
  std::string name;
  TypePtr type;
};

/// A language type. Records are identified by name and layout; arrays
/// structurally (bounds and element type).
struct TypeDescriptor {
  TypeKind kind = TypeKind::integer;
  std::string name;            // records and named aliases; empty for anonymous arrays
  std::vector<Field> fields;   // record
  std::int32_t lo = 0;         // array
  std::int32_t hi = -1;        // array
  TypePtr element;             // array

  bool is_numeric() const { return kind == TypeKind::integer || kind == TypeKind::real; }
  bool is_composite() const { return kind == TypeKind::record || kind == TypeKind::array; }
  std::size_t length() const { return kind == TypeKind::array ? static_cast<std::size_t>(hi - lo + 1) : fields.size(); }
  std::optional<std::size_t> field_index(const std::string& field_name) const;
};

namespace types {

const TypePtr& boolean();
const TypePtr& integer();
const TypePtr& real();
const TypePtr& string();
const TypePtr& address();

TypePtr make_record(std::string name, std::vector<Field> fields);
TypePtr make_array(std::int32_t lo, std::int32_t hi, TypePtr element, std::string name = {});

/// Identity used for assignment and operand checks.
bool same(const TypeDescriptor& a, const TypeDescriptor& b);
inline bool same(const TypePtr& a, const TypePtr& b) { return a == b || (a && b && same(*a, *b)); }

/// `from` may be stored into `to`: identical, or Целое into Вещественное.
bool assignable(const TypePtr& to, const TypePtr& from);

/// Human-readable name used in messages.
std::string display(const TypeDescriptor& t);
inline std::string display(const TypePtr& t) { return t ? display(*t) : std::string("<нет>"); }

}  // namespace types

/// The fixed set of built-in base and composite types, keyed by name_key.
class TypeCatalog {
 public:
  static const TypeCatalog& instance();

  TypePtr find(const std::string& name) const;
  const std::vector<std::string>& names() const { return order_; }

  const TypePtr& length() const { return length_; }
  const TypePtr& point() const { return point_; }
  const TypePtr& segment() const { return segment_; }
  const TypePtr& circle() const { return circle_; }
  const TypePtr& arc() const { return arc_; }
  const TypePtr& corners() const { return corners_; }
  const TypePtr& polyline() const { return polyline_; }
  const TypePtr& ray() const { return ray_; }
  const TypePtr& text() const { return text_; }
  const TypePtr& linear_dimension() const { return linear_dimension_; }
  const TypePtr& attribute() const { return attribute_; }

 private:
  TypeCatalog();
  void add(const std::string& name, TypePtr t);

  std::map<std::string, TypePtr> by_key_;
  std::vector<std::string> order_;
  TypePtr length_, point_, segment_, circle_, arc_, corners_, polyline_, ray_, text_, linear_dimension_, attribute_;
};

}  // namespace ppg
