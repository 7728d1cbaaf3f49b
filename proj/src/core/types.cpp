#include "types.hpp"

#include "text.hpp"

namespace ppg {

std::optional<std::size_t> TypeDescriptor::field_index(const std::string& field_name) const {
  auto key = name_key(field_name);
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (name_key(fields[i].name) == key) return i;
  }
  return std::nullopt;
}

namespace types {

namespace {
TypePtr base(TypeKind k, const char* name) {
  auto t = std::make_shared<TypeDescriptor>();
  t->kind = k;
  t->name = name;
  return t;
}
}  // namespace

const TypePtr& boolean() {
  static const TypePtr t = base(TypeKind::boolean, "Логическое");
  return t;
}
const TypePtr& integer() {
  static const TypePtr t = base(TypeKind::integer, "Целое");
  return t;
}
const TypePtr& real() {
  static const TypePtr t = base(TypeKind::real, "Вещественное");
  return t;
}
const TypePtr& string() {
  static const TypePtr t = base(TypeKind::string, "Строка");
  return t;
}
const TypePtr& address() {
  static const TypePtr t = base(TypeKind::address, "Адрес");
  return t;
}

TypePtr make_record(std::string name, std::vector<Field> fields) {
  auto t = std::make_shared<TypeDescriptor>();
  t->kind = TypeKind::record;
  t->name = std::move(name);
  t->fields = std::move(fields);
  return t;
}

TypePtr make_array(std::int32_t lo, std::int32_t hi, TypePtr element, std::string name) {
  auto t = std::make_shared<TypeDescriptor>();
  t->kind = TypeKind::array;
  t->name = std::move(name);
  t->lo = lo;
  t->hi = hi;
  t->element = std::move(element);
  return t;
}

bool same(const TypeDescriptor& a, const TypeDescriptor& b) {
  if (&a == &b) return true;
  if (a.kind != b.kind) return false;
  switch (a.kind) {
    case TypeKind::record:
      if (name_key(a.name) != name_key(b.name) || a.fields.size() != b.fields.size()) return false;
      for (std::size_t i = 0; i < a.fields.size(); ++i) {
        if (name_key(a.fields[i].name) != name_key(b.fields[i].name)) return false;
        if (!same(a.fields[i].type, b.fields[i].type)) return false;
      }
      return true;
    case TypeKind::array:
      return a.lo == b.lo && a.hi == b.hi && same(a.element, b.element);
    default:
      return true;
  }
}

bool assignable(const TypePtr& to, const TypePtr& from) {
  if (!to || !from) return false;
  if (to->kind == TypeKind::real && from->kind == TypeKind::integer) return true;
  return same(to, from);
}

std::string display(const TypeDescriptor& t) {
  if (!t.name.empty()) return t.name;
  if (t.kind == TypeKind::array) {
    return "array [" + std::to_string(t.lo) + ".." + std::to_string(t.hi) + "] of " + display(t.element);
  }
  return "<record>";
}

}  // namespace types

const TypeCatalog& TypeCatalog::instance() {
  static const TypeCatalog catalog;
  return catalog;
}

void TypeCatalog::add(const std::string& name, TypePtr t) {
  by_key_[name_key(name)] = std::move(t);
  order_.push_back(name);
}

TypeCatalog::TypeCatalog() {
  using types::make_record;
  const auto& r = types::real();
  const auto& i = types::integer();

  add("Логическое", types::boolean());
  add("Целое", i);
  add("Вещественное", r);
  add("Строка", types::string());
  add("Адрес", types::address());

  length_ = make_record("Длина", {{"R", r}});
  point_ = make_record("Точка", {{"X", r}, {"Y", r}});
  segment_ = make_record("Отрезок", {{"Начало", point_}, {"Конец", point_}});
  circle_ = make_record("Окружность", {{"Центр", point_}, {"R", r}});
  arc_ = make_record("Дуга", {{"Окр_ть", circle_}, {"Угол1", r}, {"Угол2", r}});
  corners_ = types::make_array(0, 15, point_, "Массив углов");
  polyline_ = make_record("Ломаная", {{"Нотр", i}, {"Углы", corners_}});
  ray_ = make_record("Луч", {{"Начало", point_}, {"Угол", r}});
  text_ = make_record("Текст", {{"Сноска", point_}, {"ЛучТекста", ray_}, {"_АдрТекста", types::address()}});
  linear_dimension_ = make_record(
      "Линейный размер", {{"База", segment_}, {"Начало", point_}, {"ЛучТекста", ray_}, {"Текст", types::string()}});
  attribute_ = make_record("Атрибут", {{"Слой", i}, {"Цвет", i}, {"Тип_Линии", i}, {"Сист_Отсчета", i}});

  add("Длина", length_);
  add("Точка", point_);
  add("Отрезок", segment_);
  add("Окружность", circle_);
  add("Дуга", arc_);
  add("Массив углов", corners_);
  add("Ломаная", polyline_);
  add("Луч", ray_);
  add("Текст", text_);
  add("Линейный размер", linear_dimension_);
  add("Атрибут", attribute_);
}

TypePtr TypeCatalog::find(const std::string& name) const {
  auto it = by_key_.find(name_key(name));
  return it == by_key_.end() ? nullptr : it->second;
}

}  // namespace ppg
