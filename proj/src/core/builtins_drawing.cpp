// Drawing operations: attributes, elements, dimension and text settings.

#include <limits>

#include "builtins.hpp"
#include "canvas.hpp"
#include "errors.hpp"

namespace ppg {

namespace {

Attribute to_attribute(const Value& v) {
  const auto& f = v.items();
  return {f[0].as_int(), f[1].as_int(), f[2].as_int(), f[3].as_int()};
}

Value from_attribute(const Attribute& a) {
  Value v = Value::undefined(TypeCatalog::instance().attribute());
  auto& f = v.items();
  f[0] = Value::of_int(a.layer);
  f[1] = Value::of_int(a.color);
  f[2] = Value::of_int(a.line_type);
  f[3] = Value::of_int(a.units);
  return v;
}

Point to_point(const Value& v) { return {v.items()[0].as_real(), v.items()[1].as_real()}; }

Point point_at(const CallArgs& a, std::size_t i) { return {a.real(i), a.real(i + 1)}; }

Canvas& canvas(const CallArgs& a) { return a.env().canvas; }

BuiltinDescriptor procedure(std::string name, std::vector<ParamSpec> params, ExecuteFn fn) {
  BuiltinDescriptor d;
  d.name = std::move(name);
  d.params = std::move(params);
  d.execute = std::move(fn);
  return d;
}

BuiltinDescriptor function(std::string name, std::vector<ParamSpec> params, TypePtr result, ExecuteFn fn) {
  auto d = procedure(std::move(name), std::move(params), std::move(fn));
  d.result = std::move(result);
  d.returns_value = true;
  return d;
}

Value id_value(int id) { return Value::of_int(id); }

}  // namespace

void register_drawing_builtins(Registry& r) {
  const auto& cat = TypeCatalog::instance();
  const auto& R = types::real();
  const auto& I = types::integer();
  const auto& S = types::string();
  const auto& B = types::boolean();
  const auto A = param(cat.attribute());
  const auto P = param(cat.point());

  {
    auto d = function("Глоб_Атр", {}, cat.attribute(),
                      [](const CallArgs& a) { return from_attribute(canvas(a).global_attribute()); });
    d.fixity = Fixity::bare;
    r.register_builtin(std::move(d));
  }
  r.register_builtin(procedure("Уст_Атр", {A}, [](const CallArgs& a) {
    canvas(a).set_attribute(to_attribute(a[0]));
    return Value();
  }));

  r.register_builtin(function("Отрез", {A, param(R), param(R), param(R), param(R)}, I, [](const CallArgs& a) {
    return id_value(canvas(a).add_segment(to_attribute(a[0]), point_at(a, 1), point_at(a, 3)));
  }));
  r.register_builtin(function("Прямоуг", {A, param(R), param(R), param(R), param(R)}, I, [](const CallArgs& a) {
    return id_value(canvas(a).add_rectangle(to_attribute(a[0]), point_at(a, 1), a.real(3), a.real(4)));
  }));
  r.register_builtin(function("ДугаОкружн", {A, param(R), param(R), param(R), param(R), param(R)}, I,
                              [](const CallArgs& a) {
                                return id_value(canvas(a).add_arc(to_attribute(a[0]), point_at(a, 1), a.real(3),
                                                                  a.real(4), a.real(5)));
                              }));
  r.register_builtin(function("ДобЛоманую", {A, param(cat.polyline())}, I, [](const CallArgs& a) {
    const auto& f = a[1].items();
    std::int64_t n = f[0].as_int();
    if (n < 0 || n > 16) fail(ErrorKind::range_violation, "Нотр " + std::to_string(n) + " outside 0..16");
    std::vector<Point> points;
    for (std::int64_t i = 0; i < n; ++i) points.push_back(to_point(f[1].items()[static_cast<std::size_t>(i)]));
    return id_value(canvas(a).add_polyline(to_attribute(a[0]), std::move(points)));
  }));

  r.register_builtin(procedure("ЛРазмСноски", {param(B)}, [](const CallArgs& a) {
    canvas(a).set_dim_leaders(a.boolean(0));
    return Value();
  }));
  r.register_builtin(procedure("ЛРазмТочн", {param(I)}, [](const CallArgs& a) {
    canvas(a).set_dim_precision(a.integer(0));
    return Value();
  }));
  r.register_builtin(procedure("ЛРазмВынос", {param(R), param(R), param(R)}, [](const CallArgs& a) {
    canvas(a).set_dim_extension(a.real(0), a.real(1), a.real(2));
    return Value();
  }));
  r.register_builtin(procedure("ЛРазмШрифт", {param(R), param(R), param(R)}, [](const CallArgs& a) {
    canvas(a).set_dim_font(a.real(0), a.real(1), a.real(2));
    return Value();
  }));
  r.register_builtin(procedure("ЛРазмСтрелки", {param(R), param(R), param(R), param(R)}, [](const CallArgs& a) {
    canvas(a).set_dim_arrows(a.real(0), a.real(1), a.real(2), a.real(3));
    return Value();
  }));
  r.register_builtin(function("ГорРазмер1", {A, P, P, param(R)}, I, [](const CallArgs& a) {
    return id_value(canvas(a).add_linear_dim(to_attribute(a[0]), Orientation::horizontal, to_point(a[1]),
                                             to_point(a[2]), a.real(3)));
  }));
  r.register_builtin(function("ВерРазмер1", {A, P, P, param(R)}, I, [](const CallArgs& a) {
    return id_value(canvas(a).add_linear_dim(to_attribute(a[0]), Orientation::vertical, to_point(a[1]),
                                             to_point(a[2]), a.real(3)));
  }));
  // Returns the id of the horizontal dimension; the vertical one follows it.
  r.register_builtin(function("РамкаРазм", {A, param(R), param(R), param(R), param(R), param(R)}, I,
                              [](const CallArgs& a) {
                                auto ids = canvas(a).add_dim_frame(to_attribute(a[0]), point_at(a, 1), a.real(3),
                                                                   a.real(4), a.real(5));
                                return id_value(ids.first);
                              }));

  r.register_builtin(procedure("ТекстСноска", {param(B)}, [](const CallArgs& a) {
    canvas(a).set_text_leader(a.boolean(0));
    return Value();
  }));
  r.register_builtin(procedure("ТекстШрифт", {param(R), param(R), param(R), param(R)}, [](const CallArgs& a) {
    canvas(a).set_text_font(a.real(0), a.real(1), a.real(2), a.real(3));
    return Value();
  }));
  r.register_builtin(function("ДлинаСтроки", {param(S)}, R,
                              [](const CallArgs& a) { return Value::of_real(canvas(a).string_width(a.str(0))); }));
  r.register_builtin(procedure("НачатьТекст", {param(S)}, [](const CallArgs& a) {
    canvas(a).begin_text(a.str(0));
    return Value();
  }));
  r.register_builtin(procedure("ДобСтроку", {param(S)}, [](const CallArgs& a) {
    canvas(a).append_line(a.str(0));
    return Value();
  }));
  r.register_builtin(function("ПоместитьТекст", {A, param(R), param(R)}, I, [](const CallArgs& a) {
    return id_value(canvas(a).commit_text(to_attribute(a[0]), point_at(a, 1)));
  }));

  r.register_builtin(function("ОтмВысоты", {A, P, param(S)}, I, [](const CallArgs& a) {
    return id_value(canvas(a).add_height_mark(to_attribute(a[0]), to_point(a[1]), a.str(2)));
  }));
  r.register_builtin(function("ОбрывТрубы", {A, P, param(R), param(R)}, I, [](const CallArgs& a) {
    return id_value(canvas(a).add_pipe_break(to_attribute(a[0]), to_point(a[1]), a.real(2), a.real(3)));
  }));
  r.register_builtin(function("ОбрывПоДуге", {A, P, P, param(R)}, I, [](const CallArgs& a) {
    return id_value(canvas(a).add_arc_break(to_attribute(a[0]), to_point(a[1]), to_point(a[2]), a.real(3)));
  }));
  r.register_builtin(procedure("УбратьИзЧерт", {param(I)}, [](const CallArgs& a) {
    std::int64_t id = a.integer(0);
    if (id < 1 || id > std::numeric_limits<int>::max()) {
      fail(ErrorKind::range_violation, "no element with id " + std::to_string(id));
    }
    canvas(a).remove_element(static_cast<int>(id));
    return Value();
  }));
}

}  // namespace ppg
