// Arithmetic, logical, comparison, string and conversion operations.

#include <charconv>
#include <cmath>
#include <limits>
#include <numbers>

#include "builtins.hpp"
#include "errors.hpp"
#include "text.hpp"

namespace ppg {

namespace {

bool both_int(const CallArgs& a) {
  return a[0].type()->kind == TypeKind::integer && a[1].type()->kind == TypeKind::integer;
}

TypePtr numeric_result(std::span<const TypePtr> args, std::string&) {
  for (const auto& t : args) {
    if (t->kind == TypeKind::real) return types::real();
  }
  return types::integer();
}

Value checked_real(const char* op, double v) {
  if (!std::isfinite(v)) fail(ErrorKind::domain_error, std::string("result of ") + op + " is not a finite number");
  return Value::of_real(v);
}

void require_kind(const CallArgs& a, std::size_t i, TypeKind k, const char* what) {
  if (a[i].type()->kind != k) {
    fail(ErrorKind::type_violation, "operand " + std::to_string(i + 1) + " must be " + what + ", got " +
                                        types::display(a[i].type()));
  }
}

void require_numeric(const CallArgs& a, std::size_t i) {
  if (!a[i].type()->is_numeric()) {
    fail(ErrorKind::type_violation, "operand " + std::to_string(i + 1) + " must be a number, got " +
                                        types::display(a[i].type()));
  }
}

BuiltinDescriptor infix(std::string name, int level, std::vector<ParamSpec> params, ExecuteFn fn) {
  BuiltinDescriptor d;
  d.name = std::move(name);
  d.fixity = Fixity::infix;
  d.precedence = level;
  d.params = std::move(params);
  d.returns_value = true;
  d.execute = std::move(fn);
  return d;
}

BuiltinDescriptor function(std::string name, std::vector<ParamSpec> params, TypePtr result, ExecuteFn fn) {
  BuiltinDescriptor d;
  d.name = std::move(name);
  d.fixity = Fixity::call;
  d.params = std::move(params);
  d.result = std::move(result);
  d.returns_value = true;
  d.execute = std::move(fn);
  return d;
}

using RealFn = double (*)(double);

void real_function(Registry& r, const char* name, RealFn fn, bool (*domain)(double), const char* domain_text) {
  r.register_builtin(function(name, {param(types::real())}, types::real(), [=](const CallArgs& a) {
    double x = a.real(0);
    if (domain && !domain(x)) {
      fail(ErrorKind::domain_error, std::string(name) + "(" + format_shortest(x) + "): argument outside " + domain_text);
    }
    return checked_real(name, fn(x));
  }));
}

int compare_values(const CallArgs& a) {
  const auto k0 = a[0].type()->kind;
  const auto k1 = a[1].type()->kind;
  if (a[0].type()->is_numeric() && a[1].type()->is_numeric()) {
    if (k0 == TypeKind::integer && k1 == TypeKind::integer) {
      return a.integer(0) < a.integer(1) ? -1 : (a.integer(0) > a.integer(1) ? 1 : 0);
    }
    double x = a.real(0);
    double y = a.real(1);
    return x < y ? -1 : (x > y ? 1 : 0);
  }
  if (k0 == TypeKind::string && k1 == TypeKind::string) {
    int c = a.str(0).compare(a.str(1));
    return c < 0 ? -1 : (c > 0 ? 1 : 0);
  }
  if (k0 == TypeKind::boolean && k1 == TypeKind::boolean) {
    return a.boolean(0) == a.boolean(1) ? 0 : 1;
  }
  fail(ErrorKind::type_violation,
       "cannot compare " + types::display(a[0].type()) + " with " + types::display(a[1].type()));
}

void comparison(Registry& r, const char* name, bool ordering, bool (*pick)(int)) {
  auto d = infix(name, 3, {any_param(), any_param()}, [=](const CallArgs& a) {
    if (ordering && a[0].type()->kind == TypeKind::boolean) {
      fail(ErrorKind::type_violation, std::string("'") + name + "' is not defined for Логическое");
    }
    return Value::of_bool(pick(compare_values(a)));
  });
  d.resolve = [=](std::span<const TypePtr> args, std::string& error) -> TypePtr {
    const auto& x = args[0];
    const auto& y = args[1];
    bool ok = (x->is_numeric() && y->is_numeric()) ||
              (x->kind == TypeKind::string && y->kind == TypeKind::string) ||
              (!ordering && x->kind == TypeKind::boolean && y->kind == TypeKind::boolean);
    if (!ok) {
      error = std::string("type mismatch: '") + name + "' cannot compare " + types::display(x) + " with " +
              types::display(y);
      return nullptr;
    }
    return types::boolean();
  };
  r.register_builtin(std::move(d));
}

void logical(Registry& r, const char* name, int level, bool (*op)(bool, bool)) {
  auto d = infix(name, level, {param(types::boolean()), param(types::boolean())},
                 [=](const CallArgs& a) { return Value::of_bool(op(a.boolean(0), a.boolean(1))); });
  d.result = types::boolean();
  r.register_builtin(std::move(d));
}

std::string trim_spaces(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::int64_t parse_integer_text(const std::string& text) {
  std::string s = trim_spaces(text);
  if (!s.empty() && s[0] == '+') s.erase(0, 1);
  std::int64_t v = 0;
  auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
  if (s.empty() || ec != std::errc() || ptr != s.data() + s.size()) {
    fail(ErrorKind::domain_error, "'" + text + "' is not an integer");
  }
  return v;
}

double parse_real_text(const std::string& text) {
  std::string s = trim_spaces(text);
  std::size_t i = 0;
  if (i < s.size() && (s[i] == '+' || s[i] == '-')) ++i;
  std::size_t digits = 0;
  while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  if (i < s.size() && s[i] == '.') {
    ++i;
    while (i < s.size() && std::isdigit(static_cast<unsigned char>(s[i]))) ++i, ++digits;
  }
  if (digits == 0 || i != s.size()) fail(ErrorKind::domain_error, "'" + text + "' is not a number");
  if (s[0] == '+') s.erase(0, 1);
  double v = 0;
  std::from_chars(s.data(), s.data() + s.size(), v, std::chars_format::fixed);
  return v;
}

}  // namespace

std::string number_to_text(double v) {
  std::string s = format_fixed(v, 6);
  if (auto dot = s.find('.'); dot != std::string::npos) {
    while (!s.empty() && s.back() == '0') s.pop_back();
    if (!s.empty() && s.back() == '.') s.pop_back();
  }
  if (s == "-0") s = "0";
  return s;
}

void register_operator_builtins(Registry& r) {
  // level 7
  {
    auto d = infix("^", 7, {number_param(), number_param()}, [](const CallArgs& a) {
      double base = a.real(0);
      double exp = a.real(1);
      if (base < 0 && std::trunc(exp) != exp) {
        fail(ErrorKind::domain_error, "negative base " + format_shortest(base) + " with non-integer exponent");
      }
      if (base == 0 && exp < 0) fail(ErrorKind::division_by_zero, "zero raised to a negative power");
      return checked_real("^", std::pow(base, exp));
    });
    d.right_assoc = true;
    d.result = types::real();
    r.register_builtin(std::move(d));
  }

  // level 6, prefix
  {
    BuiltinDescriptor d;
    d.name = "-";
    d.fixity = Fixity::prefix;
    d.precedence = 6;
    d.params = {number_param()};
    d.returns_value = true;
    d.resolve = [](std::span<const TypePtr> args, std::string&) -> TypePtr { return args[0]; };
    d.execute = [](const CallArgs& a) {
      if (a[0].type()->kind == TypeKind::integer) {
        if (a.integer(0) == std::numeric_limits<std::int64_t>::min()) {
          fail(ErrorKind::range_violation, "integer negation overflows");
        }
        return Value::of_int(-a.integer(0));
      }
      require_numeric(a, 0);
      return Value::of_real(-a.real(0));
    };
    r.register_builtin(std::move(d));
  }
  {
    BuiltinDescriptor d;
    d.name = "NOT";
    d.fixity = Fixity::prefix;
    d.precedence = 6;
    d.params = {param(types::boolean())};
    d.result = types::boolean();
    d.execute = [](const CallArgs& a) { return Value::of_bool(!a.boolean(0)); };
    r.register_builtin(std::move(d));
  }

  // level 5
  {
    auto d = infix("*", 5, {number_param(), number_param()}, [](const CallArgs& a) {
      if (both_int(a)) {
        std::int64_t out = 0;
        if (__builtin_mul_overflow(a.integer(0), a.integer(1), &out)) {
          fail(ErrorKind::range_violation, "integer multiplication overflows");
        }
        return Value::of_int(out);
      }
      return checked_real("*", a.real(0) * a.real(1));
    });
    d.resolve = numeric_result;
    r.register_builtin(std::move(d));
  }
  {
    auto d = infix("/", 5, {number_param(), number_param()}, [](const CallArgs& a) {
      if (a.real(1) == 0.0) fail(ErrorKind::division_by_zero, "division by zero");
      return checked_real("/", a.real(0) / a.real(1));
    });
    d.result = types::real();
    r.register_builtin(std::move(d));
  }
  {
    auto d = infix("DIV", 5, {param(types::integer()), param(types::integer())}, [](const CallArgs& a) {
      require_kind(a, 0, TypeKind::integer, "Целое");
      require_kind(a, 1, TypeKind::integer, "Целое");
      if (a.integer(1) == 0) fail(ErrorKind::division_by_zero, "DIV by zero");
      if (a.integer(0) == std::numeric_limits<std::int64_t>::min() && a.integer(1) == -1) {
        fail(ErrorKind::range_violation, "integer division overflows");
      }
      return Value::of_int(a.integer(0) / a.integer(1));
    });
    d.result = types::integer();
    r.register_builtin(std::move(d));
  }
  {
    auto d = infix("MOD", 5, {param(types::integer()), param(types::integer())}, [](const CallArgs& a) {
      require_kind(a, 0, TypeKind::integer, "Целое");
      require_kind(a, 1, TypeKind::integer, "Целое");
      if (a.integer(1) == 0) fail(ErrorKind::division_by_zero, "MOD by zero");
      if (a.integer(1) == -1) return Value::of_int(0);
      return Value::of_int(a.integer(0) % a.integer(1));
    });
    d.result = types::integer();
    r.register_builtin(std::move(d));
  }

  // level 4
  {
    auto d = infix("+", 4, {any_param(), any_param()}, [](const CallArgs& a) {
      if (a[0].type()->kind == TypeKind::string && a[1].type()->kind == TypeKind::string) {
        return Value::of_string(a.str(0) + a.str(1));
      }
      require_numeric(a, 0);
      require_numeric(a, 1);
      if (both_int(a)) {
        std::int64_t out = 0;
        if (__builtin_add_overflow(a.integer(0), a.integer(1), &out)) {
          fail(ErrorKind::range_violation, "integer addition overflows");
        }
        return Value::of_int(out);
      }
      return checked_real("+", a.real(0) + a.real(1));
    });
    d.resolve = [](std::span<const TypePtr> args, std::string& error) -> TypePtr {
      if (args[0]->kind == TypeKind::string && args[1]->kind == TypeKind::string) return types::string();
      if (args[0]->is_numeric() && args[1]->is_numeric()) return numeric_result(args, error);
      error = "type mismatch: '+' cannot combine " + types::display(args[0]) + " and " + types::display(args[1]);
      return nullptr;
    };
    r.register_builtin(std::move(d));
  }
  {
    auto d = infix("-", 4, {number_param(), number_param()}, [](const CallArgs& a) {
      if (both_int(a)) {
        std::int64_t out = 0;
        if (__builtin_sub_overflow(a.integer(0), a.integer(1), &out)) {
          fail(ErrorKind::range_violation, "integer subtraction overflows");
        }
        return Value::of_int(out);
      }
      return checked_real("-", a.real(0) - a.real(1));
    });
    d.resolve = numeric_result;
    r.register_builtin(std::move(d));
  }

  // level 3
  comparison(r, "=", false, [](int c) { return c == 0; });
  comparison(r, "<>", false, [](int c) { return c != 0; });
  comparison(r, "<", true, [](int c) { return c < 0; });
  comparison(r, "<=", true, [](int c) { return c <= 0; });
  comparison(r, ">", true, [](int c) { return c > 0; });
  comparison(r, ">=", true, [](int c) { return c >= 0; });

  // levels 2 and 1
  logical(r, "AND", 2, [](bool x, bool y) { return x && y; });
  logical(r, "OR", 1, [](bool x, bool y) { return x || y; });
  logical(r, "XOR", 1, [](bool x, bool y) { return x != y; });
}

void register_math_builtins(Registry& r) {
  const auto& R = types::real();
  const auto& I = types::integer();
  const auto& S = types::string();
  const auto& B = types::boolean();

  r.register_builtin(function("INT", {param(R)}, R, [](const CallArgs& a) { return Value::of_real(std::trunc(a.real(0))); }));
  r.register_builtin(function("FRAC", {param(R)}, R, [](const CallArgs& a) {
    double x = a.real(0);
    return Value::of_real(x - std::trunc(x));
  }));
  r.register_builtin(function("ROUND", {param(R)}, I, [](const CallArgs& a) {
    double x = std::round(a.real(0));
    if (!(x >= -9.2233720368547758e18 && x < 9.2233720368547758e18)) {
      fail(ErrorKind::range_violation, "ROUND(" + format_shortest(a.real(0)) + ") does not fit Целое");
    }
    return Value::of_int(static_cast<std::int64_t>(x));
  }));
  {
    auto d = function("ABS", {number_param()}, nullptr, [](const CallArgs& a) {
      if (a[0].type()->kind == TypeKind::integer) {
        if (a.integer(0) == std::numeric_limits<std::int64_t>::min()) {
          fail(ErrorKind::range_violation, "ABS overflows");
        }
        return Value::of_int(a.integer(0) < 0 ? -a.integer(0) : a.integer(0));
      }
      return Value::of_real(std::fabs(a.real(0)));
    });
    d.resolve = [](std::span<const TypePtr> args, std::string&) -> TypePtr { return args[0]; };
    r.register_builtin(std::move(d));
  }

  real_function(r, "SQRT", [](double x) { return std::sqrt(x); }, [](double x) { return x >= 0; }, "[0, +inf)");
  real_function(r, "LN", [](double x) { return std::log(x); }, [](double x) { return x > 0; }, "(0, +inf)");
  real_function(r, "EXP", [](double x) { return std::exp(x); }, nullptr, "");
  real_function(r, "LG", [](double x) { return std::log10(x); }, [](double x) { return x > 0; }, "(0, +inf)");
  real_function(r, "SIN", [](double x) { return std::sin(x); }, nullptr, "");
  real_function(r, "COS", [](double x) { return std::cos(x); }, nullptr, "");
  real_function(r, "TG", [](double x) { return std::tan(x); }, nullptr, "");
  real_function(r, "ARCSIN", [](double x) { return std::asin(x); }, [](double x) { return x >= -1 && x <= 1; }, "[-1, 1]");
  real_function(r, "ARCCOS", [](double x) { return std::acos(x); }, [](double x) { return x >= -1 && x <= 1; }, "[-1, 1]");
  real_function(r, "ARCTG", [](double x) { return std::atan(x); }, nullptr, "");
  real_function(r, "SH", [](double x) { return std::sinh(x); }, nullptr, "");
  real_function(r, "CH", [](double x) { return std::cosh(x); }, nullptr, "");
  real_function(r, "TH", [](double x) { return std::tanh(x); }, nullptr, "");
  real_function(r, "ARSH", [](double x) { return std::asinh(x); }, nullptr, "");
  real_function(r, "ARCH", [](double x) { return std::acosh(x); }, [](double x) { return x >= 1; }, "[1, +inf)");
  real_function(r, "ARTH", [](double x) { return std::atanh(x); }, [](double x) { return x > -1 && x < 1; }, "(-1, 1)");
  real_function(r, "ИзГрадВРад", [](double x) { return x * std::numbers::pi / 180.0; }, nullptr, "");
  real_function(r, "ИзРадВГрад", [](double x) { return x * 180.0 / std::numbers::pi; }, nullptr, "");

  {
    auto d = function("IIF", {param(B), any_param(), any_param()}, nullptr,
                      [](const CallArgs& a) { return a.boolean(0) ? a[1] : a[2]; });
    d.resolve = [](std::span<const TypePtr> args, std::string& error) -> TypePtr {
      if (!types::same(args[1], args[2])) {
        error = "type mismatch: IIF arms have different types " + types::display(args[1]) + " and " +
                types::display(args[2]);
        return nullptr;
      }
      return args[1];
    };
    r.register_builtin(std::move(d));
  }

  r.register_builtin(function("ЧислоВСтроку", {param(R)}, S,
                              [](const CallArgs& a) { return Value::of_string(number_to_text(a.real(0))); }));
  r.register_builtin(function("СтрокаВЦелое", {param(S)}, I,
                              [](const CallArgs& a) { return Value::of_int(parse_integer_text(a.str(0))); }));
  r.register_builtin(function("СтрокаВЧисло", {param(S)}, R,
                              [](const CallArgs& a) { return Value::of_real(parse_real_text(a.str(0))); }));
  r.register_builtin(function("Подстрока", {param(S), param(I), param(I)}, S, [](const CallArgs& a) {
    std::int64_t start = a.integer(1);
    std::int64_t count = a.integer(2);
    if (start < 1) fail(ErrorKind::range_violation, "Подстрока: start " + std::to_string(start) + " < 1");
    if (count < 0) fail(ErrorKind::range_violation, "Подстрока: length " + std::to_string(count) + " < 0");
    return Value::of_string(
        utf8_substr(a.str(0), static_cast<std::size_t>(start - 1), static_cast<std::size_t>(count)));
  }));
}

void register_constants(Registry& r) {
  r.register_constant("Pi", Value::of_real(std::numbers::pi));
  r.register_constant("Да", Value::of_bool(true));
  r.register_constant("Нет", Value::of_bool(false));

  static const char* const kColors[16] = {
      "Черный",     "Синий",       "Зеленый",      "Голубой",      "Красный",         "Фиолетовый",
      "Коричневый", "Светло_серый", "Темно_серый", "Ярко_синий",   "Ярко_зеленый",    "Ярко_голубой",
      "Ярко_красный", "Ярко_фиолетовый", "Желтый", "Белый"};
  for (int i = 0; i < 16; ++i) r.register_constant(kColors[i], Value::of_int(i));

  r.register_constant("Натура", Value::of_int(0));
  r.register_constant("Бумага", Value::of_int(1));

  static const char* const kLineTypes[7] = {"Сплош_осн",  "Сплош_тонк", "Штрих_утол", "Штриховая",
                                            "Пункт_тонк", "Пункт_утол", "Разомкнутая"};
  for (int i = 0; i < 7; ++i) r.register_constant(kLineTypes[i], Value::of_int(i));
}

}  // namespace ppg
