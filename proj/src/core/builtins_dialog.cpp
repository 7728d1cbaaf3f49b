// Dialog operations: messages, queries, menus and input forms.

#include <filesystem>
#include <fstream>

#include "builtins.hpp"
#include "errors.hpp"
#include "interaction.hpp"
#include "text.hpp"

namespace ppg {

namespace {

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

template <typename T>
T expect(const Answer& a, const char* what) {
  if (const auto* x = std::get_if<T>(&a)) return *x;
  fail(ErrorKind::interaction_abort, std::string("expected ") + what + " answer");
}

DialogState& dialog(const CallArgs& a) { return a.env().dialog; }

MenuPrompt& open_menu(const CallArgs& a, const char* op) {
  auto& d = dialog(a);
  if (!d.menu) fail(ErrorKind::domain_error, std::string(op) + " without НовоеМеню");
  return *d.menu;
}

std::int64_t show(const CallArgs& a, MenuPrompt menu, std::int64_t initial) {
  if (menu.options.empty()) fail(ErrorKind::domain_error, "menu '" + menu.title + "' has no options");
  if (initial < 1 || initial > static_cast<std::int64_t>(menu.options.size())) initial = 1;
  menu.initial = initial;
  auto& d = dialog(a);
  auto answer = expect<MenuAnswer>(a.env().interactor.ask(menu), "a menu");
  d.menu_completed = true;
  d.option_text.clear();
  if (answer.value == 0) return 0;
  for (const auto& o : menu.options) {
    if (o.enabled && o.value == answer.value) {
      d.option_text = o.text;
      return answer.value;
    }
  }
  fail(ErrorKind::interaction_abort, "menu answer " + std::to_string(answer.value) + " is not an enabled option");
}

std::int64_t query(const CallArgs& a, const std::string& text) {
  auto answer = expect<QueryAnswer>(a.env().interactor.ask(QueryPrompt{text}), "a query");
  switch (answer.reply) {
    case QueryReply::yes: return 1;
    case QueryReply::no: return 2;
    case QueryReply::cancel: return 0;
  }
  return 0;
}

// ---- forms ------------------------------------------------------------------

Value& bound(const CallArgs& a, const std::string& name) {
  Value* v = a.env().variables.find_variable(name);
  if (!v) fail(ErrorKind::domain_error, "form field bound to unknown variable '" + name + "'");
  return *v;
}

FieldKind kind_for(const Value& v, const std::string& name) {
  switch (v.type()->kind) {
    case TypeKind::string: return FieldKind::text;
    case TypeKind::real: return FieldKind::number;
    case TypeKind::integer: return FieldKind::integer;
    default:
      fail(ErrorKind::type_violation,
           "variable '" + name + "' of type " + types::display(v.type()) + " cannot be bound to a form field");
  }
}

FormPrompt& open_form(const CallArgs& a, const char* op) {
  auto& d = dialog(a);
  if (!d.form) fail(ErrorKind::domain_error, std::string(op) + " without Новая_форма");
  return *d.form;
}

void add_field(const CallArgs& a, const char* op, const std::string& label, const std::string& var,
               std::optional<std::pair<std::int64_t, std::int64_t>> grid) {
  auto& form = open_form(a, op);
  FormField f;
  f.label = label;
  f.variable = var;
  f.kind = kind_for(bound(a, var), var);
  f.grid = grid;
  form.fields.push_back(std::move(f));
}

FieldValue current_value(const CallArgs& a, const FormField& f) {
  const Value& v = bound(a, f.variable);
  if (f.kind == FieldKind::scale) {
    const Value& den = bound(a, f.denominator);
    if (!v.is_defined() || !den.is_defined()) return std::monostate{};
    return Scale{v.as_int(), den.as_int()};
  }
  if (!v.is_defined()) return std::monostate{};
  switch (f.kind) {
    case FieldKind::text: return v.as_string();
    case FieldKind::number: return v.as_real();
    default: return v.as_int();
  }
}

[[noreturn]] void bad_value(const FormField& f, const char* expected) {
  fail(ErrorKind::type_violation, "form value for '" + f.variable + "' must be " + expected);
}

/// Converts an answered value for field `f`; nullopt keeps the current value.
std::optional<FieldValue> accepted_value(const FormField& f, const FieldValue& given) {
  if (std::holds_alternative<std::monostate>(given)) return std::nullopt;
  switch (f.kind) {
    case FieldKind::text:
      if (!std::holds_alternative<std::string>(given)) bad_value(f, "a string");
      return given;
    case FieldKind::number:
      if (const auto* i = std::get_if<std::int64_t>(&given)) return static_cast<double>(*i);
      if (!std::holds_alternative<double>(given)) bad_value(f, "a number");
      return given;
    case FieldKind::integer:
      if (!std::holds_alternative<std::int64_t>(given)) bad_value(f, "an integer");
      return given;
    case FieldKind::scale: {
      if (const auto* s = std::get_if<Scale>(&given)) return *s;
      const auto* text = std::get_if<std::string>(&given);
      auto s = text ? parse_scale(*text) : std::nullopt;
      if (!s) bad_value(f, "a scale 'n : d'");
      return *s;
    }
  }
  return std::nullopt;
}

Value run_editor(const CallArgs& a) {
  auto& d = dialog(a);
  FormPrompt form = open_form(a, "Редактор");
  if (form.fields.empty()) fail(ErrorKind::domain_error, "form '" + form.title + "' has no fields");
  for (auto& f : form.fields) f.current = current_value(a, f);

  auto answer = expect<FormAnswer>(a.env().interactor.ask(form), "a form");
  d.form.reset();
  if (!answer.accepted) return Value::of_bool(false);

  // Validate everything before writing anything: acceptance is atomic.
  std::vector<std::pair<const FormField*, FieldValue>> writes;
  for (const auto& [var, given] : answer.values) {
    const FormField* field = nullptr;
    for (const auto& f : form.fields) {
      if (name_key(f.variable) == name_key(var)) field = &f;
    }
    if (!field) fail(ErrorKind::interaction_abort, "form answer names '" + var + "', which is not a field");
    if (auto v = accepted_value(*field, given)) writes.emplace_back(field, *v);
  }
  for (const auto& [f, v] : writes) {
    if (const auto* s = std::get_if<Scale>(&v)) {
      a.env().canvas.set_scale(*s);
    }
  }
  for (const auto& [f, v] : writes) {
    Value& target = bound(a, f->variable);
    if (const auto* s = std::get_if<Scale>(&v)) {
      target = Value::of_int(s->num);
      bound(a, f->denominator) = Value::of_int(s->den);
    } else if (const auto* str = std::get_if<std::string>(&v)) {
      target = Value::of_string(*str);
    } else if (const auto* x = std::get_if<double>(&v)) {
      target = Value::of_real(*x);
    } else {
      target = Value::of_int(std::get<std::int64_t>(v));
    }
  }
  return Value::of_bool(true);
}

std::vector<std::string> read_lines(const std::string& path) {
  std::ifstream in{std::filesystem::path(path)};
  if (!in) fail(ErrorKind::domain_error, "cannot open menu file '" + path + "'");
  std::vector<std::string> lines;
  std::string line;
  while (std::getline(in, line)) {
    if (!line.empty() && line.back() == '\r') line.pop_back();
    lines.push_back(line);
  }
  while (!lines.empty() && lines.back().empty()) lines.pop_back();
  if (lines.empty()) fail(ErrorKind::domain_error, "menu file '" + path + "' is empty");
  return lines;
}

}  // namespace

void register_dialog_builtins(Registry& r) {
  const auto& I = types::integer();
  const auto& S = types::string();
  const auto& B = types::boolean();

  r.register_builtin(procedure("Сообщение", {param(S)}, [](const CallArgs& a) {
    expect<AckAnswer>(a.env().interactor.ask(MessagePrompt{a.str(0), Placement::center}), "an acknowledgement");
    return Value();
  }));
  r.register_builtin(procedure("Информация", {param(S)}, [](const CallArgs& a) {
    expect<AckAnswer>(a.env().interactor.ask(MessagePrompt{a.str(0), Placement::infobar}), "an acknowledgement");
    return Value();
  }));
  r.register_builtin(function("Запрос", {param(S)}, I, [](const CallArgs& a) { return Value::of_int(query(a, a.str(0))); }));

  r.register_builtin(procedure("НовоеМеню", {param(S)}, [](const CallArgs& a) {
    auto& d = dialog(a);
    d.menu = MenuPrompt{a.str(0), {}, 1};
    return Value();
  }));
  r.register_builtin(procedure("ДобОпцию", {param(S), param(I), param(B)}, [](const CallArgs& a) {
    auto& menu = open_menu(a, "ДобОпцию");
    if (a.integer(1) == 0) fail(ErrorKind::range_violation, "option value 0 is reserved for cancel");
    menu.options.push_back({a.str(0), a.integer(1), a.boolean(2)});
    return Value();
  }));
  r.register_builtin(procedure("Доб_5_Опций", {param(S), param(S), param(S), param(S), param(S)}, [](const CallArgs& a) {
    auto& menu = open_menu(a, "Доб_5_Опций");
    for (std::size_t i = 0; i < 5; ++i) {
      if (a.str(i).empty()) continue;
      menu.options.push_back({a.str(i), static_cast<std::int64_t>(menu.options.size()) + 1, true});
    }
    return Value();
  }));
  r.register_builtin(function("ПоказМеню", {param(I)}, I, [](const CallArgs& a) {
    return Value::of_int(show(a, open_menu(a, "ПоказМеню"), a.integer(0)));
  }));
  r.register_builtin(function("МенюИзФайла", {param(S)}, I, [](const CallArgs& a) {
    MenuPrompt menu;
    menu.title = std::filesystem::path(a.str(0)).stem().string();
    auto lines = read_lines(a.str(0));
    for (std::size_t i = 0; i < lines.size(); ++i) {
      menu.options.push_back({lines[i], static_cast<std::int64_t>(i) + 1, true});
    }
    return Value::of_int(show(a, std::move(menu), 1));
  }));
  {
    auto d = function("ТекстОпции", {}, S, [](const CallArgs& a) {
      if (!dialog(a).menu_completed) fail(ErrorKind::domain_error, "ТекстОпции before any menu was shown");
      return Value::of_string(dialog(a).option_text);
    });
    d.fixity = Fixity::bare;
    r.register_builtin(std::move(d));
  }

  r.register_builtin(procedure("Новая_форма", {param(S)}, [](const CallArgs& a) {
    dialog(a).form = FormPrompt{a.str(0), {}};
    return Value();
  }));
  r.register_builtin(procedure("Новое_поле", {param(S), param(S)}, [](const CallArgs& a) {
    add_field(a, "Новое_поле", a.str(0), a.str(1), std::nullopt);
    return Value();
  }));
  r.register_builtin(procedure("Новое_полеXY", {param(S), param(S), param(I), param(I)}, [](const CallArgs& a) {
    add_field(a, "Новое_полеXY", a.str(0), a.str(1), std::pair{a.integer(2), a.integer(3)});
    return Value();
  }));
  r.register_builtin(
      procedure("Масштаб_поле", {param(S), param(S), param(S), param(I), param(I)}, [](const CallArgs& a) {
        auto& form = open_form(a, "Масштаб_поле");
        for (std::size_t i = 1; i <= 2; ++i) {
          const Value& v = bound(a, a.str(i));
          if (v.type()->kind != TypeKind::integer) {
            fail(ErrorKind::type_violation,
                 "scale field needs Целое variables, '" + a.str(i) + "' is " + types::display(v.type()));
          }
        }
        FormField f;
        f.label = a.str(0);
        f.kind = FieldKind::scale;
        f.variable = a.str(1);
        f.denominator = a.str(2);
        f.grid = std::pair{a.integer(3), a.integer(4)};
        form.fields.push_back(std::move(f));
        return Value();
      }));
  {
    auto d = function("Редактор", {}, B, run_editor);
    d.fixity = Fixity::bare;
    r.register_builtin(std::move(d));
  }
}

}  // namespace ppg
