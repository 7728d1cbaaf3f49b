#include "interaction.hpp"

#include <charconv>
#include <istream>
#include <ostream>

#include "errors.hpp"
#include "interaction_json.hpp"
#include "text.hpp"

namespace ppg {

using nlohmann::json;

const char* to_string(FieldKind k) {
  switch (k) {
    case FieldKind::text: return "text";
    case FieldKind::number: return "number";
    case FieldKind::integer: return "integer";
    case FieldKind::scale: return "scale";
  }
  return "text";
}

const std::vector<Scale>& standard_scales() {
  static const std::vector<Scale> scales = {{1, 1}, {1, 2}, {1, 5}, {1, 10}, {1, 20}, {1, 25}, {1, 50}, {1, 100}};
  return scales;
}

std::optional<Scale> parse_scale(const std::string& text) {
  auto colon = text.find(':');
  if (colon == std::string::npos) return std::nullopt;
  auto parse_term = [](std::string s) -> std::optional<std::int64_t> {
    auto b = s.find_first_not_of(' ');
    auto e = s.find_last_not_of(' ');
    if (b == std::string::npos) return std::nullopt;
    s = s.substr(b, e - b + 1);
    std::int64_t v = 0;
    auto [ptr, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || ptr != s.data() + s.size() || v < 1) return std::nullopt;
    return v;
  };
  auto num = parse_term(text.substr(0, colon));
  auto den = parse_term(text.substr(colon + 1));
  if (!num || !den) return std::nullopt;
  return Scale{*num, *den};
}

std::string format_scale(Scale s) { return std::to_string(s.num) + " : " + std::to_string(s.den); }

// ---------------------------------------------------------------------------
// JSON codec

namespace {

[[noreturn]] void bad(const std::string& what) { throw FormatError(what); }

void only_keys(const json& j, std::initializer_list<const char*> allowed, const char* where) {
  if (!j.is_object()) bad(std::string(where) + ": expected an object");
  for (const auto& [key, value] : j.items()) {
    bool known = false;
    for (const char* a : allowed) known = known || key == a;
    if (!known) bad(std::string(where) + ": unknown field '" + key + "'");
  }
}

const json& required(const json& j, const char* key, const char* where) {
  auto it = j.find(key);
  if (it == j.end()) bad(std::string(where) + ": missing field '" + key + "'");
  return *it;
}

std::string get_string(const json& j, const char* key, const char* where) {
  const auto& v = required(j, key, where);
  if (!v.is_string()) bad(std::string(where) + ": field '" + key + "' must be a string");
  return v.get<std::string>();
}

std::int64_t get_int(const json& j, const char* key, const char* where) {
  const auto& v = required(j, key, where);
  if (!v.is_number_integer()) bad(std::string(where) + ": field '" + key + "' must be an integer");
  return v.get<std::int64_t>();
}

bool get_bool(const json& j, const char* key, const char* where) {
  const auto& v = required(j, key, where);
  if (!v.is_boolean()) bad(std::string(where) + ": field '" + key + "' must be a boolean");
  return v.get<bool>();
}

json field_value_to_json(const FieldValue& v) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return nullptr;
        } else if constexpr (std::is_same_v<T, Scale>) {
          return format_scale(x);
        } else {
          return x;
        }
      },
      v);
}

FieldValue field_value_from_json(const json& j, const char* where) {
  if (j.is_null()) return std::monostate{};
  if (j.is_string()) return j.get<std::string>();
  if (j.is_number_integer()) return j.get<std::int64_t>();
  if (j.is_number_float()) return j.get<double>();
  bad(std::string(where) + ": field value must be null, a string or a number");
}

FieldKind field_kind_from(const std::string& s) {
  if (s == "text") return FieldKind::text;
  if (s == "number") return FieldKind::number;
  if (s == "integer") return FieldKind::integer;
  if (s == "scale") return FieldKind::scale;
  bad("form field: unknown kind '" + s + "'");
}

}  // namespace

json prompt_to_value(const Prompt& p) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, MessagePrompt>) {
          return {{"kind", "message"}, {"text", x.text},
                  {"placement", x.placement == Placement::center ? "center" : "infobar"}};
        } else if constexpr (std::is_same_v<T, QueryPrompt>) {
          return {{"kind", "query"}, {"text", x.text}};
        } else if constexpr (std::is_same_v<T, MenuPrompt>) {
          json options = json::array();
          for (const auto& o : x.options) {
            options.push_back({{"text", o.text}, {"value", o.value}, {"enabled", o.enabled}});
          }
          return {{"kind", "menu"}, {"title", x.title}, {"options", options}, {"initial", x.initial}};
        } else {
          json fields = json::array();
          for (const auto& f : x.fields) {
            json jf = {{"label", f.label}, {"kind", to_string(f.kind)}, {"var", f.variable},
                       {"value", field_value_to_json(f.current)}};
            if (f.kind == FieldKind::scale) {
              jf["den_var"] = f.denominator;
              json choices = json::array();
              for (const auto& s : standard_scales()) choices.push_back(format_scale(s));
              jf["choices"] = choices;
            }
            jf["grid"] = f.grid ? json{{"x", f.grid->first}, {"y", f.grid->second}} : json(nullptr);
            fields.push_back(std::move(jf));
          }
          return {{"kind", "form"}, {"title", x.title}, {"fields", fields}};
        }
      },
      p);
}

Prompt prompt_from_value(const json& j) {
  if (!j.is_object()) bad("prompt: expected an object");
  std::string kind = get_string(j, "kind", "prompt");
  if (kind == "message") {
    only_keys(j, {"kind", "text", "placement"}, "message prompt");
    std::string placement = get_string(j, "placement", "message prompt");
    if (placement != "center" && placement != "infobar") bad("message prompt: bad placement '" + placement + "'");
    return MessagePrompt{get_string(j, "text", "message prompt"),
                         placement == "center" ? Placement::center : Placement::infobar};
  }
  if (kind == "query") {
    only_keys(j, {"kind", "text"}, "query prompt");
    return QueryPrompt{get_string(j, "text", "query prompt")};
  }
  if (kind == "menu") {
    only_keys(j, {"kind", "title", "options", "initial"}, "menu prompt");
    MenuPrompt m;
    m.title = get_string(j, "title", "menu prompt");
    m.initial = get_int(j, "initial", "menu prompt");
    const auto& opts = required(j, "options", "menu prompt");
    if (!opts.is_array()) bad("menu prompt: options must be an array");
    for (const auto& o : opts) {
      only_keys(o, {"text", "value", "enabled"}, "menu option");
      m.options.push_back({get_string(o, "text", "menu option"), get_int(o, "value", "menu option"),
                           get_bool(o, "enabled", "menu option")});
    }
    return m;
  }
  if (kind == "form") {
    only_keys(j, {"kind", "title", "fields"}, "form prompt");
    FormPrompt f;
    f.title = get_string(j, "title", "form prompt");
    const auto& fields = required(j, "fields", "form prompt");
    if (!fields.is_array()) bad("form prompt: fields must be an array");
    for (const auto& jf : fields) {
      only_keys(jf, {"label", "kind", "var", "den_var", "choices", "grid", "value"}, "form field");
      FormField ff;
      ff.label = get_string(jf, "label", "form field");
      ff.kind = field_kind_from(get_string(jf, "kind", "form field"));
      ff.variable = get_string(jf, "var", "form field");
      if (ff.kind == FieldKind::scale) ff.denominator = get_string(jf, "den_var", "form field");
      const auto& grid = required(jf, "grid", "form field");
      if (!grid.is_null()) {
        only_keys(grid, {"x", "y"}, "form field grid");
        ff.grid = std::make_pair(get_int(grid, "x", "grid"), get_int(grid, "y", "grid"));
      }
      ff.current = field_value_from_json(required(jf, "value", "form field"), "form field");
      if (ff.kind == FieldKind::scale) {
        if (const auto* s = std::get_if<std::string>(&ff.current)) {
          auto sc = parse_scale(*s);
          if (!sc) bad("form field: bad scale '" + *s + "'");
          ff.current = *sc;
        }
      }
      f.fields.push_back(std::move(ff));
    }
    return f;
  }
  bad("prompt: unknown kind '" + kind + "'");
}

json answer_to_value(const Answer& a) {
  return std::visit(
      [](const auto& x) -> json {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, AckAnswer>) {
          return {{"ack", true}};
        } else if constexpr (std::is_same_v<T, QueryAnswer>) {
          const char* r = x.reply == QueryReply::yes ? "yes" : (x.reply == QueryReply::no ? "no" : "cancel");
          return {{"query", r}};
        } else if constexpr (std::is_same_v<T, MenuAnswer>) {
          return {{"menu", x.value}};
        } else {
          json form = {{"accept", x.accepted}};
          if (!x.values.empty()) {
            json values = json::object();
            for (const auto& [k, v] : x.values) values[k] = field_value_to_json(v);
            form["values"] = values;
          }
          return {{"form", form}};
        }
      },
      a);
}

Answer answer_from_value(const json& j) {
  if (!j.is_object() || j.size() != 1) bad("answer: expected an object with exactly one of ack/query/menu/form");
  if (j.contains("ack")) {
    if (!j["ack"].is_boolean() || !j["ack"].get<bool>()) bad("answer: ack must be true");
    return AckAnswer{};
  }
  if (j.contains("query")) {
    if (!j["query"].is_string()) bad("answer: query must be \"yes\", \"no\" or \"cancel\"");
    auto s = j["query"].get<std::string>();
    if (s == "yes") return QueryAnswer{QueryReply::yes};
    if (s == "no") return QueryAnswer{QueryReply::no};
    if (s == "cancel") return QueryAnswer{QueryReply::cancel};
    bad("answer: query must be \"yes\", \"no\" or \"cancel\"");
  }
  if (j.contains("menu")) {
    if (!j["menu"].is_number_integer()) bad("answer: menu must be an integer");
    return MenuAnswer{j["menu"].get<std::int64_t>()};
  }
  if (j.contains("form")) {
    const auto& f = j["form"];
    only_keys(f, {"accept", "values"}, "form answer");
    FormAnswer out;
    out.accepted = get_bool(f, "accept", "form answer");
    if (auto it = f.find("values"); it != f.end()) {
      if (!it->is_object()) bad("form answer: values must be an object");
      for (const auto& [k, v] : it->items()) out.values[k] = field_value_from_json(v, "form answer");
    }
    return out;
  }
  bad("answer: unknown answer type '" + j.begin().key() + "'");
}

namespace {
json parse_json(const std::string& text) {
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    throw FormatError(std::string("invalid JSON: ") + e.what());
  }
}
}  // namespace

std::string prompt_to_json(const Prompt& p) { return prompt_to_value(p).dump(); }
Prompt prompt_from_json(const std::string& text) { return prompt_from_value(parse_json(text)); }
std::string answer_to_json(const Answer& a) { return answer_to_value(a).dump(); }
Answer answer_from_json(const std::string& text) { return answer_from_value(parse_json(text)); }

std::vector<Answer> answers_from_json(const std::string& text) {
  json j = parse_json(text);
  if (!j.is_array()) bad("answer script: expected a JSON array");
  std::vector<Answer> out;
  for (const auto& item : j) out.push_back(answer_from_value(item));
  return out;
}

// ---------------------------------------------------------------------------
// Providers

Answer ScriptedProvider::ask(const Prompt& prompt) {
  bool is_message = std::holds_alternative<MessagePrompt>(prompt);
  if (next_ < answers_.size()) {
    if (is_message && !std::holds_alternative<AckAnswer>(answers_[next_])) return AckAnswer{};
    return answers_[next_++];
  }
  if (is_message) return AckAnswer{};
  fail(ErrorKind::interaction_abort, "answer script exhausted after " + std::to_string(next_) + " answer(s)");
}

std::string TerminalProvider::read_line() {
  std::string line;
  if (!std::getline(in_, line)) fail(ErrorKind::interaction_abort, "input closed");
  if (!line.empty() && line.back() == '\r') line.pop_back();
  return line;
}

namespace {

std::string trim(const std::string& s) {
  auto b = s.find_first_not_of(" \t");
  if (b == std::string::npos) return {};
  auto e = s.find_last_not_of(" \t");
  return s.substr(b, e - b + 1);
}

std::string show_value(const FieldValue& v) {
  return std::visit(
      [](const auto& x) -> std::string {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, std::monostate>) {
          return "";
        } else if constexpr (std::is_same_v<T, std::string>) {
          return x;
        } else if constexpr (std::is_same_v<T, double>) {
          return format_shortest(x);
        } else if constexpr (std::is_same_v<T, std::int64_t>) {
          return std::to_string(x);
        } else {
          return format_scale(x);
        }
      },
      v);
}

std::optional<FieldValue> parse_field(FieldKind kind, const std::string& text) {
  switch (kind) {
    case FieldKind::text: return FieldValue{text};
    case FieldKind::number: {
      double d = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), d, std::chars_format::fixed);
      if (ec != std::errc() || p != text.data() + text.size()) return std::nullopt;
      return FieldValue{d};
    }
    case FieldKind::integer: {
      std::int64_t i = 0;
      auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), i);
      if (ec != std::errc() || p != text.data() + text.size()) return std::nullopt;
      return FieldValue{i};
    }
    case FieldKind::scale: {
      auto s = parse_scale(text);
      if (!s) return std::nullopt;
      return FieldValue{*s};
    }
  }
  return std::nullopt;
}

}  // namespace

Answer TerminalProvider::ask(const Prompt& prompt) {
  if (const auto* m = std::get_if<MessagePrompt>(&prompt)) {
    out_ << (m->placement == Placement::infobar ? "[i] " : "") << m->text << "\n(Enter) " << std::flush;
    read_line();
    return AckAnswer{};
  }
  if (const auto* q = std::get_if<QueryPrompt>(&prompt)) {
    for (;;) {
      out_ << q->text << " [д/н/о = y/n/c]: " << std::flush;
      std::string s = name_key(trim(read_line()));
      if (s == "Y" || s == name_key("д") || s == name_key("да")) return QueryAnswer{QueryReply::yes};
      if (s == "N" || s == name_key("н") || s == name_key("нет")) return QueryAnswer{QueryReply::no};
      if (s == "С" || s == name_key("о") || s == name_key("отказ") || s.empty()) return QueryAnswer{QueryReply::cancel};
    }
  }
  if (const auto* menu = std::get_if<MenuPrompt>(&prompt)) {
    out_ << "== " << menu->title << " ==\n";
    for (const auto& o : menu->options) {
      out_ << "  " << o.value << ") " << o.text << (o.enabled ? "" : "  (недоступно)") << "\n";
    }
    for (;;) {
      out_ << "Выбор (0 = отказ): " << std::flush;
      std::string s = trim(read_line());
      std::int64_t v = 0;
      auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
      if (ec != std::errc() || p != s.data() + s.size()) continue;
      if (v == 0) return MenuAnswer{0};
      for (const auto& o : menu->options) {
        if (o.value == v && o.enabled) return MenuAnswer{v};
      }
    }
  }
  const auto& form = std::get<FormPrompt>(prompt);
  out_ << "== " << form.title << " ==\n";
  FormAnswer answer;
  for (const auto& f : form.fields) {
    for (;;) {
      out_ << f.label;
      if (f.kind == FieldKind::scale) {
        out_ << " (";
        for (std::size_t i = 0; i < standard_scales().size(); ++i) {
          out_ << (i ? ", " : "") << format_scale(standard_scales()[i]);
        }
        out_ << ")";
      }
      out_ << " [" << show_value(f.current) << "]: " << std::flush;
      std::string s = trim(read_line());
      if (s.empty()) {
        if (!std::holds_alternative<std::monostate>(f.current)) answer.values[f.variable] = f.current;
        break;
      }
      if (auto v = parse_field(f.kind, s)) {
        answer.values[f.variable] = *v;
        break;
      }
      out_ << "  неверное значение\n";
    }
  }
  for (;;) {
    out_ << "Сохранить? [y/n]: " << std::flush;
    std::string s = name_key(trim(read_line()));
    if (s == "Y" || s == name_key("д")) {
      answer.accepted = true;
      return answer;
    }
    if (s == "N" || s == name_key("н")) return FormAnswer{false, {}};
  }
}

}  // namespace ppg
