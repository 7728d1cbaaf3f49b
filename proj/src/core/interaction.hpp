#pragma once

#include <cstdint>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "canvas.hpp"

namespace ppg {

struct MenuOption {
  std::string text;
  std::int64_t value = 0;
  bool enabled = true;
  friend bool operator==(const MenuOption&, const MenuOption&) = default;
};

enum class Placement { center, infobar };
enum class FieldKind { text, number, integer, scale };

const char* to_string(FieldKind k);

/// Value of one form field. Scale fields carry a num:den pair.
using FieldValue = std::variant<std::monostate, std::string, double, std::int64_t, Scale>;

struct FormField {
  std::string label;
  FieldKind kind = FieldKind::text;
  std::string variable;         // bound variable (numerator for scale fields)
  std::string denominator;      // scale fields only
  std::optional<std::pair<std::int64_t, std::int64_t>> grid;
  FieldValue current;
  friend bool operator==(const FormField&, const FormField&) = default;
};

struct MessagePrompt {
  std::string text;
  Placement placement = Placement::center;
  friend bool operator==(const MessagePrompt&, const MessagePrompt&) = default;
};
struct QueryPrompt {
  std::string text;
  friend bool operator==(const QueryPrompt&, const QueryPrompt&) = default;
};
struct MenuPrompt {
  std::string title;
  std::vector<MenuOption> options;
  std::int64_t initial = 1;
  friend bool operator==(const MenuPrompt&, const MenuPrompt&) = default;
};
struct FormPrompt {
  std::string title;
  std::vector<FormField> fields;
  friend bool operator==(const FormPrompt&, const FormPrompt&) = default;
};

using Prompt = std::variant<MessagePrompt, QueryPrompt, MenuPrompt, FormPrompt>;

enum class QueryReply { yes, no, cancel };

struct AckAnswer {
  friend bool operator==(const AckAnswer&, const AckAnswer&) = default;
};
struct QueryAnswer {
  QueryReply reply = QueryReply::cancel;
  friend bool operator==(const QueryAnswer&, const QueryAnswer&) = default;
};
struct MenuAnswer {
  std::int64_t value = 0;  // 0 = cancel
  friend bool operator==(const MenuAnswer&, const MenuAnswer&) = default;
};
struct FormAnswer {
  bool accepted = false;
  std::map<std::string, FieldValue> values;  // keyed by bound variable name
  friend bool operator==(const FormAnswer&, const FormAnswer&) = default;
};

using Answer = std::variant<AckAnswer, QueryAnswer, MenuAnswer, FormAnswer>;

/// Answers prompts raised by a running program. Blocks until an answer is
/// available; throws RuntimeError(interaction_abort) when it cannot answer.
class InteractionProvider {
 public:
  virtual ~InteractionProvider() = default;
  virtual Answer ask(const Prompt& prompt) = 0;
};

/// Replays a fixed list of answers. Message prompts are acknowledged
/// automatically unless the next scripted answer is an explicit ack.
class ScriptedProvider : public InteractionProvider {
 public:
  explicit ScriptedProvider(std::vector<Answer> answers) : answers_(std::move(answers)) {}

  Answer ask(const Prompt& prompt) override;
  std::size_t consumed() const { return next_; }
  std::size_t remaining() const { return answers_.size() - next_; }

 private:
  std::vector<Answer> answers_;
  std::size_t next_ = 0;
};

/// Line-oriented dialog on a pair of streams.
class TerminalProvider : public InteractionProvider {
 public:
  TerminalProvider(std::istream& in, std::ostream& out) : in_(in), out_(out) {}
  Answer ask(const Prompt& prompt) override;

 private:
  std::string read_line();

  std::istream& in_;
  std::ostream& out_;
};

/// State of menus and forms under construction during one run.
struct DialogState {
  std::optional<MenuPrompt> menu;
  std::optional<FormPrompt> form;
  bool menu_completed = false;
  std::string option_text;
};

/// Standard scales offered by scale fields.
const std::vector<Scale>& standard_scales();

/// Parses "1 : 25" / "1:25". Returns nullopt on malformed text or terms < 1.
std::optional<Scale> parse_scale(const std::string& text);
std::string format_scale(Scale s);

// JSON codec shared by answer scripts and the session wire protocol.
// Decoding is strict: unknown fields and wrong types throw FormatError.
std::string prompt_to_json(const Prompt& p);
Prompt prompt_from_json(const std::string& text);
std::string answer_to_json(const Answer& a);
Answer answer_from_json(const std::string& text);
/// A script file: a JSON array of answers.
std::vector<Answer> answers_from_json(const std::string& text);

}  // namespace ppg
