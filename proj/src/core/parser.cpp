#include "parser.hpp"

#include <map>
#include <set>

#include "builtins.hpp"
#include "text.hpp"

namespace ppg {

namespace {

using namespace ast;

struct SyntaxError {};

bool word_is(const Token& t, std::initializer_list<const char*> spellings) {
  if (t.kind != TokenKind::identifier) return false;
  std::string key = name_key(t.text);
  for (const char* s : spellings) {
    if (key == name_key(s)) return true;
  }
  return false;
}

const char* describe(const Token& t) {
  switch (t.kind) {
    case TokenKind::keyword: return "keyword";
    case TokenKind::identifier: return "identifier";
    case TokenKind::integer_literal:
    case TokenKind::real_literal: return "number";
    case TokenKind::string_literal: return "string";
    case TokenKind::punctuation:
    case TokenKind::op: return "symbol";
  }
  return "token";
}

class Parser {
 public:
  Parser(const std::vector<Token>& tokens, const Registry& registry) : toks_(tokens), registry_(registry) {}

  ParseResult parse_program_text() {
    ParseResult result;
    Program prog;
    bool ok = program(prog);
    if (ok) check_labels(prog);
    result.diagnostics = std::move(diags_);
    if (ok && !has_errors(result.diagnostics)) result.program = std::move(prog);
    return result;
  }

  ExprParseResult parse_lone_expression() {
    ExprParseResult result;
    try {
      Expr e = expression(0);
      if (!at_end() && !cur().is_punct(";")) error(cur().pos, std::string("unexpected ") + describe(cur()) + " '" + cur().text + "'");
      result.expr = std::move(e);
    } catch (const SyntaxError&) {
    }
    result.diagnostics = std::move(diags_);
    if (has_errors(result.diagnostics)) result.expr.reset();
    return result;
  }

 private:
  // ---- token access ------------------------------------------------------

  bool at_end() const { return i_ >= toks_.size(); }
  const Token& cur() const { return at_end() ? eof_token() : toks_[i_]; }
  const Token& ahead(std::size_t n) const { return i_ + n < toks_.size() ? toks_[i_ + n] : eof_token(); }
  const Token& eof_token() const {
    static const Token eof{TokenKind::punctuation, "", {}};
    if (toks_.empty()) return eof;
    eof_ = toks_.back();
    eof_.kind = TokenKind::punctuation;
    eof_.text = "<end of text>";
    return eof_;
  }
  SourcePos pos() const { return cur().pos; }
  const Token& take() {
    const Token& t = cur();
    if (!at_end()) ++i_;
    return t;
  }

  void error(SourcePos p, std::string message) { diags_.push_back({Severity::error, std::move(message), p}); }

  [[noreturn]] void fail_at(SourcePos p, std::string message) {
    error(p, std::move(message));
    throw SyntaxError{};
  }

  [[noreturn]] void unexpected(const char* expected) {
    if (at_end()) fail_at(pos(), std::string("unexpected end of text, expected ") + expected);
    fail_at(pos(), std::string("expected ") + expected + ", found " + describe(cur()) + " '" + cur().text + "'");
  }

  void expect_punct(const char* p) {
    if (!cur().is_punct(p)) unexpected((std::string("'") + p + "'").c_str());
    take();
  }
  void expect_semicolon() { expect_punct(";"); }

  std::string expect_identifier(const char* what) {
    if (cur().kind != TokenKind::identifier) unexpected(what);
    return take().text;
  }

  /// Skips the rest of the current statement, including its ';'.
  void sync() {
    while (!at_end()) {
      if (take().is_punct(";")) return;
    }
  }

  bool is_keyword(Keyword k) const { return cur().is_keyword(k); }

  // ---- program structure ---------------------------------------------------

  bool program(Program& prog) {
    if (!is_keyword(Keyword::program_)) {
      error(at_end() ? SourcePos{} : pos(), "program must start with PROGRAM");
      return false;
    }
    prog.pos = take().pos;
    try {
      std::vector<std::string> words;
      while (!at_end() && !cur().is_punct(";")) words.push_back(take().text);
      if (words.empty()) fail_at(pos(), "program name expected after PROGRAM");
      for (std::size_t k = 0; k < words.size(); ++k) prog.name += (k ? " " : "") + words[k];
      expect_semicolon();
    } catch (const SyntaxError&) {
      sync();
    }

    if (is_keyword(Keyword::type_)) {
      prog.has_type_section = true;
      type_section(prog);
    }
    if (is_keyword(Keyword::var_)) {
      prog.has_var_section = true;
      var_section(prog);
    }
    if (is_keyword(Keyword::type_)) {
      error(pos(), "section order violated: TYPE must precede VAR");
      type_section(prog);
    }

    prog.body = block({Keyword::endprogram_}, "PROGRAM", prog.pos);
    if (!is_keyword(Keyword::endprogram_)) {
      error(at_end() ? eof_token().pos : pos(), "missing ENDPROGRAM");
      return true;
    }
    SourcePos end_pos = take().pos;
    try {
      expect_semicolon();
    } catch (const SyntaxError&) {
      sync();
    }
    if (prog.body.empty()) error(end_pos, "the executable part is required (исполняемая часть обязательна)");
    if (!at_end()) error(pos(), "text after ENDPROGRAM");
    return true;
  }

  void type_section(Program& prog) {
    take();
    try {
      expect_semicolon();
    } catch (const SyntaxError&) {
      sync();
    }
    while (!at_end() && !is_keyword(Keyword::endtype_)) {
      if (cur().kind == TokenKind::keyword) {
        error(pos(), "missing ENDTYPE");
        return;
      }
      try {
        prog.type_decls.push_back(type_decl());
      } catch (const SyntaxError&) {
        sync();
      }
    }
    if (at_end()) {
      error(eof_token().pos, "missing ENDTYPE");
      return;
    }
    take();
    try {
      expect_semicolon();
    } catch (const SyntaxError&) {
      sync();
    }
  }

  std::string joined_name(const char* what, std::initializer_list<const char*> stop) {
    std::string name;
    if (cur().kind != TokenKind::identifier) unexpected(what);
    while (cur().kind == TokenKind::identifier) {
      bool stop_here = false;
      for (const char* s : stop) stop_here = stop_here || cur().is_punct(s) || cur().is_op(s);
      if (stop_here) break;
      name += (name.empty() ? "" : " ") + take().text;
    }
    return name;
  }

  TypeDecl type_decl() {
    TypeDecl decl;
    decl.pos = pos();
    decl.name = joined_name("type name", {"="});
    if (!cur().is_op("=")) unexpected("'='");
    take();
    if (word_is(cur(), {"record", "запись"}) && ahead(1).is_punct(";")) {
      take();
      take();
      RecordDef rec;
      while (!at_end() && !word_is(cur(), {"endrecord", "конецзаписи"})) {
        if (cur().kind == TokenKind::keyword) fail_at(pos(), "missing ENDRECORD");
        try {
          FieldDecl f;
          f.pos = pos();
          f.names = name_list();
          f.type = type_ref();
          expect_semicolon();
          rec.fields.push_back(std::move(f));
        } catch (const SyntaxError&) {
          sync();
        }
      }
      if (at_end()) fail_at(eof_token().pos, "missing ENDRECORD");
      rec.end_pos = take().pos;
      expect_semicolon();
      decl.def = std::move(rec);
    } else {
      decl.def = type_ref();
      expect_semicolon();
    }
    return decl;
  }

  std::vector<std::string> name_list() {
    std::vector<std::string> names;
    names.push_back(expect_identifier("name"));
    while (cur().is_punct(",")) {
      take();
      names.push_back(expect_identifier("name"));
    }
    expect_punct(":");
    return names;
  }

  std::int64_t bound() {
    bool negative = false;
    if (cur().is_op("-")) {
      take();
      negative = true;
    }
    if (cur().kind != TokenKind::integer_literal) unexpected("integer array bound");
    std::int64_t v = take().int_value;
    return negative ? -v : v;
  }

  TypeRef type_ref() {
    TypeRef ref;
    ref.pos = pos();
    if (word_is(cur(), {"array", "массив"}) && ahead(1).is_punct("[")) {
      take();
      take();
      ArrayType arr{0, 0, TypeRef{}};
      arr.lo = bound();
      expect_punct("..");
      arr.hi = bound();
      expect_punct("]");
      if (!word_is(cur(), {"of", "из"})) unexpected("OF");
      take();
      arr.element = type_ref();
      ref.node = std::move(arr);
      return ref;
    }
    ref.node = NamedType{joined_name("type name", {";"})};
    return ref;
  }

  void var_section(Program& prog) {
    take();
    try {
      expect_semicolon();
    } catch (const SyntaxError&) {
      sync();
    }
    while (!at_end() && !is_keyword(Keyword::endvar_)) {
      if (cur().kind == TokenKind::keyword) {
        error(pos(), "missing ENDVAR");
        return;
      }
      try {
        VarDecl v;
        v.pos = pos();
        v.names = name_list();
        v.type = type_ref();
        expect_semicolon();
        prog.var_decls.push_back(std::move(v));
      } catch (const SyntaxError&) {
        sync();
      }
    }
    if (at_end()) {
      error(eof_token().pos, "missing ENDVAR");
      return;
    }
    take();
    try {
      expect_semicolon();
    } catch (const SyntaxError&) {
      sync();
    }
  }

  // ---- statements ----------------------------------------------------------

  struct Open {
    Keyword kind;
    SourcePos pos;
  };

  static bool block_keyword(Keyword k) {
    switch (k) {
      case Keyword::else_:
      case Keyword::endif_:
      case Keyword::on_:
      case Keyword::onelse_:
      case Keyword::endcase_:
      case Keyword::endprogram_: return true;
      default: return false;
    }
  }

  static bool accepts(Keyword construct, Keyword k) {
    if (construct == Keyword::if_) return k == Keyword::else_ || k == Keyword::endif_;
    if (construct == Keyword::case_) return k == Keyword::on_ || k == Keyword::onelse_ || k == Keyword::endcase_;
    return k == Keyword::endprogram_;
  }

  static const char* closer(Keyword construct) {
    if (construct == Keyword::if_) return "ENDIF";
    if (construct == Keyword::case_) return "ENDCASE";
    return "ENDPROGRAM";
  }

  static std::string where(SourcePos p) { return std::to_string(p.line) + ":" + std::to_string(p.column); }

  /// Statements up to (not including) one of `stop`. Returns on end of text
  /// or on a block keyword that belongs to an enclosing construct.
  Block block(std::set<Keyword> stop, const char* owner, SourcePos owner_pos) {
    Block out;
    while (!at_end()) {
      const Token& t = cur();
      if (t.kind == TokenKind::keyword) {
        if (stop.count(t.keyword)) return out;
        if (block_keyword(t.keyword)) {
          bool enclosing = t.keyword == Keyword::endprogram_;
          for (const auto& o : open_) enclosing = enclosing || accepts(o.kind, t.keyword);
          if (enclosing) {
            error(t.pos, std::string("missing ") + closer(open_.back().kind) + " for " + owner + " at " +
                             where(owner_pos) + " before " + keyword_text(t.keyword));
            return out;
          }
          switch (t.keyword) {
            case Keyword::else_: error(t.pos, "ELSE outside IF"); break;
            case Keyword::endif_: error(t.pos, "ENDIF without IF"); break;
            case Keyword::on_: error(t.pos, "ON outside CASE"); break;
            case Keyword::onelse_: error(t.pos, "ONELSE outside CASE"); break;
            case Keyword::endcase_: error(t.pos, "ENDCASE without CASE"); break;
            default: break;
          }
          sync();
          continue;
        }
        if (t.keyword == Keyword::type_ || t.keyword == Keyword::var_) {
          error(t.pos, std::string("section order violated: ") + keyword_text(t.keyword) +
                           " section after the executable part");
          skip_section(t.keyword == Keyword::type_ ? Keyword::endtype_ : Keyword::endvar_);
          continue;
        }
        if (t.keyword == Keyword::program_ || t.keyword == Keyword::endtype_ || t.keyword == Keyword::endvar_) {
          error(t.pos, std::string("unexpected ") + keyword_text(t.keyword));
          sync();
          continue;
        }
      }
      try {
        out.push_back(statement());
      } catch (const SyntaxError&) {
        sync();
      }
    }
    return out;
  }

  void skip_section(Keyword end) {
    while (!at_end() && !is_keyword(end)) take();
    if (!at_end()) {
      take();
      if (cur().is_punct(";")) take();
    }
  }

  Statement statement() {
    Statement s;
    s.pos = pos();
    const Token& t = cur();
    if (t.kind == TokenKind::keyword) {
      switch (t.keyword) {
        case Keyword::if_: s.node = if_statement(); return s;
        case Keyword::case_: s.node = case_statement(); return s;
        case Keyword::goto_: {
          take();
          Goto g{expect_identifier("label name")};
          expect_semicolon();
          s.node = std::move(g);
          return s;
        }
        case Keyword::exit_:
          take();
          expect_semicolon();
          s.node = Exit{};
          return s;
        default: unexpected("statement");
      }
    }
    if (t.kind != TokenKind::identifier) unexpected("statement");

    if (ahead(1).is_punct(":")) {
      LabelDef l{take().text};
      take();
      expect_semicolon();
      s.node = std::move(l);
      return s;
    }
    if (ahead(1).is_punct("(")) {
      std::string name = take().text;
      Call c = call_args(std::move(name));
      expect_semicolon();
      s.node = CallStmt{std::move(c)};
      return s;
    }
    if (ahead(1).is_punct(";")) {
      s.node = CallStmt{Call{take().text, {}}};
      take();
      return s;
    }
    VarPath target = var_path();
    if (!cur().is_op(":=")) unexpected("':='");
    take();
    Expr value = expression(0);
    expect_semicolon();
    s.node = Assign{std::move(target), std::move(value)};
    return s;
  }

  If if_statement() {
    SourcePos if_pos = take().pos;
    If node{expression(0), {}, std::nullopt, {}, {}};
    expect_semicolon();
    open_.push_back({Keyword::if_, if_pos});
    node.then_body = block({Keyword::else_, Keyword::endif_}, "IF", if_pos);
    if (is_keyword(Keyword::else_)) {
      node.else_pos = take().pos;
      expect_semicolon_recover();
      node.else_body = block({Keyword::endif_}, "IF", if_pos);
    }
    open_.pop_back();
    if (!is_keyword(Keyword::endif_)) {
      if (at_end()) error(eof_token().pos, "missing ENDIF for IF at " + where(if_pos));
      return node;
    }
    node.end_pos = take().pos;
    expect_semicolon_recover();
    return node;
  }

  Case case_statement() {
    SourcePos case_pos = take().pos;
    Case node;
    expect_semicolon_recover();
    open_.push_back({Keyword::case_, case_pos});
    if (!is_keyword(Keyword::on_) && !is_keyword(Keyword::onelse_) && !is_keyword(Keyword::endcase_)) {
      error(at_end() ? eof_token().pos : pos(), "expected ON after CASE");
      block({Keyword::on_, Keyword::onelse_, Keyword::endcase_}, "CASE", case_pos);
    }
    while (is_keyword(Keyword::on_)) {
      CaseArm arm{Expr{}, {}, take().pos};
      try {
        arm.cond = expression(0);
        expect_semicolon();
      } catch (const SyntaxError&) {
        sync();
      }
      arm.body = block({Keyword::on_, Keyword::onelse_, Keyword::endcase_}, "CASE", case_pos);
      node.arms.push_back(std::move(arm));
    }
    if (is_keyword(Keyword::onelse_)) {
      node.else_pos = take().pos;
      expect_semicolon_recover();
      node.else_body = block({Keyword::endcase_}, "CASE", case_pos);
      if (is_keyword(Keyword::on_)) error(pos(), "ON after ONELSE");
    }
    open_.pop_back();
    if (node.arms.empty() && !has_errors(diags_)) error(case_pos, "CASE without ON arms");
    if (!is_keyword(Keyword::endcase_)) {
      if (at_end()) error(eof_token().pos, "missing ENDCASE for CASE at " + where(case_pos));
      return node;
    }
    node.end_pos = take().pos;
    expect_semicolon_recover();
    return node;
  }

  void expect_semicolon_recover() {
    try {
      expect_semicolon();
    } catch (const SyntaxError&) {
      sync();
    }
  }

  // ---- expressions ---------------------------------------------------------

  const BuiltinDescriptor* infix_at_cursor() const {
    const Token& t = cur();
    if (t.kind != TokenKind::op || t.text == ":=") return nullptr;
    const auto* d = registry_.lookup(t.text);
    return d && d->fixity == Fixity::infix ? d : nullptr;
  }

  Expr expression(int min_level) {
    Expr lhs = unary();
    for (;;) {
      const auto* d = infix_at_cursor();
      if (!d || d->precedence < min_level) break;
      SourcePos op_pos = take().pos;
      Expr rhs = expression(d->right_assoc ? d->precedence : d->precedence + 1);
      lhs = Expr{Binary{d->name, std::move(lhs), std::move(rhs)}, op_pos};
    }
    return lhs;
  }

  Expr unary() {
    const Token& t = cur();
    if (t.kind == TokenKind::op) {
      if (const auto* d = registry_.lookup_prefix(t.text)) {
        SourcePos p = take().pos;
        Expr operand = expression(d->precedence);
        return Expr{Unary{d->name, std::move(operand)}, p};
      }
    }
    return primary();
  }

  Expr primary() {
    const Token& t = cur();
    SourcePos p = t.pos;
    switch (t.kind) {
      case TokenKind::integer_literal: return Expr{IntLiteral{take().int_value}, p};
      case TokenKind::real_literal: return Expr{RealLiteral{take().real_value}, p};
      case TokenKind::string_literal: return Expr{StringLiteral{take().text}, p};
      case TokenKind::identifier:
        if (ahead(1).is_punct("(")) {
          std::string name = take().text;
          return Expr{call_args(std::move(name)), p};
        }
        return Expr{var_path(), p};
      case TokenKind::punctuation:
        if (t.is_punct("(")) {
          take();
          Expr inner = expression(0);
          expect_punct(")");
          return Expr{Paren{std::move(inner)}, p};
        }
        break;
      default: break;
    }
    unexpected("expression");
  }

  Call call_args(std::string name) {
    Call c{std::move(name), {}};
    expect_punct("(");
    if (!cur().is_punct(")")) {
      c.args.push_back(expression(0));
      while (cur().is_punct(",")) {
        take();
        c.args.push_back(expression(0));
      }
    }
    expect_punct(")");
    return c;
  }

  VarPath var_path() {
    VarPath path;
    path.root_pos = pos();
    path.root = expect_identifier("variable name");
    for (;;) {
      if (cur().is_punct(".")) {
        Selector sel;
        sel.pos = take().pos;
        sel.field = expect_identifier("field name");
        path.selectors.push_back(std::move(sel));
      } else if (cur().is_punct("[")) {
        Selector sel;
        sel.pos = take().pos;
        sel.index = Box<Expr>(expression(0));
        expect_punct("]");
        path.selectors.push_back(std::move(sel));
      } else {
        return path;
      }
    }
  }

  // ---- labels --------------------------------------------------------------

  void collect_labels(const Block& b, std::map<std::string, SourcePos>& labels) {
    for (const auto& s : b) {
      if (const auto* l = std::get_if<LabelDef>(&s.node)) {
        auto key = name_key(l->name);
        if (auto it = labels.find(key); it != labels.end()) {
          error(s.pos, "duplicate label '" + l->name + "' (first defined at " + where(it->second) + ")");
        } else {
          labels.emplace(key, s.pos);
        }
      } else if (const auto* i = std::get_if<If>(&s.node)) {
        collect_labels(i->then_body, labels);
        if (i->else_body) collect_labels(*i->else_body, labels);
      } else if (const auto* c = std::get_if<Case>(&s.node)) {
        for (const auto& arm : c->arms) collect_labels(arm.body, labels);
        if (c->else_body) collect_labels(*c->else_body, labels);
      }
    }
  }

  void check_gotos(const Block& b, const std::map<std::string, SourcePos>& labels) {
    for (const auto& s : b) {
      if (const auto* g = std::get_if<Goto>(&s.node)) {
        if (!labels.count(name_key(g->label))) error(s.pos, "GOTO to undeclared label '" + g->label + "'");
      } else if (const auto* i = std::get_if<If>(&s.node)) {
        check_gotos(i->then_body, labels);
        if (i->else_body) check_gotos(*i->else_body, labels);
      } else if (const auto* c = std::get_if<Case>(&s.node)) {
        for (const auto& arm : c->arms) check_gotos(arm.body, labels);
        if (c->else_body) check_gotos(*c->else_body, labels);
      }
    }
  }

  void check_labels(const Program& prog) {
    std::map<std::string, SourcePos> labels;
    collect_labels(prog.body, labels);
    check_gotos(prog.body, labels);
  }

  const std::vector<Token>& toks_;
  const Registry& registry_;
  std::size_t i_ = 0;
  Diagnostics diags_;
  std::vector<Open> open_;
  mutable Token eof_;
};

}  // namespace

ParseResult parse(const std::vector<Token>& tokens, const Registry& registry) {
  return Parser(tokens, registry).parse_program_text();
}

ParseResult parse_source(std::string_view text, const Registry& registry) {
  LexResult lexed = tokenize(text, registry);
  ParseResult parsed = parse(lexed.tokens, registry);
  Diagnostics all = std::move(lexed.diagnostics);
  all.insert(all.end(), parsed.diagnostics.begin(), parsed.diagnostics.end());
  parsed.diagnostics = std::move(all);
  if (has_errors(parsed.diagnostics)) parsed.program.reset();
  return parsed;
}

ExprParseResult parse_expression(std::string_view text, const Registry& registry) {
  std::string line(text);
  for (char& c : line) {
    if (c == '\n' || c == '\r') c = ' ';
  }
  line += ";";
  LexResult lexed = tokenize(line, registry);
  Parser p(lexed.tokens, registry);
  ExprParseResult r = p.parse_lone_expression();
  Diagnostics all = std::move(lexed.diagnostics);
  all.insert(all.end(), r.diagnostics.begin(), r.diagnostics.end());
  r.diagnostics = std::move(all);
  if (has_errors(r.diagnostics)) r.expr.reset();
  return r;
}

}  // namespace ppg
