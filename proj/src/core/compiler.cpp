#include "compiler.hpp"

#include <bit>
#include <fstream>
#include <map>
#include <sstream>

#include "builtins.hpp"
#include "errors.hpp"
#include "lexer.hpp"
#include "parser.hpp"
#include "printer.hpp"
#include "text.hpp"

namespace ppg {

using namespace ast;

namespace {

enum class SlotSpace : std::uint8_t { variable, temp, constant };

struct Operand {
  SlotSpace space = SlotSpace::variable;
  std::size_t index = 0;
};

class CodeGen {
 public:
  CodeGen(const TypedProgram& typed, const Registry& registry) : typed_(typed), registry_(registry) {}

  CompiledProgram run() {
    const Program& prog = *typed_.program;
    out_.name = prog.name;
    for (const auto& v : typed_.variables) intern_type(v.type);
    block(prog.body);
    emit_word(static_cast<std::uint16_t>(CoreOp::end));
    finish();
    return std::move(out_);
  }

 private:
  // ---- pools -----------------------------------------------------------------

  std::uint16_t intern_string(const std::string& s) {
    if (auto it = string_index_.find(s); it != string_index_.end()) return it->second;
    if (out_.strings.size() >= kNoIndex) throw CompileError("string pool exceeds 65535 entries");
    auto i = static_cast<std::uint16_t>(out_.strings.size());
    out_.strings.push_back(s);
    string_index_[s] = i;
    return i;
  }

  std::uint16_t intern_type(const TypePtr& t) {
    for (std::size_t i = 0; i < type_ptrs_.size(); ++i) {
      if (type_ptrs_[i] == t || (types::same(type_ptrs_[i], t) && type_ptrs_[i]->name == t->name)) {
        return static_cast<std::uint16_t>(i);
      }
    }
    TypeEntry e;
    e.kind = t->kind;
    if (t->kind == TypeKind::record) {
      for (const auto& f : t->fields) {
        std::uint16_t ft = intern_type(f.type);
        e.fields.emplace_back(intern_string(f.name), ft);
      }
    } else if (t->kind == TypeKind::array) {
      e.lo = t->lo;
      e.hi = t->hi;
      e.element = intern_type(t->element);
    }
    if (!t->name.empty() && t->is_composite()) e.name = intern_string(t->name);
    if (out_.types.size() >= kNoIndex) throw CompileError("type table exceeds 65535 entries");
    out_.types.push_back(std::move(e));
    type_ptrs_.push_back(t);
    return static_cast<std::uint16_t>(out_.types.size() - 1);
  }

  Operand constant(ConstEntry c) {
    for (std::size_t i = 0; i < consts_.size(); ++i) {
      if (consts_[i] == c) return {SlotSpace::constant, i};
    }
    consts_.push_back(c);
    return {SlotSpace::constant, consts_.size() - 1};
  }

  Operand int_const(std::int64_t v) {
    ConstEntry c;
    c.type = intern_type(types::integer());
    c.integer = v;
    return constant(c);
  }

  Operand value_const(const Value& v) {
    ConstEntry c;
    c.type = intern_type(v.type());
    switch (v.type()->kind) {
      case TypeKind::boolean: c.boolean = v.as_bool(); break;
      case TypeKind::integer: c.integer = v.as_int(); break;
      case TypeKind::real: c.real_bits = std::bit_cast<std::uint64_t>(v.as_real()); break;
      case TypeKind::string: c.string = intern_string(v.as_string()); break;
      default: throw CompileError("constant of composite type");
    }
    return constant(c);
  }

  Operand temp(const TypePtr& t) {
    std::uint16_t type = intern_type(t);
    for (std::size_t i = 0; i < temps_.size(); ++i) {
      if (!temp_busy_[i] && temps_[i] == type) {
        temp_busy_[i] = true;
        return {SlotSpace::temp, i};
      }
    }
    temps_.push_back(type);
    temp_busy_.push_back(true);
    return {SlotSpace::temp, temps_.size() - 1};
  }

  void release_temps() { std::fill(temp_busy_.begin(), temp_busy_.end(), false); }

  // ---- emission --------------------------------------------------------------

  void emit_word(std::uint16_t w) {
    if (code_.size() >= 0xFFFF) throw CompileError("code exceeds 65535 words");
    code_.push_back(w);
    fixups_.push_back(std::nullopt);
  }

  void emit_operand(Operand o) {
    emit_word(0);
    fixups_.back() = o;
  }

  void emit(std::uint16_t opcode, std::initializer_list<Operand> operands) {
    emit_word(opcode);
    for (const auto& o : operands) emit_operand(o);
  }

  void emit(CoreOp op, std::initializer_list<Operand> operands) { emit(static_cast<std::uint16_t>(op), operands); }

  std::size_t here() const { return code_.size(); }

  /// Emits a jump with a placeholder target; returns the operand position.
  std::size_t emit_jump(CoreOp op, std::optional<Operand> cond = std::nullopt) {
    emit_word(static_cast<std::uint16_t>(op));
    if (cond) emit_operand(*cond);
    emit_word(0);
    return code_.size() - 1;
  }

  void patch(std::size_t at, std::size_t target) { code_[at] = static_cast<std::uint16_t>(target); }

  // ---- statements ------------------------------------------------------------

  void block(const Block& b) {
    for (const auto& s : b) statement(s);
  }

  void statement(const Statement& s) {
    std::visit(
        [&](const auto& st) {
          using T = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<T, Assign>) {
            assign(st);
          } else if constexpr (std::is_same_v<T, CallStmt>) {
            const BuiltinDescriptor* d = typed_.call_statements.at(&st.call);
            std::vector<Operand> args;
            for (const auto& a : st.call.args) args.push_back(expr(a));
            emit_word(d->opcode);
            for (const auto& a : args) emit_operand(a);
          } else if constexpr (std::is_same_v<T, Goto>) {
            gotos_.emplace_back(emit_jump(CoreOp::jmp), name_key(st.label));
          } else if constexpr (std::is_same_v<T, LabelDef>) {
            labels_[name_key(st.name)] = here();
          } else if constexpr (std::is_same_v<T, Exit>) {
            emit(CoreOp::halt, {});
          } else if constexpr (std::is_same_v<T, If>) {
            if_statement(st);
          } else {
            case_statement(st);
          }
        },
        s.node);
    release_temps();
  }

  void if_statement(const If& st) {
    Operand c = expr(st.cond);
    std::size_t to_else = emit_jump(CoreOp::jmpf, c);
    release_temps();
    block(st.then_body);
    if (st.else_body) {
      std::size_t to_end = emit_jump(CoreOp::jmp);
      patch(to_else, here());
      block(*st.else_body);
      patch(to_end, here());
    } else {
      patch(to_else, here());
    }
  }

  void case_statement(const Case& st) {
    std::vector<std::size_t> to_end;
    for (const auto& arm : st.arms) {
      Operand c = expr(arm.cond);
      std::size_t to_next = emit_jump(CoreOp::jmpf, c);
      release_temps();
      block(arm.body);
      to_end.push_back(emit_jump(CoreOp::jmp));
      patch(to_next, here());
    }
    if (st.else_body) block(*st.else_body);
    for (auto at : to_end) patch(at, here());
  }

  void assign(const Assign& a) {
    const PathInfo& p = typed_.paths.at(&a.target);
    Operand root{SlotSpace::variable, typed_.variables[p.variable].slot};
    if (a.target.selectors.empty()) {
      Operand v = expr(a.value, root);
      if (v.space != root.space || v.index != root.index) emit(CoreOp::mov, {v, root});
      return;
    }
    // Indices in source order, then the value.
    std::vector<Operand> sel;
    for (std::size_t k = 0; k < a.target.selectors.size(); ++k) {
      const Selector& s = a.target.selectors[k];
      sel.push_back(s.field ? Operand{SlotSpace::constant, p.field_indices[k]} : expr(**s.index));
    }
    Operand value = expr(a.value);

    // Load the containers along the path, set the last step, write back.
    std::vector<Operand> chain{root};
    for (std::size_t k = 0; k + 1 < sel.size(); ++k) {
      Operand t = temp(p.step_types[k]);
      path_op(a.target.selectors[k], CoreOp::ldfu, CoreOp::ldiu, chain.back(), sel[k], t);
      chain.push_back(t);
    }
    std::size_t last = sel.size() - 1;
    path_op(a.target.selectors[last], CoreOp::setf, CoreOp::seti, chain.back(), sel[last], value);
    for (std::size_t k = last; k-- > 0;) {
      path_op(a.target.selectors[k], CoreOp::stfu, CoreOp::stiu, chain[k], sel[k], chain[k + 1]);
    }
  }

  /// Emits a field or index variant of a path command. For field steps the
  /// middle operand carries the field number in `index` (an immediate).
  void path_op(const Selector& s, CoreOp field_op, CoreOp index_op, Operand a, Operand mid, Operand b) {
    if (s.field) {
      emit_word(static_cast<std::uint16_t>(field_op));
      emit_operand(a);
      emit_word(static_cast<std::uint16_t>(mid.index));
      emit_operand(b);
    } else {
      emit(index_op, {a, mid, b});
    }
  }

  // ---- expressions -------------------------------------------------------------

  Operand result_slot(const TypePtr& t, std::optional<Operand> dest) { return dest ? *dest : temp(t); }

  /// Evaluates `e`; the result lands in `dest` when given and the value is computed.
  Operand expr(const Expr& e, std::optional<Operand> dest = std::nullopt) {
    return std::visit(
        [&](const auto& n) -> Operand {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLiteral>) {
            return int_const(n.value);
          } else if constexpr (std::is_same_v<T, RealLiteral>) {
            return value_const(Value::of_real(n.value));
          } else if constexpr (std::is_same_v<T, StringLiteral>) {
            return value_const(Value::of_string(n.value));
          } else if constexpr (std::is_same_v<T, Paren>) {
            return expr(*n.inner, dest);
          } else if constexpr (std::is_same_v<T, VarPath>) {
            return name_expr(e, n, dest);
          } else if constexpr (std::is_same_v<T, Unary>) {
            Operand x = expr(*n.operand);
            return operation(e, {x}, dest);
          } else if constexpr (std::is_same_v<T, Binary>) {
            Operand l = expr(*n.lhs);
            Operand r = expr(*n.rhs);
            return operation(e, {l, r}, dest);
          } else {
            std::vector<Operand> args;
            for (const auto& a : n.args) args.push_back(expr(a));
            return operation(e, args, dest);
          }
        },
        e.node);
  }

  Operand operation(const Expr& e, const std::vector<Operand>& args, std::optional<Operand> dest) {
    const ExprInfo& info = typed_.info(e);
    Operand out = result_slot(info.type, dest);
    emit_word(info.op->opcode);
    for (const auto& a : args) emit_operand(a);
    emit_operand(out);
    return out;
  }

  Operand name_expr(const Expr& e, const VarPath& p, std::optional<Operand> dest) {
    const ExprInfo& info = typed_.info(e);
    if (info.kind == ExprKind::constant) return value_const(info.constant->value);
    if (info.kind == ExprKind::operation) return operation(e, {}, dest);

    const PathInfo& path = typed_.paths.at(&p);
    Operand cur{SlotSpace::variable, typed_.variables[path.variable].slot};
    for (std::size_t k = 0; k < p.selectors.size(); ++k) {
      const Selector& s = p.selectors[k];
      bool last = k + 1 == p.selectors.size();
      Operand mid = s.field ? Operand{SlotSpace::constant, path.field_indices[k]} : expr(**s.index);
      Operand next = last ? result_slot(path.step_types[k], dest) : temp(path.step_types[k]);
      path_op(s, last ? CoreOp::getf : CoreOp::ldfu, last ? CoreOp::geti : CoreOp::ldiu, cur, mid, next);
      cur = next;
    }
    return cur;
  }

  // ---- layout ------------------------------------------------------------------

  void finish() {
    for (const auto& [at, key] : gotos_) {
      auto it = labels_.find(key);
      if (it == labels_.end()) throw CompileError("GOTO to undeclared label");
      patch(at, it->second);
    }
    // Every label falls on a command start; a trailing label points at END.
    std::size_t nvars = typed_.variables.size();
    std::size_t total = nvars + temps_.size() + consts_.size();
    if (total > 0xFFFF) throw CompileError("frame exceeds 65535 slots (" + std::to_string(total) + ")");

    for (const auto& v : typed_.variables) {
      SlotEntry s;
      s.type = intern_type(v.type);
      s.kind = SlotKind::variable;
      s.name = intern_string(v.name);
      out_.slots.push_back(s);
    }
    for (auto t : temps_) out_.slots.push_back({t, SlotKind::temp, kNoIndex, kNoIndex});
    for (std::size_t i = 0; i < consts_.size(); ++i) {
      out_.constants.push_back(consts_[i]);
      out_.slots.push_back({consts_[i].type, SlotKind::constant, kNoIndex, static_cast<std::uint16_t>(i)});
    }
    for (std::size_t i = 0; i < code_.size(); ++i) {
      if (!fixups_[i]) continue;
      const Operand& o = *fixups_[i];
      std::size_t slot = o.index;
      if (o.space == SlotSpace::temp) slot += nvars;
      if (o.space == SlotSpace::constant) slot += nvars + temps_.size();
      code_[i] = static_cast<std::uint16_t>(slot);
    }
    out_.code = std::move(code_);
  }

  const TypedProgram& typed_;
  const Registry& registry_;
  CompiledProgram out_;
  std::map<std::string, std::uint16_t> string_index_;
  std::vector<TypePtr> type_ptrs_;
  std::vector<ConstEntry> consts_;
  std::vector<std::uint16_t> temps_;
  std::vector<bool> temp_busy_;
  std::vector<std::uint16_t> code_;
  std::vector<std::optional<Operand>> fixups_;
  std::map<std::string, std::size_t> labels_;
  std::vector<std::pair<std::size_t, std::string>> gotos_;
};

std::string iso_time(std::chrono::system_clock::time_point t) {
  auto secs = std::chrono::time_point_cast<std::chrono::seconds>(t);
  std::time_t tt = std::chrono::system_clock::to_time_t(secs);
  std::tm tm{};
  gmtime_r(&tt, &tm);
  char buf[32];
  std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
  return buf;
}

class StageTimer {
 public:
  StageTimer(CompileLog& log, std::string name) : log_(log) {
    stage_.name = std::move(name);
    stage_.started = std::chrono::system_clock::now();
    t0_ = std::chrono::steady_clock::now();
  }
  void done(bool ok) {
    stage_.ok = ok;
    stage_.elapsed = std::chrono::duration_cast<std::chrono::microseconds>(std::chrono::steady_clock::now() - t0_);
    log_.stages.push_back(stage_);
  }

 private:
  CompileLog& log_;
  CompileStage stage_;
  std::chrono::steady_clock::time_point t0_;
};

void append(Diagnostics& to, const Diagnostics& from) { to.insert(to.end(), from.begin(), from.end()); }

}  // namespace

CompiledProgram compile(const TypedProgram& typed, const Registry& registry) {
  return CodeGen(typed, registry).run();
}

CompileResult compile_source(const std::string& text, const Registry& registry, const std::string& source_name) {
  CompileResult result;
  CompileLog& log = result.log;
  log.source = source_name;

  StageTimer lex_stage(log, "lex");
  LexResult lexed = tokenize(text, registry);
  append(log.diagnostics, lexed.diagnostics);
  lex_stage.done(!has_errors(lexed.diagnostics));

  StageTimer parse_stage(log, "parse");
  ParseResult parsed = parse(lexed.tokens, registry);
  append(log.diagnostics, parsed.diagnostics);
  bool parse_ok = parsed.program && !has_errors(parsed.diagnostics);
  parse_stage.done(parse_ok);
  if (!parse_ok || has_errors(log.diagnostics)) return result;
  const Program& program = *parsed.program;
  log.program_name = program.name;

  StageTimer paren_stage(log, "parentheses");
  Diagnostics parens = check_redundant_parens(program, registry);
  append(log.diagnostics, parens);
  paren_stage.done(!has_errors(parens));

  StageTimer sema_stage(log, "semantics");
  SemaResult sema = analyze(program, registry);
  append(log.diagnostics, sema.diagnostics);
  sema_stage.done(sema.ok());
  if (has_errors(log.diagnostics)) return result;

  StageTimer gen_stage(log, "codegen");
  try {
    CompiledProgram cp = compile(sema.typed, registry);
    validate(cp, registry);
    log.code_words = cp.code.size();
    log.slot_count = cp.slots.size();
    log.ok = true;
    result.program = std::move(cp);
    gen_stage.done(true);
  } catch (const CompileError& e) {
    log.diagnostics.push_back({Severity::error, e.what(), program.pos});
    gen_stage.done(false);
  }
  return result;
}

std::string format_compile_log(const CompileLog& log, bool timestamps) {
  std::ostringstream out;
  out << "compile " << log.source;
  if (!log.program_name.empty()) out << " (program " << log.program_name << ")";
  out << "\n";
  for (const auto& s : log.stages) {
    out << "  stage " << s.name << ": " << (s.ok ? "ok" : "failed");
    if (timestamps) out << "  [" << iso_time(s.started) << ", " << s.elapsed.count() << " us]";
    out << "\n";
  }
  for (const auto& d : log.diagnostics) out << "  " << format_diagnostic(d, log.source) << "\n";
  if (log.ok) {
    out << "OK: " << log.code_words << " words, " << log.slot_count << " slots\n";
  } else {
    std::size_t errors = 0;
    for (const auto& d : log.diagnostics) errors += d.severity == Severity::error ? 1 : 0;
    out << "FAILED: " << errors << " error(s)\n";
  }
  return out.str();
}

void write_compile_log(const CompileLog& log, const std::string& path, bool timestamps) {
  std::ofstream f(path, std::ios::binary | std::ios::trunc);
  if (!f) throw IoError("cannot write compile log '" + path + "'");
  f << format_compile_log(log, timestamps);
  if (!f.flush()) throw IoError("cannot write compile log '" + path + "'");
}

}  // namespace ppg
