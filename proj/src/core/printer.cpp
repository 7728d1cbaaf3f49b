#include "printer.hpp"

#include <functional>

#include "builtins.hpp"
#include "parser.hpp"
#include "text.hpp"

namespace ppg {

using namespace ast;

namespace {

std::string quote(const std::string& s) {
  std::string out = "'";
  for (char c : s) {
    out += c;
    if (c == '\'') out += '\'';
  }
  return out + "'";
}

std::string real_text(double v) {
  std::string s = format_shortest(v);
  if (s.find('.') == std::string::npos) s += ".0";
  return s;
}

bool is_word(const std::string& op) {
  return !op.empty() && (static_cast<unsigned char>(op[0]) >= 0x80 || std::isalpha(static_cast<unsigned char>(op[0])));
}

constexpr int kAtomLevel = 100;

int level_of(const Expr& e, const Registry& registry) {
  if (const auto* b = std::get_if<Binary>(&e.node)) {
    const auto* d = registry.lookup(b->op);
    return d ? d->precedence : 0;
  }
  if (const auto* u = std::get_if<Unary>(&e.node)) {
    const auto* d = registry.lookup_prefix(u->op);
    return d ? d->precedence : 0;
  }
  return kAtomLevel;
}

bool right_assoc(const std::string& op, const Registry& registry) {
  const auto* d = registry.lookup(op);
  return d && d->right_assoc;
}

Expr wrap(Expr e) {
  SourcePos p = e.pos;
  return Expr{Paren{std::move(e)}, p};
}

Expr add_minimal(const Expr& e, const Registry& registry);

Expr child_in_binary(const Expr& child, const std::string& parent_op, bool left, const Registry& registry) {
  Expr c = add_minimal(child, registry);
  const auto* pd = registry.lookup(parent_op);
  int parent = pd ? pd->precedence : 0;
  bool ra = right_assoc(parent_op, registry);
  int lvl = level_of(child, registry);
  bool needs = false;
  if (std::holds_alternative<Binary>(child.node)) {
    needs = lvl < parent || (lvl == parent && (left ? ra : !ra));
  } else if (std::holds_alternative<Unary>(child.node)) {
    // "-a ^ b" reads as -(a ^ b): a prefix operand on the left swallows tighter operators.
    needs = left && parent > lvl;
  }
  return needs ? wrap(std::move(c)) : c;
}

Expr add_minimal(const Expr& e, const Registry& registry) {
  return std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Binary>) {
          return Expr{Binary{n.op, child_in_binary(*n.lhs, n.op, true, registry),
                             child_in_binary(*n.rhs, n.op, false, registry)},
                      e.pos};
        } else if constexpr (std::is_same_v<T, Unary>) {
          Expr operand = add_minimal(*n.operand, registry);
          if (std::holds_alternative<Binary>(n.operand->node) &&
              level_of(*n.operand, registry) < level_of(e, registry)) {
            operand = wrap(std::move(operand));
          }
          return Expr{Unary{n.op, std::move(operand)}, e.pos};
        } else if constexpr (std::is_same_v<T, Call>) {
          Call c{n.name, {}};
          for (const auto& a : n.args) c.args.push_back(add_minimal(a, registry));
          return Expr{std::move(c), e.pos};
        } else if constexpr (std::is_same_v<T, VarPath>) {
          VarPath p{n.root, n.root_pos, {}};
          for (const auto& s : n.selectors) {
            Selector sel{s.field, std::nullopt, s.pos};
            if (s.index) sel.index = Box<Expr>(add_minimal(**s.index, registry));
            p.selectors.push_back(std::move(sel));
          }
          return Expr{std::move(p), e.pos};
        } else if constexpr (std::is_same_v<T, Paren>) {
          return add_minimal(*n.inner, registry);
        } else {
          return e;
        }
      },
      e.node);
}

std::string path_text(const VarPath& p) {
  std::string out = p.root;
  for (const auto& s : p.selectors) {
    if (s.field) {
      out += "." + *s.field;
    } else {
      out += "[" + print_expr(**s.index) + "]";
    }
  }
  return out;
}

std::string call_text(const Call& c) {
  std::string out = c.name + " (";
  for (std::size_t i = 0; i < c.args.size(); ++i) out += (i ? ", " : "") + print_expr(c.args[i]);
  return out + ")";
}

// ---- redundancy ------------------------------------------------------------

/// Number of Paren nodes in `e`.
void count_parens(const Expr& e, std::size_t& n) {
  std::visit(
      [&](const auto& x) {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Paren>) {
          ++n;
          count_parens(*x.inner, n);
        } else if constexpr (std::is_same_v<T, Unary>) {
          count_parens(*x.operand, n);
        } else if constexpr (std::is_same_v<T, Binary>) {
          count_parens(*x.lhs, n);
          count_parens(*x.rhs, n);
        } else if constexpr (std::is_same_v<T, Call>) {
          for (const auto& a : x.args) count_parens(a, n);
        } else if constexpr (std::is_same_v<T, VarPath>) {
          for (const auto& s : x.selectors) {
            if (s.index) count_parens(**s.index, n);
          }
        }
      },
      e.node);
}

/// Copy of `e` with the `target`-th Paren (preorder) removed; its position
/// is reported through `where`.
Expr without_paren(const Expr& e, std::size_t target, std::size_t& seen, SourcePos& where) {
  return std::visit(
      [&](const auto& x) -> Expr {
        using T = std::decay_t<decltype(x)>;
        if constexpr (std::is_same_v<T, Paren>) {
          if (seen++ == target) {
            where = e.pos;
            return *x.inner;
          }
          return Expr{Paren{without_paren(*x.inner, target, seen, where)}, e.pos};
        } else if constexpr (std::is_same_v<T, Unary>) {
          return Expr{Unary{x.op, without_paren(*x.operand, target, seen, where)}, e.pos};
        } else if constexpr (std::is_same_v<T, Binary>) {
          Expr l = without_paren(*x.lhs, target, seen, where);
          Expr r = without_paren(*x.rhs, target, seen, where);
          return Expr{Binary{x.op, std::move(l), std::move(r)}, e.pos};
        } else if constexpr (std::is_same_v<T, Call>) {
          Call c{x.name, {}};
          for (const auto& a : x.args) c.args.push_back(without_paren(a, target, seen, where));
          return Expr{std::move(c), e.pos};
        } else if constexpr (std::is_same_v<T, VarPath>) {
          VarPath p{x.root, x.root_pos, {}};
          for (const auto& s : x.selectors) {
            Selector sel{s.field, std::nullopt, s.pos};
            if (s.index) sel.index = Box<Expr>(without_paren(**s.index, target, seen, where));
            p.selectors.push_back(std::move(sel));
          }
          return Expr{std::move(p), e.pos};
        } else {
          return e;
        }
      },
      e.node);
}

void for_each_expr(const Block& block, const std::function<void(const Expr&)>& f);

void for_path(const VarPath& p, const std::function<void(const Expr&)>& f) {
  for (const auto& s : p.selectors) {
    if (s.index) f(**s.index);
  }
}

void for_each_expr(const Block& block, const std::function<void(const Expr&)>& f) {
  for (const auto& s : block) {
    std::visit(
        [&](const auto& st) {
          using T = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<T, Assign>) {
            for_path(st.target, f);
            f(st.value);
          } else if constexpr (std::is_same_v<T, CallStmt>) {
            for (const auto& a : st.call.args) f(a);
          } else if constexpr (std::is_same_v<T, If>) {
            f(st.cond);
            for_each_expr(st.then_body, f);
            if (st.else_body) for_each_expr(*st.else_body, f);
          } else if constexpr (std::is_same_v<T, Case>) {
            for (const auto& arm : st.arms) {
              f(arm.cond);
              for_each_expr(arm.body, f);
            }
            if (st.else_body) for_each_expr(*st.else_body, f);
          }
        },
        s.node);
  }
}

// ---- program printing --------------------------------------------------------

class ProgramPrinter {
 public:
  explicit ProgramPrinter(const Registry& registry) : registry_(registry) {}

  std::string run(const Program& p) {
    line("program " + p.name + ";");
    if (p.has_type_section) {
      line("type;");
      ++depth_;
      for (const auto& d : p.type_decls) type_decl(d);
      --depth_;
      line("endtype;");
    }
    if (p.has_var_section) {
      line("var;");
      ++depth_;
      for (const auto& v : p.var_decls) line(names(v.names) + " : " + type_ref(v.type) + ";");
      --depth_;
      line("endvar;");
    }
    block(p.body);
    line("endprogram;");
    return out_;
  }

 private:
  void line(const std::string& text) {
    out_.append(static_cast<std::size_t>(depth_) * 2, ' ');
    out_ += text;
    out_ += '\n';
  }

  static std::string names(const std::vector<std::string>& n) {
    std::string out;
    for (std::size_t i = 0; i < n.size(); ++i) out += (i ? ", " : "") + n[i];
    return out;
  }

  static std::string type_ref(const TypeRef& t) {
    if (const auto* n = std::get_if<NamedType>(&t.node)) return n->name;
    const auto& a = std::get<ArrayType>(t.node);
    return "array [" + std::to_string(a.lo) + ".." + std::to_string(a.hi) + "] of " + type_ref(*a.element);
  }

  void type_decl(const TypeDecl& d) {
    if (const auto* r = std::get_if<RecordDef>(&d.def)) {
      line(d.name + " = record;");
      ++depth_;
      for (const auto& f : r->fields) line(names(f.names) + " : " + type_ref(f.type) + ";");
      --depth_;
      line("endrecord;");
    } else {
      line(d.name + " = " + type_ref(std::get<TypeRef>(d.def)) + ";");
    }
  }

  std::string expr(const Expr& e) { return print_expr(normalize_parens(e, registry_)); }

  std::string path(const VarPath& p) {
    std::string out = p.root;
    for (const auto& s : p.selectors) {
      out += s.field ? "." + *s.field : "[" + expr(**s.index) + "]";
    }
    return out;
  }

  void block(const Block& b) {
    for (const auto& s : b) statement(s);
  }

  void statement(const Statement& s) {
    std::visit(
        [&](const auto& st) {
          using T = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<T, Assign>) {
            line(path(st.target) + " := " + expr(st.value) + ";");
          } else if constexpr (std::is_same_v<T, CallStmt>) {
            if (st.call.args.empty()) {
              line(st.call.name + ";");
            } else {
              Expr call{st.call, s.pos};
              line(expr(call) + ";");
            }
          } else if constexpr (std::is_same_v<T, Goto>) {
            line("goto " + st.label + ";");
          } else if constexpr (std::is_same_v<T, LabelDef>) {
            line(st.name + " :;");
          } else if constexpr (std::is_same_v<T, Exit>) {
            line("exit;");
          } else if constexpr (std::is_same_v<T, If>) {
            line("if " + expr(st.cond) + ";");
            nested(st.then_body);
            if (st.else_body) {
              line("else;");
              nested(*st.else_body);
            }
            line("endif;");
          } else if constexpr (std::is_same_v<T, Case>) {
            line("case;");
            for (const auto& arm : st.arms) {
              line("on " + expr(arm.cond) + ";");
              nested(arm.body);
            }
            if (st.else_body) {
              line("onelse;");
              nested(*st.else_body);
            }
            line("endcase;");
          }
        },
        s.node);
  }

  void nested(const Block& b) {
    ++depth_;
    block(b);
    --depth_;
  }

  const Registry& registry_;
  std::string out_;
  int depth_ = 0;
};

}  // namespace

std::string print_expr(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> std::string {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, IntLiteral>) {
          return std::to_string(n.value);
        } else if constexpr (std::is_same_v<T, RealLiteral>) {
          return real_text(n.value);
        } else if constexpr (std::is_same_v<T, StringLiteral>) {
          return quote(n.value);
        } else if constexpr (std::is_same_v<T, VarPath>) {
          return path_text(n);
        } else if constexpr (std::is_same_v<T, Unary>) {
          return n.op + (is_word(n.op) ? " " : "") + print_expr(*n.operand);
        } else if constexpr (std::is_same_v<T, Binary>) {
          return print_expr(*n.lhs) + " " + n.op + " " + print_expr(*n.rhs);
        } else if constexpr (std::is_same_v<T, Call>) {
          return call_text(n);
        } else {
          return "(" + print_expr(*n.inner) + ")";
        }
      },
      e.node);
}

Expr normalize_parens(const Expr& e, const Registry& registry) { return add_minimal(strip_parens(e), registry); }

std::string pretty_print(const Program& program, const Registry& registry) {
  return ProgramPrinter(registry).run(program);
}

Diagnostics check_redundant_parens(const Expr& e, const Registry& registry) {
  Diagnostics out;
  std::size_t total = 0;
  count_parens(e, total);
  for (std::size_t k = 0; k < total; ++k) {
    std::size_t seen = 0;
    SourcePos where;
    Expr reduced = without_paren(e, k, seen, where);
    auto reparsed = parse_expression(print_expr(reduced), registry);
    if (reparsed.expr && equal(*reparsed.expr, reduced)) {
      out.push_back({Severity::error, "redundant parentheses", where});
    }
  }
  return out;
}

Diagnostics check_redundant_parens(const Program& program, const Registry& registry) {
  Diagnostics out;
  for_each_expr(program.body, [&](const Expr& e) {
    auto d = check_redundant_parens(e, registry);
    out.insert(out.end(), d.begin(), d.end());
  });
  return out;
}

}  // namespace ppg
