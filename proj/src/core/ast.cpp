#include "ast.hpp"

#include <bit>

namespace ppg {

std::string format_diagnostic(const Diagnostic& d, const std::string& path) {
  return path + ":" + std::to_string(d.pos.line) + ":" + std::to_string(d.pos.column) + ": " +
         (d.severity == Severity::error ? "error" : "warning") + ": " + d.message;
}

namespace ast {

namespace {

template <typename T>
const T* as(const auto& v) {
  return std::get_if<T>(&v);
}

bool equal_selectors(const std::vector<Selector>& a, const std::vector<Selector>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].field != b[i].field) return false;
    if (a[i].index.has_value() != b[i].index.has_value()) return false;
    if (a[i].index && !equal(**a[i].index, **b[i].index)) return false;
  }
  return true;
}

bool equal_paths(const VarPath& a, const VarPath& b) {
  return a.root == b.root && equal_selectors(a.selectors, b.selectors);
}

bool equal_calls(const Call& a, const Call& b) {
  if (a.name != b.name || a.args.size() != b.args.size()) return false;
  for (std::size_t i = 0; i < a.args.size(); ++i) {
    if (!equal(a.args[i], b.args[i])) return false;
  }
  return true;
}

bool equal_opt_blocks(const std::optional<Block>& a, const std::optional<Block>& b) {
  if (a.has_value() != b.has_value()) return false;
  return !a || equal(*a, *b);
}

bool equal_fields(const std::vector<FieldDecl>& a, const std::vector<FieldDecl>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (a[i].names != b[i].names || !equal(a[i].type, b[i].type)) return false;
  }
  return true;
}

}  // namespace

bool equal(const Expr& a, const Expr& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto x = as<IntLiteral>(a.node)) return x->value == as<IntLiteral>(b.node)->value;
  if (auto x = as<RealLiteral>(a.node)) {
    // bitwise, so -0.0 and 0.0 stay distinct
    return std::bit_cast<std::uint64_t>(x->value) == std::bit_cast<std::uint64_t>(as<RealLiteral>(b.node)->value);
  }
  if (auto x = as<StringLiteral>(a.node)) return x->value == as<StringLiteral>(b.node)->value;
  if (auto x = as<VarPath>(a.node)) return equal_paths(*x, *as<VarPath>(b.node));
  if (auto x = as<Unary>(a.node)) {
    auto y = as<Unary>(b.node);
    return x->op == y->op && equal(*x->operand, *y->operand);
  }
  if (auto x = as<Binary>(a.node)) {
    auto y = as<Binary>(b.node);
    return x->op == y->op && equal(*x->lhs, *y->lhs) && equal(*x->rhs, *y->rhs);
  }
  if (auto x = as<Call>(a.node)) return equal_calls(*x, *as<Call>(b.node));
  if (auto x = as<Paren>(a.node)) return equal(*x->inner, *as<Paren>(b.node)->inner);
  return false;
}

bool equal(const Statement& a, const Statement& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto x = as<Assign>(a.node)) {
    auto y = as<Assign>(b.node);
    return equal_paths(x->target, y->target) && equal(x->value, y->value);
  }
  if (auto x = as<CallStmt>(a.node)) return equal_calls(x->call, as<CallStmt>(b.node)->call);
  if (auto x = as<Goto>(a.node)) return x->label == as<Goto>(b.node)->label;
  if (auto x = as<LabelDef>(a.node)) return x->name == as<LabelDef>(b.node)->name;
  if (as<Exit>(a.node)) return true;
  if (auto x = as<If>(a.node)) {
    auto y = as<If>(b.node);
    return equal(x->cond, y->cond) && equal(x->then_body, y->then_body) &&
           equal_opt_blocks(x->else_body, y->else_body);
  }
  if (auto x = as<Case>(a.node)) {
    auto y = as<Case>(b.node);
    if (x->arms.size() != y->arms.size()) return false;
    for (std::size_t i = 0; i < x->arms.size(); ++i) {
      if (!equal(x->arms[i].cond, y->arms[i].cond) || !equal(x->arms[i].body, y->arms[i].body)) return false;
    }
    return equal_opt_blocks(x->else_body, y->else_body);
  }
  return false;
}

bool equal(const Block& a, const Block& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    if (!equal(a[i], b[i])) return false;
  }
  return true;
}

bool equal(const TypeRef& a, const TypeRef& b) {
  if (a.node.index() != b.node.index()) return false;
  if (auto x = as<NamedType>(a.node)) return x->name == as<NamedType>(b.node)->name;
  auto x = as<ArrayType>(a.node);
  auto y = as<ArrayType>(b.node);
  return x->lo == y->lo && x->hi == y->hi && equal(*x->element, *y->element);
}

bool equal(const Program& a, const Program& b) {
  if (a.name != b.name || a.has_type_section != b.has_type_section || a.has_var_section != b.has_var_section)
    return false;
  if (a.type_decls.size() != b.type_decls.size() || a.var_decls.size() != b.var_decls.size()) return false;
  for (std::size_t i = 0; i < a.type_decls.size(); ++i) {
    const auto& x = a.type_decls[i];
    const auto& y = b.type_decls[i];
    if (x.name != y.name || x.def.index() != y.def.index()) return false;
    if (auto r = as<RecordDef>(x.def)) {
      if (!equal_fields(r->fields, as<RecordDef>(y.def)->fields)) return false;
    } else if (!equal(*as<TypeRef>(x.def), *as<TypeRef>(y.def))) {
      return false;
    }
  }
  for (std::size_t i = 0; i < a.var_decls.size(); ++i) {
    if (a.var_decls[i].names != b.var_decls[i].names || !equal(a.var_decls[i].type, b.var_decls[i].type))
      return false;
  }
  return equal(a.body, b.body);
}

Expr strip_parens(const Expr& e) {
  return std::visit(
      [&](const auto& n) -> Expr {
        using T = std::decay_t<decltype(n)>;
        if constexpr (std::is_same_v<T, Paren>) {
          return strip_parens(*n.inner);
        } else if constexpr (std::is_same_v<T, Unary>) {
          return Expr{Unary{n.op, strip_parens(*n.operand)}, e.pos};
        } else if constexpr (std::is_same_v<T, Binary>) {
          return Expr{Binary{n.op, strip_parens(*n.lhs), strip_parens(*n.rhs)}, e.pos};
        } else if constexpr (std::is_same_v<T, Call>) {
          Call c{n.name, {}};
          for (const auto& a : n.args) c.args.push_back(strip_parens(a));
          return Expr{std::move(c), e.pos};
        } else if constexpr (std::is_same_v<T, VarPath>) {
          VarPath p{n.root, n.root_pos, {}};
          for (const auto& s : n.selectors) {
            Selector sel{s.field, std::nullopt, s.pos};
            if (s.index) sel.index = Box<Expr>(strip_parens(**s.index));
            p.selectors.push_back(std::move(sel));
          }
          return Expr{std::move(p), e.pos};
        } else {
          return e;
        }
      },
      e.node);
}

}  // namespace ast
}  // namespace ppg
