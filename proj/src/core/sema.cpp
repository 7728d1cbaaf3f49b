#include "sema.hpp"

#include <set>

#include "text.hpp"

namespace ppg {

using namespace ast;

const VariableInfo* TypedProgram::find_variable(const std::string& name) const {
  auto key = name_key(name);
  for (const auto& v : variables) {
    if (name_key(v.name) == key) return &v;
  }
  return nullptr;
}

namespace {

constexpr std::int64_t kMaxArrayLength = 65535;

bool contains_address(const TypePtr& t, std::set<const TypeDescriptor*>& seen) {
  if (!t || !seen.insert(t.get()).second) return false;
  if (t->kind == TypeKind::address) return true;
  if (t->kind == TypeKind::array) return contains_address(t->element, seen);
  if (t->kind == TypeKind::record) {
    // Built-in records may carry internal address fields; only user layouts are checked.
    if (TypeCatalog::instance().find(t->name) == t) return false;
    for (const auto& f : t->fields) {
      if (contains_address(f.type, seen)) return true;
    }
  }
  return false;
}

class TypeResolver {
 public:
  TypeResolver(const std::vector<TypeDecl>& decls, Diagnostics& diags) : diags_(diags) {
    const auto& catalog = TypeCatalog::instance();
    for (const auto& d : decls) {
      auto key = name_key(d.name);
      if (catalog.find(d.name)) {
        error(d.pos, "redeclaration of built-in type '" + d.name + "'");
        continue;
      }
      if (decls_.count(key)) {
        error(d.pos, "duplicate type '" + d.name + "'");
        continue;
      }
      decls_[key] = &d;
      order_.push_back(key);
    }
  }

  std::map<std::string, TypePtr> run() {
    for (const auto& key : order_) resolve_decl(key);
    std::map<std::string, TypePtr> out;
    for (const auto& [k, t] : done_) {
      if (t) out[k] = t;
    }
    return out;
  }

  TypePtr resolve_ref(const TypeRef& ref) {
    if (const auto* n = std::get_if<NamedType>(&ref.node)) return resolve_name(n->name, ref.pos);
    const auto& a = std::get<ArrayType>(ref.node);
    if (a.lo > a.hi) {
      error(ref.pos, "array bounds " + std::to_string(a.lo) + ".." + std::to_string(a.hi) + " are empty");
      return nullptr;
    }
    if (a.hi - a.lo + 1 > kMaxArrayLength || a.lo < INT32_MIN || a.hi > INT32_MAX) {
      error(ref.pos, "array of " + std::to_string(a.hi - a.lo + 1) + " elements is too large");
      return nullptr;
    }
    TypePtr elem = resolve_ref(*a.element);
    if (!elem) return nullptr;
    return types::make_array(static_cast<std::int32_t>(a.lo), static_cast<std::int32_t>(a.hi), elem);
  }

 private:
  void error(SourcePos p, std::string m) { diags_.push_back({Severity::error, std::move(m), p}); }

  TypePtr resolve_name(const std::string& name, SourcePos pos) {
    auto key = name_key(name);
    if (decls_.count(key)) return resolve_decl(key, pos);
    TypePtr t = TypeCatalog::instance().find(name);
    if (!t) {
      error(pos, "unknown type '" + name + "'");
      return nullptr;
    }
    if (t->kind == TypeKind::address) {
      error(pos, "type Адрес is internal and cannot be used in declarations");
      return nullptr;
    }
    return t;
  }

  TypePtr resolve_decl(const std::string& key, std::optional<SourcePos> use = std::nullopt) {
    if (auto it = done_.find(key); it != done_.end()) return it->second;
    const TypeDecl& d = *decls_.at(key);
    if (in_progress_.count(key)) {
      error(use.value_or(d.pos), "recursive type '" + d.name + "'");
      done_[key] = nullptr;
      return nullptr;
    }
    in_progress_.insert(key);
    TypePtr result;
    if (const auto* rec = std::get_if<RecordDef>(&d.def)) {
      std::vector<Field> fields;
      std::set<std::string> names;
      bool ok = true;
      for (const auto& f : rec->fields) {
        TypePtr ft = resolve_ref(f.type);
        if (!ft) ok = false;
        for (const auto& n : f.names) {
          if (!n.empty() && n[0] == '_') {
            error(f.pos, "field name '" + n + "' is reserved (leading '_')");
            ok = false;
          }
          if (!names.insert(name_key(n)).second) {
            error(f.pos, "duplicate field '" + n + "' in record '" + d.name + "'");
            ok = false;
          }
          fields.push_back({n, ft});
        }
      }
      if (fields.empty()) {
        error(d.pos, "record '" + d.name + "' has no fields");
        ok = false;
      }
      if (ok) result = types::make_record(d.name, std::move(fields));
    } else {
      const auto& ref = std::get<TypeRef>(d.def);
      result = resolve_ref(ref);
      if (result && result->kind == TypeKind::array && result->name.empty()) {
        result = types::make_array(result->lo, result->hi, result->element, d.name);
      }
    }
    in_progress_.erase(key);
    if (!done_.count(key)) done_[key] = result;
    return done_[key];
  }

  Diagnostics& diags_;
  std::map<std::string, const TypeDecl*> decls_;
  std::vector<std::string> order_;
  std::map<std::string, TypePtr> done_;
  std::set<std::string> in_progress_;
};

class Analyzer {
 public:
  Analyzer(const Program& program, const Registry& registry) : prog_(program), registry_(registry) {}

  SemaResult run() {
    SemaResult out;
    out.typed.program = &prog_;
    typed_ = &out.typed;

    TypeResolver resolver(prog_.type_decls, diags_);
    typed_->user_types = resolver.run();

    declare_variables(resolver);
    collect_labels(prog_.body);
    block(prog_.body);

    out.diagnostics = std::move(diags_);
    return out;
  }

 private:
  void error(SourcePos p, std::string m) { diags_.push_back({Severity::error, std::move(m), p}); }

  TypePtr lookup_type(const TypeRef& ref, TypeResolver& resolver) {
    if (const auto* n = std::get_if<NamedType>(&ref.node)) {
      if (auto it = typed_->user_types.find(name_key(n->name)); it != typed_->user_types.end()) return it->second;
      // resolver reports unknown names; user types that failed were already reported
      bool known_user = false;
      for (const auto& d : prog_.type_decls) known_user = known_user || name_key(d.name) == name_key(n->name);
      if (known_user) return nullptr;
    }
    return resolver.resolve_ref(ref);
  }

  void declare_variables(TypeResolver& resolver) {
    std::set<std::string> seen;
    for (const auto& decl : prog_.var_decls) {
      TypePtr t = lookup_type(decl.type, resolver);
      if (t) {
        std::set<const TypeDescriptor*> visited;
        if (contains_address(t, visited)) {
          error(decl.type.pos, "variables of type Адрес are not allowed");
          t = nullptr;
        }
      }
      for (const auto& name : decl.names) {
        auto key = name_key(name);
        if (!seen.insert(key).second) {
          error(decl.pos, "duplicate variable '" + name + "'");
          continue;
        }
        if (registry_.lookup(name)) {
          error(decl.pos, "variable '" + name + "' collides with the built-in operation of the same name");
          continue;
        }
        if (registry_.constant(name)) {
          error(decl.pos, "variable '" + name + "' collides with the built-in constant of the same name");
          continue;
        }
        if (TypeCatalog::instance().find(name) || typed_->user_types.count(key)) {
          error(decl.pos, "variable '" + name + "' collides with a type name");
          continue;
        }
        if (!t) {
          poisoned_.insert(key);
          continue;
        }
        typed_->variables.push_back({name, t, typed_->variables.size(), decl.pos});
      }
    }
  }

  void collect_labels(const Block& b) {
    for (const auto& s : b) {
      if (const auto* l = std::get_if<LabelDef>(&s.node)) {
        if (typed_->find_variable(l->name)) error(s.pos, "label '" + l->name + "' collides with a variable");
      } else if (const auto* i = std::get_if<If>(&s.node)) {
        collect_labels(i->then_body);
        if (i->else_body) collect_labels(*i->else_body);
      } else if (const auto* c = std::get_if<Case>(&s.node)) {
        for (const auto& arm : c->arms) collect_labels(arm.body);
        if (c->else_body) collect_labels(*c->else_body);
      }
    }
  }

  // ---- statements ----------------------------------------------------------

  void block(const Block& b) {
    for (const auto& s : b) statement(s);
  }

  void condition(const Expr& e, const char* what) {
    TypePtr t = expr(e);
    if (t && t->kind != TypeKind::boolean) {
      error(e.pos, std::string("type mismatch: ") + what + " condition must be Логическое, got " + types::display(t));
    }
  }

  void statement(const Statement& s) {
    std::visit(
        [&](const auto& st) {
          using T = std::decay_t<decltype(st)>;
          if constexpr (std::is_same_v<T, Assign>) {
            assign(st);
          } else if constexpr (std::is_same_v<T, CallStmt>) {
            call_statement(st.call, s.pos);
          } else if constexpr (std::is_same_v<T, If>) {
            condition(st.cond, "IF");
            block(st.then_body);
            if (st.else_body) block(*st.else_body);
          } else if constexpr (std::is_same_v<T, Case>) {
            for (const auto& arm : st.arms) {
              condition(arm.cond, "ON");
              block(arm.body);
            }
            if (st.else_body) block(*st.else_body);
          }
        },
        s.node);
  }

  void assign(const Assign& a) {
    const VarPath& target = a.target;
    TypePtr target_type;
    if (!typed_->find_variable(target.root)) {
      if (poisoned_.count(name_key(target.root))) {
        expr(a.value);
        return;
      }
      if (registry_.constant(target.root)) {
        error(target.root_pos, "cannot assign to built-in constant '" + target.root + "'");
      } else if (registry_.lookup(target.root)) {
        error(target.root_pos, "cannot assign to built-in operation '" + target.root + "'");
      } else {
        error(target.root_pos, "unknown identifier '" + target.root + "'");
      }
      expr(a.value);
      return;
    }
    target_type = path(target);
    TypePtr value_type = expr(a.value);
    if (!target_type || !value_type) return;
    if (!types::assignable(target_type, value_type)) {
      error(a.value.pos, "type mismatch: cannot assign " + types::display(value_type) + " to " +
                     types::display(target_type));
    }
  }

  void call_statement(const Call& c, SourcePos pos) {
    const BuiltinDescriptor* d = registry_.lookup(c.name);
    if (!d || d->fixity == Fixity::infix) {
      if (typed_->find_variable(c.name)) {
        error(pos, "'" + c.name + "' is a variable, not an operation");
      } else {
        error(pos, "unknown operation '" + c.name + "'");
      }
      for (const auto& a : c.args) expr(a);
      return;
    }
    std::vector<TypePtr> args;
    bool ok = true;
    for (const auto& a : c.args) {
      args.push_back(expr(a));
      ok = ok && args.back();
    }
    if (!ok) return;
    if (d->fixity == Fixity::bare && !c.args.empty()) {
      error(pos, "'" + d->name + "' takes no arguments");
      return;
    }
    std::string err;
    TypePtr result = d->check(args, err);
    if (!err.empty()) {
      error(pos, err);
      return;
    }
    if (d->returns_value) {
      error(pos, "the value of '" + d->name + "' (" + types::display(result) + ") must be used");
      return;
    }
    typed_->call_statements[&c] = d;
  }

  // ---- expressions ---------------------------------------------------------

  TypePtr note(const Expr& e, ExprInfo info) {
    TypePtr t = info.type;
    typed_->exprs[&e] = std::move(info);
    return t;
  }

  /// Type of a variable path; records a PathInfo. Precondition: root is a variable.
  TypePtr path(const VarPath& p) {
    const VariableInfo* v = typed_->find_variable(p.root);
    PathInfo info;
    info.variable = static_cast<std::size_t>(v - typed_->variables.data());
    TypePtr t = v->type;
    for (const auto& sel : p.selectors) {
      if (sel.field) {
        if (t->kind != TypeKind::record) {
          error(sel.pos, "field access '." + *sel.field + "' on non-record type " + types::display(t));
          return nullptr;
        }
        if (!sel.field->empty() && (*sel.field)[0] == '_') {
          error(sel.pos, "field '" + *sel.field + "' is reserved");
          return nullptr;
        }
        auto idx = t->field_index(*sel.field);
        if (!idx) {
          error(sel.pos, "record " + types::display(t) + " has no field '" + *sel.field + "'");
          return nullptr;
        }
        info.field_indices.push_back(*idx);
        t = t->fields[*idx].type;
      } else {
        TypePtr it = expr(**sel.index);
        if (t->kind != TypeKind::array) {
          error(sel.pos, "indexing a non-array type " + types::display(t));
          return nullptr;
        }
        if (!it) return nullptr;
        if (it->kind != TypeKind::integer) {
          error((*sel.index)->pos, "type mismatch: array index must be Целое, got " + types::display(it));
          return nullptr;
        }
        if (const auto* lit = std::get_if<IntLiteral>(&(*sel.index)->node)) {
          if (lit->value < t->lo || lit->value > t->hi) {
            error((*sel.index)->pos, "index " + std::to_string(lit->value) + " outside " + std::to_string(t->lo) +
                                         ".." + std::to_string(t->hi));
            return nullptr;
          }
        }
        info.field_indices.push_back(0);
        t = t->element;
      }
      info.step_types.push_back(t);
    }
    typed_->paths[&p] = std::move(info);
    return t;
  }

  TypePtr expr(const Expr& e) {
    return std::visit(
        [&](const auto& n) -> TypePtr {
          using T = std::decay_t<decltype(n)>;
          if constexpr (std::is_same_v<T, IntLiteral>) {
            return note(e, {types::integer(), ExprKind::literal});
          } else if constexpr (std::is_same_v<T, RealLiteral>) {
            return note(e, {types::real(), ExprKind::literal});
          } else if constexpr (std::is_same_v<T, StringLiteral>) {
            return note(e, {types::string(), ExprKind::literal});
          } else if constexpr (std::is_same_v<T, VarPath>) {
            return name_expr(e, n);
          } else if constexpr (std::is_same_v<T, Unary>) {
            TypePtr operand = expr(*n.operand);
            if (!operand) return nullptr;
            const auto* d = registry_.lookup_prefix(n.op);
            return apply(e, d, n.op, {operand});
          } else if constexpr (std::is_same_v<T, Binary>) {
            TypePtr l = expr(*n.lhs);
            TypePtr r = expr(*n.rhs);
            if (!l || !r) return nullptr;
            return apply(e, registry_.lookup(n.op), n.op, {l, r});
          } else if constexpr (std::is_same_v<T, Call>) {
            return call_expr(e, n);
          } else {
            TypePtr inner = expr(*n.inner);
            if (!inner) return nullptr;
            return note(e, {inner, ExprKind::literal});
          }
        },
        e.node);
  }

  TypePtr apply(const Expr& e, const BuiltinDescriptor* d, const std::string& name, std::vector<TypePtr> args) {
    if (!d) {
      error(e.pos, "unknown operator '" + name + "'");
      return nullptr;
    }
    std::string err;
    TypePtr t = d->check(args, err);
    if (!t) {
      error(e.pos, err.empty() ? "'" + name + "' does not produce a value" : err);
      return nullptr;
    }
    return note(e, {t, ExprKind::operation, d});
  }

  TypePtr name_expr(const Expr& e, const VarPath& p) {
    if (typed_->find_variable(p.root)) {
      TypePtr t = path(p);
      if (!t) return nullptr;
      return note(e, {t, ExprKind::variable});
    }
    if (poisoned_.count(name_key(p.root))) return nullptr;
    if (const auto* c = registry_.constant(p.root)) {
      if (!p.selectors.empty()) {
        error(p.selectors.front().pos, "constant '" + c->name + "' has no fields or elements");
        return nullptr;
      }
      return note(e, {c->value.type(), ExprKind::constant, nullptr, c});
    }
    if (const auto* d = registry_.lookup(p.root)) {
      if (d->fixity != Fixity::bare) {
        error(p.root_pos, "'" + d->name + "' needs an argument list");
        return nullptr;
      }
      if (!p.selectors.empty()) {
        error(p.selectors.front().pos, "selectors on the result of '" + d->name + "' are not supported");
        return nullptr;
      }
      return apply(e, d, d->name, {});
    }
    error(p.root_pos, "unknown identifier '" + p.root + "'");
    return nullptr;
  }

  TypePtr call_expr(const Expr& e, const Call& c) {
    const BuiltinDescriptor* d = registry_.lookup(c.name);
    if (!d || d->fixity == Fixity::infix) {
      if (typed_->find_variable(c.name)) {
        error(e.pos, "'" + c.name + "' is a variable, not an operation");
      } else {
        error(e.pos, "unknown operation '" + c.name + "'");
      }
      for (const auto& a : c.args) expr(a);
      return nullptr;
    }
    std::vector<TypePtr> args;
    bool ok = true;
    for (const auto& a : c.args) {
      args.push_back(expr(a));
      ok = ok && args.back();
    }
    if (!ok) return nullptr;
    if (d->fixity == Fixity::bare) {
      error(e.pos, "'" + d->name + "' is written without parentheses");
      return nullptr;
    }
    std::string err;
    TypePtr t = d->check(args, err);
    if (!err.empty()) {
      error(e.pos, err);
      return nullptr;
    }
    if (!t) {
      error(e.pos, "'" + d->name + "' does not return a value");
      return nullptr;
    }
    return note(e, {t, ExprKind::operation, d});
  }

  const Program& prog_;
  const Registry& registry_;
  TypedProgram* typed_ = nullptr;
  Diagnostics diags_;
  std::set<std::string> poisoned_;  // variables whose declaration failed
};

}  // namespace

std::map<std::string, TypePtr> build_type_table(const std::vector<TypeDecl>& decls, Diagnostics& diags) {
  return TypeResolver(decls, diags).run();
}

SemaResult analyze(const Program& program, const Registry& registry) {
  return Analyzer(program, registry).run();
}

}  // namespace ppg
