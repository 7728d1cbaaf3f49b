#pragma once

#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "ast.hpp"
#include "builtins.hpp"
#include "diagnostics.hpp"
#include "types.hpp"

namespace ppg {

struct VariableInfo {
  std::string name;  // as declared
  TypePtr type;
  std::size_t slot = 0;
  SourcePos pos;
};

enum class ExprKind { literal, variable, constant, operation };

struct ExprInfo {
  TypePtr type;
  ExprKind kind = ExprKind::literal;
  const BuiltinDescriptor* op = nullptr;        // operation
  const BuiltinConstant* constant = nullptr;    // constant
};

/// Resolution of a variable path: the variable and the type after each selector.
struct PathInfo {
  std::size_t variable = 0;  // index into TypedProgram::variables
  std::vector<TypePtr> step_types;          // step_types[k] = type after selector k
  std::vector<std::size_t> field_indices;   // per selector; unused for index selectors
};

/// The syntax tree plus everything the compiler needs: expression types,
/// resolved operations and the variable frame layout. Refers to the analyzed
/// Program by address; keep it alive and unmoved.
struct TypedProgram {
  const ast::Program* program = nullptr;
  std::map<std::string, TypePtr> user_types;  // keyed by name_key
  std::vector<VariableInfo> variables;        // slot order
  std::unordered_map<const ast::Expr*, ExprInfo> exprs;
  std::unordered_map<const ast::VarPath*, PathInfo> paths;
  std::unordered_map<const ast::Call*, const BuiltinDescriptor*> call_statements;

  const VariableInfo* find_variable(const std::string& name) const;
  const ExprInfo& info(const ast::Expr& e) const { return exprs.at(&e); }
};

struct SemaResult {
  TypedProgram typed;
  Diagnostics diagnostics;
  bool ok() const { return !has_errors(diagnostics); }
};

/// Resolves user types against the built-in catalog.
std::map<std::string, TypePtr> build_type_table(const std::vector<ast::TypeDecl>& decls, Diagnostics& diags);

SemaResult analyze(const ast::Program& program, const Registry& registry);

}  // namespace ppg
