#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "diagnostics.hpp"

namespace ppg::ast {

/// Heap cell with value semantics, used to make the recursive AST copyable.
template <typename T>
class Box {
 public:
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}  // NOLINT(google-explicit-constructor)
  Box(const Box& other) : ptr_(std::make_unique<T>(*other.ptr_)) {}
  Box(Box&&) noexcept = default;
  Box& operator=(const Box& other) {
    if (this != &other) ptr_ = std::make_unique<T>(*other.ptr_);
    return *this;
  }
  Box& operator=(Box&&) noexcept = default;
  ~Box() = default;

  T& operator*() { return *ptr_; }
  const T& operator*() const { return *ptr_; }
  T* operator->() { return ptr_.get(); }
  const T* operator->() const { return ptr_.get(); }
  T* get() { return ptr_.get(); }
  const T* get() const { return ptr_.get(); }

 private:
  std::unique_ptr<T> ptr_;
};

struct Expr;

struct IntLiteral {
  std::int64_t value = 0;
};
struct RealLiteral {
  double value = 0.0;
};
struct StringLiteral {
  std::string value;
};

/// One step of a variable path: `.Field` or `[index]`.
struct Selector {
  std::optional<std::string> field;
  std::optional<Box<Expr>> index;
  SourcePos pos;
};

/// `Name`, `Name.Field`, `Name[i].Field`... A bare name may also denote a
/// constant or a zero-argument builtin; sema decides.
struct VarPath {
  std::string root;
  SourcePos root_pos;
  std::vector<Selector> selectors;
};

struct Unary {
  std::string op;
  Box<Expr> operand;
};

struct Binary {
  std::string op;
  Box<Expr> lhs;
  Box<Expr> rhs;
};

struct Call {
  std::string name;
  std::vector<Expr> args;
};

/// Grouping parentheses, kept so redundancy can be judged.
struct Paren {
  Box<Expr> inner;
};

struct Expr {
  std::variant<IntLiteral, RealLiteral, StringLiteral, VarPath, Unary, Binary, Call, Paren> node;
  SourcePos pos;
};

struct Statement;
using Block = std::vector<Statement>;

struct Assign {
  VarPath target;
  Expr value;
};
struct CallStmt {
  Call call;
};
struct Goto {
  std::string label;
};
struct LabelDef {
  std::string name;
};
struct Exit {};

struct If {
  Expr cond;
  Block then_body;
  std::optional<Block> else_body;
  SourcePos else_pos;
  SourcePos end_pos;
};

struct CaseArm {
  Expr cond;
  Block body;
  SourcePos pos;
};

struct Case {
  std::vector<CaseArm> arms;
  std::optional<Block> else_body;
  SourcePos else_pos;
  SourcePos end_pos;
};

struct Statement {
  std::variant<Assign, CallStmt, Goto, LabelDef, Exit, If, Case> node;
  SourcePos pos;
};

/// Type reference: a (possibly multi-word) type name or an inline array.
struct TypeRef;
struct NamedType {
  std::string name;
};
struct ArrayType {
  std::int64_t lo = 0;
  std::int64_t hi = 0;
  Box<TypeRef> element;
};
struct TypeRef {
  std::variant<NamedType, ArrayType> node;
  SourcePos pos;
};

struct FieldDecl {
  std::vector<std::string> names;
  TypeRef type;
  SourcePos pos;
};

struct RecordDef {
  std::vector<FieldDecl> fields;
  SourcePos end_pos;
};

struct TypeDecl {
  std::string name;
  std::variant<RecordDef, TypeRef> def;
  SourcePos pos;
};

struct VarDecl {
  std::vector<std::string> names;
  TypeRef type;
  SourcePos pos;
};

struct Program {
  std::string name;
  bool has_type_section = false;
  bool has_var_section = false;
  std::vector<TypeDecl> type_decls;
  std::vector<VarDecl> var_decls;
  Block body;
  SourcePos pos;
};

/// Structural equality ignoring source positions.
bool equal(const Expr& a, const Expr& b);
bool equal(const Statement& a, const Statement& b);
bool equal(const Block& a, const Block& b);
bool equal(const TypeRef& a, const TypeRef& b);
bool equal(const Program& a, const Program& b);

/// Copy of `e` with every Paren node removed.
Expr strip_parens(const Expr& e);

}  // namespace ppg::ast
