#pragma once

#include "crystality/value.hpp"

#include <memory>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace crystality {

// Line/column of a node in its source (1-based; 0 for synthesized nodes).
// Positions never take part in structural equality, so a re-parsed AST
// compares equal to the one that was printed.
struct SourcePos {
  int line = 0;
  int column = 0;

  friend bool operator==(const SourcePos&, const SourcePos&) { return true; }
};

// Owning pointer with value semantics: deep copy, deep comparison.
template <typename T>
class Box {
 public:
  Box() : ptr_(std::make_unique<T>()) {}
  Box(T value) : ptr_(std::make_unique<T>(std::move(value))) {}
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

  friend bool operator==(const Box& a, const Box& b) { return *a.ptr_ == *b.ptr_; }

 private:
  std::unique_ptr<T> ptr_;
};

enum class ScopeTag { Address, Engine, Global };

std::string_view to_string(ScopeTag s);  // "@address" ...

enum class BinOp { Add, Sub, Mul, Div, Le, Lt, Eq, Ge, Gt, Ne };

std::string_view to_string(BinOp op);
bool is_comparison(BinOp op);

// ---- expressions ----

struct Exp;

struct IdentExp {
  std::string name;
  friend bool operator==(const IdentExp&, const IdentExp&) = default;
};

struct CallExp {
  std::string func;
  std::vector<Exp> args;
  friend bool operator==(const CallExp&, const CallExp&) = default;
};

struct LiteralExp {
  TypedValue value;
  friend bool operator==(const LiteralExp&, const LiteralExp&) = default;
};

struct BinaryExp {
  BinOp op = BinOp::Add;
  Box<Exp> lhs;
  Box<Exp> rhs;
  friend bool operator==(const BinaryExp&, const BinaryExp&) = default;
};

struct Exp {
  std::variant<IdentExp, CallExp, LiteralExp, BinaryExp> node;
  SourcePos pos;

  friend bool operator==(const Exp&, const Exp&) = default;
};

// ---- statements ----

struct Stmt;

struct TempDecl {
  TypeName type = TypeName::UInt256;
  std::string name;
  friend bool operator==(const TempDecl&, const TempDecl&) = default;
};

struct Skip {
  friend bool operator==(const Skip&, const Skip&) = default;
};

struct Assign {
  std::string target;
  Exp value;
  friend bool operator==(const Assign&, const Assign&) = default;
};

struct AtAddress {
  Exp address;
  friend bool operator==(const AtAddress&, const AtAddress&) = default;
};
struct AtEngines {
  friend bool operator==(const AtEngines&, const AtEngines&) = default;
};
struct AtGlobal {
  friend bool operator==(const AtGlobal&, const AtGlobal&) = default;
};

using RelayTargetExpr = std::variant<AtAddress, AtEngines, AtGlobal>;

struct Relay {
  RelayTargetExpr target;
  std::string func;
  std::vector<Exp> args;
  friend bool operator==(const Relay&, const Relay&) = default;
};

struct Return {
  Exp value;
  friend bool operator==(const Return&, const Return&) = default;
};

struct CallStmt {
  std::string func;
  std::vector<Exp> args;
  friend bool operator==(const CallStmt&, const CallStmt&) = default;
};

struct Seq {
  Box<Stmt> first;
  Box<Stmt> second;
  friend bool operator==(const Seq&, const Seq&) = default;
};

struct If {
  Exp cond;
  Box<Stmt> then_branch;
  Box<Stmt> else_branch;
  friend bool operator==(const If&, const If&) = default;
};

struct While {
  Exp cond;
  Box<Stmt> body;
  friend bool operator==(const While&, const While&) = default;
};

struct Stmt {
  std::variant<TempDecl, Skip, Assign, Relay, Return, CallStmt, Seq, If, While> node;
  SourcePos pos;

  friend bool operator==(const Stmt&, const Stmt&) = default;
};

// ---- declarations ----

struct Param {
  TypeName type = TypeName::UInt256;
  std::string name;
  friend bool operator==(const Param&, const Param&) = default;
};

struct StateVarDecl {
  TypeName type = TypeName::UInt256;
  ScopeTag scope = ScopeTag::Address;
  std::string name;
  SourcePos pos;
  friend bool operator==(const StateVarDecl&, const StateVarDecl&) = default;
};

struct FuncDecl {
  std::string name;
  std::vector<Param> params;
  ScopeTag scope = ScopeTag::Address;
  std::optional<TypeName> return_type;
  Stmt body;
  SourcePos pos;
  friend bool operator==(const FuncDecl&, const FuncDecl&) = default;
};

struct ContractDecl {
  std::string name;
  std::vector<StateVarDecl> state_vars;
  std::vector<FuncDecl> functions;
  friend bool operator==(const ContractDecl&, const ContractDecl&) = default;
};

// Convenience constructors, mostly for synthesized code and tests.
Exp ident(std::string name, SourcePos pos = {});
Exp literal(TypedValue v, SourcePos pos = {});
Exp binary(BinOp op, Exp lhs, Exp rhs, SourcePos pos = {});
Exp call_exp(std::string func, std::vector<Exp> args, SourcePos pos = {});
Stmt seq(Stmt first, Stmt second);
/// Folds a list into right-nested Seq nodes, the shape the parser produces.
/// An empty list yields Skip.
Stmt seq_of(std::vector<Stmt> stmts);

}  // namespace crystality
