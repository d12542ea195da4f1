#include "crystality/syntax.hpp"

namespace crystality {

std::string_view to_string(ScopeTag s) {
  switch (s) {
    case ScopeTag::Address: return "@address";
    case ScopeTag::Engine: return "@engine";
    case ScopeTag::Global: return "@global";
  }
  return "@?";
}

std::string_view to_string(BinOp op) {
  switch (op) {
    case BinOp::Add: return "+";
    case BinOp::Sub: return "-";
    case BinOp::Mul: return "*";
    case BinOp::Div: return "/";
    case BinOp::Le: return "<=";
    case BinOp::Lt: return "<";
    case BinOp::Eq: return "==";
    case BinOp::Ge: return ">=";
    case BinOp::Gt: return ">";
    case BinOp::Ne: return "!=";
  }
  return "?";
}

bool is_comparison(BinOp op) {
  switch (op) {
    case BinOp::Add:
    case BinOp::Sub:
    case BinOp::Mul:
    case BinOp::Div:
      return false;
    default:
      return true;
  }
}

Exp ident(std::string name, SourcePos pos) { return Exp{IdentExp{std::move(name)}, pos}; }

Exp literal(TypedValue v, SourcePos pos) { return Exp{LiteralExp{std::move(v)}, pos}; }

Exp binary(BinOp op, Exp lhs, Exp rhs, SourcePos pos) {
  return Exp{BinaryExp{op, Box<Exp>(std::move(lhs)), Box<Exp>(std::move(rhs))}, pos};
}

Exp call_exp(std::string func, std::vector<Exp> args, SourcePos pos) {
  return Exp{CallExp{std::move(func), std::move(args)}, pos};
}

Stmt seq(Stmt first, Stmt second) {
  SourcePos pos = first.pos;
  return Stmt{Seq{Box<Stmt>(std::move(first)), Box<Stmt>(std::move(second))}, pos};
}

Stmt seq_of(std::vector<Stmt> stmts) {
  if (stmts.empty()) return Stmt{Skip{}, {}};
  Stmt acc = std::move(stmts.back());
  for (auto it = stmts.rbegin() + 1; it != stmts.rend(); ++it) {
    acc = seq(std::move(*it), std::move(acc));
  }
  return acc;
}

}  // namespace crystality
