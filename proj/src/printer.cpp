#include "crystality/printer.hpp"

#include "crystality/overloaded.hpp"

#include <sstream>

namespace crystality {

namespace {

std::string args_text(const std::vector<Exp>& args) {
  std::string s = "(";
  for (std::size_t i = 0; i < args.size(); ++i) {
    if (i) s += ", ";
    s += print_expression(args[i]);
  }
  return s + ")";
}

std::string operand(const Exp& e) {
  if (std::holds_alternative<BinaryExp>(e.node)) return "(" + print_expression(e) + ")";
  return print_expression(e);
}

void emit(std::ostringstream& os, const Stmt& s, int indent) {
  const std::string pad(static_cast<std::size_t>(indent) * 2, ' ');
  std::visit(
      Overloaded{
          [&](const TempDecl& d) { os << pad << to_string(d.type) << " " << d.name << ";\n"; },
          [&](const Skip&) { os << pad << "skip;\n"; },
          [&](const Assign& a) { os << pad << a.target << " := " << print_expression(a.value) << ";\n"; },
          [&](const Relay& r) {
            os << pad << "relay ";
            std::visit(Overloaded{
                           [&](const AtAddress& t) { os << "@ " << print_expression(t.address) << " "; },
                           [&](const AtEngines&) { os << "@engines "; },
                           [&](const AtGlobal&) { os << "@global "; },
                       },
                       r.target);
            os << r.func << args_text(r.args) << ";\n";
          },
          [&](const Return& r) { os << pad << "return " << print_expression(r.value) << ";\n"; },
          [&](const CallStmt& c) { os << pad << c.func << args_text(c.args) << ";\n"; },
          [&](const Seq& q) {
            emit(os, *q.first, indent);
            emit(os, *q.second, indent);
          },
          [&](const If& i) {
            os << pad << "if (" << print_expression(i.cond) << ") then {\n";
            emit(os, *i.then_branch, indent + 1);
            os << pad << "} else {\n";
            emit(os, *i.else_branch, indent + 1);
            os << pad << "}\n";
          },
          [&](const While& w) {
            os << pad << "while (" << print_expression(w.cond) << ") {\n";
            emit(os, *w.body, indent + 1);
            os << pad << "}\n";
          },
      },
      s.node);
}

}  // namespace

std::string print_expression(const Exp& e) {
  return std::visit(
      Overloaded{
          [](const IdentExp& i) { return i.name; },
          [](const CallExp& c) { return c.func + args_text(c.args); },
          [](const LiteralExp& l) { return to_string(l.value); },
          [](const BinaryExp& b) {
            return operand(*b.lhs) + " " + std::string(to_string(b.op)) + " " + operand(*b.rhs);
          },
      },
      e.node);
}

std::string print_statement(const Stmt& s, int indent) {
  std::ostringstream os;
  emit(os, s, indent);
  return os.str();
}

std::string pretty_print(const ContractDecl& c) {
  std::ostringstream os;
  os << "contract " << c.name << " {\n";
  for (const auto& v : c.state_vars) {
    os << "  " << to_string(v.type) << " " << to_string(v.scope) << " " << v.name << ";\n";
  }
  for (const auto& f : c.functions) {
    os << "  function " << f.name << "(";
    for (std::size_t i = 0; i < f.params.size(); ++i) {
      if (i) os << ", ";
      os << to_string(f.params[i].type) << " " << f.params[i].name;
    }
    os << ") " << to_string(f.scope) << " returns";
    if (f.return_type) os << " " << to_string(*f.return_type);
    os << " {\n";
    emit(os, f.body, 2);
    os << "  }\n";
  }
  os << "}\n";
  return os.str();
}

}  // namespace crystality
