#pragma once

#include "crystality/syntax.hpp"

#include <string>

namespace crystality {

/// Canonical source text for a contract. Nested binary operands are always
/// parenthesized, so parse_contract(pretty_print(c)) == c for any AST whose
/// Seq nodes are right-nested.
std::string pretty_print(const ContractDecl& c);

std::string print_expression(const Exp& e);

/// Statement text at the given indentation depth (two spaces per level).
std::string print_statement(const Stmt& s, int indent = 0);

}  // namespace crystality
