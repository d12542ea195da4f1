#pragma once

#include "crystality/state.hpp"
#include "crystality/syntax.hpp"

#include <optional>
#include <string>
#include <vector>

namespace crystality {

enum class Severity { Error, Warning };

struct Diagnostic {
  Severity severity = Severity::Error;
  std::string code;
  std::string message;
  SourcePos span;
};

/// `severity code line:col message`
std::string format(const Diagnostic& d);

bool has_errors(const std::vector<Diagnostic>& diags);

// Access matrix for state variables, indexed by function scope and variable scope.
bool can_read(ScopeTag function_scope, ScopeTag variable_scope);
bool can_write(ScopeTag function_scope, ScopeTag variable_scope);

// Which same-engine calls have a rule: address->address (same address),
// address->engine, engine->engine, global->global.
bool can_call(ScopeTag caller_scope, ScopeTag callee_scope);

/// Fills the function tables for every declared function and injects the
/// predefined `mint(uint256 amount) @address { balance := balance + amount; }`
/// when the contract has an @address uint256 `balance` and no `mint` of its own.
/// Throws StateError(DuplicateFunction).
FunctionRegistry build_registry(const ContractDecl& c);

/// State-variable reads and writes that the access matrix forbids.
std::vector<Diagnostic> check_access(const ContractDecl& c, const FunctionRegistry& reg);

/// Relay target/scope mismatches, relays to @global from @global functions,
/// unknown relayed functions and relay operands that are not pure expressions.
std::vector<Diagnostic> check_relays(const ContractDecl& c, const FunctionRegistry& reg);

struct CheckResult {
  std::optional<FunctionRegistry> registry;  // absent only when the registry could not be built
  std::vector<Diagnostic> diagnostics;

  bool ok() const { return registry.has_value() && !has_errors(diagnostics); }
};

/// Every static check: declarations, names, access, calls, relays, types and
/// local-name clashes between callers and callees that share a memory layer.
CheckResult check_contract(const ContractDecl& c);

}  // namespace crystality
