#include "crystality/checker.hpp"

#include "crystality/overloaded.hpp"

#include <algorithm>
#include <map>
#include <set>

namespace crystality {

std::string format(const Diagnostic& d) {
  return std::string(d.severity == Severity::Error ? "error" : "warning") + " " + d.code + " " +
         std::to_string(d.span.line) + ":" + std::to_string(d.span.column) + " " + d.message;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  return std::any_of(diags.begin(), diags.end(),
                     [](const Diagnostic& d) { return d.severity == Severity::Error; });
}

bool can_read(ScopeTag fn, ScopeTag var) {
  switch (fn) {
    case ScopeTag::Address: return true;
    case ScopeTag::Engine: return var != ScopeTag::Address;
    case ScopeTag::Global: return var == ScopeTag::Global;
  }
  return false;
}

bool can_write(ScopeTag fn, ScopeTag var) {
  switch (fn) {
    case ScopeTag::Address: return var != ScopeTag::Global;
    case ScopeTag::Engine: return var == ScopeTag::Engine;
    case ScopeTag::Global: return var == ScopeTag::Global;
  }
  return false;
}

bool can_call(ScopeTag caller, ScopeTag callee) {
  switch (caller) {
    case ScopeTag::Address: return callee != ScopeTag::Global;
    case ScopeTag::Engine: return callee == ScopeTag::Engine;
    case ScopeTag::Global: return callee == ScopeTag::Global;
  }
  return false;
}

namespace {

FunctionInfo info_of(const FuncDecl& f) {
  FunctionInfo info;
  info.scope = f.scope;
  for (const auto& p : f.params) {
    info.paraname.push_back(p.name);
    info.paratype.push_back(p.type);
  }
  info.body = f.body;
  info.rttype = f.return_type;
  info.pos = f.pos;
  return info;
}

FunctionInfo predefined_mint() {
  FunctionInfo info;
  info.scope = ScopeTag::Address;
  info.paraname = {"amount"};
  info.paratype = {TypeName::UInt256};
  info.body = Stmt{Assign{"balance", binary(BinOp::Add, ident("balance"), ident("amount"))}, {}};
  info.predefined = true;
  return info;
}

bool wants_mint(const ContractDecl& c) {
  bool has_balance = std::any_of(c.state_vars.begin(), c.state_vars.end(), [](const StateVarDecl& v) {
    return v.name == "balance" && v.scope == ScopeTag::Address && v.type == TypeName::UInt256;
  });
  bool has_mint = std::any_of(c.functions.begin(), c.functions.end(),
                              [](const FuncDecl& f) { return f.name == "mint"; });
  return has_balance && !has_mint;
}

// Registry that keeps the first of any duplicated function and reports the rest.
FunctionRegistry lenient_registry(const ContractDecl& c, std::vector<Diagnostic>& diags) {
  FunctionRegistry reg;
  for (const auto& f : c.functions) {
    if (reg.contains(f.name)) {
      diags.push_back({Severity::Error, "duplicate-function",
                       "function '" + f.name + "' is declared more than once", f.pos});
      continue;
    }
    reg.add(f.name, info_of(f));
  }
  if (wants_mint(c)) reg.add("mint", predefined_mint());
  return reg;
}

std::string scope_word(ScopeTag s) { return std::string(to_string(s)); }

// Walks every function body once and records all findings. The public check_*
// entry points filter the result by diagnostic code.
class Analyzer {
 public:
  Analyzer(const ContractDecl& c, const FunctionRegistry& reg, std::vector<Diagnostic>& out)
      : contract_(c), reg_(reg), out_(out) {
    for (const auto& v : c.state_vars) vars_.emplace(v.name, &v);
  }

  void run() {
    for (const auto& [name, info] : reg_) collect_locals(name, info);
    for (const auto& [name, info] : reg_) analyze_function(name, info);
    check_name_clashes();
  }

 private:
  struct Locals {
    std::map<std::string, TypeName> types;
    std::set<std::string> state_refs;     // identifiers resolved as state variables
    std::set<std::string> callees;        // same-engine calls made by this function
  };

  struct Ctx {
    const std::string* fn_name;
    const FunctionInfo* fn;
    ScopeTag eval_scope;
    bool pure;  // relay operand: no calls allowed
  };

  void report(Severity sev, std::string code, std::string msg, SourcePos pos) {
    out_.push_back({sev, std::move(code), std::move(msg), pos});
  }

  void collect_locals(const std::string& name, const FunctionInfo& info) {
    Locals& l = locals_[name];
    std::set<std::string> seen;
    for (std::size_t i = 0; i < info.paraname.size(); ++i) {
      const auto& p = info.paraname[i];
      if (!seen.insert(p).second) {
        report(Severity::Error, "duplicate-param", "parameter '" + p + "' of '" + name + "' is repeated", info.pos);
      }
      l.types.emplace(p, info.paratype[i]);
    }
    collect_decls(name, info.body, l, /*in_loop=*/false);
    for (const auto& [local, type] : l.types) {
      if (vars_.contains(local)) {
        report(Severity::Warning, "shadowing",
               "local '" + local + "' in '" + name + "' hides the state variable of the same name", info.pos);
      }
    }
  }

  void collect_decls(const std::string& fn, const Stmt& s, Locals& l, bool in_loop) {
    std::visit(Overloaded{
                   [&](const TempDecl& d) {
                     auto [it, inserted] = l.types.emplace(d.name, d.type);
                     if (!inserted && it->second != d.type) {
                       report(Severity::Error, "temp-redeclared",
                              "'" + d.name + "' in '" + fn + "' is declared with two different types", s.pos);
                     }
                     if (in_loop) {
                       report(Severity::Warning, "decl-in-loop",
                              "'" + d.name + "' is declared inside a loop body and faults on the second iteration",
                              s.pos);
                     }
                   },
                   [&](const Seq& q) {
                     collect_decls(fn, *q.first, l, in_loop);
                     collect_decls(fn, *q.second, l, in_loop);
                   },
                   [&](const If& i) {
                     collect_decls(fn, *i.then_branch, l, in_loop);
                     collect_decls(fn, *i.else_branch, l, in_loop);
                   },
                   [&](const While& w) { collect_decls(fn, *w.body, l, true); },
                   [](const auto&) {},
               },
               s.node);
  }

  void analyze_function(const std::string& name, const FunctionInfo& info) {
    Ctx ctx{&name, &info, info.scope, false};
    stmt(ctx, info.body);
  }

  std::optional<TypeName> lookup_type(const Ctx& ctx, const std::string& id) const {
    const auto& l = locals_.at(*ctx.fn_name);
    if (auto it = l.types.find(id); it != l.types.end()) return it->second;
    if (auto it = vars_.find(id); it != vars_.end()) return it->second->type;
    return std::nullopt;
  }

  bool is_local(const Ctx& ctx, const std::string& id) const {
    return locals_.at(*ctx.fn_name).types.contains(id);
  }

  void expect_type(std::optional<TypeName> got, TypeName want, const std::string& what, SourcePos pos) {
    if (got && *got != want) {
      report(Severity::Error, "type-mismatch",
             what + " has type " + std::string(to_string(*got)) + ", expected " + std::string(to_string(want)), pos);
    }
  }

  // Checks arity, argument types and evaluates the arguments in `arg_scope`.
  void arguments(const Ctx& ctx, const std::string& func, const FunctionInfo& callee,
                 const std::vector<Exp>& args, ScopeTag arg_scope, bool pure, SourcePos pos) {
    if (args.size() != callee.paratype.size()) {
      report(Severity::Error, "arity",
             "'" + func + "' takes " + std::to_string(callee.paratype.size()) + " argument(s), got " +
                 std::to_string(args.size()),
             pos);
    }
    Ctx arg_ctx{ctx.fn_name, ctx.fn, arg_scope, pure};
    for (std::size_t i = 0; i < args.size(); ++i) {
      auto t = exp(arg_ctx, args[i]);
      if (i < callee.paratype.size()) {
        expect_type(t, callee.paratype[i], "argument " + std::to_string(i + 1) + " of '" + func + "'", args[i].pos);
      }
    }
  }

  // Same-engine call (statement or expression). Returns the callee's return type.
  std::optional<TypeName> call(const Ctx& ctx, const std::string& func, const std::vector<Exp>& args,
                               bool wants_value, SourcePos pos) {
    if (ctx.pure) {
      report(Severity::Error, "relay-impure", "call to '" + func + "' inside a relay operand", pos);
    }
    const FunctionInfo* callee = reg_.find(func);
    if (!callee) {
      report(Severity::Error, "undefined-function", "no function named '" + func + "'", pos);
      for (const auto& a : args) exp(ctx, a);
      return std::nullopt;
    }
    locals_[*ctx.fn_name].callees.insert(func);
    if (!can_call(ctx.eval_scope, callee->scope)) {
      report(Severity::Error, "call-scope",
             "a " + scope_word(ctx.eval_scope) + " function cannot call " + scope_word(callee->scope) +
                 " function '" + func + "'",
             pos);
    }
    if (wants_value && !callee->rttype) {
      report(Severity::Error, "call-no-value", "'" + func + "' returns no value", pos);
    }
    if (!wants_value && callee->rttype) {
      report(Severity::Error, "call-returns-value",
             "'" + func + "' returns a value and cannot be called as a statement", pos);
    }
    // Parameters are bound inside the callee's frame, so argument expressions
    // are evaluated under the callee's scope.
    arguments(ctx, func, *callee, args, callee->scope, ctx.pure, pos);
    return callee->rttype;
  }

  std::optional<TypeName> exp(const Ctx& ctx, const Exp& e) {
    return std::visit(
        Overloaded{
            [&](const IdentExp& id) -> std::optional<TypeName> {
              if (is_local(ctx, id.name)) return lookup_type(ctx, id.name);
              auto it = vars_.find(id.name);
              if (it == vars_.end()) {
                report(Severity::Error, "undefined-name", "'" + id.name + "' is not declared", e.pos);
                return std::nullopt;
              }
              locals_[*ctx.fn_name].state_refs.insert(id.name);
              if (!can_read(ctx.eval_scope, it->second->scope)) {
                report(Severity::Error, "access-read",
                       "a " + scope_word(ctx.eval_scope) + " frame cannot read " + scope_word(it->second->scope) +
                           " variable '" + id.name + "'",
                       e.pos);
              }
              return it->second->type;
            },
            [&](const LiteralExp& l) -> std::optional<TypeName> { return l.value.type(); },
            [&](const CallExp& c) -> std::optional<TypeName> {
              return call(ctx, c.func, c.args, /*wants_value=*/true, e.pos);
            },
            [&](const BinaryExp& b) -> std::optional<TypeName> {
              auto lt = exp(ctx, *b.lhs);
              auto rt = exp(ctx, *b.rhs);
              if (b.op == BinOp::Eq || b.op == BinOp::Ne) {
                if (lt && rt && *lt != *rt) {
                  report(Severity::Error, "type-mismatch",
                         "operands of '" + std::string(to_string(b.op)) + "' have different types", e.pos);
                }
                return TypeName::Bool;
              }
              expect_type(lt, TypeName::UInt256, "left operand of '" + std::string(to_string(b.op)) + "'", e.pos);
              expect_type(rt, TypeName::UInt256, "right operand of '" + std::string(to_string(b.op)) + "'", e.pos);
              return is_comparison(b.op) ? TypeName::Bool : TypeName::UInt256;
            },
        },
        e.node);
  }

  void relay(const Ctx& ctx, const Relay& r, SourcePos pos) {
    Ctx operand{ctx.fn_name, ctx.fn, ctx.eval_scope, /*pure=*/true};
    std::optional<ScopeTag> required;
    std::visit(Overloaded{
                   [&](const AtAddress& a) {
                     required = ScopeTag::Address;
                     expect_type(exp(operand, a.address), TypeName::Address, "relay target", a.address.pos);
                   },
                   [&](const AtEngines&) { required = ScopeTag::Engine; },
                   [&](const AtGlobal&) {
                     required = ScopeTag::Global;
                     if (ctx.fn->scope == ScopeTag::Global) {
                       report(Severity::Error, "relay-global-in-global",
                              "relay @global cannot be issued from @global function '" + *ctx.fn_name + "'", pos);
                     }
                   },
               },
               r.target);
    const FunctionInfo* callee = reg_.find(r.func);
    if (!callee) {
      report(Severity::Error, "relay-undefined", "relay to unknown function '" + r.func + "'", pos);
      for (const auto& a : r.args) exp(operand, a);
      return;
    }
    if (callee->scope != *required) {
      report(Severity::Error, "relay-scope",
             "relay target needs a " + scope_word(*required) + " function but '" + r.func + "' is " +
                 scope_word(callee->scope),
             pos);
    }
    // Relay operands are evaluated in the issuing frame.
    arguments(operand, r.func, *callee, r.args, ctx.eval_scope, /*pure=*/true, pos);
  }

  void stmt(const Ctx& ctx, const Stmt& s) {
    std::visit(
        Overloaded{
            [&](const TempDecl&) {},
            [&](const Skip&) {},
            [&](const Assign& a) {
              auto vt = exp(ctx, a.value);
              if (is_local(ctx, a.target)) {
                expect_type(vt, *lookup_type(ctx, a.target), "value assigned to '" + a.target + "'", s.pos);
                return;
              }
              auto it = vars_.find(a.target);
              if (it == vars_.end()) {
                report(Severity::Error, "undefined-name", "'" + a.target + "' is not declared", s.pos);
                return;
              }
              locals_[*ctx.fn_name].state_refs.insert(a.target);
              ScopeTag var_scope = it->second->scope;
              if (!can_write(ctx.eval_scope, var_scope)) {
                std::string why = var_scope == ScopeTag::Global && ctx.eval_scope != ScopeTag::Global
                                      ? " (only @global functions modify @global variables)"
                                      : "";
                report(Severity::Error, "access-write",
                       "a " + scope_word(ctx.eval_scope) + " frame cannot write " + scope_word(var_scope) +
                           " variable '" + a.target + "'" + why,
                       s.pos);
              }
              expect_type(vt, it->second->type, "value assigned to '" + a.target + "'", s.pos);
            },
            [&](const Relay& r) { relay(ctx, r, s.pos); },
            [&](const Return& r) {
              auto vt = exp(ctx, r.value);
              if (!ctx.fn->rttype) {
                report(Severity::Error, "return-without-type",
                       "'" + *ctx.fn_name + "' declares no return type", s.pos);
                return;
              }
              expect_type(vt, *ctx.fn->rttype, "returned value", s.pos);
            },
            [&](const CallStmt& c) { call(ctx, c.func, c.args, /*wants_value=*/false, s.pos); },
            [&](const Seq& q) {
              stmt(ctx, *q.first);
              stmt(ctx, *q.second);
            },
            [&](const If& i) {
              expect_type(exp(ctx, i.cond), TypeName::Bool, "condition", i.cond.pos);
              stmt(ctx, *i.then_branch);
              stmt(ctx, *i.else_branch);
            },
            [&](const While& w) {
              expect_type(exp(ctx, w.cond), TypeName::Bool, "loop condition", w.cond.pos);
              stmt(ctx, *w.body);
            },
        },
        s.node);
  }

  // Callee frames start as a copy of the caller's layer, so every local of every
  // transitive caller is already bound when the callee declares its own locals
  // or looks up a state variable.
  void check_name_clashes() {
    std::map<std::string, std::set<std::string>> inherited;
    bool changed = true;
    while (changed) {
      changed = false;
      for (const auto& [caller, l] : locals_) {
        std::set<std::string> visible = inherited[caller];
        for (const auto& [local, type] : l.types) visible.insert(local);
        for (const auto& callee : l.callees) {
          auto& target = inherited[callee];
          for (const auto& v : visible) changed |= target.insert(v).second;
        }
      }
    }
    for (const auto& [fn, seen] : inherited) {
      const Locals& l = locals_.at(fn);
      const FunctionInfo& info = reg_.at(fn);
      for (const auto& v : seen) {
        if (l.types.contains(v)) {
          report(Severity::Error, "name-clash",
                 "local '" + v + "' of '" + fn + "' is already bound in a calling frame", info.pos);
        } else if (l.state_refs.contains(v)) {
          report(Severity::Error, "name-clash",
                 "'" + fn + "' refers to state variable '" + v + "' but a calling frame has a local of that name",
                 info.pos);
        }
      }
    }
  }

  const ContractDecl& contract_;
  const FunctionRegistry& reg_;
  std::vector<Diagnostic>& out_;
  std::map<std::string, const StateVarDecl*> vars_;
  std::map<std::string, Locals> locals_;
};

std::vector<Diagnostic> analyze(const ContractDecl& c, const FunctionRegistry& reg) {
  std::vector<Diagnostic> out;
  Analyzer(c, reg, out).run();
  return out;
}

std::vector<Diagnostic> filter(std::vector<Diagnostic> all, std::initializer_list<std::string_view> codes) {
  std::vector<Diagnostic> out;
  for (auto& d : all) {
    if (std::find(codes.begin(), codes.end(), d.code) != codes.end()) out.push_back(std::move(d));
  }
  return out;
}

}  // namespace

FunctionRegistry build_registry(const ContractDecl& c) {
  FunctionRegistry reg;
  for (const auto& f : c.functions) reg.add(f.name, info_of(f));
  if (wants_mint(c)) reg.add("mint", predefined_mint());
  return reg;
}

std::vector<Diagnostic> check_access(const ContractDecl& c, const FunctionRegistry& reg) {
  return filter(analyze(c, reg), {"access-read", "access-write"});
}

std::vector<Diagnostic> check_relays(const ContractDecl& c, const FunctionRegistry& reg) {
  return filter(analyze(c, reg), {"relay-scope", "relay-global-in-global", "relay-undefined", "relay-impure"});
}

CheckResult check_contract(const ContractDecl& c) {
  CheckResult result;
  std::set<std::string> names;
  for (const auto& v : c.state_vars) {
    if (!names.insert(v.name).second) {
      result.diagnostics.push_back({Severity::Error, "duplicate-state-var",
                                    "state variable '" + v.name + "' is declared more than once", v.pos});
    }
  }
  FunctionRegistry reg = lenient_registry(c, result.diagnostics);
  auto found = analyze(c, reg);
  result.diagnostics.insert(result.diagnostics.end(), found.begin(), found.end());
  std::stable_sort(result.diagnostics.begin(), result.diagnostics.end(), [](const Diagnostic& a, const Diagnostic& b) {
    return std::pair(a.span.line, a.span.column) < std::pair(b.span.line, b.span.column);
  });
  result.registry = std::move(reg);
  return result;
}

}  // namespace crystality
