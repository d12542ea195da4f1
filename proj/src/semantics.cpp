#include "crystality/semantics.hpp"

#include "crystality/overloaded.hpp"
#include "crystality/printer.hpp"

namespace crystality {

std::string_view to_string(RuntimeErrorKind k) {
  switch (k) {
    case RuntimeErrorKind::UndefinedVariable: return "UndefinedVariable";
    case RuntimeErrorKind::AlreadyDefined: return "AlreadyDefined";
    case RuntimeErrorKind::TypeMismatch: return "TypeMismatch";
    case RuntimeErrorKind::ScopeViolation: return "ScopeViolation";
    case RuntimeErrorKind::DivisionByZero: return "DivisionByZero";
    case RuntimeErrorKind::ArithmeticOverflow: return "ArithmeticOverflow";
    case RuntimeErrorKind::InvalidAddress: return "InvalidAddress";
    case RuntimeErrorKind::Nontermination: return "Nontermination";
  }
  return "?";
}

std::string to_string(const RuntimeError& e) {
  return std::string(to_string(e.kind)) + " at " + std::to_string(e.span.line) + ":" +
         std::to_string(e.span.column) + ": " + e.message;
}

std::string_view to_string(StepStatus s) {
  switch (s) {
    case StepStatus::Progress: return "progress";
    case StepStatus::Done: return "done";
    case StepStatus::Fault: return "fault";
  }
  return "?";
}

namespace {

std::string_view tag_letter(ScopeTag s) {
  switch (s) {
    case ScopeTag::Address: return "a";
    case ScopeTag::Engine: return "s";
    case ScopeTag::Global: return "g";
  }
  return "?";
}

std::optional<ScopeTag> tag_of(const ScopeBinding& b) {
  switch (b.kind) {
    case ScopeBinding::Kind::Address: return ScopeTag::Address;
    case ScopeBinding::Kind::Engine: return ScopeTag::Engine;
    case ScopeBinding::Kind::Global: return ScopeTag::Global;
    case ScopeBinding::Kind::None: return std::nullopt;
  }
  return std::nullopt;
}

bool readable(ScopeTag fn, ScopeTag var) {
  switch (fn) {
    case ScopeTag::Address: return true;
    case ScopeTag::Engine: return var != ScopeTag::Address;
    case ScopeTag::Global: return var == ScopeTag::Global;
  }
  return false;
}

bool writable(ScopeTag fn, ScopeTag var) {
  switch (fn) {
    case ScopeTag::Address: return var != ScopeTag::Global;
    case ScopeTag::Engine: return var == ScopeTag::Engine;
    case ScopeTag::Global: return var == ScopeTag::Global;
  }
  return false;
}

std::string frame_name(const ScopeBinding& b) {
  return b.kind == ScopeBinding::Kind::None ? "no frame" : "a " + to_string(b) + " frame";
}

}  // namespace

Interpreter::Interpreter(Configuration& cfg, const FunctionRegistry& reg, ExecOptions opts)
    : cfg_(cfg), reg_(reg), opts_(opts) {}

// ---- lanes and frames ----

Interpreter::Lane Interpreter::lane_of(std::uint64_t engine) const {
  if (engine < 1 || engine > cfg_.params.n) {
    throw std::out_of_range("engine " + std::to_string(engine) + " does not exist");
  }
  const auto& mem = cfg_.engine(engine).memory;
  bool joint = !mem.empty() && mem.top().scope.is(ScopeBinding::Kind::Global);
  return Lane{joint ? 1 : engine, joint};
}

std::vector<std::uint64_t> Interpreter::engines_of(const Lane& lane) const {
  if (!lane.joint) return {lane.engine};
  std::vector<std::uint64_t> all;
  for (std::uint64_t i = 1; i <= cfg_.params.n; ++i) all.push_back(i);
  return all;
}

MemoryLayer& Interpreter::top(const Lane& lane) {
  auto& mem = cfg_.engine(lane.engine).memory;
  if (mem.empty()) fail(RuntimeErrorKind::UndefinedVariable, "", "no active frame", {});
  return mem.top();
}

ScopeBinding Interpreter::frame_scope(const Lane& lane) {
  const auto& mem = cfg_.engine(lane.engine).memory;
  return mem.empty() ? ScopeBinding::none() : mem.top().scope;
}

std::size_t Interpreter::depth(const Lane& lane) const { return cfg_.engine(lane.engine).memory.depth(); }

void Interpreter::push(const Lane& lane, const MemoryLayer& layer) {
  for (auto i : engines_of(lane)) cfg_.engine(i).memory.push(layer);
}

void Interpreter::pop(const Lane& lane) {
  for (auto i : engines_of(lane)) cfg_.engine(i).memory.pop();
}

void Interpreter::tick(SourcePos pos) {
  if (++steps_ > opts_.step_budget) {
    fail(RuntimeErrorKind::Nontermination, "",
         "step budget of " + std::to_string(opts_.step_budget) + " exhausted", pos);
  }
}

void Interpreter::record(const Lane& lane, std::string rule, SourcePos pos, std::vector<RelayTransaction> emitted) {
  if (!opts_.record_steps) return;
  records_.push_back(StepRecord{records_.size() + 1, lane.joint ? 0 : lane.engine, std::move(rule), pos,
                                std::move(emitted)});
}

void Interpreter::fail(RuntimeErrorKind kind, std::string subject, std::string message, SourcePos pos) const {
  throw RuntimeFault(RuntimeError{kind, std::move(subject), std::move(message), pos});
}

// ---- state lookup ----

std::optional<ScopeTag> Interpreter::state_scope(const Lane& lane, const std::string& id) const {
  if (cfg_.global.defined(id)) return ScopeTag::Global;
  const auto& e = cfg_.engine(lane.engine);
  if (e.engine_store.defined(id)) return ScopeTag::Engine;
  if (!e.address_stores.empty() && e.address_store(1).defined(id)) return ScopeTag::Address;
  return std::nullopt;
}

ByteStore& Interpreter::state_store(const Lane& lane, ScopeTag var_scope) {
  switch (var_scope) {
    case ScopeTag::Global: return cfg_.global;
    case ScopeTag::Engine: return cfg_.engine(lane.engine).engine_store;
    case ScopeTag::Address: return cfg_.engine(lane.engine).address_store(frame_scope(lane).address_index);
  }
  throw std::logic_error("unknown scope");
}

// ---- expressions ----

TypedValue Interpreter::read_name(const Lane& lane, const std::string& id, SourcePos pos) {
  const auto& mem = cfg_.engine(lane.engine).memory;
  if (!mem.empty() && mem.top().store.defined(id)) {
    record(lane, "TE", pos);
    return mem.top().store.read(id);
  }
  auto var_scope = state_scope(lane, id);
  if (!var_scope) fail(RuntimeErrorKind::UndefinedVariable, id, "'" + id + "' is not defined", pos);
  ScopeBinding frame = frame_scope(lane);
  auto fn = tag_of(frame);
  if (!fn || !readable(*fn, *var_scope)) {
    fail(RuntimeErrorKind::ScopeViolation, id,
         frame_name(frame) + " cannot read " + std::string(to_string(*var_scope)) + " variable '" + id + "'", pos);
  }
  record(lane, "SE" + std::string(tag_letter(*fn)) + std::string(tag_letter(*var_scope)), pos);
  return state_store(lane, *var_scope).read(id);
}

TypedValue Interpreter::apply(BinOp op, const TypedValue& a, const TypedValue& b, SourcePos pos) const {
  std::string sym(to_string(op));
  if (op == BinOp::Eq || op == BinOp::Ne) {
    if (a.type() != b.type()) {
      fail(RuntimeErrorKind::TypeMismatch, sym, "'" + sym + "' compares " + std::string(to_string(a.type())) +
                                                    " with " + std::string(to_string(b.type())), pos);
    }
    return TypedValue((a == b) == (op == BinOp::Eq));
  }
  if (!a.is(TypeName::UInt256) || !b.is(TypeName::UInt256)) {
    fail(RuntimeErrorKind::TypeMismatch, sym, "'" + sym + "' needs uint256 operands", pos);
  }
  const UInt256& x = a.as_uint();
  const UInt256& y = b.as_uint();
  switch (op) {
    case BinOp::Add: {
      UInt256 r = x + y;
      if (r < x) fail(RuntimeErrorKind::ArithmeticOverflow, sym, "addition exceeds 2^256-1", pos);
      return TypedValue(r);
    }
    case BinOp::Sub:
      if (x < y) fail(RuntimeErrorKind::ArithmeticOverflow, sym, "subtraction below zero", pos);
      return TypedValue(UInt256(x - y));
    case BinOp::Mul: {
      UInt256 r = x * y;
      if (x != 0 && r / x != y) fail(RuntimeErrorKind::ArithmeticOverflow, sym, "product exceeds 2^256-1", pos);
      return TypedValue(r);
    }
    case BinOp::Div:
      if (y == 0) fail(RuntimeErrorKind::DivisionByZero, sym, "division by zero", pos);
      return TypedValue(UInt256(x / y));
    case BinOp::Le: return TypedValue(x <= y);
    case BinOp::Lt: return TypedValue(x < y);
    case BinOp::Ge: return TypedValue(x >= y);
    case BinOp::Gt: return TypedValue(x > y);
    default: break;
  }
  throw std::logic_error("unhandled operator");
}

TypedValue Interpreter::eval_in(const Lane& lane, const Exp& e) {
  return std::visit(Overloaded{
                        [&](const LiteralExp& l) { return l.value; },
                        [&](const IdentExp& id) { return read_name(lane, id.name, e.pos); },
                        [&](const BinaryExp& b) {
                          TypedValue lhs = eval_in(lane, *b.lhs);
                          TypedValue rhs = eval_in(lane, *b.rhs);
                          return apply(b.op, lhs, rhs, e.pos);
                        },
                        [&](const CallExp& c) {
                          if (pure_ > 0) {
                            fail(RuntimeErrorKind::ScopeViolation, c.func,
                                 "call to '" + c.func + "' inside a relay operand", e.pos);
                          }
                          return *call_in(lane, c.func, c.args, true, e.pos);
                        },
                    },
                    e.node);
}

// ---- statements ----

void Interpreter::declare_in(const Lane& lane, TypeName t, const std::string& id, SourcePos pos) {
  if (top(lane).store.defined(id)) {
    fail(RuntimeErrorKind::AlreadyDefined, id, "'" + id + "' is already declared in this frame", pos);
  }
  for (auto i : engines_of(lane)) {
    auto& store = cfg_.engine(i).memory.top().store;
    store.allocate_new(t, id);
    store.write(id, init(t));
  }
  record(lane, "TD", pos);
}

void Interpreter::write_name(const Lane& lane, const std::string& id, const TypedValue& v, SourcePos pos,
                             bool is_return) {
  auto& layer = top(lane);
  if (layer.store.defined(id)) {
    TypeName declared = *layer.store.type_of(id);
    if (declared != v.type()) {
      fail(RuntimeErrorKind::TypeMismatch, id,
           "'" + id + "' is " + std::string(to_string(declared)) + " but the value is " +
               std::string(to_string(v.type())),
           pos);
    }
    for (auto i : engines_of(lane)) cfg_.engine(i).memory.top().store.write(id, v);
    record(lane, is_return ? "RET" : (lane.joint ? "TAg" : "TA"), pos);
    return;
  }
  auto var_scope = state_scope(lane, id);
  if (!var_scope) fail(RuntimeErrorKind::UndefinedVariable, id, "'" + id + "' is not defined", pos);
  ScopeBinding frame = frame_scope(lane);
  auto fn = tag_of(frame);
  if (!fn || !writable(*fn, *var_scope)) {
    fail(RuntimeErrorKind::ScopeViolation, id,
         frame_name(frame) + " cannot write " + std::string(to_string(*var_scope)) + " variable '" + id + "'", pos);
  }
  ByteStore& store = state_store(lane, *var_scope);
  TypeName declared = *store.type_of(id);
  if (declared != v.type()) {
    fail(RuntimeErrorKind::TypeMismatch, id,
         "'" + id + "' is " + std::string(to_string(declared)) + " but the value is " +
             std::string(to_string(v.type())),
         pos);
  }
  store.write(id, v);
  record(lane, "SA" + std::string(tag_letter(*fn)) + std::string(tag_letter(*var_scope)), pos);
}

void Interpreter::assign_in(const Lane& lane, const std::string& id, const Exp& e, SourcePos pos) {
  TypedValue v = eval_in(lane, e);
  write_name(lane, id, v, pos, false);
}

std::optional<TypedValue> Interpreter::call_in(const Lane& lane, const std::string& func,
                                               const std::vector<Exp>& args, bool wants_value, SourcePos pos) {
  const FunctionInfo* callee = reg_.find(func);
  if (!callee) fail(RuntimeErrorKind::UndefinedVariable, func, "no function named '" + func + "'", pos);
  ScopeBinding caller = frame_scope(lane);
  auto caller_tag = tag_of(caller);
  ScopeBinding frame;
  switch (callee->scope) {
    case ScopeTag::Address:
      if (caller_tag == ScopeTag::Address) frame = caller;
      break;
    case ScopeTag::Engine:
      if (caller_tag == ScopeTag::Address || caller_tag == ScopeTag::Engine) frame = ScopeBinding::engine();
      break;
    case ScopeTag::Global:
      if (caller_tag == ScopeTag::Global) frame = ScopeBinding::global();
      break;
  }
  if (frame.is(ScopeBinding::Kind::None)) {
    fail(RuntimeErrorKind::ScopeViolation, func,
         frame_name(caller) + " cannot call " + std::string(to_string(callee->scope)) + " function '" + func + "'",
         pos);
  }
  if (wants_value && !callee->rttype) {
    fail(RuntimeErrorKind::TypeMismatch, func, "'" + func + "' returns no value", pos);
  }
  if (!wants_value && callee->rttype) {
    fail(RuntimeErrorKind::TypeMismatch, func, "'" + func + "' returns a value and cannot be a statement", pos);
  }
  if (args.size() != callee->paratype.size()) {
    fail(RuntimeErrorKind::TypeMismatch, func,
         "'" + func + "' takes " + std::to_string(callee->paratype.size()) + " argument(s), got " +
             std::to_string(args.size()),
         pos);
  }
  if (depth(lane) >= opts_.max_call_depth) {
    fail(RuntimeErrorKind::Nontermination, func,
         "call depth limit of " + std::to_string(opts_.max_call_depth) + " reached", pos);
  }

  std::string rule = std::string(wants_value ? "EF" : "IF") + std::string(tag_letter(*caller_tag)) +
                     std::string(tag_letter(callee->scope));
  record(lane, rule, pos);
  MemoryLayer layer = top(lane);
  layer.scope = frame;
  layer.rt.reset();
  push(lane, layer);

  // Parameter prologue `T id := exp;`, run inside the callee frame.
  for (std::size_t p = 0; p < args.size(); ++p) {
    declare_in(lane, callee->paratype[p], callee->paraname[p], args[p].pos);
    assign_in(lane, callee->paraname[p], args[p], args[p].pos);
  }
  std::optional<TypedValue> result;
  if (wants_value) {
    std::string rt = new_ID(top(lane));
    for (auto i : engines_of(lane)) cfg_.engine(i).memory.top().rt = rt;
    declare_in(lane, *callee->rttype, rt, pos);
    exec_in(lane, callee->body);
    result = top(lane).store.read(rt);
  } else {
    exec_in(lane, callee->body);
  }
  pop(lane);
  return result;
}

void Interpreter::relay_in(const Lane& lane, const RelayTargetExpr& target, const std::string& func,
                           const std::vector<Exp>& args, SourcePos pos) {
  const FunctionInfo* callee = reg_.find(func);
  if (!callee) fail(RuntimeErrorKind::UndefinedVariable, func, "relay to unknown function '" + func + "'", pos);
  ScopeBinding frame = frame_scope(lane);
  auto frame_tag = tag_of(frame);
  if (!frame_tag) fail(RuntimeErrorKind::ScopeViolation, func, "relay outside any frame", pos);

  RelayTransaction tx;
  tx.func = func;
  tx.origin = Address{lane.joint ? 0 : lane.engine, frame.is(ScopeBinding::Kind::Address) ? frame.address_index : 0};
  std::string rule;
  ScopeTag wanted = ScopeTag::Address;

  ++pure_;
  struct Restore {
    int& counter;
    ~Restore() { --counter; }
  } restore{pure_};

  std::visit(Overloaded{
                 [&](const AtAddress& a) {
                   TypedValue where = eval_in(lane, a.address);
                   if (!where.is(TypeName::Address)) {
                     fail(RuntimeErrorKind::TypeMismatch, print_expression(a.address),
                          "relay target is " + std::string(to_string(where.type())) + ", expected address", a.address.pos);
                   }
                   Address addr = where.as_address();
                   if (!cfg_.valid_address(addr)) {
                     fail(RuntimeErrorKind::InvalidAddress, to_string(where),
                          "relay target " + to_string(where) + " is outside the system", a.address.pos);
                   }
                   tx.target = RelayDestination{RelayKind::Address, addr.engine, addr.index};
                   rule = "RELa";
                   wanted = ScopeTag::Address;
                 },
                 [&](const AtEngines&) {
                   tx.target = RelayDestination{RelayKind::Engine, 0, 0};
                   rule = "RELs";
                   wanted = ScopeTag::Engine;
                 },
                 [&](const AtGlobal&) {
                   if (*frame_tag == ScopeTag::Global) {
                     fail(RuntimeErrorKind::ScopeViolation, func, "relay @global from a global frame", pos);
                   }
                   tx.target = RelayDestination{RelayKind::Global, 0, 0};
                   rule = *frame_tag == ScopeTag::Address ? "RELg1" : "RELg2";
                   wanted = ScopeTag::Global;
                 },
             },
             target);
  if (callee->scope != wanted) {
    fail(RuntimeErrorKind::ScopeViolation, func,
         "relay target needs a " + std::string(to_string(wanted)) + " function but '" + func + "' is " +
             std::string(to_string(callee->scope)),
         pos);
  }
  if (args.size() != callee->paratype.size()) {
    fail(RuntimeErrorKind::TypeMismatch, func,
         "'" + func + "' takes " + std::to_string(callee->paratype.size()) + " argument(s), got " +
             std::to_string(args.size()),
         pos);
  }
  for (std::size_t p = 0; p < args.size(); ++p) {
    TypedValue v = eval_in(lane, args[p]);
    if (v.type() != callee->paratype[p]) {
      fail(RuntimeErrorKind::TypeMismatch, func,
           "argument " + std::to_string(p + 1) + " of '" + func + "' is " + std::string(to_string(v.type())),
           args[p].pos);
    }
    tx.args.push_back(std::move(v));
  }

  tx.sequence = cfg_.next_sequence++;
  if (tx.target.kind == RelayKind::Address) {
    cfg_.mempool(tx.target.engine).insert(tx);
  } else {
    for (auto& m : cfg_.mempools) m.insert(tx);
  }
  emitted_.push_back(tx);
  record(lane, rule, pos, {tx});
}

void Interpreter::exec_in(const Lane& lane, const Stmt& s) {
  std::size_t before = depth(lane);
  exec_node(lane, s);
  if (opts_.stats) {
    ++opts_.stats->statements;
    if (depth(lane) != before) ++opts_.stats->balance_violations;
  }
}

void Interpreter::exec_node(const Lane& lane, const Stmt& s) {
  tick(s.pos);
  std::visit(Overloaded{
                 [&](const TempDecl& d) { declare_in(lane, d.type, d.name, s.pos); },
                 [&](const Skip&) { record(lane, "Skip", s.pos); },
                 [&](const Assign& a) { assign_in(lane, a.target, a.value, s.pos); },
                 [&](const Relay& r) { relay_in(lane, r.target, r.func, r.args, s.pos); },
                 [&](const Return& r) {
                   TypedValue v = eval_in(lane, r.value);
                   const auto& rt = top(lane).rt;
                   if (!rt) fail(RuntimeErrorKind::UndefinedVariable, "return", "return in a frame without a return slot", s.pos);
                   std::string slot = *rt;
                   write_name(lane, slot, v, s.pos, true);
                 },
                 [&](const CallStmt& c) { call_in(lane, c.func, c.args, false, s.pos); },
                 [&](const Seq& q) {
                   record(lane, "SEQ", s.pos);
                   exec_in(lane, *q.first);
                   exec_in(lane, *q.second);
                 },
                 [&](const If& i) {
                   TypedValue c = eval_in(lane, i.cond);
                   if (!c.is(TypeName::Bool)) {
                     fail(RuntimeErrorKind::TypeMismatch, print_expression(i.cond), "condition is not bool", i.cond.pos);
                   }
                   record(lane, c.as_bool() ? "COND1" : "COND2", s.pos);
                   exec_in(lane, c.as_bool() ? *i.then_branch : *i.else_branch);
                 },
                 [&](const While& w) {
                   while (true) {
                     TypedValue c = eval_in(lane, w.cond);
                     if (!c.is(TypeName::Bool)) {
                       fail(RuntimeErrorKind::TypeMismatch, print_expression(w.cond), "loop condition is not bool",
                            w.cond.pos);
                     }
                     if (!c.as_bool()) {
                       record(lane, "WHILE1", s.pos);
                       break;
                     }
                     record(lane, "WHILE2", s.pos);
                     exec_in(lane, *w.body);
                     tick(s.pos);
                   }
                 },
             },
             s.node);
}

// ---- public entry points ----

void Interpreter::declare_state_var(std::uint64_t engine, const StateVarDecl& decl) {
  Lane lane = lane_of(engine);
  auto redeclared = [&] {
    fail(RuntimeErrorKind::AlreadyDefined, decl.name, "state variable '" + decl.name + "' is already declared",
         decl.pos);
  };
  switch (decl.scope) {
    case ScopeTag::Address: {
      auto& e = cfg_.engine(engine);
      for (const auto& store : e.address_stores) {
        if (store.defined(decl.name)) redeclared();
      }
      for (auto& store : e.address_stores) {
        store.allocate_new(decl.type, decl.name);
        store.write(decl.name, init(decl.type));
      }
      record(Lane{engine, false}, "SDa", decl.pos);
      break;
    }
    case ScopeTag::Engine: {
      auto& store = cfg_.engine(engine).engine_store;
      if (store.defined(decl.name)) redeclared();
      store.allocate_new(decl.type, decl.name);
      store.write(decl.name, init(decl.type));
      record(Lane{engine, false}, "SDs", decl.pos);
      break;
    }
    case ScopeTag::Global:
      if (cfg_.global.defined(decl.name)) redeclared();
      cfg_.global.allocate_new(decl.type, decl.name);
      cfg_.global.write(decl.name, init(decl.type));
      record(Lane{lane.engine, true}, "SDg", decl.pos);
      break;
  }
}

void Interpreter::declare_temp(std::uint64_t engine, TypeName t, const std::string& id, SourcePos pos) {
  declare_in(lane_of(engine), t, id, pos);
}

void Interpreter::assign(std::uint64_t engine, const std::string& id, const Exp& e, SourcePos pos) {
  assign_in(lane_of(engine), id, e, pos);
}

TypedValue Interpreter::eval(std::uint64_t engine, const Exp& e) { return eval_in(lane_of(engine), e); }

void Interpreter::call(std::uint64_t engine, const std::string& func, const std::vector<Exp>& args, SourcePos pos) {
  call_in(lane_of(engine), func, args, false, pos);
}

void Interpreter::relay(std::uint64_t engine, const RelayTargetExpr& target, const std::string& func,
                        const std::vector<Exp>& args, SourcePos pos) {
  relay_in(lane_of(engine), target, func, args, pos);
}

void Interpreter::exec(std::uint64_t engine, const Stmt& s) { exec_in(lane_of(engine), s); }

std::optional<TypedValue> Interpreter::invoke(Address sender, const std::string& func,
                                              const std::vector<TypedValue>& args) {
  const FunctionInfo* fn = reg_.find(func);
  if (!fn) fail(RuntimeErrorKind::UndefinedVariable, func, "no function named '" + func + "'", {});
  if (!cfg_.valid_address(sender)) {
    fail(RuntimeErrorKind::InvalidAddress, to_string(TypedValue(sender)), "sender is outside the system", {});
  }
  if (args.size() != fn->paratype.size()) {
    fail(RuntimeErrorKind::TypeMismatch, func,
         "'" + func + "' takes " + std::to_string(fn->paratype.size()) + " argument(s), got " +
             std::to_string(args.size()),
         fn->pos);
  }
  for (std::size_t p = 0; p < args.size(); ++p) {
    if (args[p].type() != fn->paratype[p]) {
      fail(RuntimeErrorKind::TypeMismatch, fn->paraname[p],
           "argument " + std::to_string(p + 1) + " of '" + func + "' is " + std::string(to_string(args[p].type())) +
               ", expected " + std::string(to_string(fn->paratype[p])),
           fn->pos);
    }
  }

  Lane lane{sender.engine, fn->scope == ScopeTag::Global};
  if (lane.joint) lane.engine = 1;
  for (auto i : engines_of(lane)) {
    if (!cfg_.engine(i).memory.empty()) {
      throw std::logic_error("transaction entered with a non-empty memory stack on engine " + std::to_string(i));
    }
  }
  ScopeBinding frame = ScopeBinding::of(fn->scope, sender.index);
  std::string rule = std::string(fn->rttype ? "EFt" : "IFt") + std::string(tag_letter(fn->scope));
  record(lane, rule, fn->pos);
  for (auto i : engines_of(lane)) cfg_.programs.at(i - 1).running = func;
  push(lane, MemoryLayer{ByteStore{}, frame, std::nullopt});
  for (std::size_t p = 0; p < args.size(); ++p) {
    declare_in(lane, fn->paratype[p], fn->paraname[p], fn->pos);
    write_name(lane, fn->paraname[p], args[p], fn->pos, false);
  }
  std::optional<TypedValue> result;
  if (fn->rttype) {
    std::string rt = new_ID(top(lane));
    for (auto i : engines_of(lane)) cfg_.engine(i).memory.top().rt = rt;
    declare_in(lane, *fn->rttype, rt, fn->pos);
    exec_in(lane, fn->body);
    result = top(lane).store.read(rt);
  } else {
    exec_in(lane, fn->body);
  }
  pop(lane);
  for (auto i : engines_of(lane)) cfg_.programs.at(i - 1).running.reset();
  return result;
}

// ---- single-operation helpers ----

namespace {

template <typename F>
StepOutcome run_step(const Configuration& cfg, std::uint64_t engine, const FunctionRegistry& reg, ExecOptions opts,
                     F&& op) {
  StepOutcome out;
  out.config = cfg;
  try {
    Interpreter interp(out.config, reg, opts);
    op(interp);
    out.emitted = interp.emitted();
    out.status = out.config.engine(engine).memory.empty() ? StepStatus::Done : StepStatus::Progress;
  } catch (const RuntimeFault& f) {
    out.config = cfg;
    out.emitted.clear();
    out.status = StepStatus::Fault;
    out.error = f.error();
  }
  return out;
}

const FunctionRegistry& empty_registry() {
  static const FunctionRegistry kEmpty;
  return kEmpty;
}

}  // namespace

StepOutcome declare_state_var(const Configuration& cfg, std::uint64_t engine, const StateVarDecl& decl) {
  return run_step(cfg, engine, empty_registry(), {}, [&](Interpreter& in) { in.declare_state_var(engine, decl); });
}

StepOutcome declare_temp(const Configuration& cfg, std::uint64_t engine, TypeName t, const std::string& id) {
  return run_step(cfg, engine, empty_registry(), {}, [&](Interpreter& in) { in.declare_temp(engine, t, id); });
}

StepOutcome assign(const Configuration& cfg, std::uint64_t engine, const std::string& id, const Exp& e,
                   const FunctionRegistry& reg) {
  return run_step(cfg, engine, reg, {}, [&](Interpreter& in) { in.assign(engine, id, e, e.pos); });
}

std::pair<StepOutcome, std::optional<TypedValue>> eval(const Configuration& cfg, std::uint64_t engine, const Exp& e,
                                                       const FunctionRegistry& reg) {
  std::optional<TypedValue> value;
  StepOutcome out = run_step(cfg, engine, reg, {}, [&](Interpreter& in) { value = in.eval(engine, e); });
  if (out.status == StepStatus::Fault) value.reset();
  return {std::move(out), value};
}

StepOutcome call(const Configuration& cfg, std::uint64_t engine, const std::string& func,
                 const std::vector<Exp>& args, const FunctionRegistry& reg) {
  return run_step(cfg, engine, reg, {}, [&](Interpreter& in) { in.call(engine, func, args); });
}

StepOutcome relay(const Configuration& cfg, std::uint64_t engine, const RelayTargetExpr& target,
                  const std::string& func, const std::vector<Exp>& args, const FunctionRegistry& reg) {
  return run_step(cfg, engine, reg, {}, [&](Interpreter& in) { in.relay(engine, target, func, args); });
}

StepOutcome exec_stmt(const Configuration& cfg, std::uint64_t engine, const Stmt& s, const FunctionRegistry& reg,
                      ExecOptions opts) {
  return run_step(cfg, engine, reg, opts, [&](Interpreter& in) { in.exec(engine, s); });
}

}  // namespace crystality
