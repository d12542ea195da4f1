#pragma once

#include "crystality/state.hpp"
#include "crystality/syntax.hpp"

#include <cstdint>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

namespace crystality {

enum class RuntimeErrorKind {
  UndefinedVariable,
  AlreadyDefined,
  TypeMismatch,
  ScopeViolation,
  DivisionByZero,
  ArithmeticOverflow,
  InvalidAddress,
  Nontermination,
};

std::string_view to_string(RuntimeErrorKind k);

struct RuntimeError {
  RuntimeErrorKind kind = RuntimeErrorKind::TypeMismatch;
  std::string subject;  // offending identifier or rendered expression
  std::string message;
  SourcePos span;

  friend bool operator==(const RuntimeError&, const RuntimeError&) = default;
};

/// `Kind at line:col: message`
std::string to_string(const RuntimeError& e);

class RuntimeFault : public std::runtime_error {
 public:
  explicit RuntimeFault(RuntimeError e) : std::runtime_error(to_string(e)), error_(std::move(e)) {}
  const RuntimeError& error() const { return error_; }

 private:
  RuntimeError error_;
};

// One applied rule. Engine 0 marks a joint step taken by all engines at once.
struct StepRecord {
  std::uint64_t step = 0;
  std::uint64_t engine = 0;
  std::string rule;
  SourcePos span;
  std::vector<RelayTransaction> emitted;
};

// Counters for memory-stack discipline, shared across many executions.
struct HygieneStats {
  std::uint64_t statements = 0;          // statements whose stack depth was compared
  std::uint64_t balance_violations = 0;  // depth after != depth before
  std::uint64_t boundaries = 0;          // transaction boundaries inspected
  std::uint64_t boundary_violations = 0; // non-empty stacks at a boundary
};

struct ExecOptions {
  std::uint64_t step_budget = 100000;  // statements and loop iterations per transaction
  std::size_t max_call_depth = 256;    // deeper recursion faults as Nontermination
  bool record_steps = false;
  HygieneStats* stats = nullptr;
};

// Executes statements and expressions over a configuration it does not own.
// Faults are thrown as RuntimeFault and may leave the configuration half
// updated; callers that need atomicity run on a copy.
class Interpreter {
 public:
  Interpreter(Configuration& cfg, const FunctionRegistry& reg, ExecOptions opts = {});

  // Runs in the context of the frame on top of engine i's memory stack. A
  // @global frame on top makes the operation a joint step over every engine.
  void declare_state_var(std::uint64_t engine, const StateVarDecl& decl);
  void declare_temp(std::uint64_t engine, TypeName t, const std::string& id, SourcePos pos = {});
  void assign(std::uint64_t engine, const std::string& id, const Exp& e, SourcePos pos = {});
  TypedValue eval(std::uint64_t engine, const Exp& e);
  void call(std::uint64_t engine, const std::string& func, const std::vector<Exp>& args, SourcePos pos = {});
  void relay(std::uint64_t engine, const RelayTargetExpr& target, const std::string& func,
             const std::vector<Exp>& args, SourcePos pos = {});
  void exec(std::uint64_t engine, const Stmt& s);

  /// Enters a T-function: pushes an empty layer whose scope comes from the
  /// function (address j of the sender, the sender's engine, or global on all
  /// engines), binds the argument values, runs the body and pops. Returns the
  /// value of the return slot when the function declares a return type.
  std::optional<TypedValue> invoke(Address sender, const std::string& func, const std::vector<TypedValue>& args);

  const std::vector<RelayTransaction>& emitted() const { return emitted_; }
  const std::vector<StepRecord>& records() const { return records_; }
  std::uint64_t steps() const { return steps_; }

 private:
  struct Lane {
    std::uint64_t engine = 1;  // representative engine for reads
    bool joint = false;
  };

  Lane lane_of(std::uint64_t engine) const;
  std::vector<std::uint64_t> engines_of(const Lane& lane) const;
  MemoryLayer& top(const Lane& lane);
  ScopeBinding frame_scope(const Lane& lane);
  std::size_t depth(const Lane& lane) const;
  void push(const Lane& lane, const MemoryLayer& layer);
  void pop(const Lane& lane);

  void tick(SourcePos pos);
  void record(const Lane& lane, std::string rule, SourcePos pos, std::vector<RelayTransaction> emitted = {});
  [[noreturn]] void fail(RuntimeErrorKind kind, std::string subject, std::string message, SourcePos pos) const;

  std::optional<ScopeTag> state_scope(const Lane& lane, const std::string& id) const;
  ByteStore& state_store(const Lane& lane, ScopeTag var_scope);

  TypedValue eval_in(const Lane& lane, const Exp& e);
  TypedValue read_name(const Lane& lane, const std::string& id, SourcePos pos);
  TypedValue apply(BinOp op, const TypedValue& a, const TypedValue& b, SourcePos pos) const;
  void declare_in(const Lane& lane, TypeName t, const std::string& id, SourcePos pos);
  void write_name(const Lane& lane, const std::string& id, const TypedValue& v, SourcePos pos, bool is_return);
  void assign_in(const Lane& lane, const std::string& id, const Exp& e, SourcePos pos);
  std::optional<TypedValue> call_in(const Lane& lane, const std::string& func, const std::vector<Exp>& args,
                                    bool wants_value, SourcePos pos);
  void relay_in(const Lane& lane, const RelayTargetExpr& target, const std::string& func,
                const std::vector<Exp>& args, SourcePos pos);
  void exec_in(const Lane& lane, const Stmt& s);
  void exec_node(const Lane& lane, const Stmt& s);

  Configuration& cfg_;
  const FunctionRegistry& reg_;
  ExecOptions opts_;
  std::uint64_t steps_ = 0;
  int pure_ = 0;  // > 0 while evaluating relay operands
  std::vector<RelayTransaction> emitted_;
  std::vector<StepRecord> records_;
};

enum class StepStatus { Progress, Done, Fault };

std::string_view to_string(StepStatus s);

// Result of one of the single-operation helpers below. On a fault `config` is
// the unchanged pre-state. Otherwise status is Done when engine i's memory
// stack is empty afterwards and Progress while it is still inside a frame.
struct StepOutcome {
  Configuration config;
  std::vector<RelayTransaction> emitted;
  StepStatus status = StepStatus::Done;
  std::optional<RuntimeError> error;
};

StepOutcome declare_state_var(const Configuration& cfg, std::uint64_t engine, const StateVarDecl& decl);
StepOutcome declare_temp(const Configuration& cfg, std::uint64_t engine, TypeName t, const std::string& id);
StepOutcome assign(const Configuration& cfg, std::uint64_t engine, const std::string& id, const Exp& e,
                   const FunctionRegistry& reg);
std::pair<StepOutcome, std::optional<TypedValue>> eval(const Configuration& cfg, std::uint64_t engine,
                                                       const Exp& e, const FunctionRegistry& reg);
StepOutcome call(const Configuration& cfg, std::uint64_t engine, const std::string& func,
                 const std::vector<Exp>& args, const FunctionRegistry& reg);
StepOutcome relay(const Configuration& cfg, std::uint64_t engine, const RelayTargetExpr& target,
                  const std::string& func, const std::vector<Exp>& args, const FunctionRegistry& reg);
StepOutcome exec_stmt(const Configuration& cfg, std::uint64_t engine, const Stmt& s, const FunctionRegistry& reg,
                      ExecOptions opts = {});

}  // namespace crystality
