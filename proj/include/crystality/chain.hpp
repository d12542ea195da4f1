#pragma once

#include "crystality/semantics.hpp"
#include "crystality/state.hpp"
#include "crystality/syntax.hpp"

#include <cstdint>
#include <optional>
#include <random>
#include <string>
#include <variant>
#include <vector>

namespace crystality {

enum class Verdict { Applied, Reverted };
enum class SchedulingPolicy { Serial, Interleaved };
enum class TraceLevel { Off, Tx, Step };

std::string_view to_string(Verdict v);
std::string_view to_string(SchedulingPolicy p);
std::string_view to_string(TraceLevel l);
std::optional<SchedulingPolicy> policy_from_string(std::string_view s);
std::optional<TraceLevel> trace_level_from_string(std::string_view s);

struct TxRecord {
  std::uint64_t id = 0;
  TransactionEnvelope::Kind kind = TransactionEnvelope::Kind::User;
  Address at;      // resolved (engine, address); engine 0 for joint global execution
  std::string func;
  std::vector<TypedValue> args;
  std::uint64_t relay_sequence = 0;  // relays only
  Verdict verdict = Verdict::Applied;
  std::optional<RuntimeError> error;
  std::vector<RelayTransaction> emitted;
};

struct DeployRecord {
  std::string contract;
  std::string path;
  std::optional<RuntimeError> error;
};

struct DrainRecord {
  SchedulingPolicy policy = SchedulingPolicy::Serial;
  std::uint64_t rounds = 0;
  std::uint64_t executed = 0;
  bool budget_exceeded = false;
};

struct InjectRecord {
  RelayTransaction relay;
};

struct ExpectRecord {
  std::uint64_t engine = 0;
  std::string location;  // "address j", "engine" or "global"
  std::string var;
  std::string expected;
  std::optional<std::string> actual;
  bool ok = false;
};

using TraceEntry = std::variant<StepRecord, TxRecord, DeployRecord, DrainRecord, InjectRecord, ExpectRecord>;

struct ExecutionTrace {
  std::vector<TraceEntry> records;
  Configuration final;
};

struct ChainOptions {
  ExecOptions exec;
  TraceLevel level = TraceLevel::Tx;
  std::uint64_t round_budget = 64;
};

struct TxOutcome {
  Configuration config;
  Verdict verdict = Verdict::Applied;
  std::optional<RuntimeError> error;
  std::vector<RelayTransaction> emitted;
  std::vector<StepRecord> steps;
  Address at;
};

/// Runs every state-variable declaration: @address and @engine ones on each
/// engine, @global ones once as a joint step. Throws RuntimeFault(AlreadyDefined).
Configuration deploy(const Configuration& cfg, const ContractDecl& c, const FunctionRegistry& reg);

/// Executes one transaction atomically. A relay envelope must already have
/// been taken out of its mempool(s). On a fault the returned configuration is
/// `cfg` unchanged and no relays are emitted.
TxOutcome execute_transaction(const Configuration& cfg, const TransactionEnvelope& tx, const FunctionRegistry& reg,
                              const ExecOptions& opts = {});

// Owns a configuration and its trace; the scenario runner and the drain loop
// are built on it.
class Chain {
 public:
  Chain(Configuration cfg, const FunctionRegistry& reg, ChainOptions opts = {});

  const Configuration& config() const { return cfg_; }
  Configuration& config() { return cfg_; }
  const ExecutionTrace& trace() const { return trace_; }
  ExecutionTrace take_trace();

  /// Throws RuntimeFault; the configuration is unchanged on failure.
  void deploy(const ContractDecl& c, const std::string& path = "");
  TxRecord submit(const TransactionEnvelope& tx);
  TxRecord submit(Address sender, const std::string& func, std::vector<TypedValue> args);
  /// Places a relay directly into the mempool(s) its destination names, with a
  /// fresh sequence number. Used to fund accounts from outside the contract.
  RelayTransaction inject(RelayTransaction relay);
  DrainRecord drain(SchedulingPolicy policy);
  void note(ExpectRecord r);

  /// Executes the heads of the given engines' mempools in parallel from one
  /// pre-state and merges the results. Engines must hold local (address or
  /// engine) relays at their heads.
  std::vector<TxRecord> para_step(const std::vector<std::uint64_t>& engines);
  /// Executes the global relay at the head of every mempool as one joint step.
  TxRecord joint_step();

 private:
  TxRecord run(const TransactionEnvelope& tx);
  TxRecord record_of(const TransactionEnvelope& tx, const TxOutcome& out);
  void log(const TxOutcome& out, const TxRecord& rec);
  void insert_relay(Configuration& cfg, RelayTransaction relay);

  Configuration cfg_;
  const FunctionRegistry& reg_;
  ChainOptions opts_;
  ExecutionTrace trace_;
  std::uint64_t next_tx_ = 1;
  std::mt19937_64 rng_;
};

struct DrainOutcome {
  Configuration config;
  ExecutionTrace trace;
  DrainRecord summary;
};

DrainOutcome drain_relays(const Configuration& cfg, const FunctionRegistry& reg, SchedulingPolicy policy,
                          const ChainOptions& opts = {});

}  // namespace crystality
