#pragma once

#include "crystality/store.hpp"
#include "crystality/syntax.hpp"

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

namespace crystality {

class StateError : public std::invalid_argument {
 public:
  enum class Kind { InvalidParams, InvalidSender, EmptyStack, DuplicateFunction };

  StateError(Kind kind, const std::string& what) : std::invalid_argument(what), kind_(kind) {}
  Kind kind() const { return kind_; }

 private:
  Kind kind_;
};

struct SystemParams {
  std::uint64_t n = 1;     // engines
  std::uint64_t k = 1;     // addresses per engine
  std::uint64_t seed = 0;  // scheduler seed

  friend bool operator==(const SystemParams&, const SystemParams&) = default;
};

// Scope of the frame on top of a memory stack. None marks "outside any function",
// the state a transaction starts from.
struct ScopeBinding {
  enum class Kind { None, Address, Engine, Global };

  Kind kind = Kind::None;
  std::uint64_t address_index = 0;  // 1-based; only meaningful for Address

  static ScopeBinding none() { return {}; }
  static ScopeBinding address(std::uint64_t j) { return {Kind::Address, j}; }
  static ScopeBinding engine() { return {Kind::Engine, 0}; }
  static ScopeBinding global() { return {Kind::Global, 0}; }
  static ScopeBinding of(ScopeTag tag, std::uint64_t j);

  bool is(Kind k) const { return kind == k; }

  friend bool operator==(const ScopeBinding&, const ScopeBinding&) = default;
};

std::string to_string(const ScopeBinding& s);

struct MemoryLayer {
  ByteStore store;
  ScopeBinding scope;
  std::optional<std::string> rt;

  friend bool operator==(const MemoryLayer&, const MemoryLayer&) = default;
};

class MemoryStack {
 public:
  void push(MemoryLayer layer) { layers_.push_back(std::move(layer)); }
  /// Throws StateError(EmptyStack).
  void pop();
  MemoryLayer& top();
  const MemoryLayer& top() const;

  bool empty() const { return layers_.empty(); }
  std::size_t depth() const { return layers_.size(); }
  const std::vector<MemoryLayer>& layers() const { return layers_; }

  friend bool operator==(const MemoryStack&, const MemoryStack&) = default;

 private:
  std::vector<MemoryLayer> layers_;
};

struct EngineState {
  std::vector<ByteStore> address_stores;  // index j-1 holds address j
  ByteStore engine_store;
  MemoryStack memory;

  ByteStore& address_store(std::uint64_t j) { return address_stores.at(j - 1); }
  const ByteStore& address_store(std::uint64_t j) const { return address_stores.at(j - 1); }

  friend bool operator==(const EngineState&, const EngineState&) = default;
};

enum class RelayKind { Address, Engine, Global };

std::string_view to_string(RelayKind k);

struct RelayDestination {
  RelayKind kind = RelayKind::Address;
  std::uint64_t engine = 0;         // only for Address: the mempool it is delivered to
  std::uint64_t address_index = 0;  // only for Address

  friend bool operator==(const RelayDestination&, const RelayDestination&) = default;
};

struct RelayTransaction {
  RelayDestination target;
  std::string func;
  std::vector<TypedValue> args;
  Address origin;  // (engine, address) of the emitting frame; address 0 for engine/global frames
  std::uint64_t sequence = 0;

  friend bool operator==(const RelayTransaction&, const RelayTransaction&) = default;
};

/// Pending relay transactions of one engine, kept ordered by sequence number.
class Mempool {
 public:
  void insert(RelayTransaction tx);
  /// Removes and returns the entry with this sequence number, if present.
  std::optional<RelayTransaction> take(std::uint64_t sequence);
  const RelayTransaction* find(std::uint64_t sequence) const;

  const std::vector<RelayTransaction>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  friend bool operator==(const Mempool&, const Mempool&) = default;

 private:
  std::vector<RelayTransaction> entries_;
};

// Prog_i: what engine i is executing. Empty between transactions.
struct ProgramSlot {
  std::optional<std::string> running;

  friend bool operator==(const ProgramSlot&, const ProgramSlot&) = default;
};

struct Configuration {
  SystemParams params;
  std::vector<EngineState> engines;
  std::vector<Mempool> mempools;
  std::vector<ProgramSlot> programs;
  ByteStore global;
  std::uint64_t next_sequence = 1;

  // 1-based accessors
  EngineState& engine(std::uint64_t i) { return engines.at(i - 1); }
  const EngineState& engine(std::uint64_t i) const { return engines.at(i - 1); }
  Mempool& mempool(std::uint64_t i) { return mempools.at(i - 1); }
  const Mempool& mempool(std::uint64_t i) const { return mempools.at(i - 1); }

  bool valid_address(const Address& a) const {
    return a.engine >= 1 && a.engine <= params.n && a.index >= 1 && a.index <= params.k;
  }
  bool all_mempools_empty() const;
  bool all_stacks_empty() const;

  friend bool operator==(const Configuration&, const Configuration&) = default;
};

/// n engines with k empty address stores each. Throws StateError(InvalidParams).
Configuration new_configuration(const SystemParams& p);

/// A return-slot identifier that is free in `layer` and cannot be written in source.
std::string new_ID(const MemoryLayer& layer);

struct FunctionInfo {
  ScopeTag scope = ScopeTag::Address;
  std::vector<std::string> paraname;
  std::vector<TypeName> paratype;
  Stmt body;
  std::optional<TypeName> rttype;
  bool predefined = false;
  SourcePos pos;
};

// The static function tables: scope, parameter names/types, body and return type.
class FunctionRegistry {
 public:
  /// Throws StateError(DuplicateFunction).
  void add(const std::string& name, FunctionInfo info);
  const FunctionInfo* find(const std::string& name) const;
  const FunctionInfo& at(const std::string& name) const;
  bool contains(const std::string& name) const { return functions_.contains(name); }

  std::size_t size() const { return functions_.size(); }
  bool empty() const { return functions_.empty(); }
  auto begin() const { return functions_.begin(); }
  auto end() const { return functions_.end(); }

 private:
  std::map<std::string, FunctionInfo> functions_;
};

struct TransactionEnvelope {
  enum class Kind { User, Relay };

  Kind kind = Kind::User;
  Address sender;              // User only
  std::optional<RelayTransaction> relay;  // Relay only
  std::uint64_t delivered_to = 0;         // engine whose mempool held the relay
  std::string func;
  std::vector<TypedValue> args;
  std::uint64_t id = 0;

  static TransactionEnvelope user(Address sender, std::string func, std::vector<TypedValue> args,
                                  std::uint64_t id = 0);
  static TransactionEnvelope from_relay(const RelayTransaction& relay, std::uint64_t engine,
                                        std::uint64_t id = 0);
};

/// Resolves the (engine, address) a transaction executes at. For relays this is
/// the delivery coordinates: an address relay delivered to engine r runs at
/// (r, j); engine and global relays report address 1, which their rules ignore.
/// Throws StateError(InvalidSender).
Address get_sender_address(const TransactionEnvelope& tx, const SystemParams& p);

}  // namespace crystality
