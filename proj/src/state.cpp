#include "crystality/state.hpp"

#include <algorithm>

namespace crystality {

ScopeBinding ScopeBinding::of(ScopeTag tag, std::uint64_t j) {
  switch (tag) {
    case ScopeTag::Address: return address(j);
    case ScopeTag::Engine: return engine();
    case ScopeTag::Global: return global();
  }
  return none();
}

std::string to_string(const ScopeBinding& s) {
  switch (s.kind) {
    case ScopeBinding::Kind::None: return "none";
    case ScopeBinding::Kind::Address: return "(address," + std::to_string(s.address_index) + ")";
    case ScopeBinding::Kind::Engine: return "engine";
    case ScopeBinding::Kind::Global: return "global";
  }
  return "?";
}

void MemoryStack::pop() {
  if (layers_.empty()) throw StateError(StateError::Kind::EmptyStack, "pop on empty memory stack");
  layers_.pop_back();
}

MemoryLayer& MemoryStack::top() {
  if (layers_.empty()) throw StateError(StateError::Kind::EmptyStack, "top of empty memory stack");
  return layers_.back();
}

const MemoryLayer& MemoryStack::top() const {
  if (layers_.empty()) throw StateError(StateError::Kind::EmptyStack, "top of empty memory stack");
  return layers_.back();
}

std::string_view to_string(RelayKind k) {
  switch (k) {
    case RelayKind::Address: return "address";
    case RelayKind::Engine: return "engine";
    case RelayKind::Global: return "global";
  }
  return "?";
}

void Mempool::insert(RelayTransaction tx) {
  auto pos = std::upper_bound(entries_.begin(), entries_.end(), tx.sequence,
                              [](std::uint64_t seq, const RelayTransaction& e) { return seq < e.sequence; });
  entries_.insert(pos, std::move(tx));
}

std::optional<RelayTransaction> Mempool::take(std::uint64_t sequence) {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const RelayTransaction& e) { return e.sequence == sequence; });
  if (it == entries_.end()) return std::nullopt;
  RelayTransaction tx = std::move(*it);
  entries_.erase(it);
  return tx;
}

const RelayTransaction* Mempool::find(std::uint64_t sequence) const {
  auto it = std::find_if(entries_.begin(), entries_.end(),
                         [&](const RelayTransaction& e) { return e.sequence == sequence; });
  return it == entries_.end() ? nullptr : &*it;
}

bool Configuration::all_mempools_empty() const {
  return std::all_of(mempools.begin(), mempools.end(), [](const Mempool& m) { return m.empty(); });
}

bool Configuration::all_stacks_empty() const {
  return std::all_of(engines.begin(), engines.end(),
                     [](const EngineState& e) { return e.memory.empty(); });
}

Configuration new_configuration(const SystemParams& p) {
  if (p.n < 1 || p.k < 1) {
    throw StateError(StateError::Kind::InvalidParams,
                     "need at least one engine and one address per engine (n=" +
                         std::to_string(p.n) + ", k=" + std::to_string(p.k) + ")");
  }
  Configuration cfg;
  cfg.params = p;
  cfg.engines.resize(p.n);
  for (auto& e : cfg.engines) e.address_stores.resize(p.k);
  cfg.mempools.resize(p.n);
  cfg.programs.resize(p.n);
  return cfg;
}

std::string new_ID(const MemoryLayer& layer) {
  // '$' never appears in a source identifier, and "rt" itself is reserved.
  std::string id = "rt";
  for (int i = 1; layer.store.defined(id); ++i) id = "rt$" + std::to_string(i);
  return id;
}

void FunctionRegistry::add(const std::string& name, FunctionInfo info) {
  if (info.paraname.size() != info.paratype.size()) {
    throw std::invalid_argument("parameter names and types differ in length for '" + name + "'");
  }
  if (!functions_.emplace(name, std::move(info)).second) {
    throw StateError(StateError::Kind::DuplicateFunction, "function '" + name + "' is declared twice");
  }
}

const FunctionInfo* FunctionRegistry::find(const std::string& name) const {
  auto it = functions_.find(name);
  return it == functions_.end() ? nullptr : &it->second;
}

const FunctionInfo& FunctionRegistry::at(const std::string& name) const {
  const FunctionInfo* f = find(name);
  if (!f) throw std::out_of_range("no function '" + name + "'");
  return *f;
}

TransactionEnvelope TransactionEnvelope::user(Address sender, std::string func,
                                              std::vector<TypedValue> args, std::uint64_t id) {
  TransactionEnvelope tx;
  tx.kind = Kind::User;
  tx.sender = sender;
  tx.func = std::move(func);
  tx.args = std::move(args);
  tx.id = id;
  return tx;
}

TransactionEnvelope TransactionEnvelope::from_relay(const RelayTransaction& relay,
                                                    std::uint64_t engine, std::uint64_t id) {
  TransactionEnvelope tx;
  tx.kind = Kind::Relay;
  tx.relay = relay;
  tx.delivered_to = engine;
  tx.func = relay.func;
  tx.args = relay.args;
  tx.id = id;
  return tx;
}

Address get_sender_address(const TransactionEnvelope& tx, const SystemParams& p) {
  Address a;
  if (tx.kind == TransactionEnvelope::Kind::User) {
    a = tx.sender;
  } else {
    a.engine = tx.delivered_to;
    a.index = tx.relay && tx.relay->target.kind == RelayKind::Address ? tx.relay->target.address_index : 1;
  }
  if (a.engine < 1 || a.engine > p.n || a.index < 1 || a.index > p.k) {
    throw StateError(StateError::Kind::InvalidSender,
                     "sender (" + std::to_string(a.engine) + "," + std::to_string(a.index) +
                         ") is outside n=" + std::to_string(p.n) + ", k=" + std::to_string(p.k));
  }
  return a;
}

}  // namespace crystality
