#pragma once

#include "crystality/chain.hpp"
#include "crystality/checker.hpp"
#include "crystality/semantics.hpp"
#include "crystality/state.hpp"
#include "crystality/syntax.hpp"

#include <json.hpp>

#include <string>

namespace crystality {

using Json = nlohmann::ordered_json;

// uint256 values are decimal strings so they survive JSON readers limited to
// doubles; bools are JSON booleans; addresses are [engine, index].
Json to_json(const TypedValue& v);
Json to_json(const ByteStore& s);
Json to_json(const RelayTransaction& r);
Json to_json(const RuntimeError& e);
Json to_json(const Diagnostic& d);
Json to_json(const std::vector<Diagnostic>& ds);

/// Full configuration snapshot: parameters, per-engine stores, memory depth,
/// mempools, the global store and the relay sequence counter.
Json to_json(const Configuration& cfg);

Json to_json(const Exp& e);
Json to_json(const Stmt& s);
Json to_json(const ContractDecl& c);

/// One trace line. Every record carries a "type" field:
/// step, deploy, tx, inject, drain or expect.
Json to_json(const TraceEntry& entry);

}  // namespace crystality
