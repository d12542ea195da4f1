#pragma once

#include "crystality/chain.hpp"
#include "crystality/state.hpp"
#include "crystality/syntax.hpp"

#include <json.hpp>

#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

namespace crystality {

class ScenarioError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct DeployStep {
  std::string path;
};

struct TxStep {
  Address sender;
  std::string func;
  nlohmann::json args = nlohmann::json::array();
  bool expect_revert = false;
};

// Puts a relay straight into the mempools, e.g. to fund an account.
struct RelayStep {
  RelayDestination target;
  std::string func;
  nlohmann::json args = nlohmann::json::array();
};

struct DrainStep {
  SchedulingPolicy policy = SchedulingPolicy::Serial;
};

struct ExpectStep {
  enum class Location { Address, Engine, Global };

  std::uint64_t engine = 1;
  Location location = Location::Address;
  std::uint64_t address = 0;
  std::string var;
  nlohmann::json value;
};

using ScenarioStep = std::variant<DeployStep, TxStep, RelayStep, DrainStep, ExpectStep>;

struct Scenario {
  std::optional<std::uint64_t> n, k, seed;
  std::vector<ScenarioStep> steps;
};

/// Throws ScenarioError on malformed input.
Scenario parse_scenario(std::string_view json_text);

/// Scenario values override `defaults` field by field.
SystemParams effective_params(const Scenario& s, SystemParams defaults);

/// Converts a scenario JSON value to a value of type `t`: a number or decimal
/// string for uint256, a boolean, or [engine, index] for an address.
/// Throws ScenarioError.
TypedValue value_from_json(const nlohmann::json& j, TypeName t);

struct ScenarioResult {
  ExecutionTrace trace;
  std::vector<std::string> failures;

  bool passed() const { return failures.empty(); }
};

/// Deploys `contract` at the scenario's deploy step (or first, when the
/// scenario has none), then runs every step in order. Failed expectations,
/// unexpected reverts and exhausted drain budgets are collected as failures.
/// Throws ScenarioError when a step cannot be interpreted against the contract.
ScenarioResult run_scenario(const ContractDecl& contract, const FunctionRegistry& reg, const Scenario& scenario,
                            const SystemParams& params, ChainOptions opts = {});

/// Parses and checks `source` first; throws ParseError, or ScenarioError when
/// the checker reports errors.
ScenarioResult run_scenario(std::string_view source, const Scenario& scenario, const SystemParams& params,
                            ChainOptions opts = {});

}  // namespace crystality
