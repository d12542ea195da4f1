#include "crystality/scenario.hpp"

#include "crystality/checker.hpp"
#include "crystality/overloaded.hpp"
#include "crystality/parser.hpp"

namespace crystality {

using nlohmann::json;

namespace {

std::uint64_t as_index(const json& j, const std::string& what) {
  if (j.is_number_unsigned()) return j.get<std::uint64_t>();
  if (j.is_number_integer() && j.get<std::int64_t>() >= 0) return static_cast<std::uint64_t>(j.get<std::int64_t>());
  throw ScenarioError(what + " must be a non-negative integer");
}

Address as_address(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) throw ScenarioError(what + " must be [engine, address]");
  return Address{as_index(j[0], what), as_index(j[1], what)};
}

const json& field(const json& obj, const char* key, const std::string& step) {
  if (!obj.contains(key)) throw ScenarioError(step + " step is missing \"" + key + "\"");
  return obj.at(key);
}

std::string as_string(const json& j, const std::string& what) {
  if (!j.is_string()) throw ScenarioError(what + " must be a string");
  return j.get<std::string>();
}

json args_of(const json& obj, const std::string& step) {
  if (!obj.contains("args")) return json::array();
  if (!obj.at("args").is_array()) throw ScenarioError(step + " \"args\" must be an array");
  return obj.at("args");
}

ScenarioStep parse_step(const json& step) {
  if (!step.is_object() || step.size() != 1) {
    throw ScenarioError("each step must be an object with exactly one key");
  }
  auto first = step.begin();
  const std::string key = first.key();
  const json& body = first.value();
  if (key == "deploy") return DeployStep{as_string(body, "deploy path")};
  if (key == "tx") {
    if (!body.is_object()) throw ScenarioError("tx step must be an object");
    TxStep tx;
    tx.sender = as_address(field(body, "sender", "tx"), "tx sender");
    tx.func = as_string(field(body, "func", "tx"), "tx func");
    tx.args = args_of(body, "tx");
    if (body.contains("expect_revert")) {
      if (!body.at("expect_revert").is_boolean()) throw ScenarioError("expect_revert must be a boolean");
      tx.expect_revert = body.at("expect_revert").get<bool>();
    }
    return tx;
  }
  if (key == "relay") {
    if (!body.is_object()) throw ScenarioError("relay step must be an object");
    RelayStep r;
    const json& target = field(body, "target", "relay");
    if (target == "engines") {
      r.target = RelayDestination{RelayKind::Engine, 0, 0};
    } else if (target == "global") {
      r.target = RelayDestination{RelayKind::Global, 0, 0};
    } else {
      Address a = as_address(target, "relay target");
      r.target = RelayDestination{RelayKind::Address, a.engine, a.index};
    }
    r.func = as_string(field(body, "func", "relay"), "relay func");
    r.args = args_of(body, "relay");
    return r;
  }
  if (key == "drain") {
    DrainStep d;
    if (body.is_object() && body.contains("policy")) {
      auto p = policy_from_string(as_string(body.at("policy"), "drain policy"));
      if (!p) throw ScenarioError("drain policy must be \"serial\" or \"interleaved\"");
      d.policy = *p;
    } else if (!body.is_object() && !body.is_null()) {
      throw ScenarioError("drain step must be an object");
    }
    return d;
  }
  if (key == "expect") {
    if (!body.is_object()) throw ScenarioError("expect step must be an object");
    ExpectStep e;
    const json& where = field(body, "address", "expect");
    if (where == "engine") {
      e.location = ExpectStep::Location::Engine;
    } else if (where == "global") {
      e.location = ExpectStep::Location::Global;
    } else {
      e.location = ExpectStep::Location::Address;
      e.address = as_index(where, "expect address");
    }
    if (body.contains("engine")) {
      e.engine = as_index(body.at("engine"), "expect engine");
    } else if (e.location != ExpectStep::Location::Global) {
      throw ScenarioError("expect step is missing \"engine\"");
    }
    e.var = as_string(field(body, "var", "expect"), "expect var");
    e.value = field(body, "value", "expect");
    return e;
  }
  throw ScenarioError("unknown step \"" + key + "\"");
}

TypedValue infer_value(const json& j) {
  if (j.is_boolean()) return value_from_json(j, TypeName::Bool);
  if (j.is_array()) return value_from_json(j, TypeName::Address);
  return value_from_json(j, TypeName::UInt256);
}

std::vector<TypedValue> convert_args(const json& args, const FunctionRegistry& reg, const std::string& func) {
  const FunctionInfo* fn = reg.find(func);
  if (!fn) throw ScenarioError("the contract has no function \"" + func + "\"");
  if (args.size() != fn->paratype.size()) {
    throw ScenarioError("\"" + func + "\" takes " + std::to_string(fn->paratype.size()) + " argument(s), " +
                        std::to_string(args.size()) + " given");
  }
  std::vector<TypedValue> out;
  for (std::size_t i = 0; i < args.size(); ++i) out.push_back(value_from_json(args[i], fn->paratype[i]));
  return out;
}

}  // namespace

TypedValue value_from_json(const json& j, TypeName t) {
  switch (t) {
    case TypeName::UInt256:
      if (j.is_number_unsigned() || (j.is_number_integer() && j.get<std::int64_t>() >= 0)) {
        return TypedValue::uint(as_index(j, "uint256 value"));
      }
      if (j.is_string()) {
        if (auto v = parse_uint256(j.get<std::string>())) return TypedValue(*v);
      }
      throw ScenarioError("expected a uint256 (non-negative integer or decimal string), got " + j.dump());
    case TypeName::Bool:
      if (j.is_boolean()) return TypedValue(j.get<bool>());
      throw ScenarioError("expected a bool, got " + j.dump());
    case TypeName::Address:
      return TypedValue(as_address(j, "address value"));
  }
  throw ScenarioError("unknown type");
}

Scenario parse_scenario(std::string_view text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ScenarioError(std::string("scenario is not valid JSON: ") + e.what());
  }
  if (!doc.is_object()) throw ScenarioError("scenario must be a JSON object");
  Scenario s;
  if (doc.contains("params")) {
    const json& p = doc.at("params");
    if (!p.is_object()) throw ScenarioError("\"params\" must be an object");
    if (p.contains("n")) s.n = as_index(p.at("n"), "params.n");
    if (p.contains("k")) s.k = as_index(p.at("k"), "params.k");
    if (p.contains("seed")) s.seed = as_index(p.at("seed"), "params.seed");
  }
  if (!doc.contains("steps") || !doc.at("steps").is_array()) throw ScenarioError("scenario needs a \"steps\" array");
  for (const auto& step : doc.at("steps")) s.steps.push_back(parse_step(step));
  return s;
}

SystemParams effective_params(const Scenario& s, SystemParams defaults) {
  if (s.n) defaults.n = *s.n;
  if (s.k) defaults.k = *s.k;
  if (s.seed) defaults.seed = *s.seed;
  return defaults;
}

ScenarioResult run_scenario(const ContractDecl& contract, const FunctionRegistry& reg, const Scenario& scenario,
                            const SystemParams& params, ChainOptions opts) {
  Configuration cfg;
  try {
    cfg = new_configuration(params);
  } catch (const StateError& e) {
    throw ScenarioError(e.what());
  }
  Chain chain(std::move(cfg), reg, opts);
  ScenarioResult result;

  auto do_deploy = [&](const std::string& path) {
    try {
      chain.deploy(contract, path);
    } catch (const RuntimeFault& f) {
      result.failures.push_back("deploy failed: " + to_string(f.error()));
    }
  };
  bool has_deploy = std::any_of(scenario.steps.begin(), scenario.steps.end(),
                                [](const ScenarioStep& s) { return std::holds_alternative<DeployStep>(s); });
  if (!has_deploy) do_deploy("");

  for (const auto& step : scenario.steps) {
    std::visit(
        Overloaded{
            [&](const DeployStep& d) { do_deploy(d.path); },
            [&](const TxStep& t) {
              TxRecord rec = chain.submit(t.sender, t.func, convert_args(t.args, reg, t.func));
              if (rec.verdict == Verdict::Reverted && !t.expect_revert) {
                result.failures.push_back("tx " + std::to_string(rec.id) + " " + t.func + " reverted: " +
                                          to_string(*rec.error));
              } else if (rec.verdict == Verdict::Applied && t.expect_revert) {
                result.failures.push_back("tx " + std::to_string(rec.id) + " " + t.func +
                                          " was expected to revert but applied");
              }
            },
            [&](const RelayStep& r) {
              const FunctionInfo* fn = reg.find(r.func);
              RelayTransaction relay;
              relay.target = r.target;
              relay.func = r.func;
              relay.args = convert_args(r.args, reg, r.func);
              ScopeTag wanted = r.target.kind == RelayKind::Address  ? ScopeTag::Address
                                : r.target.kind == RelayKind::Engine ? ScopeTag::Engine
                                                                     : ScopeTag::Global;
              if (fn->scope != wanted) {
                throw ScenarioError("relay step targets a " + std::string(to_string(wanted)) + " destination but \"" +
                                    r.func + "\" is " + std::string(to_string(fn->scope)));
              }
              try {
                chain.inject(std::move(relay));
              } catch (const std::invalid_argument& e) {
                throw ScenarioError(e.what());
              }
            },
            [&](const DrainStep& d) {
              DrainRecord rec = chain.drain(d.policy);
              if (rec.budget_exceeded) {
                result.failures.push_back("drain stopped after " + std::to_string(rec.rounds) +
                                          " rounds with relays still pending (RoundBudgetExceeded)");
              }
            },
            [&](const ExpectStep& e) {
              ExpectRecord rec;
              rec.engine = e.location == ExpectStep::Location::Global ? 0 : e.engine;
              rec.var = e.var;
              TypedValue want = infer_value(e.value);
              rec.expected = to_string(want);
              const Configuration& c = chain.config();
              const ByteStore* store = nullptr;
              switch (e.location) {
                case ExpectStep::Location::Global:
                  rec.location = "global";
                  store = &c.global;
                  break;
                case ExpectStep::Location::Engine:
                  rec.location = "engine";
                  if (e.engine >= 1 && e.engine <= c.params.n) store = &c.engine(e.engine).engine_store;
                  break;
                case ExpectStep::Location::Address:
                  rec.location = "address " + std::to_string(e.address);
                  if (c.valid_address(Address{e.engine, e.address})) {
                    store = &c.engine(e.engine).address_store(e.address);
                  }
                  break;
              }
              if (store && store->defined(e.var)) {
                TypedValue got = store->read(e.var);
                rec.actual = to_string(got);
                rec.ok = got == want;
              }
              if (!rec.ok) {
                std::string where = rec.location == "global" ? "global" : "engine " + std::to_string(e.engine) + " " + rec.location;
                result.failures.push_back("expect " + e.var + " at " + where + " = " + rec.expected + ", found " +
                                          (rec.actual ? *rec.actual : std::string("nothing")));
              }
              chain.note(std::move(rec));
            },
        },
        step);
  }
  result.trace = chain.take_trace();
  return result;
}

ScenarioResult run_scenario(std::string_view source, const Scenario& scenario, const SystemParams& params,
                            ChainOptions opts) {
  ContractDecl contract = parse_contract(source);
  CheckResult checked = check_contract(contract);
  if (!checked.ok()) {
    std::string msg = "contract does not pass the checker";
    for (const auto& d : checked.diagnostics) {
      if (d.severity == Severity::Error) msg += "\n" + format(d);
    }
    throw ScenarioError(msg);
  }
  return run_scenario(contract, *checked.registry, scenario, params, opts);
}

}  // namespace crystality
