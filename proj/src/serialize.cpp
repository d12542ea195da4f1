#include "crystality/serialize.hpp"

#include "crystality/overloaded.hpp"

namespace crystality {

namespace {

Json pos_json(SourcePos p) { return Json::array({p.line, p.column}); }

Json address_json(const Address& a) { return Json::array({a.engine, a.index}); }

}  // namespace

Json to_json(const TypedValue& v) {
  switch (v.type()) {
    case TypeName::UInt256: return v.as_uint().str();
    case TypeName::Bool: return v.as_bool();
    case TypeName::Address: return address_json(v.as_address());
  }
  return nullptr;
}

Json to_json(const ByteStore& s) {
  Json out = Json::object();
  std::vector<std::pair<std::string, ByteStore::Slot>> slots(s.slots().begin(), s.slots().end());
  std::sort(slots.begin(), slots.end(), [](const auto& a, const auto& b) { return a.second.offset < b.second.offset; });
  for (const auto& [name, slot] : slots) {
    out[name] = Json{{"type", to_string(slot.type)}, {"offset", slot.offset}, {"value", to_json(s.read(name))}};
  }
  return out;
}

Json to_json(const RelayTransaction& r) {
  Json target{{"kind", to_string(r.target.kind)}};
  if (r.target.kind == RelayKind::Address) {
    target["engine"] = r.target.engine;
    target["address"] = r.target.address_index;
  }
  Json args = Json::array();
  for (const auto& a : r.args) args.push_back(to_json(a));
  return Json{{"sequence", r.sequence},
              {"target", target},
              {"func", r.func},
              {"args", args},
              {"origin", address_json(r.origin)}};
}

Json to_json(const RuntimeError& e) {
  return Json{{"kind", to_string(e.kind)}, {"subject", e.subject}, {"message", e.message}, {"span", pos_json(e.span)}};
}

Json to_json(const Diagnostic& d) {
  return Json{{"severity", d.severity == Severity::Error ? "error" : "warning"},
              {"code", d.code},
              {"line", d.span.line},
              {"column", d.span.column},
              {"message", d.message}};
}

Json to_json(const std::vector<Diagnostic>& ds) {
  Json out = Json::array();
  for (const auto& d : ds) out.push_back(to_json(d));
  return out;
}

Json to_json(const Configuration& cfg) {
  Json engines = Json::array();
  for (std::uint64_t i = 1; i <= cfg.params.n; ++i) {
    const auto& e = cfg.engine(i);
    Json addresses = Json::array();
    for (std::uint64_t j = 1; j <= cfg.params.k; ++j) addresses.push_back(to_json(e.address_store(j)));
    Json mempool = Json::array();
    for (const auto& r : cfg.mempool(i).entries()) mempool.push_back(to_json(r));
    engines.push_back(Json{{"engine", i},
                           {"addresses", addresses},
                           {"engine_store", to_json(e.engine_store)},
                           {"memory_depth", e.memory.depth()},
                           {"mempool", mempool}});
  }
  return Json{{"params", {{"n", cfg.params.n}, {"k", cfg.params.k}, {"seed", cfg.params.seed}}},
              {"engines", engines},
              {"global", to_json(cfg.global)},
              {"next_sequence", cfg.next_sequence}};
}

Json to_json(const Exp& e) {
  Json out = std::visit(Overloaded{
                            [](const IdentExp& id) { return Json{{"kind", "ident"}, {"name", id.name}}; },
                            [](const LiteralExp& l) {
                              return Json{{"kind", "literal"},
                                          {"type", to_string(l.value.type())},
                                          {"value", to_json(l.value)}};
                            },
                            [](const BinaryExp& b) {
                              return Json{{"kind", "binary"},
                                          {"op", to_string(b.op)},
                                          {"lhs", to_json(*b.lhs)},
                                          {"rhs", to_json(*b.rhs)}};
                            },
                            [](const CallExp& c) {
                              Json args = Json::array();
                              for (const auto& a : c.args) args.push_back(to_json(a));
                              return Json{{"kind", "call"}, {"func", c.func}, {"args", args}};
                            },
                        },
                        e.node);
  out["pos"] = pos_json(e.pos);
  return out;
}

namespace {

Json args_json(const std::vector<Exp>& args) {
  Json out = Json::array();
  for (const auto& a : args) out.push_back(to_json(a));
  return out;
}

}  // namespace

Json to_json(const Stmt& s) {
  Json out = std::visit(
      Overloaded{
          [](const TempDecl& d) { return Json{{"kind", "decl"}, {"type", to_string(d.type)}, {"name", d.name}}; },
          [](const Skip&) { return Json{{"kind", "skip"}}; },
          [](const Assign& a) { return Json{{"kind", "assign"}, {"target", a.target}, {"value", to_json(a.value)}}; },
          [](const Relay& r) {
            Json target = std::visit(Overloaded{
                                         [](const AtAddress& a) { return Json{{"address", to_json(a.address)}}; },
                                         [](const AtEngines&) { return Json("engines"); },
                                         [](const AtGlobal&) { return Json("global"); },
                                     },
                                     r.target);
            return Json{{"kind", "relay"}, {"target", target}, {"func", r.func}, {"args", args_json(r.args)}};
          },
          [](const Return& r) { return Json{{"kind", "return"}, {"value", to_json(r.value)}}; },
          [](const CallStmt& c) { return Json{{"kind", "call"}, {"func", c.func}, {"args", args_json(c.args)}}; },
          [](const Seq& q) { return Json{{"kind", "seq"}, {"first", to_json(*q.first)}, {"second", to_json(*q.second)}}; },
          [](const If& i) {
            return Json{{"kind", "if"},
                        {"cond", to_json(i.cond)},
                        {"then", to_json(*i.then_branch)},
                        {"else", to_json(*i.else_branch)}};
          },
          [](const While& w) { return Json{{"kind", "while"}, {"cond", to_json(w.cond)}, {"body", to_json(*w.body)}}; },
      },
      s.node);
  out["pos"] = pos_json(s.pos);
  return out;
}

Json to_json(const ContractDecl& c) {
  Json vars = Json::array();
  for (const auto& v : c.state_vars) {
    vars.push_back(Json{{"name", v.name}, {"type", to_string(v.type)}, {"scope", to_string(v.scope)}, {"pos", pos_json(v.pos)}});
  }
  Json funcs = Json::array();
  for (const auto& f : c.functions) {
    Json params = Json::array();
    for (const auto& p : f.params) params.push_back(Json{{"name", p.name}, {"type", to_string(p.type)}});
    funcs.push_back(Json{{"name", f.name},
                         {"scope", to_string(f.scope)},
                         {"params", params},
                         {"returns", f.return_type ? Json(to_string(*f.return_type)) : Json(nullptr)},
                         {"body", to_json(f.body)},
                         {"pos", pos_json(f.pos)}});
  }
  return Json{{"contract", c.name}, {"state_vars", vars}, {"functions", funcs}};
}

Json to_json(const TraceEntry& entry) {
  return std::visit(
      Overloaded{
          [](const StepRecord& s) {
            Json emitted = Json::array();
            for (const auto& r : s.emitted) emitted.push_back(to_json(r));
            return Json{{"type", "step"},
                        {"step", s.step},
                        {"engine", s.engine == 0 ? Json("all") : Json(s.engine)},
                        {"rule", s.rule},
                        {"span", pos_json(s.span)},
                        {"emitted", emitted}};
          },
          [](const TxRecord& t) {
            Json args = Json::array();
            for (const auto& a : t.args) args.push_back(to_json(a));
            Json emitted = Json::array();
            for (const auto& r : t.emitted) emitted.push_back(to_json(r));
            Json out{{"type", "tx"},
                     {"id", t.id},
                     {"kind", t.kind == TransactionEnvelope::Kind::User ? "user" : "relay"},
                     {"engine", t.at.engine == 0 ? Json("all") : Json(t.at.engine)},
                     {"address", t.at.index == 0 ? Json(nullptr) : Json(t.at.index)},
                     {"func", t.func},
                     {"args", args}};
            if (t.kind == TransactionEnvelope::Kind::Relay) out["sequence"] = t.relay_sequence;
            out["verdict"] = to_string(t.verdict);
            out["emitted"] = emitted;
            if (t.error) out["fault"] = to_json(*t.error);
            return out;
          },
          [](const DeployRecord& d) {
            Json out{{"type", "deploy"}, {"contract", d.contract}, {"path", d.path}};
            if (d.error) out["fault"] = to_json(*d.error);
            return out;
          },
          [](const DrainRecord& d) {
            return Json{{"type", "drain"},
                        {"policy", to_string(d.policy)},
                        {"rounds", d.rounds},
                        {"executed", d.executed},
                        {"budget_exceeded", d.budget_exceeded}};
          },
          [](const InjectRecord& r) { return Json{{"type", "inject"}, {"relay", to_json(r.relay)}}; },
          [](const ExpectRecord& e) {
            return Json{{"type", "expect"},
                        {"engine", e.engine},
                        {"location", e.location},
                        {"var", e.var},
                        {"expected", e.expected},
                        {"actual", e.actual ? Json(*e.actual) : Json(nullptr)},
                        {"ok", e.ok}};
          },
      },
      entry);
}

}  // namespace crystality
