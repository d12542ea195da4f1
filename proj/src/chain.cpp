#include "crystality/chain.hpp"

#include <algorithm>
#include <deque>

namespace crystality {

std::string_view to_string(Verdict v) { return v == Verdict::Applied ? "applied" : "reverted"; }

std::string_view to_string(SchedulingPolicy p) { return p == SchedulingPolicy::Serial ? "serial" : "interleaved"; }

std::string_view to_string(TraceLevel l) {
  switch (l) {
    case TraceLevel::Off: return "off";
    case TraceLevel::Tx: return "tx";
    case TraceLevel::Step: return "step";
  }
  return "?";
}

std::optional<SchedulingPolicy> policy_from_string(std::string_view s) {
  if (s == "serial") return SchedulingPolicy::Serial;
  if (s == "interleaved") return SchedulingPolicy::Interleaved;
  return std::nullopt;
}

std::optional<TraceLevel> trace_level_from_string(std::string_view s) {
  if (s == "off") return TraceLevel::Off;
  if (s == "tx") return TraceLevel::Tx;
  if (s == "step") return TraceLevel::Step;
  return std::nullopt;
}

Configuration deploy(const Configuration& cfg, const ContractDecl& c, const FunctionRegistry& reg) {
  Configuration out = cfg;
  Interpreter interp(out, reg);
  for (const auto& decl : c.state_vars) {
    if (decl.scope == ScopeTag::Global) {
      interp.declare_state_var(1, decl);
    } else {
      for (std::uint64_t i = 1; i <= out.params.n; ++i) interp.declare_state_var(i, decl);
    }
  }
  return out;
}

namespace {

void check_boundary(const Configuration& cfg, HygieneStats* stats) {
  if (!stats) return;
  ++stats->boundaries;
  if (!cfg.all_stacks_empty()) ++stats->boundary_violations;
}

}  // namespace

TxOutcome execute_transaction(const Configuration& cfg, const TransactionEnvelope& tx, const FunctionRegistry& reg,
                              const ExecOptions& opts) {
  TxOutcome out;
  out.config = cfg;
  check_boundary(cfg, opts.stats);
  Address at;
  try {
    at = get_sender_address(tx, cfg.params);
  } catch (const StateError& e) {
    out.verdict = Verdict::Reverted;
    out.error = RuntimeError{RuntimeErrorKind::InvalidAddress, tx.func, e.what(), {}};
    out.at = tx.kind == TransactionEnvelope::Kind::User ? tx.sender : Address{tx.delivered_to, 0};
    return out;
  }
  const FunctionInfo* fn = reg.find(tx.func);
  out.at = at;
  if (fn && fn->scope == ScopeTag::Engine) out.at.index = 0;
  if (fn && fn->scope == ScopeTag::Global) out.at = Address{0, 0};

  Interpreter interp(out.config, reg, opts);
  try {
    interp.invoke(at, tx.func, tx.args);
    out.emitted = interp.emitted();
  } catch (const RuntimeFault& f) {
    out.config = cfg;
    out.verdict = Verdict::Reverted;
    out.error = f.error();
  }
  out.steps = interp.records();
  check_boundary(out.config, opts.stats);
  return out;
}

// ---- Chain ----

Chain::Chain(Configuration cfg, const FunctionRegistry& reg, ChainOptions opts)
    : cfg_(std::move(cfg)), reg_(reg), opts_(opts), rng_(cfg_.params.seed) {
  opts_.exec.record_steps = opts_.level == TraceLevel::Step;
}

ExecutionTrace Chain::take_trace() {
  trace_.final = cfg_;
  ExecutionTrace t = std::move(trace_);
  trace_ = {};
  return t;
}

void Chain::deploy(const ContractDecl& c, const std::string& path) {
  DeployRecord rec{c.name, path, std::nullopt};
  try {
    cfg_ = crystality::deploy(cfg_, c, reg_);
  } catch (const RuntimeFault& f) {
    rec.error = f.error();
    if (opts_.level != TraceLevel::Off) trace_.records.emplace_back(rec);
    throw;
  }
  if (opts_.level != TraceLevel::Off) trace_.records.emplace_back(rec);
}

TxRecord Chain::record_of(const TransactionEnvelope& tx, const TxOutcome& out) {
  TxRecord rec;
  rec.id = tx.id;
  rec.kind = tx.kind;
  rec.at = out.at;
  rec.func = tx.func;
  rec.args = tx.args;
  rec.relay_sequence = tx.relay ? tx.relay->sequence : 0;
  rec.verdict = out.verdict;
  rec.error = out.error;
  rec.emitted = out.emitted;
  return rec;
}

void Chain::log(const TxOutcome& out, const TxRecord& rec) {
  if (opts_.level == TraceLevel::Step) {
    for (const auto& s : out.steps) trace_.records.emplace_back(s);
  }
  if (opts_.level != TraceLevel::Off) trace_.records.emplace_back(rec);
}

TxRecord Chain::run(const TransactionEnvelope& tx) {
  TxOutcome out = execute_transaction(cfg_, tx, reg_, opts_.exec);
  cfg_ = std::move(out.config);
  TxRecord rec = record_of(tx, out);
  log(out, rec);
  return rec;
}

TxRecord Chain::submit(const TransactionEnvelope& tx) {
  TransactionEnvelope numbered = tx;
  numbered.id = next_tx_++;
  return run(numbered);
}

TxRecord Chain::submit(Address sender, const std::string& func, std::vector<TypedValue> args) {
  return submit(TransactionEnvelope::user(sender, func, std::move(args)));
}

void Chain::insert_relay(Configuration& cfg, RelayTransaction relay) {
  if (relay.target.kind == RelayKind::Address) {
    cfg.mempool(relay.target.engine).insert(std::move(relay));
  } else {
    for (auto& m : cfg.mempools) m.insert(relay);
  }
}

RelayTransaction Chain::inject(RelayTransaction relay) {
  if (relay.target.kind == RelayKind::Address &&
      !cfg_.valid_address(Address{relay.target.engine, relay.target.address_index})) {
    throw std::invalid_argument("relay destination is outside the system");
  }
  relay.sequence = cfg_.next_sequence++;
  insert_relay(cfg_, relay);
  if (opts_.level != TraceLevel::Off) trace_.records.emplace_back(InjectRecord{relay});
  return relay;
}

void Chain::note(ExpectRecord r) {
  if (opts_.level != TraceLevel::Off) trace_.records.emplace_back(std::move(r));
}

std::vector<TxRecord> Chain::para_step(const std::vector<std::uint64_t>& engines) {
  Configuration pre = cfg_;
  std::vector<TransactionEnvelope> envs;
  for (auto i : engines) {
    const auto& entries = pre.mempool(i).entries();
    if (entries.empty()) throw std::logic_error("para step on an empty mempool");
    if (entries.front().target.kind == RelayKind::Global) throw std::logic_error("para step on a global relay");
    auto relay = pre.mempool(i).take(entries.front().sequence);
    envs.push_back(TransactionEnvelope::from_relay(*relay, i, next_tx_++));
  }
  // Every engine runs from the same pre-state; each only changes its own
  // storage, so the results merge by taking engine i's state from run i and
  // appending every run's relays with fresh sequence numbers.
  Configuration merged = pre;
  std::vector<TxRecord> records;
  for (std::size_t k = 0; k < envs.size(); ++k) {
    std::uint64_t i = engines[k];
    TxOutcome out = execute_transaction(pre, envs[k], reg_, opts_.exec);
    if (!(out.config.global == pre.global)) throw std::logic_error("local relay changed the global store");
    merged.engine(i) = out.config.engine(i);
    for (auto& relay : out.emitted) {
      relay.sequence = merged.next_sequence++;
      insert_relay(merged, relay);
    }
    TxRecord rec = record_of(envs[k], out);
    log(out, rec);
    records.push_back(std::move(rec));
  }
  cfg_ = std::move(merged);
  return records;
}

TxRecord Chain::joint_step() {
  const auto& head = cfg_.mempool(1).entries();
  if (head.empty() || head.front().target.kind != RelayKind::Global) {
    throw std::logic_error("joint step without a global relay at the head");
  }
  std::uint64_t seq = head.front().sequence;
  for (std::uint64_t i = 1; i <= cfg_.params.n; ++i) {
    const auto& entries = cfg_.mempool(i).entries();
    if (entries.empty() || entries.front().sequence != seq) {
      throw std::logic_error("global relay is not at the head of every mempool");
    }
  }
  std::optional<RelayTransaction> relay;
  for (std::uint64_t i = 1; i <= cfg_.params.n; ++i) relay = cfg_.mempool(i).take(seq);
  return run(TransactionEnvelope::from_relay(*relay, 1, next_tx_++));
}

DrainRecord Chain::drain(SchedulingPolicy policy) {
  DrainRecord rec;
  rec.policy = policy;
  const std::uint64_t n = cfg_.params.n;
  while (!cfg_.all_mempools_empty()) {
    if (rec.rounds == opts_.round_budget) {
      rec.budget_exceeded = true;
      break;
    }
    ++rec.rounds;
    // The round covers exactly the relays pending now; anything emitted while
    // it runs waits for the next round.
    std::vector<std::deque<std::uint64_t>> queues(n);
    for (std::uint64_t i = 0; i < n; ++i) {
      for (const auto& e : cfg_.mempools[i].entries()) queues[i].push_back(e.sequence);
    }
    auto is_global = [&](std::uint64_t i) {
      return cfg_.mempools[i].find(queues[i].front())->target.kind == RelayKind::Global;
    };
    auto local_ready = [&](std::uint64_t i) { return !queues[i].empty() && !is_global(i); };
    auto global_ready = [&] {
      if (queues[0].empty() || !is_global(0)) return false;
      return std::all_of(queues.begin(), queues.end(),
                         [&](const auto& q) { return !q.empty() && q.front() == queues[0].front(); });
    };
    auto pending = [&] {
      return std::any_of(queues.begin(), queues.end(), [](const auto& q) { return !q.empty(); });
    };
    auto run_joint = [&] {
      joint_step();
      for (auto& q : queues) q.pop_front();
      ++rec.executed;
    };
    auto run_local = [&](const std::vector<std::uint64_t>& engines) {
      para_step(engines);
      for (auto i : engines) queues[i - 1].pop_front();
      rec.executed += engines.size();
    };

    std::uint64_t cursor = 0;
    while (pending()) {
      std::vector<std::uint64_t> ready;
      for (std::uint64_t i = 0; i < n; ++i) {
        if (local_ready(i)) ready.push_back(i + 1);
      }
      bool joint = global_ready();
      if (ready.empty() && !joint) throw std::logic_error("drain round cannot make progress");

      if (policy == SchedulingPolicy::Serial) {
        for (std::uint64_t t = 0; t < n; ++t) {
          std::uint64_t i = (cursor + t) % n;
          if (local_ready(i)) {
            run_local({i + 1});
            cursor = i + 1;
            break;
          }
          if (!queues[i].empty() && joint) {
            run_joint();
            cursor = i + 1;
            break;
          }
        }
        continue;
      }

      std::uniform_int_distribution<std::size_t> pick(0, ready.size() - (joint ? 0 : 1));
      if (joint && pick(rng_) == ready.size()) {
        run_joint();
        continue;
      }
      std::vector<std::uint64_t> chosen;
      std::bernoulli_distribution coin(0.5);
      for (auto i : ready) {
        if (coin(rng_)) chosen.push_back(i);
      }
      if (chosen.empty()) {
        std::uniform_int_distribution<std::size_t> one(0, ready.size() - 1);
        chosen.push_back(ready[one(rng_)]);
      }
      run_local(chosen);
    }
  }
  if (opts_.level != TraceLevel::Off) trace_.records.emplace_back(rec);
  return rec;
}

DrainOutcome drain_relays(const Configuration& cfg, const FunctionRegistry& reg, SchedulingPolicy policy,
                          const ChainOptions& opts) {
  Chain chain(cfg, reg, opts);
  DrainOutcome out;
  out.summary = chain.drain(policy);
  out.config = chain.config();
  out.trace = chain.take_trace();
  return out;
}

}  // namespace crystality
