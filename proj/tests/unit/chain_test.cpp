#include "crystality/chain.hpp"
#include "crystality/checker.hpp"
#include "crystality/parser.hpp"

#include <gtest/gtest.h>

using namespace crystality;

namespace {

constexpr const char* kToken = R"(contract MyToken {
    uint256 @address balance;
    function transfer(address payee, uint256 amount) @address returns {
      if (amount <= balance) then { balance := balance - amount; relay @ payee mint(amount); } else { skip }
    }
})";

constexpr const char* kCounter = R"(contract Counter {
  uint256 @global count;
  uint256 @engine seen;
  uint256 @address pings;
  function bump() @global returns { count := count + 1; }
  function ping() @address returns { pings := pings + 1; note(); relay @global bump(); }
  function note() @engine returns { seen := seen + 1; }
})";

struct Fixture {
  ContractDecl contract;
  FunctionRegistry reg;
  Configuration cfg;

  explicit Fixture(std::string_view src, SystemParams p = {2, 2, 0})
      : contract(parse_contract(src)), reg(build_registry(contract)) {
    cfg = deploy(new_configuration(p), contract, reg);
  }
};

RelayTransaction relay_to(Address a, std::string func, std::vector<TypedValue> args) {
  RelayTransaction r;
  r.target = {RelayKind::Address, a.engine, a.index};
  r.func = std::move(func);
  r.args = std::move(args);
  return r;
}

RelayTransaction broadcast(RelayKind kind, std::string func) {
  RelayTransaction r;
  r.target = {kind, 0, 0};
  r.func = std::move(func);
  return r;
}

TypedValue balance(const Configuration& cfg, Address a) {
  return cfg.engine(a.engine).address_store(a.index).read("balance");
}

std::vector<std::string> tx_funcs(const ExecutionTrace& t) {
  std::vector<std::string> out;
  for (const auto& e : t.records) {
    if (const auto* tx = std::get_if<TxRecord>(&e)) out.push_back(tx->func);
  }
  return out;
}

}  // namespace

TEST(Chain, NameTables) {
  EXPECT_EQ(policy_from_string("serial"), SchedulingPolicy::Serial);
  EXPECT_EQ(policy_from_string("interleaved"), SchedulingPolicy::Interleaved);
  EXPECT_FALSE(policy_from_string("random"));
  for (auto l : {TraceLevel::Off, TraceLevel::Tx, TraceLevel::Step}) EXPECT_EQ(trace_level_from_string(to_string(l)), l);
  EXPECT_FALSE(trace_level_from_string("verbose"));
  EXPECT_EQ(to_string(Verdict::Reverted), "reverted");
}

TEST(Chain, FaultingTransactionIsAtomic) {
  Fixture f(R"(contract C {
    uint256 @engine x;
    function touch() @engine returns { skip }
    function f() @engine returns { x := 5; relay @engines touch(); x := 1 / 0; }
  })");
  HygieneStats stats;
  ExecOptions opts;
  opts.stats = &stats;
  TxOutcome out = execute_transaction(f.cfg, TransactionEnvelope::user({1, 2}, "f", {}), f.reg, opts);
  EXPECT_EQ(out.verdict, Verdict::Reverted);
  EXPECT_EQ(out.error->kind, RuntimeErrorKind::DivisionByZero);
  EXPECT_EQ(out.config, f.cfg);
  EXPECT_TRUE(out.emitted.empty());
  EXPECT_EQ(out.at, (Address{1, 0}));
  EXPECT_EQ(stats.boundaries, 2u);
  EXPECT_EQ(stats.boundary_violations, 0u);
}

TEST(Chain, SenderOutsideTheSystemReverts) {
  Fixture f(kToken);
  TxOutcome out = execute_transaction(f.cfg, TransactionEnvelope::user({3, 1}, "mint", {TypedValue::uint(1)}), f.reg);
  EXPECT_EQ(out.verdict, Verdict::Reverted);
  EXPECT_EQ(out.error->kind, RuntimeErrorKind::InvalidAddress);
  EXPECT_EQ(out.config, f.cfg);
}

TEST(Chain, ExecutionPointFollowsFunctionScope) {
  Fixture f(kCounter);
  EXPECT_EQ(execute_transaction(f.cfg, TransactionEnvelope::user({2, 2}, "ping", {}), f.reg).at, (Address{2, 2}));
  EXPECT_EQ(execute_transaction(f.cfg, TransactionEnvelope::user({2, 2}, "note", {}), f.reg).at, (Address{2, 0}));
  EXPECT_EQ(execute_transaction(f.cfg, TransactionEnvelope::user({2, 2}, "bump", {}), f.reg).at, (Address{0, 0}));
}

TEST(Chain, TokenTransferEndToEnd) {
  Fixture f(kToken);
  Chain chain(f.cfg, f.reg);
  RelayTransaction funded = chain.inject(relay_to({1, 1}, "mint", {TypedValue::uint(100)}));
  EXPECT_EQ(funded.sequence, 1u);
  DrainRecord d1 = chain.drain(SchedulingPolicy::Serial);
  EXPECT_EQ(d1.executed, 1u);
  EXPECT_EQ(d1.rounds, 1u);
  TxRecord t = chain.submit({1, 1}, "transfer", {TypedValue(Address{2, 1}), TypedValue::uint(30)});
  EXPECT_EQ(t.verdict, Verdict::Applied);
  ASSERT_EQ(t.emitted.size(), 1u);
  chain.drain(SchedulingPolicy::Serial);
  EXPECT_EQ(balance(chain.config(), {1, 1}), TypedValue::uint(70));
  EXPECT_EQ(balance(chain.config(), {2, 1}), TypedValue::uint(30));
  EXPECT_EQ(balance(chain.config(), {2, 2}), TypedValue::uint(0));
  EXPECT_TRUE(chain.config().all_mempools_empty());
  EXPECT_TRUE(chain.config().all_stacks_empty());
  EXPECT_EQ(tx_funcs(chain.trace()), (std::vector<std::string>{"mint", "transfer", "mint"}));
}

TEST(Chain, InjectRejectsUnknownDestination) {
  Fixture f(kToken);
  Chain chain(f.cfg, f.reg);
  EXPECT_THROW(chain.inject(relay_to({4, 1}, "mint", {TypedValue::uint(1)})), std::invalid_argument);
}

TEST(Chain, RevertedRelaysAreConsumed) {
  Fixture f(kToken);
  Chain chain(f.cfg, f.reg);
  chain.inject(relay_to({1, 1}, "mint", {TypedValue(true)}));
  DrainRecord d = chain.drain(SchedulingPolicy::Serial);
  EXPECT_EQ(d.executed, 1u);
  EXPECT_TRUE(chain.config().all_mempools_empty());
  const auto& recs = chain.trace().records;
  const TxRecord* last = nullptr;
  for (const auto& r : recs) {
    if (const auto* tx = std::get_if<TxRecord>(&r)) last = tx;
  }
  ASSERT_NE(last, nullptr);
  EXPECT_EQ(last->verdict, Verdict::Reverted);
  EXPECT_EQ(last->kind, TransactionEnvelope::Kind::Relay);
  EXPECT_EQ(last->relay_sequence, 1u);
}

TEST(Chain, GlobalRelayWaitsForEveryEngine) {
  Fixture f(kCounter);
  Chain chain(f.cfg, f.reg);
  chain.inject(relay_to({2, 1}, "ping", {}));
  chain.inject(broadcast(RelayKind::Global, "bump"));
  // Engine 2 still has the ping ahead of the bump, so the bump cannot run first.
  EXPECT_THROW(chain.joint_step(), std::logic_error);
  chain.drain(SchedulingPolicy::Serial);
  EXPECT_EQ(tx_funcs(chain.trace()), (std::vector<std::string>{"ping", "bump", "bump"}));
  EXPECT_EQ(chain.config().global.read("count"), TypedValue::uint(2));
  EXPECT_EQ(chain.config().engine(2).engine_store.read("seen"), TypedValue::uint(1));
}

TEST(Chain, EngineRelaysReachEveryEngine) {
  Fixture f(kCounter, {3, 1, 0});
  Chain chain(f.cfg, f.reg);
  chain.inject(broadcast(RelayKind::Engine, "note"));
  for (std::uint64_t i = 1; i <= 3; ++i) EXPECT_EQ(chain.config().mempool(i).size(), 1u);
  chain.drain(SchedulingPolicy::Serial);
  for (std::uint64_t i = 1; i <= 3; ++i) {
    EXPECT_EQ(chain.config().engine(i).engine_store.read("seen"), TypedValue::uint(1));
  }
}

TEST(Chain, RoundsOnlyCoverRelaysPresentAtTheirStart) {
  Fixture f(R"(contract Echo {
    uint256 @address hops;
    function hop(uint256 left) @address returns {
      hops := hops + 1;
      if (left > 0) then { relay @ address(1,1) hop(left - 1); } else { skip }
    }
  })", {1, 1, 0});
  Chain chain(f.cfg, f.reg);
  chain.inject(relay_to({1, 1}, "hop", {TypedValue::uint(4)}));
  DrainRecord d = chain.drain(SchedulingPolicy::Serial);
  EXPECT_EQ(d.rounds, 5u);
  EXPECT_EQ(d.executed, 5u);
  EXPECT_FALSE(d.budget_exceeded);
}

TEST(Chain, RoundBudgetStopsEndlessRelaying) {
  Fixture f(R"(contract Loop {
    function spin() @engine returns { relay @engines spin(); }
  })");
  ChainOptions opts;
  opts.round_budget = 8;
  Chain chain(f.cfg, f.reg, opts);
  chain.inject(broadcast(RelayKind::Engine, "spin"));
  DrainRecord d = chain.drain(SchedulingPolicy::Interleaved);
  EXPECT_TRUE(d.budget_exceeded);
  EXPECT_EQ(d.rounds, 8u);
  EXPECT_FALSE(chain.config().all_mempools_empty());
}

TEST(Chain, ParaStepRenumbersInEngineOrder) {
  Fixture f(kCounter);
  Chain chain(f.cfg, f.reg);
  chain.inject(relay_to({2, 1}, "ping", {}));
  chain.inject(relay_to({1, 2}, "ping", {}));
  auto recs = chain.para_step({2, 1});
  ASSERT_EQ(recs.size(), 2u);
  const auto& pool = chain.config().mempool(1).entries();
  ASSERT_EQ(pool.size(), 2u);
  EXPECT_EQ(pool[0].sequence, 3u);
  EXPECT_EQ(pool[0].origin, (Address{2, 1}));
  EXPECT_EQ(pool[1].sequence, 4u);
  EXPECT_EQ(pool[1].origin, (Address{1, 2}));
  EXPECT_EQ(chain.config().mempool(2).entries(), pool);
}

TEST(Chain, ParaStepPreconditions) {
  Fixture f(kCounter);
  Chain chain(f.cfg, f.reg);
  EXPECT_THROW(chain.para_step({1}), std::logic_error);
  chain.inject(broadcast(RelayKind::Global, "bump"));
  EXPECT_THROW(chain.para_step({1}), std::logic_error);
  TxRecord r = chain.joint_step();
  EXPECT_EQ(r.at, (Address{0, 0}));
  EXPECT_EQ(chain.config().global.read("count"), TypedValue::uint(1));
  EXPECT_THROW(chain.joint_step(), std::logic_error);
}

TEST(Chain, InterleavedDrainIsReproducible) {
  Fixture f(kCounter, {3, 2, 42});
  auto run = [&] {
    Chain chain(f.cfg, f.reg);
    for (std::uint64_t i = 1; i <= 3; ++i) {
      for (std::uint64_t j = 1; j <= 2; ++j) chain.inject(relay_to({i, j}, "ping", {}));
    }
    chain.drain(SchedulingPolicy::Interleaved);
    return chain.take_trace();
  };
  ExecutionTrace a = run();
  ExecutionTrace b = run();
  EXPECT_EQ(a.final, b.final);
  EXPECT_EQ(tx_funcs(a), tx_funcs(b));
  EXPECT_EQ(a.final.global.read("count"), TypedValue::uint(6));
}

TEST(Chain, TraceLevels) {
  Fixture f(kToken);
  ChainOptions off;
  off.level = TraceLevel::Off;
  Chain quiet(f.cfg, f.reg, off);
  quiet.submit({1, 1}, "mint", {TypedValue::uint(1)});
  EXPECT_TRUE(quiet.trace().records.empty());

  ChainOptions step;
  step.level = TraceLevel::Step;
  Chain loud(f.cfg, f.reg, step);
  loud.submit({1, 1}, "mint", {TypedValue::uint(1)});
  ASSERT_GT(loud.trace().records.size(), 1u);
  EXPECT_TRUE(std::holds_alternative<StepRecord>(loud.trace().records.front()));
  EXPECT_TRUE(std::holds_alternative<TxRecord>(loud.trace().records.back()));
}

TEST(Chain, DrainRelaysHelper) {
  Fixture f(kToken);
  Configuration cfg = f.cfg;
  RelayTransaction r = relay_to({2, 2}, "mint", {TypedValue::uint(9)});
  r.sequence = cfg.next_sequence++;
  cfg.mempool(2).insert(r);
  DrainOutcome out = drain_relays(cfg, f.reg, SchedulingPolicy::Serial);
  EXPECT_EQ(balance(out.config, {2, 2}), TypedValue::uint(9));
  EXPECT_EQ(out.summary.executed, 1u);
  EXPECT_EQ(out.trace.final, out.config);
}
