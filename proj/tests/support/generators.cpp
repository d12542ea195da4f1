#include "generators.hpp"

#include "crystality/checker.hpp"

#include <stdexcept>
#include <string>

namespace crystality::testing {

namespace {

int uniform(Rng& rng, int lo, int hi) { return std::uniform_int_distribution<int>(lo, hi)(rng); }

bool chance(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

template <typename T>
const T& pick(Rng& rng, const std::vector<T>& xs) {
  return xs[static_cast<std::size_t>(uniform(rng, 0, static_cast<int>(xs.size()) - 1))];
}

TypeName random_type(Rng& rng) {
  int r = uniform(rng, 0, 9);
  return r < 6 ? TypeName::UInt256 : (r < 8 ? TypeName::Bool : TypeName::Address);
}

ScopeTag random_scope(Rng& rng, bool global) {
  int r = uniform(rng, 0, 9);
  if (r < 5) return ScopeTag::Address;
  if (r < 8 || !global) return ScopeTag::Engine;
  return ScopeTag::Global;
}

Stmt stmt(decltype(Stmt::node) node) { return Stmt{std::move(node), {}}; }

struct Var {
  std::string name;
  TypeName type;
  std::optional<ScopeTag> scope;  // nullopt: temporary or parameter
};

struct Sig {
  std::string name;
  ScopeTag scope;
  std::vector<TypeName> params;
  std::optional<TypeName> rttype;
};

class ContractBuilder {
 public:
  ContractBuilder(Rng& rng, const ContractShape& shape) : rng_(rng), shape_(shape) {}

  ContractDecl build() {
    ContractDecl c;
    c.name = "Gen";
    int nvars = uniform(rng_, 1, shape_.max_state_vars);
    for (int v = 0; v < nvars; ++v) {
      StateVarDecl d{random_type(rng_), random_scope(rng_, true), "s" + std::to_string(v), {}};
      state_.push_back(Var{d.name, d.type, d.scope});
      c.state_vars.push_back(d);
    }
    int nfuncs = uniform(rng_, 1, shape_.max_functions);
    for (int f = 0; f < nfuncs; ++f) {
      Sig s{"f" + std::to_string(f), random_scope(rng_, shape_.global_functions), {}, std::nullopt};
      int np = uniform(rng_, 0, 2);
      for (int p = 0; p < np; ++p) s.params.push_back(random_type(rng_));
      if (chance(rng_, 0.4)) s.rttype = random_type(rng_);
      sigs_.push_back(s);
    }
    for (std::size_t f = 0; f < sigs_.size(); ++f) c.functions.push_back(function(f));
    return c;
  }

 private:
  struct Ctx {
    std::size_t fn;
    std::vector<Var> locals;
    int temp_counter = 0;
  };

  FuncDecl function(std::size_t f) {
    const Sig& s = sigs_[f];
    FuncDecl d;
    d.name = s.name;
    d.scope = s.scope;
    d.return_type = s.rttype;
    Ctx ctx{f, {}, 0};
    for (std::size_t p = 0; p < s.params.size(); ++p) {
      std::string name = s.name + "_p" + std::to_string(p);
      d.params.push_back(Param{s.params[p], name});
      ctx.locals.push_back(Var{name, s.params[p], std::nullopt});
    }
    std::vector<Stmt> body;
    int count = uniform(rng_, 1, shape_.max_body_stmts);
    while (static_cast<int>(body.size()) < count) top_statement(ctx, body, count - static_cast<int>(body.size()));
    d.body = seq_of(std::move(body));
    return d;
  }

  std::string fresh(Ctx& ctx) { return sigs_[ctx.fn].name + "_t" + std::to_string(ctx.temp_counter++); }

  std::vector<const Var*> readable(const Ctx& ctx, TypeName t, ScopeTag eval_scope) const {
    std::vector<const Var*> out;
    for (const auto& v : ctx.locals) {
      if (v.type == t) out.push_back(&v);
    }
    for (const auto& v : state_) {
      if (v.type == t && can_read(eval_scope, *v.scope)) out.push_back(&v);
    }
    return out;
  }

  std::vector<const Var*> writable(const Ctx& ctx) const {
    std::vector<const Var*> out;
    for (const auto& v : ctx.locals) out.push_back(&v);
    for (const auto& v : state_) {
      if (can_write(sigs_[ctx.fn].scope, *v.scope)) out.push_back(&v);
    }
    return out;
  }

  std::vector<std::size_t> callees(const Ctx& ctx, ScopeTag caller_scope, bool want_value,
                                   std::optional<TypeName> type) const {
    std::vector<std::size_t> out;
    if (!shape_.calls) return out;
    for (std::size_t g = ctx.fn + 1; g < sigs_.size(); ++g) {
      const Sig& s = sigs_[g];
      if (!can_call(caller_scope, s.scope)) continue;
      if (want_value ? s.rttype != type : s.rttype.has_value()) continue;
      out.push_back(g);
    }
    return out;
  }

  Exp literal_of(TypeName t) {
    switch (t) {
      case TypeName::UInt256:
        if (chance(rng_, 0.05)) return literal(TypedValue(UInt256(uint256_max() - UInt256(uniform(rng_, 0, 3)))));
        return literal(TypedValue::uint(static_cast<std::uint64_t>(uniform(rng_, 0, 20))));
      case TypeName::Bool:
        return literal(TypedValue(chance(rng_, 0.5)));
      case TypeName::Address:
        return literal(TypedValue(Address{static_cast<std::uint64_t>(uniform(rng_, 1, static_cast<int>(shape_.n))),
                                          static_cast<std::uint64_t>(uniform(rng_, 1, static_cast<int>(shape_.k)))}));
    }
    throw std::logic_error("type");
  }

  std::vector<Exp> call_args(Ctx& ctx, const Sig& callee, ScopeTag eval_scope, bool pure, int depth) {
    std::vector<Exp> args;
    for (TypeName t : callee.params) args.push_back(exp(ctx, t, eval_scope, pure, depth - 1));
    return args;
  }

  Exp exp(Ctx& ctx, TypeName t, ScopeTag eval_scope, bool pure, int depth) {
    std::vector<int> kinds{0, 1};  // literal, variable
    if (depth > 0) {
      kinds.push_back(2);  // operator
      kinds.push_back(2);
      if (!pure && !callees(ctx, eval_scope, true, t).empty()) kinds.push_back(3);
    }
    switch (pick(rng_, kinds)) {
      case 1: {
        auto vars = readable(ctx, t, eval_scope);
        if (!vars.empty()) return ident(pick(rng_, vars)->name);
        return literal_of(t);
      }
      case 2:
        if (t == TypeName::UInt256) {
          BinOp op = pick(rng_, std::vector<BinOp>{BinOp::Add, BinOp::Add, BinOp::Sub, BinOp::Mul, BinOp::Div});
          Exp lhs = exp(ctx, t, eval_scope, pure, depth - 1);
          Exp rhs = op == BinOp::Div && chance(rng_, 0.7)
                        ? literal(TypedValue::uint(static_cast<std::uint64_t>(uniform(rng_, 1, 4))))
                        : exp(ctx, t, eval_scope, pure, depth - 1);
          return binary(op, std::move(lhs), std::move(rhs));
        }
        if (t == TypeName::Bool) {
          if (chance(rng_, 0.75)) {
            BinOp op = pick(rng_, std::vector<BinOp>{BinOp::Lt, BinOp::Le, BinOp::Gt, BinOp::Ge, BinOp::Eq, BinOp::Ne});
            return binary(op, exp(ctx, TypeName::UInt256, eval_scope, pure, depth - 1),
                          exp(ctx, TypeName::UInt256, eval_scope, pure, depth - 1));
          }
          TypeName inner = chance(rng_, 0.5) ? TypeName::Bool : TypeName::Address;
          return binary(chance(rng_, 0.5) ? BinOp::Eq : BinOp::Ne, exp(ctx, inner, eval_scope, pure, depth - 1),
                        exp(ctx, inner, eval_scope, pure, depth - 1));
        }
        return literal_of(t);
      case 3: {
        const Sig& callee = sigs_[pick(rng_, callees(ctx, eval_scope, true, t))];
        return call_exp(callee.name, call_args(ctx, callee, callee.scope, pure, depth));
      }
      default:
        return literal_of(t);
    }
  }

  std::optional<Stmt> assignment(Ctx& ctx) {
    auto targets = writable(ctx);
    if (targets.empty()) return std::nullopt;
    const Var& v = *pick(rng_, targets);
    ScopeTag scope = sigs_[ctx.fn].scope;
    return stmt(Assign{v.name, exp(ctx, v.type, scope, false, 2)});
  }

  std::optional<Stmt> relay(Ctx& ctx) {
    if (!shape_.relays) return std::nullopt;
    const Sig& self = sigs_[ctx.fn];
    std::vector<std::size_t> targets;
    for (std::size_t g = ctx.fn + 1; g < sigs_.size(); ++g) {
      if (sigs_[g].scope == ScopeTag::Global && self.scope == ScopeTag::Global) continue;
      targets.push_back(g);
    }
    if (targets.empty()) return std::nullopt;
    const Sig& callee = sigs_[pick(rng_, targets)];
    RelayTargetExpr where;
    switch (callee.scope) {
      case ScopeTag::Address: where = AtAddress{exp(ctx, TypeName::Address, self.scope, true, 0)}; break;
      case ScopeTag::Engine: where = AtEngines{}; break;
      case ScopeTag::Global: where = AtGlobal{}; break;
    }
    std::vector<Exp> args;
    for (TypeName t : callee.params) args.push_back(exp(ctx, t, self.scope, true, 1));
    return stmt(Relay{std::move(where), callee.name, std::move(args)});
  }

  std::optional<Stmt> call(Ctx& ctx) {
    auto options = callees(ctx, sigs_[ctx.fn].scope, false, std::nullopt);
    if (options.empty()) return std::nullopt;
    const Sig& callee = sigs_[pick(rng_, options)];
    return stmt(CallStmt{callee.name, call_args(ctx, callee, callee.scope, false, 2)});
  }

  // A statement that may run several times: no declarations, no loops.
  Stmt simple(Ctx& ctx) {
    for (int attempt = 0; attempt < 4; ++attempt) {
      std::optional<Stmt> s;
      switch (uniform(rng_, 0, 2)) {
        case 0: s = assignment(ctx); break;
        case 1: s = relay(ctx); break;
        case 2: s = call(ctx); break;
      }
      if (s) return *s;
    }
    return stmt(Skip{});
  }

  std::vector<Stmt> block(Ctx& ctx, int max_len) {
    std::size_t saved = ctx.locals.size();
    std::vector<Stmt> out;
    int len = uniform(rng_, 0, max_len);
    for (int i = 0; i < len; ++i) {
      if (chance(rng_, 0.25)) {
        TypeName t = random_type(rng_);
        std::string name = fresh(ctx);
        out.push_back(stmt(TempDecl{t, name}));
        ctx.locals.push_back(Var{name, t, std::nullopt});
      } else {
        out.push_back(simple(ctx));
      }
    }
    ctx.locals.resize(saved);
    return out;
  }

  void top_statement(Ctx& ctx, std::vector<Stmt>& body, int room) {
    const Sig& self = sigs_[ctx.fn];
    switch (uniform(rng_, 0, 7)) {
      case 0: {
        TypeName t = random_type(rng_);
        std::string name = fresh(ctx);
        body.push_back(stmt(TempDecl{t, name}));
        ctx.locals.push_back(Var{name, t, std::nullopt});
        return;
      }
      case 1:
      case 2:
        body.push_back(simple(ctx));
        return;
      case 3: {
        Exp cond = exp(ctx, TypeName::Bool, self.scope, false, 2);
        Stmt then_branch = seq_of(block(ctx, 2));
        Stmt else_branch = seq_of(block(ctx, 2));
        body.push_back(stmt(If{std::move(cond), Box<Stmt>(std::move(then_branch)), Box<Stmt>(std::move(else_branch))}));
        return;
      }
      case 4: {
        if (room < 2) {
          body.push_back(simple(ctx));
          return;
        }
        std::string counter = fresh(ctx);
        body.push_back(stmt(TempDecl{TypeName::UInt256, counter}));
        // The counter stays out of ctx.locals so nothing else can touch it.
        Exp bound = literal(TypedValue::uint(static_cast<std::uint64_t>(uniform(rng_, 0, shape_.max_loop_bound))));
        Stmt inner = simple(ctx);
        Stmt step = stmt(Assign{counter, binary(BinOp::Add, ident(counter), literal(TypedValue::uint(1)))});
        body.push_back(stmt(While{binary(BinOp::Lt, ident(counter), std::move(bound)),
                                  Box<Stmt>(seq(std::move(inner), std::move(step)))}));
        return;
      }
      case 5:
        if (self.rttype) {
          body.push_back(stmt(Return{exp(ctx, *self.rttype, self.scope, false, 2)}));
          return;
        }
        body.push_back(simple(ctx));
        return;
      default:
        body.push_back(simple(ctx));
        return;
    }
  }

  Rng& rng_;
  const ContractShape& shape_;
  std::vector<Var> state_;
  std::vector<Sig> sigs_;
};

// ---- unconstrained syntax ----

const std::vector<std::string>& names() {
  static const std::vector<std::string> kNames{"a", "b", "x", "y1", "total", "payee", "amount", "_t", "Counter", "engine_x"};
  return kNames;
}

Exp any_exp(Rng& rng, int depth) {
  int kind = uniform(rng, 0, depth > 0 ? 5 : 2);
  switch (kind) {
    case 0: return ident(pick(rng, names()));
    case 1:
      switch (uniform(rng, 0, 3)) {
        case 0: {
          UInt256 v = 0;
          for (int i = 0; i < 4; ++i) v = (v << 64) | UInt256(rng());
          return literal(TypedValue(v));
        }
        case 1: return literal(TypedValue(chance(rng, 0.5)));
        case 2: return literal(TypedValue(Address{rng() >> uniform(rng, 0, 63), rng() >> uniform(rng, 0, 63)}));
        default: return literal(TypedValue::uint(static_cast<std::uint64_t>(uniform(rng, 0, 1000))));
      }
    case 2: return literal(TypedValue::uint(static_cast<std::uint64_t>(uniform(rng, 0, 9))));
    case 3: {
      std::vector<Exp> args;
      int n = uniform(rng, 0, 3);
      for (int i = 0; i < n; ++i) args.push_back(any_exp(rng, depth - 1));
      return call_exp(pick(rng, names()), std::move(args));
    }
    default: {
      auto op = static_cast<BinOp>(uniform(rng, 0, 9));
      return binary(op, any_exp(rng, depth - 1), any_exp(rng, depth - 1));
    }
  }
}

Stmt any_block(Rng& rng, int depth);

Stmt any_stmt(Rng& rng, int depth) {
  int kind = uniform(rng, 0, depth > 0 ? 8 : 6);
  auto args = [&] {
    std::vector<Exp> out;
    int n = uniform(rng, 0, 3);
    for (int i = 0; i < n; ++i) out.push_back(any_exp(rng, 2));
    return out;
  };
  switch (kind) {
    case 0: return stmt(TempDecl{random_type(rng), pick(rng, names())});
    case 1: return stmt(Skip{});
    case 2: return stmt(Assign{pick(rng, names()), any_exp(rng, 3)});
    case 3: {
      RelayTargetExpr where;
      switch (uniform(rng, 0, 2)) {
        case 0: where = AtAddress{any_exp(rng, 2)}; break;
        case 1: where = AtEngines{}; break;
        default: where = AtGlobal{}; break;
      }
      return stmt(Relay{std::move(where), pick(rng, names()), args()});
    }
    case 4: return stmt(Return{any_exp(rng, 3)});
    case 5:
    case 6: return stmt(CallStmt{pick(rng, names()), args()});
    case 7:
      return stmt(If{any_exp(rng, 2), Box<Stmt>(any_block(rng, depth - 1)), Box<Stmt>(any_block(rng, depth - 1))});
    default: return stmt(While{any_exp(rng, 2), Box<Stmt>(any_block(rng, depth - 1))});
  }
}

Stmt any_block(Rng& rng, int depth) {
  std::vector<Stmt> items;
  int n = uniform(rng, 0, 4);
  for (int i = 0; i < n; ++i) items.push_back(any_stmt(rng, depth));
  return seq_of(std::move(items));
}

}  // namespace

std::optional<ContractDecl> random_contract(Rng& rng, const ContractShape& shape) {
  ContractDecl c = ContractBuilder(rng, shape).build();
  if (!check_contract(c).ok()) return std::nullopt;
  return c;
}

ContractDecl random_checked_contract(Rng& rng, const ContractShape& shape) {
  for (int attempt = 0; attempt < 1000; ++attempt) {
    if (auto c = random_contract(rng, shape)) return *c;
  }
  throw std::runtime_error("generator could not produce a checked contract");
}

ContractDecl random_syntax_tree(Rng& rng) {
  ContractDecl c;
  c.name = pick(rng, names());
  int nvars = uniform(rng, 0, 3);
  for (int i = 0; i < nvars; ++i) {
    c.state_vars.push_back(StateVarDecl{random_type(rng), random_scope(rng, true), pick(rng, names()), {}});
  }
  int nfuncs = uniform(rng, 0, 3);
  for (int f = 0; f < nfuncs; ++f) {
    FuncDecl d;
    d.name = pick(rng, names());
    int np = uniform(rng, 0, 3);
    for (int p = 0; p < np; ++p) d.params.push_back(Param{random_type(rng), pick(rng, names())});
    d.scope = random_scope(rng, true);
    if (chance(rng, 0.5)) d.return_type = random_type(rng);
    d.body = any_block(rng, 2);
    c.functions.push_back(std::move(d));
  }
  return c;
}

std::vector<TypedValue> random_args(Rng& rng, const FunctionInfo& f, std::uint64_t n, std::uint64_t k) {
  std::vector<TypedValue> out;
  for (TypeName t : f.paratype) {
    switch (t) {
      case TypeName::UInt256:
        out.push_back(TypedValue::uint(static_cast<std::uint64_t>(uniform(rng, 0, 30))));
        break;
      case TypeName::Bool:
        out.push_back(TypedValue(chance(rng, 0.5)));
        break;
      case TypeName::Address:
        if (chance(rng, 0.05)) {
          out.push_back(TypedValue(Address{}));
        } else {
          out.push_back(TypedValue(random_sender(rng, n, k)));
        }
        break;
    }
  }
  return out;
}

Address random_sender(Rng& rng, std::uint64_t n, std::uint64_t k) {
  return Address{static_cast<std::uint64_t>(uniform(rng, 1, static_cast<int>(n))),
                 static_cast<std::uint64_t>(uniform(rng, 1, static_cast<int>(k)))};
}

}  // namespace crystality::testing
