#include "crystality/parser.hpp"

#include <algorithm>
#include <array>
#include <cctype>
#include <limits>
#include <optional>

namespace crystality {

namespace {

constexpr std::array<std::string_view, 16> kKeywords = {
    "contract", "function", "returns", "if",    "then",    "else",  "while", "skip",
    "relay",    "return",   "true",    "false", "uint256", "bool",  "address", "rt"};

std::string join_expected(const std::vector<std::string>& expected) {
  std::string s;
  for (const auto& e : expected) {
    if (!s.empty()) s += ", ";
    s += e;
  }
  return s;
}

std::vector<std::string> normalize(std::vector<std::string> v) {
  std::sort(v.begin(), v.end());
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return v;
}

enum class Tok { Ident, Keyword, Number, Scope, At, Punct, End };

struct Token {
  Tok kind = Tok::End;
  std::string text;
  SourcePos pos;
};

std::string describe(const Token& t) {
  switch (t.kind) {
    case Tok::End: return "end of input";
    case Tok::Ident: return "identifier '" + t.text + "'";
    case Tok::Number: return "number " + t.text;
    default: return "'" + t.text + "'";
  }
}

class Lexer {
 public:
  explicit Lexer(std::string_view src) : src_(src) {}

  std::vector<Token> run() {
    std::vector<Token> out;
    while (true) {
      skip_trivia();
      Token t;
      t.pos = {line_, col_};
      if (at_end()) {
        t.kind = Tok::End;
        out.push_back(std::move(t));
        return out;
      }
      char c = peek();
      if (is_ident_start(c)) {
        t.text = word();
        t.kind = is_keyword(t.text) ? Tok::Keyword : Tok::Ident;
      } else if (std::isdigit(static_cast<unsigned char>(c))) {
        while (!at_end() && std::isdigit(static_cast<unsigned char>(peek()))) t.text += advance();
        if (!at_end() && is_ident_start(peek())) {
          throw ParseError(line_, col_, {"digit"}, std::string("'") + peek() + "'");
        }
        t.kind = Tok::Number;
      } else if (c == '@') {
        advance();
        std::size_t save = pos_;
        int save_line = line_, save_col = col_;
        if (!at_end() && is_ident_start(peek())) {
          std::string w = word();
          if (w == "address" || w == "engine" || w == "global" || w == "engines") {
            t.kind = Tok::Scope;
            t.text = "@" + w;
            out.push_back(std::move(t));
            continue;
          }
          pos_ = save;
          line_ = save_line;
          col_ = save_col;
        }
        t.kind = Tok::At;
        t.text = "@";
      } else {
        t.kind = Tok::Punct;
        t.text = punct();
      }
      out.push_back(std::move(t));
    }
  }

 private:
  static bool is_ident_start(char c) { return std::isalpha(static_cast<unsigned char>(c)) || c == '_'; }
  static bool is_ident_char(char c) { return std::isalnum(static_cast<unsigned char>(c)) || c == '_'; }

  bool at_end() const { return pos_ >= src_.size(); }
  char peek(std::size_t ahead = 0) const {
    return pos_ + ahead < src_.size() ? src_[pos_ + ahead] : '\0';
  }
  char advance() {
    char c = src_[pos_++];
    if (c == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    return c;
  }

  void skip_trivia() {
    while (!at_end()) {
      char c = peek();
      if (c == ' ' || c == '\t' || c == '\r' || c == '\n') {
        advance();
      } else if (c == '/' && peek(1) == '/') {
        while (!at_end() && peek() != '\n') advance();
      } else {
        break;
      }
    }
  }

  std::string word() {
    std::string w;
    while (!at_end() && is_ident_char(peek())) w += advance();
    return w;
  }

  std::string punct() {
    char c = peek();
    char n = peek(1);
    auto two = [&](std::string s) {
      advance();
      advance();
      return s;
    };
    if (c == ':' && n == '=') return two(":=");
    if (c == '<' && n == '=') return two("<=");
    if (c == '>' && n == '=') return two(">=");
    if (c == '=' && n == '=') return two("==");
    if (c == '!' && n == '=') return two("!=");
    switch (c) {
      case '{': case '}': case '(': case ')': case ';': case ',':
      case '+': case '-': case '*': case '/': case '<': case '>':
        advance();
        return std::string(1, c);
      default:
        break;
    }
    std::string shown = std::isprint(static_cast<unsigned char>(c))
                            ? "'" + std::string(1, c) + "'"
                            : "byte " + std::to_string(static_cast<unsigned char>(c));
    throw ParseError(line_, col_, {"token"}, "character " + shown);
  }

  std::string_view src_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int col_ = 1;
};

class Parser {
 public:
  Parser(std::vector<Token> tokens, const ParseLimits& limits)
      : toks_(std::move(tokens)), limits_(limits) {}

  ContractDecl contract() {
    ContractDecl c;
    expect_keyword("contract");
    c.name = identifier();
    expect_punct("{");
    while (type_ahead()) c.state_vars.push_back(state_var());
    while (is_keyword("function")) c.functions.push_back(function());
    if (!is_punct("}")) {
      if (c.functions.empty()) fail({"uint256", "bool", "address", "function", "}"});
      fail({"function", "}"});
    }
    advance();
    expect_end();
    return c;
  }

  Exp standalone_expression() {
    Exp e = expression();
    expect_end();
    return e;
  }

 private:
  struct DepthGuard {
    DepthGuard(Parser& p) : parser(p) {
      if (++parser.depth_ > parser.limits_.max_nesting) {
        const Token& t = parser.cur();
        throw ParseError(t.pos.line, t.pos.column, {"shallower nesting"}, describe(t));
      }
    }
    ~DepthGuard() { --parser.depth_; }
    Parser& parser;
  };

  const Token& cur() const { return toks_[idx_]; }
  const Token& ahead(std::size_t n) const { return toks_[std::min(idx_ + n, toks_.size() - 1)]; }
  const Token& advance() {
    const Token& t = toks_[idx_];
    if (idx_ + 1 < toks_.size()) ++idx_;
    return t;
  }

  [[noreturn]] void fail(std::vector<std::string> expected) const {
    const Token& t = cur();
    std::string found = describe(t);
    if (t.kind == Tok::Keyword && t.text == "rt") found = "reserved word 'rt'";
    throw ParseError(t.pos.line, t.pos.column, std::move(expected), found);
  }

  bool is_keyword(std::string_view kw) const { return cur().kind == Tok::Keyword && cur().text == kw; }
  bool is_punct(std::string_view p) const { return cur().kind == Tok::Punct && cur().text == p; }
  bool type_ahead() const {
    return is_keyword("uint256") || is_keyword("bool") || is_keyword("address");
  }

  void expect_keyword(std::string_view kw) {
    if (!is_keyword(kw)) fail({std::string(kw)});
    advance();
  }
  void expect_punct(std::string_view p) {
    if (!is_punct(p)) fail({std::string(p)});
    advance();
  }
  void expect_end() {
    if (cur().kind != Tok::End) fail({"end of input"});
  }

  std::string identifier() {
    if (cur().kind != Tok::Ident) fail({"identifier"});
    return advance().text;
  }

  TypeName type_name() {
    if (!type_ahead()) fail({"uint256", "bool", "address"});
    return *type_from_string(advance().text);
  }

  ScopeTag scope() {
    const Token& t = cur();
    if (t.kind == Tok::Scope) {
      if (t.text == "@address") { advance(); return ScopeTag::Address; }
      if (t.text == "@engine") { advance(); return ScopeTag::Engine; }
      if (t.text == "@global") { advance(); return ScopeTag::Global; }
    }
    fail({"@address", "@engine", "@global"});
  }

  StateVarDecl state_var() {
    StateVarDecl d;
    d.pos = cur().pos;
    d.type = type_name();
    d.scope = scope();
    d.name = identifier();
    expect_punct(";");
    return d;
  }

  FuncDecl function() {
    FuncDecl f;
    f.pos = cur().pos;
    expect_keyword("function");
    f.name = identifier();
    expect_punct("(");
    if (!is_punct(")")) {
      while (true) {
        Param p;
        p.type = type_name();
        p.name = identifier();
        f.params.push_back(std::move(p));
        if (is_punct(",")) {
          advance();
          continue;
        }
        if (!is_punct(")")) fail({",", ")"});
        break;
      }
    }
    expect_punct(")");
    f.scope = scope();
    expect_keyword("returns");
    if (type_ahead()) f.return_type = type_name();
    if (!is_punct("{")) fail({"{", "uint256", "bool", "address"});
    advance();
    f.body = block();
    expect_punct("}");
    return f;
  }

  // Statements up to (not including) the closing brace.
  Stmt block() {
    DepthGuard guard(*this);
    std::vector<Stmt> stmts;
    while (!is_punct("}")) {
      if (cur().kind == Tok::End) fail({"}"});
      stmts.push_back(statement());
    }
    return seq_of(std::move(stmts));
  }

  Stmt braced_block() {
    expect_punct("{");
    Stmt s = block();
    expect_punct("}");
    return s;
  }

  Stmt statement() {
    SourcePos pos = cur().pos;
    if (is_keyword("if")) {
      advance();
      expect_punct("(");
      Exp cond = expression();
      expect_punct(")");
      expect_keyword("then");
      Stmt then_branch = braced_block();
      expect_keyword("else");
      Stmt else_branch = braced_block();
      return Stmt{If{std::move(cond), Box<Stmt>(std::move(then_branch)), Box<Stmt>(std::move(else_branch))}, pos};
    }
    if (is_keyword("while")) {
      advance();
      expect_punct("(");
      Exp cond = expression();
      expect_punct(")");
      Stmt body = braced_block();
      return Stmt{While{std::move(cond), Box<Stmt>(std::move(body))}, pos};
    }
    if (is_keyword("skip")) {
      advance();
      if (is_punct(";")) advance();
      return Stmt{Skip{}, pos};
    }
    if (type_ahead()) {
      TempDecl d;
      d.type = type_name();
      d.name = identifier();
      expect_punct(";");
      return Stmt{std::move(d), pos};
    }
    if (is_keyword("relay")) {
      advance();
      return Stmt{relay_tail(), pos};
    }
    if (is_keyword("return")) {
      advance();
      Exp value = expression();
      expect_punct(";");
      return Stmt{Return{std::move(value)}, pos};
    }
    if (cur().kind == Tok::Ident) {
      std::string name = advance().text;
      if (is_punct(":=")) {
        advance();
        Exp value = expression();
        expect_punct(";");
        return Stmt{Assign{std::move(name), std::move(value)}, pos};
      }
      if (is_punct("(")) {
        auto args = arguments();
        if (is_punct(";")) advance();
        return Stmt{CallStmt{std::move(name), std::move(args)}, pos};
      }
      fail({":=", "("});
    }
    fail({"if", "while", "skip", "relay", "return", "uint256", "bool", "address", "identifier", "}"});
  }

  Relay relay_tail() {
    Relay r;
    const Token& t = cur();
    if (t.kind == Tok::Scope && t.text == "@engines") {
      advance();
      r.target = AtEngines{};
    } else if (t.kind == Tok::Scope && t.text == "@global") {
      advance();
      r.target = AtGlobal{};
    } else if (t.kind == Tok::At) {
      advance();
      r.target = AtAddress{expression()};
    } else {
      fail({"@", "@engines", "@global"});
    }
    r.func = identifier();
    if (!is_punct("(")) fail({"("});
    r.args = arguments();
    expect_punct(";");
    return r;
  }

  std::vector<Exp> arguments() {
    expect_punct("(");
    std::vector<Exp> args;
    if (is_punct(")")) {
      advance();
      return args;
    }
    while (true) {
      args.push_back(expression());
      if (is_punct(",")) {
        advance();
        continue;
      }
      if (!is_punct(")")) fail({",", ")"});
      advance();
      return args;
    }
  }

  std::optional<BinOp> binop_here(int level) const {
    if (cur().kind != Tok::Punct) return std::nullopt;
    const std::string& p = cur().text;
    if (level == 0) {
      if (p == "<=") return BinOp::Le;
      if (p == "<") return BinOp::Lt;
      if (p == "==") return BinOp::Eq;
      if (p == ">=") return BinOp::Ge;
      if (p == ">") return BinOp::Gt;
      if (p == "!=") return BinOp::Ne;
    } else if (level == 1) {
      if (p == "+") return BinOp::Add;
      if (p == "-") return BinOp::Sub;
    } else {
      if (p == "*") return BinOp::Mul;
      if (p == "/") return BinOp::Div;
    }
    return std::nullopt;
  }

  Exp expression() { return binary_level(0); }

  Exp binary_level(int level) {
    DepthGuard guard(*this);
    if (level > 2) return primary();
    Exp lhs = binary_level(level + 1);
    while (auto op = binop_here(level)) {
      SourcePos pos = cur().pos;
      advance();
      Exp rhs = binary_level(level + 1);
      lhs = binary(*op, std::move(lhs), std::move(rhs), pos);
    }
    return lhs;
  }

  std::uint64_t small_number() {
    if (cur().kind != Tok::Number) fail({"number"});
    auto v = parse_uint256(cur().text);
    if (!v || *v > std::numeric_limits<std::uint64_t>::max()) fail({"64-bit number"});
    advance();
    return static_cast<std::uint64_t>(*v);
  }

  Exp primary() {
    SourcePos pos = cur().pos;
    const Token& t = cur();
    if (t.kind == Tok::Number) {
      auto v = parse_uint256(t.text);
      if (!v) fail({"uint256 literal"});
      advance();
      return literal(TypedValue(*v), pos);
    }
    if (is_keyword("true") || is_keyword("false")) {
      bool b = t.text == "true";
      advance();
      return literal(TypedValue(b), pos);
    }
    if (is_keyword("address")) {
      advance();
      expect_punct("(");
      Address a;
      a.engine = small_number();
      expect_punct(",");
      a.index = small_number();
      expect_punct(")");
      return literal(TypedValue(a), pos);
    }
    if (t.kind == Tok::Ident) {
      std::string name = advance().text;
      if (is_punct("(")) return call_exp(std::move(name), arguments(), pos);
      return ident(std::move(name), pos);
    }
    if (is_punct("(")) {
      advance();
      Exp inner = expression();
      expect_punct(")");
      return inner;
    }
    fail({"identifier", "number", "true", "false", "address", "("});
  }

  std::vector<Token> toks_;
  std::size_t idx_ = 0;
  int depth_ = 0;
  ParseLimits limits_;
};

std::vector<Token> lex_checked(std::string_view source, const ParseLimits& limits) {
  if (source.size() > limits.max_source_bytes) {
    throw ParseError(1, 1, {"shorter input"},
                     "input of " + std::to_string(source.size()) + " bytes");
  }
  return Lexer(source).run();
}

}  // namespace

ParseError::ParseError(int line, int column, std::vector<std::string> expected, std::string found)
    : std::runtime_error(std::to_string(line) + ":" + std::to_string(column) + ": expected " +
                         join_expected(normalize(expected)) + " but found " + found),
      line_(line),
      column_(column),
      expected_(normalize(std::move(expected))),
      found_(std::move(found)) {}

bool is_keyword(std::string_view word) {
  return std::find(kKeywords.begin(), kKeywords.end(), word) != kKeywords.end();
}

ContractDecl parse_contract(std::string_view source, const ParseLimits& limits) {
  return Parser(lex_checked(source, limits), limits).contract();
}

Exp parse_expression(std::string_view source, const ParseLimits& limits) {
  return Parser(lex_checked(source, limits), limits).standalone_expression();
}

}  // namespace crystality
