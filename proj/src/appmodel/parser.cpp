#include <cctype>
#include <stdexcept>

#include "scj2/appmodel/program.hpp"

namespace scj2::app {

const char* type_name(Type t) {
  switch (t) {
    case Type::Int:
      return "int";
    case Type::Bool:
      return "bool";
    case Type::Void:
      return "void";
  }
  return "?";
}

const char* sched_keyword(SchedKind k) {
  switch (k) {
    case SchedKind::Periodic:
      return "periodic";
    case SchedKind::Aperiodic:
      return "aperiodic";
    case SchedKind::OneShot:
      return "oneshot";
    case SchedKind::Thread:
      return "thread";
    case SchedKind::Sequencer:
      return "sequencerschedulable";
  }
  return "?";
}

const MissionDecl* AppSpec::find_mission(std::string_view name) const {
  for (const auto& m : missions) {
    if (m.object.name == name) return &m;
  }
  return nullptr;
}

const ObjectDecl* AppSpec::find_object(std::string_view name) const {
  for (const auto& o : objects) {
    if (o.name == name) return &o;
  }
  if (const auto* m = find_mission(name)) return &m->object;
  return nullptr;
}

const SchedDecl* AppSpec::find_schedulable(std::string_view name) const {
  for (const auto& s : schedulables) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

const SequencerDecl* AppSpec::find_sequencer(std::string_view name) const {
  for (const auto& s : sequencers) {
    if (s.name == name) return &s;
  }
  return nullptr;
}

std::string Diagnostic::str() const {
  return std::to_string(loc.line) + ":" + std::to_string(loc.col) + ": " +
         (is_error() ? "error" : "warning") + "[" + code + "]: " + message;
}

bool has_errors(const std::vector<Diagnostic>& diags) {
  for (const auto& d : diags) {
    if (d.is_error()) return true;
  }
  return false;
}

bool ParseResult::ok() const { return spec && !has_errors(diagnostics); }

namespace {

struct Token {
  enum class Kind : std::uint8_t { Ident, Int, Punct, End };
  Kind kind = Kind::End;
  std::string text;
  int value = 0;
  Loc loc;
};

struct SyntaxError : std::runtime_error {
  Loc loc;
  std::string code;
  SyntaxError(Loc l, const std::string& msg, std::string c = codes::kSyntax)
      : std::runtime_error(msg), loc(l), code(std::move(c)) {}
};

std::vector<Token> lex(std::string_view src) {
  std::vector<Token> out;
  int line = 1, col = 1;
  std::size_t i = 0;
  auto advance = [&](std::size_t n) {
    for (std::size_t k = 0; k < n; ++k) {
      if (src[i] == '\n') {
        ++line;
        col = 1;
      } else {
        ++col;
      }
      ++i;
    }
  };
  static const char* two[] = {"==", "!=", "<=", ">=", "&&", "||", ".."};
  while (i < src.size()) {
    char c = src[i];
    if (std::isspace(static_cast<unsigned char>(c))) {
      advance(1);
      continue;
    }
    if (c == '/' && i + 1 < src.size() && src[i + 1] == '/') {
      while (i < src.size() && src[i] != '\n') advance(1);
      continue;
    }
    Token t;
    t.loc = {line, col};
    if (std::isalpha(static_cast<unsigned char>(c)) || c == '_') {
      std::size_t j = i;
      while (j < src.size() &&
             (std::isalnum(static_cast<unsigned char>(src[j])) || src[j] == '_')) {
        ++j;
      }
      t.kind = Token::Kind::Ident;
      t.text = std::string(src.substr(i, j - i));
      advance(j - i);
    } else if (std::isdigit(static_cast<unsigned char>(c))) {
      std::size_t j = i;
      while (j < src.size() && std::isdigit(static_cast<unsigned char>(src[j]))) ++j;
      t.kind = Token::Kind::Int;
      t.text = std::string(src.substr(i, j - i));
      if (t.text.size() > 6) throw SyntaxError(t.loc, "integer literal too large");
      t.value = std::stoi(t.text);
      advance(j - i);
    } else {
      t.kind = Token::Kind::Punct;
      for (const char* op : two) {
        if (src.substr(i, 2) == op) t.text = op;
      }
      if (t.text.empty()) {
        if (std::string_view("{}()[],;:=<>+-*/%!.").find(c) == std::string_view::npos) {
          throw SyntaxError(t.loc, std::string("unexpected character '") + c + "'");
        }
        t.text = std::string(1, c);
      }
      advance(t.text.size());
    }
    out.push_back(std::move(t));
  }
  Token end;
  end.loc = {line, col};
  out.push_back(end);
  return out;
}

class Parser {
 public:
  explicit Parser(std::vector<Token> toks) : toks_(std::move(toks)) {}

  AppSpec program() {
    AppSpec spec;
    while (!at_end()) {
      const Token& t = peek();
      if (t.kind != Token::Kind::Ident) error("expected a declaration");
      if (t.text == "config") {
        spec.config = config();
      } else if (t.text == "safelet") {
        spec.safelets.push_back(safelet());
      } else if (t.text == "sequencer") {
        spec.sequencers.push_back(sequencer());
      } else if (t.text == "mission") {
        spec.missions.push_back(mission());
      } else if (t.text == "object") {
        Loc loc = next().loc;
        spec.objects.push_back(object_body(ident("object name"), loc, nullptr));
      } else if (t.text == "thread" || t.text == "periodic" || t.text == "aperiodic" ||
                 t.text == "oneshot" || t.text == "sequencerschedulable") {
        spec.schedulables.push_back(schedulable());
      } else {
        error("unknown declaration '" + t.text + "'");
      }
    }
    return spec;
  }

 private:
  const Token& peek(std::size_t k = 0) const {
    return toks_[std::min(pos_ + k, toks_.size() - 1)];
  }
  bool at_end() const { return peek().kind == Token::Kind::End; }
  const Token& next() {
    const Token& t = peek();
    if (pos_ < toks_.size() - 1) ++pos_;
    return t;
  }
  [[noreturn]] void error(const std::string& msg) const {
    const Token& t = peek();
    std::string found = t.kind == Token::Kind::End ? "end of input" : "'" + t.text + "'";
    throw SyntaxError(t.loc, msg + ", found " + found);
  }
  bool is(const char* text) const {
    const Token& t = peek();
    return t.kind != Token::Kind::End && t.kind != Token::Kind::Int && t.text == text;
  }
  bool accept(const char* text) {
    if (!is(text)) return false;
    next();
    return true;
  }
  void expect(const char* text) {
    if (!accept(text)) error(std::string("expected '") + text + "'");
  }
  std::string ident(const char* what) {
    if (peek().kind != Token::Kind::Ident) error(std::string("expected ") + what);
    return next().text;
  }
  Name name(const char* what) {
    Loc loc = peek().loc;
    return Name{ident(what), loc};
  }
  int integer() {
    if (peek().kind != Token::Kind::Int) error("expected an integer");
    return next().value;
  }
  int signed_integer() {
    bool neg = accept("-");
    int v = integer();
    return neg ? -v : v;
  }

  Config config() {
    expect("config");
    expect("{");
    Config c;
    while (!accept("}")) {
      std::string key = ident("config key");
      expect("=");
      int lo = signed_integer();
      expect("..");
      int hi = signed_integer();
      accept(";");
      if (key == "ints") {
        c.int_lo = lo;
        c.int_hi = hi;
      } else if (key == "priorities") {
        c.prio_lo = lo;
        c.prio_hi = hi;
      } else {
        throw SyntaxError(peek().loc, "unknown config key '" + key + "'");
      }
    }
    return c;
  }

  SafeletDecl safelet() {
    SafeletDecl s;
    s.loc = next().loc;
    s.name = ident("safelet name");
    expect("{");
    expect("sequencer");
    expect("=");
    if (!accept("null")) s.sequencer = name("sequencer name");
    accept(";");
    expect("}");
    return s;
  }

  std::vector<Name> name_list() {
    std::vector<Name> out;
    expect("[");
    if (accept("]")) return out;
    do {
      out.push_back(name("identifier"));
    } while (accept(","));
    expect("]");
    return out;
  }

  SequencerDecl sequencer() {
    SequencerDecl s;
    s.loc = next().loc;
    s.name = ident("sequencer name");
    expect("{");
    expect("missions");
    expect("=");
    s.missions = name_list();
    accept(";");
    expect("}");
    return s;
  }

  MissionDecl mission() {
    MissionDecl m;
    Loc loc = next().loc;
    m.object = object_body(ident("mission name"), loc, &m);
    return m;
  }

  ObjectDecl object_body(std::string obj_name, Loc loc, MissionDecl* mission) {
    ObjectDecl o;
    o.name = std::move(obj_name);
    o.loc = loc;
    if (accept("ceiling")) {
      expect("=");
      o.ceiling = integer();
    }
    expect("{");
    enclosing_ = o.name;
    while (!accept("}")) {
      if (is("vars")) {
        auto vs = vars();
        o.vars.insert(o.vars.end(), vs.begin(), vs.end());
      } else if (is("sync") || is("method")) {
        o.methods.push_back(method());
      } else if (mission && accept("registers")) {
        expect("=");
        auto regs = name_list();
        mission->registers.insert(mission->registers.end(), regs.begin(), regs.end());
        accept(";");
      } else if (mission && accept("cleanup")) {
        mission->cleanup = block();
      } else {
        error(mission ? "expected vars, registers, method or cleanup"
                      : "expected vars or method");
      }
    }
    enclosing_.clear();
    return o;
  }

  Type type() {
    std::string t = ident("type");
    if (t == "int") return Type::Int;
    if (t == "bool") return Type::Bool;
    if (t == "void") return Type::Void;
    throw SyntaxError(toks_[pos_ - 1].loc, "unknown type '" + t + "'");
  }

  std::vector<VarDecl> vars() {
    expect("vars");
    expect("{");
    std::vector<VarDecl> out;
    while (!accept("}")) {
      VarDecl v;
      v.loc = peek().loc;
      v.name = ident("variable name");
      expect(":");
      v.type = type();
      if (accept("=")) {
        v.init = expr();
      } else {
        v.init = default_value(v.type, v.loc);
      }
      expect(";");
      out.push_back(std::move(v));
    }
    return out;
  }

  static Expr default_value(Type t, Loc loc) {
    Expr e;
    e.kind = t == Type::Bool ? Expr::Kind::Bool : Expr::Kind::Int;
    e.loc = loc;
    return e;
  }

  Method method() {
    Method m;
    m.loc = peek().loc;
    m.sync = accept("sync");
    expect("method");
    m.name = ident("method name");
    expect("(");
    if (!accept(")")) {
      do {
        Param p;
        p.name = ident("parameter name");
        expect(":");
        p.type = type();
        m.params.push_back(std::move(p));
      } while (accept(","));
      expect(")");
    }
    if (accept(":")) m.ret = type();
    m.body = block();
    return m;
  }

  SchedDecl schedulable() {
    SchedDecl s;
    s.loc = peek().loc;
    std::string kw = next().text;
    if (kw == "thread") s.kind = SchedKind::Thread;
    if (kw == "periodic") s.kind = SchedKind::Periodic;
    if (kw == "aperiodic") s.kind = SchedKind::Aperiodic;
    if (kw == "oneshot") s.kind = SchedKind::OneShot;
    if (kw == "sequencerschedulable") s.kind = SchedKind::Sequencer;
    s.name = ident("schedulable name");
    while (peek().kind == Token::Kind::Ident) {
      std::string key = next().text;
      expect("=");
      int v = integer();
      if (key == "priority") {
        s.priority = v;
      } else if (key == "period") {
        s.period = v;
      } else if (key == "offset") {
        s.offset = v;
      } else if (key == "deadline") {
        s.deadline = v;
      } else {
        throw SyntaxError(toks_[pos_ - 1].loc, "unknown parameter '" + key + "'");
      }
    }
    expect("{");
    const char* body_kw = s.kind == SchedKind::Thread ? "run" : "handle";
    while (!accept("}")) {
      if (s.kind == SchedKind::Sequencer) {
        expect("missions");
        expect("=");
        s.missions = name_list();
        accept(";");
      } else if (is("vars")) {
        auto vs = vars();
        s.vars.insert(s.vars.end(), vs.begin(), vs.end());
      } else if (accept(body_kw)) {
        s.body = block();
      } else {
        error(std::string("expected vars or ") + body_kw);
      }
    }
    return s;
  }

  std::vector<Stmt> block() {
    expect("{");
    std::vector<Stmt> out;
    while (!accept("}")) out.push_back(statement());
    return out;
  }

  Stmt suspension(Stmt::Kind kind) {
    Stmt s;
    s.kind = kind;
    s.loc = next().loc;
    expect("(");
    if (!accept(")")) {
      if (!accept("this")) s.object = ident("object name");
      expect(")");
    }
    expect(";");
    std::string target = s.object.empty() ? enclosing_ : s.object;
    if (enclosing_.empty() || target != enclosing_) {
      throw SyntaxError(s.loc,
                        "wait/notify may only be called on this (the enclosing object)",
                        codes::kWaitNotOnThis);
    }
    s.object.clear();
    return s;
  }

  Stmt named_call(Stmt::Kind kind) {
    Stmt s;
    s.kind = kind;
    s.loc = next().loc;
    expect("(");
    s.name = ident("identifier");
    expect(")");
    expect(";");
    return s;
  }

  Stmt statement() {
    const Token& t = peek();
    if (t.kind != Token::Kind::Ident) error("expected a statement");
    Stmt s;
    s.loc = t.loc;
    if (t.text == "var") {
      next();
      s.kind = Stmt::Kind::VarDecl;
      s.name = ident("variable name");
      expect(":");
      s.type = type();
      if (accept("=")) {
        s.expr = expr();
      } else {
        s.expr = default_value(s.type, s.loc);
      }
      expect(";");
      return s;
    }
    if (t.text == "if") {
      next();
      s.kind = Stmt::Kind::If;
      expect("(");
      s.expr = expr();
      expect(")");
      s.body = block();
      if (accept("else")) {
        if (is("if")) {
          s.else_body.push_back(statement());
        } else {
          s.else_body = block();
        }
      }
      return s;
    }
    if (t.text == "while") {
      next();
      s.kind = Stmt::Kind::While;
      expect("(");
      s.expr = expr();
      expect(")");
      s.body = block();
      return s;
    }
    if (t.text == "wait" && peek(1).text == "(") return suspension(Stmt::Kind::Wait);
    if (t.text == "notify" && peek(1).text == "(") return suspension(Stmt::Kind::Notify);
    if (t.text == "notifyAll" && peek(1).text == "(") {
      return suspension(Stmt::Kind::NotifyAll);
    }
    if (t.text == "requestTermination" && peek(1).text == "(") {
      return named_call(Stmt::Kind::RequestTermination);
    }
    if (t.text == "fire" && peek(1).text == "(") return named_call(Stmt::Kind::Fire);
    if (t.text == "probe" && peek(1).text == "(") return named_call(Stmt::Kind::Probe);
    if (t.text == "interrupt" && peek(1).text == "(") {
      next();
      expect("(");
      expect(")");
      expect(";");
      s.kind = Stmt::Kind::Interrupt;
      return s;
    }
    if (t.text == "sleep" && peek(1).text == "(") {
      next();
      expect("(");
      s.kind = Stmt::Kind::Sleep;
      s.value = integer();
      expect(")");
      expect(";");
      return s;
    }
    if (t.text == "return") {
      next();
      s.kind = Stmt::Kind::Return;
      if (!accept(";")) {
        s.expr = expr();
        expect(";");
      }
      return s;
    }
    if (peek(1).text == "=" ) {
      s.kind = Stmt::Kind::Assign;
      s.name = next().text;
      next();
      s.expr = expr();
      expect(";");
      return s;
    }
    Expr e = expr();
    if (e.kind != Expr::Kind::Call) {
      throw SyntaxError(s.loc, "expected a statement");
    }
    s.kind = Stmt::Kind::Call;
    s.expr = std::move(e);
    expect(";");
    return s;
  }

  // ---- expressions -------------------------------------------------------

  Expr binary_node(kernel::Op op, Expr a, Expr b, Loc loc) {
    Expr e;
    e.kind = Expr::Kind::Binary;
    e.op = op;
    e.loc = loc;
    e.args.push_back(std::move(a));
    e.args.push_back(std::move(b));
    return e;
  }

  Expr expr() { return or_expr(); }

  Expr or_expr() {
    Expr e = and_expr();
    while (is("||")) {
      Loc loc = next().loc;
      e = binary_node(kernel::Op::Or, std::move(e), and_expr(), loc);
    }
    return e;
  }

  Expr and_expr() {
    Expr e = cmp_expr();
    while (is("&&")) {
      Loc loc = next().loc;
      e = binary_node(kernel::Op::And, std::move(e), cmp_expr(), loc);
    }
    return e;
  }

  Expr cmp_expr() {
    using kernel::Op;
    Expr e = add_expr();
    static const std::pair<const char*, Op> ops[] = {{"==", Op::Eq}, {"!=", Op::Ne},
                                                      {"<=", Op::Le}, {">=", Op::Ge},
                                                      {"<", Op::Lt},  {">", Op::Gt}};
    for (const auto& [text, op] : ops) {
      if (is(text)) {
        Loc loc = next().loc;
        return binary_node(op, std::move(e), add_expr(), loc);
      }
    }
    return e;
  }

  Expr add_expr() {
    Expr e = mul_expr();
    while (is("+") || is("-")) {
      auto op = peek().text == "+" ? kernel::Op::Add : kernel::Op::Sub;
      Loc loc = next().loc;
      e = binary_node(op, std::move(e), mul_expr(), loc);
    }
    return e;
  }

  Expr mul_expr() {
    using kernel::Op;
    Expr e = unary_expr();
    while (is("*") || is("/") || is("%")) {
      Op op = peek().text == "*" ? Op::Mul : peek().text == "/" ? Op::Div : Op::Mod;
      Loc loc = next().loc;
      e = binary_node(op, std::move(e), unary_expr(), loc);
    }
    return e;
  }

  Expr unary_expr() {
    if (is("!") || is("-")) {
      Expr e;
      e.kind = Expr::Kind::Unary;
      e.op = peek().text == "!" ? kernel::Op::Not : kernel::Op::Neg;
      e.loc = next().loc;
      e.args.push_back(unary_expr());
      return e;
    }
    return primary();
  }

  std::vector<Expr> call_args() {
    std::vector<Expr> out;
    expect("(");
    if (accept(")")) return out;
    do {
      out.push_back(expr());
    } while (accept(","));
    expect(")");
    return out;
  }

  Expr primary() {
    Expr e;
    e.loc = peek().loc;
    if (peek().kind == Token::Kind::Int) {
      e.kind = Expr::Kind::Int;
      e.value = next().value;
      return e;
    }
    if (accept("(")) {
      Expr inner = expr();
      expect(")");
      return inner;
    }
    if (peek().kind != Token::Kind::Ident) error("expected an expression");
    std::string id = next().text;
    if (id == "true" || id == "false") {
      e.kind = Expr::Kind::Bool;
      e.value = id == "true";
      return e;
    }
    if (id == "null") {
      e.kind = Expr::Kind::Null;
      return e;
    }
    if (is(".")) {
      next();
      e.kind = Expr::Kind::Call;
      e.object = id == "this" ? "" : id;
      e.name = ident("method name");
      e.args = call_args();
      return e;
    }
    if (is("(")) {
      e.kind = Expr::Kind::Call;
      e.name = id;
      e.args = call_args();
      return e;
    }
    e.kind = Expr::Kind::Name;
    e.name = id;
    return e;
  }

  std::vector<Token> toks_;
  std::size_t pos_ = 0;
  std::string enclosing_;
};

}  // namespace

ParseResult parse_program(std::string_view text) {
  ParseResult r;
  try {
    Parser p(lex(text));
    AppSpec spec = p.program();
    if (spec.safelets.empty()) {
      r.diagnostics.push_back({Diagnostic::Severity::Error, Loc{1, 1},
                               codes::kMissingSafelet, "missing safelet"});
      return r;
    }
    r.spec = std::move(spec);
  } catch (const SyntaxError& e) {
    r.diagnostics.push_back({Diagnostic::Severity::Error, e.loc, e.code, e.what()});
  }
  return r;
}

}  // namespace scj2::app
