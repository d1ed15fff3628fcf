#include <functional>
#include <map>
#include <set>

#include "scj2/appmodel/program.hpp"

namespace scj2::app {

namespace {

constexpr int kMaxTiming = 64;

struct Scope {
  std::vector<std::map<std::string, Type>> frames;

  std::optional<Type> find(const std::string& n) const {
    for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
      auto f = it->find(n);
      if (f != it->end()) return f->second;
    }
    return std::nullopt;
  }
};

/// Where a body runs.
struct Context {
  const ObjectDecl* object = nullptr;  // enclosing object, if any
  const Method* method = nullptr;
  bool cleanup = false;
};

class Validator {
 public:
  explicit Validator(const AppSpec& spec) : spec_(spec), cfg_(spec.effective_config()) {}

  std::vector<Diagnostic> run() {
    if (cfg_.int_lo > 0 || cfg_.int_hi < 1 || cfg_.int_hi - cfg_.int_lo > 256) {
      error(Loc{1, 1}, codes::kRange, "ints range must contain 0 and 1 and span at most 256");
    }
    if (cfg_.prio_lo < 1 || cfg_.prio_hi < cfg_.prio_lo) {
      error(Loc{1, 1}, codes::kRange, "priorities range must be non-empty and start at 1 or above");
    }
    if (spec_.safelets.size() > 1) {
      error(spec_.safelets[1].loc, codes::kMultipleSafelets, "more than one safelet");
    }
    names();
    safelet();
    sequencers();
    missions();
    for (const auto& o : spec_.objects) object(o, nullptr);
    for (const auto& s : spec_.schedulables) schedulable(s);
    method_cycles();
    return std::move(diags_);
  }

 private:
  void error(Loc loc, const char* code, std::string msg) {
    diags_.push_back({Diagnostic::Severity::Error, loc, code, std::move(msg)});
  }
  void warning(Loc loc, const char* code, std::string msg) {
    diags_.push_back({Diagnostic::Severity::Warning, loc, code, std::move(msg)});
  }

  enum class Kind { Safelet, Sequencer, Mission, Object, Schedulable };
  static const char* kind_name(Kind k) {
    switch (k) {
      case Kind::Safelet: return "safelet";
      case Kind::Sequencer: return "sequencer";
      case Kind::Mission: return "mission";
      case Kind::Object: return "object";
      case Kind::Schedulable: return "schedulable";
    }
    return "?";
  }

  void declare(const std::string& n, Kind k, Loc loc) {
    if (!kinds_.emplace(n, k).second) {
      error(loc, codes::kDuplicate, "duplicate declaration of '" + n + "'");
    }
  }

  void names() {
    for (const auto& s : spec_.safelets) declare(s.name, Kind::Safelet, s.loc);
    for (const auto& q : spec_.sequencers) declare(q.name, Kind::Sequencer, q.loc);
    for (const auto& m : spec_.missions) declare(m.object.name, Kind::Mission, m.object.loc);
    for (const auto& o : spec_.objects) declare(o.name, Kind::Object, o.loc);
    for (const auto& s : spec_.schedulables) declare(s.name, Kind::Schedulable, s.loc);
  }

  bool expect_kind(const Name& n, Kind k, const char* what) {
    auto it = kinds_.find(n.text);
    if (it == kinds_.end()) {
      error(n.loc, codes::kUndeclared, std::string("undeclared ") + what + " '" + n.text + "'");
      return false;
    }
    if (it->second != k) {
      error(n.loc, codes::kKindMismatch,
            "'" + n.text + "' is a " + kind_name(it->second) + ", expected " + what);
      return false;
    }
    return true;
  }

  void safelet() {
    if (spec_.safelets.empty()) {
      error(Loc{1, 1}, codes::kMissingSafelet, "missing safelet");
      return;
    }
    const auto& s = spec_.safelets.front();
    if (s.sequencer) expect_kind(*s.sequencer, Kind::Sequencer, "sequencer");
  }

  void mission_list(const std::vector<Name>& ms) {
    for (const auto& m : ms) {
      if (!expect_kind(m, Kind::Mission, "mission")) continue;
      if (!sequenced_.insert(m.text).second) {
        error(m.loc, codes::kUnsupported,
              "mission '" + m.text + "' is sequenced more than once");
      }
    }
  }

  void sequencers() {
    for (const auto& q : spec_.sequencers) mission_list(q.missions);
    for (const auto& s : spec_.schedulables) {
      if (s.kind == SchedKind::Sequencer) mission_list(s.missions);
    }
    for (const auto& m : spec_.missions) {
      if (!sequenced_.count(m.object.name)) {
        warning(m.object.loc, codes::kUnreachable,
                "mission '" + m.object.name + "' is never sequenced");
      }
    }
  }

  void missions() {
    std::map<std::string, std::string> owner;
    for (const auto& m : spec_.missions) {
      std::set<std::string> seen;
      for (const auto& r : m.registers) {
        if (!expect_kind(r, Kind::Schedulable, "schedulable")) continue;
        if (!seen.insert(r.text).second) {
          warning(r.loc, codes::kDoubleRegistration,
                  "'" + r.text + "' is registered twice");
          continue;
        }
        auto [it, fresh] = owner.emplace(r.text, m.object.name);
        if (!fresh) {
          error(r.loc, codes::kUnsupported,
                "'" + r.text + "' is already registered by mission '" + it->second + "'");
        }
      }
      object(m.object, &m);
    }
    for (const auto& s : spec_.schedulables) {
      if (!owner.count(s.name)) {
        warning(s.loc, codes::kUnreachable, "schedulable '" + s.name + "' is never registered");
      }
    }
  }

  void priority(int p, Loc loc, const std::string& what) {
    if (p < cfg_.prio_lo || p > cfg_.prio_hi) {
      error(loc, codes::kBadParameter,
            what + " " + std::to_string(p) + " outside priorities " +
                std::to_string(cfg_.prio_lo) + ".." + std::to_string(cfg_.prio_hi));
    }
  }

  void vars(const std::vector<VarDecl>& vs, Scope& scope, const Context& ctx) {
    for (const auto& v : vs) {
      if (v.type == Type::Void) error(v.loc, codes::kType, "variable '" + v.name + "' is void");
      expect_type(v.init, v.type, scope, ctx);
      if (!scope.frames.back().emplace(v.name, v.type).second) {
        error(v.loc, codes::kDuplicate, "duplicate variable '" + v.name + "'");
      }
    }
  }

  void object(const ObjectDecl& o, const MissionDecl* m) {
    if (o.ceiling) priority(*o.ceiling, o.loc, "ceiling");
    Scope scope;
    scope.frames.emplace_back();
    Context ctx{&o, nullptr, false};
    vars(o.vars, scope, ctx);
    std::set<std::string> seen;
    for (const auto& meth : o.methods) {
      if (!seen.insert(meth.name).second) {
        error(meth.loc, codes::kDuplicate, "duplicate method '" + meth.name + "'");
      }
      method_signature(o, meth);
      Scope ms = scope;
      ms.frames.emplace_back();
      for (const auto& p : meth.params) {
        if (p.type == Type::Void) error(meth.loc, codes::kType, "void parameter '" + p.name + "'");
        if (!ms.frames.back().emplace(p.name, p.type).second) {
          error(meth.loc, codes::kDuplicate, "duplicate parameter '" + p.name + "'");
        }
      }
      Context mctx{&o, &meth, false};
      block(meth.body, ms, mctx);
      bool returns = !meth.body.empty() && meth.body.back().kind == Stmt::Kind::Return;
      if (meth.ret != Type::Void && !returns) {
        error(meth.loc, codes::kType, "method '" + meth.name + "' must end with return");
      }
    }
    if (m && m->cleanup) {
      Scope cs = scope;
      cs.frames.emplace_back();
      block(*m->cleanup, cs, Context{&o, nullptr, true});
    }
  }

  /// Methods of the same name share their Call/Ret channels, so their
  /// signatures must agree.
  void method_signature(const ObjectDecl& o, const Method& m) {
    auto [it, fresh] = signatures_.emplace(m.name, &m);
    if (fresh) return;
    const Method& other = *it->second;
    bool same = other.ret == m.ret && other.params.size() == m.params.size();
    for (std::size_t i = 0; same && i < m.params.size(); ++i) {
      same = other.params[i].type == m.params[i].type;
    }
    if (!same) {
      error(m.loc, codes::kUnsupported,
            "method '" + o.name + "." + m.name +
                "' differs in signature from another method of the same name");
    }
  }

  void schedulable(const SchedDecl& s) {
    if (s.kind != SchedKind::Sequencer || s.priority != 0) {
      priority(s.priority, s.loc, "priority");
    }
    auto bad = [&](const std::string& msg) { error(s.loc, codes::kBadParameter, msg); };
    bool periodic = s.kind == SchedKind::Periodic;
    bool handler = periodic || s.kind == SchedKind::Aperiodic || s.kind == SchedKind::OneShot;
    if (periodic && (s.period < 1 || s.period > kMaxTiming)) {
      bad("period must be between 1 and " + std::to_string(kMaxTiming));
    }
    if (!periodic && s.period != 0) bad("period is only allowed on periodic handlers");
    if (s.kind == SchedKind::OneShot && (s.offset < 0 || s.offset > kMaxTiming)) {
      bad("offset must be between 0 and " + std::to_string(kMaxTiming));
    }
    if (s.kind != SchedKind::OneShot && s.offset != 0) {
      bad("offset is only allowed on one-shot handlers");
    }
    if (s.deadline) {
      if (!handler) bad("deadline is only allowed on event handlers");
      if (*s.deadline < 1 || *s.deadline > kMaxTiming) {
        bad("deadline must be between 1 and " + std::to_string(kMaxTiming));
      }
    }
    if (s.kind == SchedKind::Sequencer) return;
    Scope scope;
    scope.frames.emplace_back();
    vars(s.vars, scope, Context{});
    scope.frames.emplace_back();
    block(s.body, scope, Context{});
  }

  // ---- statements ------------------------------------------------------

  void block(const std::vector<Stmt>& body, Scope& scope, const Context& ctx) {
    scope.frames.emplace_back();
    for (std::size_t i = 0; i < body.size(); ++i) {
      const Stmt& s = body[i];
      bool final = ctx.method && &body == &ctx.method->body && i + 1 == body.size();
      statement(s, scope, ctx, final);
    }
    scope.frames.pop_back();
  }

  void statement(const Stmt& s, Scope& scope, const Context& ctx, bool final) {
    switch (s.kind) {
      case Stmt::Kind::VarDecl:
        if (s.type == Type::Void) error(s.loc, codes::kType, "variable '" + s.name + "' is void");
        statement_rhs(*s.expr, s.type, scope, ctx);
        if (!scope.frames.back().emplace(s.name, s.type).second) {
          error(s.loc, codes::kDuplicate, "duplicate variable '" + s.name + "'");
        }
        break;
      case Stmt::Kind::Assign: {
        auto t = scope.find(s.name);
        if (!t) {
          error(s.loc, codes::kUndeclared, "undeclared variable '" + s.name + "'");
          break;
        }
        statement_rhs(*s.expr, *t, scope, ctx);
        break;
      }
      case Stmt::Kind::Call:
        call(*s.expr, scope, ctx);
        break;
      case Stmt::Kind::If:
        expect_type(*s.expr, Type::Bool, scope, ctx);
        block(s.body, scope, ctx);
        block(s.else_body, scope, ctx);
        break;
      case Stmt::Kind::While:
        expect_type(*s.expr, Type::Bool, scope, ctx);
        block(s.body, scope, ctx);
        break;
      case Stmt::Kind::Wait:
      case Stmt::Kind::Notify:
      case Stmt::Kind::NotifyAll:
        if (!ctx.method) {
          error(s.loc, codes::kUnsupported, "wait and notify are only supported in methods");
        }
        break;
      case Stmt::Kind::RequestTermination:
        if (ctx.cleanup) {
          error(s.loc, codes::kUnsupported, "requestTermination is not supported in cleanup");
        }
        expect_kind(Name{s.name, s.loc}, Kind::Mission, "mission");
        break;
      case Stmt::Kind::Fire: {
        if (ctx.cleanup) error(s.loc, codes::kUnsupported, "fire is not supported in cleanup");
        if (!expect_kind(Name{s.name, s.loc}, Kind::Schedulable, "aperiodic handler")) break;
        if (spec_.find_schedulable(s.name)->kind != SchedKind::Aperiodic) {
          error(s.loc, codes::kKindMismatch, "'" + s.name + "' is not an aperiodic handler");
        }
        break;
      }
      case Stmt::Kind::Interrupt:
        if (ctx.object) {
          error(s.loc, codes::kUnsupported,
                "interrupt() is only supported in run and handle bodies");
        }
        break;
      case Stmt::Kind::Sleep:
        if (s.value < 0 || s.value > kMaxTiming) {
          error(s.loc, codes::kRange, "sleep duration out of range");
        }
        break;
      case Stmt::Kind::Return:
        if (!ctx.method) {
          error(s.loc, codes::kUnsupported, "return outside a method");
          break;
        }
        if (!final) {
          error(s.loc, codes::kUnsupported, "return is only supported as the last statement");
        }
        if (ctx.method->ret == Type::Void) {
          if (s.expr) error(s.loc, codes::kType, "void method returns a value");
        } else if (!s.expr) {
          error(s.loc, codes::kType, "missing return value");
        } else {
          expect_type(*s.expr, ctx.method->ret, scope, ctx);
        }
        break;
      case Stmt::Kind::Probe:
        break;
    }
  }

  /// Right-hand sides may be a call of any method; elsewhere only pure
  /// single-expression methods can appear inside expressions.
  void statement_rhs(const Expr& e, Type want, Scope& scope, const Context& ctx) {
    if (e.kind == Expr::Kind::Call) {
      auto t = call(e, scope, ctx);
      if (t && *t != want) type_mismatch(e.loc, want, *t);
      return;
    }
    expect_type(e, want, scope, ctx);
  }

  const ObjectDecl* call_target(const Expr& e, const Context& ctx) {
    if (e.object.empty()) {
      if (!ctx.object) {
        error(e.loc, codes::kUndeclared, "call of '" + e.name + "' without an object");
      }
      return ctx.object;
    }
    const ObjectDecl* o = spec_.find_object(e.object);
    if (!o) error(e.loc, codes::kUndeclared, "undeclared object '" + e.object + "'");
    return o;
  }

  std::optional<Type> call(const Expr& e, Scope& scope, const Context& ctx) {
    const ObjectDecl* o = call_target(e, ctx);
    if (!o) return std::nullopt;
    const Method* m = nullptr;
    for (const auto& meth : o->methods) {
      if (meth.name == e.name) m = &meth;
    }
    if (!m) {
      error(e.loc, codes::kUndeclared, "object '" + o->name + "' has no method '" + e.name + "'");
      return std::nullopt;
    }
    if (ctx.cleanup && blocks_(o, m)) {
      error(e.loc, codes::kUnsupported,
            "cleanup may not call synchronised or suspending methods");
    }
    if (ctx.method) calls_[{ctx.object->name, ctx.method->name}].insert({o->name, m->name});
    if (m->params.size() != e.args.size()) {
      error(e.loc, codes::kBadParameter,
            "'" + e.name + "' expects " + std::to_string(m->params.size()) + " arguments");
      return m->ret;
    }
    for (std::size_t i = 0; i < e.args.size(); ++i) {
      expect_type(e.args[i], m->params[i].type, scope, ctx);
    }
    return m->ret;
  }

  bool blocks_(const ObjectDecl* o, const Method* m) {
    if (m->sync) return true;
    std::function<bool(const std::vector<Stmt>&)> walk = [&](const std::vector<Stmt>& b) {
      for (const auto& s : b) {
        if (s.kind == Stmt::Kind::Wait || s.kind == Stmt::Kind::Notify ||
            s.kind == Stmt::Kind::NotifyAll) {
          return true;
        }
        if (walk(s.body) || walk(s.else_body)) return true;
      }
      return false;
    };
    (void)o;
    return walk(m->body);
  }

  void type_mismatch(Loc loc, Type want, Type got) {
    error(loc, codes::kType,
          std::string("expected ") + type_name(want) + ", found " + type_name(got));
  }

  void expect_type(const Expr& e, Type want, Scope& scope, const Context& ctx) {
    auto t = type_of(e, scope, ctx);
    if (t && *t != want) type_mismatch(e.loc, want, *t);
  }

  std::optional<Type> type_of(const Expr& e, Scope& scope, const Context& ctx) {
    using kernel::Op;
    switch (e.kind) {
      case Expr::Kind::Int:
        if (e.value < cfg_.int_lo || e.value > cfg_.int_hi) {
          error(e.loc, codes::kRange, "integer " + std::to_string(e.value) + " outside ints");
        }
        return Type::Int;
      case Expr::Kind::Bool:
        return Type::Bool;
      case Expr::Kind::Null:
        error(e.loc, codes::kUnsupported, "null is only supported as a sequencer");
        return std::nullopt;
      case Expr::Kind::Name: {
        auto t = scope.find(e.name);
        if (!t) error(e.loc, codes::kUndeclared, "undeclared variable '" + e.name + "'");
        return t;
      }
      case Expr::Kind::Unary: {
        Type want = e.op == Op::Not ? Type::Bool : Type::Int;
        expect_type(e.args.at(0), want, scope, ctx);
        return want;
      }
      case Expr::Kind::Binary: {
        switch (e.op) {
          case Op::And:
          case Op::Or:
            expect_type(e.args[0], Type::Bool, scope, ctx);
            expect_type(e.args[1], Type::Bool, scope, ctx);
            return Type::Bool;
          case Op::Eq:
          case Op::Ne: {
            auto a = type_of(e.args[0], scope, ctx);
            auto b = type_of(e.args[1], scope, ctx);
            if (a && b && *a != *b) type_mismatch(e.loc, *a, *b);
            return Type::Bool;
          }
          case Op::Lt:
          case Op::Le:
          case Op::Gt:
          case Op::Ge:
            expect_type(e.args[0], Type::Int, scope, ctx);
            expect_type(e.args[1], Type::Int, scope, ctx);
            return Type::Bool;
          default:
            expect_type(e.args[0], Type::Int, scope, ctx);
            expect_type(e.args[1], Type::Int, scope, ctx);
            return Type::Int;
        }
      }
      case Expr::Kind::Call: {
        auto t = call(e, scope, ctx);
        const ObjectDecl* o = e.object.empty() ? ctx.object : spec_.find_object(e.object);
        const Method* m = nullptr;
        if (o) {
          for (const auto& meth : o->methods) {
            if (meth.name == e.name) m = &meth;
          }
        }
        if (m && !expression_method(*m)) {
          error(e.loc, codes::kUnsupported,
                "only methods of the form 'return expr' may be called inside expressions");
        }
        if (t == Type::Void) error(e.loc, codes::kType, "void call used as a value");
        return t;
      }
    }
    return std::nullopt;
  }

  static bool expression_method(const Method& m) {
    return !m.sync && m.ret != Type::Void && m.body.size() == 1 &&
           m.body[0].kind == Stmt::Kind::Return;
  }

  void method_cycles() {
    std::map<std::pair<std::string, std::string>, int> state;  // 1 visiting, 2 done
    std::function<bool(const std::pair<std::string, std::string>&)> dfs =
        [&](const std::pair<std::string, std::string>& n) {
          int& st = state[n];
          if (st == 1) return true;
          if (st == 2) return false;
          st = 1;
          for (const auto& next : calls_[n]) {
            if (dfs(next)) return true;
          }
          state[n] = 2;
          return false;
        };
    for (const auto& [n, _] : calls_) {
      if (dfs(n)) {
        error(Loc{1, 1}, codes::kUnsupported,
              "recursive method calls are not supported (" + n.first + "." + n.second + ")");
        return;
      }
    }
  }

  const AppSpec& spec_;
  Config cfg_;
  std::vector<Diagnostic> diags_;
  std::map<std::string, Kind> kinds_;
  std::set<std::string> sequenced_;
  std::map<std::string, const Method*> signatures_;
  std::map<std::pair<std::string, std::string>, std::set<std::pair<std::string, std::string>>>
      calls_;
};

}  // namespace

std::vector<Diagnostic> validate_program(const AppSpec& spec) {
  return Validator(spec).run();
}

}  // namespace scj2::app
