#include "scj2/appmodel/compile.hpp"

#include <algorithm>
#include <functional>
#include <set>

#include "scj2/appmodel/program.hpp"
#include "scj2/kernel/errors.hpp"
#include "scj2/sync/protocol.hpp"

namespace scj2::app {

using kernel::EventPattern;
using kernel::FieldPattern;
using kernel::TermPtr;

namespace {

struct Binding {
  kernel::ExprPtr ref;
  Sym sym = 0;  // 0 when not assignable (substituted parameter)
};

using Scope = std::vector<std::map<std::string, Binding>>;

const Binding& lookup(const Scope& scope, const std::string& name) {
  for (auto it = scope.rbegin(); it != scope.rend(); ++it) {
    auto f = it->find(name);
    if (f != it->end()) return f->second;
  }
  throw AssemblyFault("unresolved name '" + name + "'");
}

struct Frame {
  const ObjectDecl* object = nullptr;
  const Method* method = nullptr;
  Sym retvar = 0;
  std::string prefix;  // local variable prefix, `Object.method.`
};

TermPtr emit(Sym ch, const std::vector<kernel::ExprPtr>& values, TermPtr k) {
  std::vector<FieldPattern> fields;
  for (const auto& v : values) fields.push_back(FieldPattern::out(v));
  return kernel::prefix(EventPattern{ch, std::move(fields)}, std::move(k));
}

TermPtr until_end(TermPtr body) {
  return kernel::interrupt(kernel::seq(std::move(body), kernel::stop()),
                           EventPattern{sync::sync_channels().end_of_program, {}});
}

Sym method_channel(const std::string& method, const char* suffix) {
  return intern(method + suffix);
}

/// Compiles statement lists for one thread of control.
class BodyCompiler {
 public:
  struct Usage {
    std::map<Sym, std::set<Sym>> locks;  // object -> threads
    std::map<Sym, std::set<Sym>> waits;  // thread -> objects
    std::set<Sym> interrupts;            // threads
    std::set<Sym> probes;
  };

  BodyCompiler(const AppSpec& spec, Sym thread, Usage& usage)
      : spec_(spec), cfg_(spec.effective_config()), thread_(thread), usage_(usage) {}

  Domain domain(Type t) const {
    return t == Type::Bool ? Domain::booleans() : Domain::ints(cfg_.int_lo, cfg_.int_hi);
  }

  static std::map<std::string, Binding> fields_of(const ObjectDecl& o) {
    std::map<std::string, Binding> f;
    for (const auto& v : o.vars) {
      Sym s = intern(o.name + "." + v.name);
      f[v.name] = Binding{kernel::var(s), s};
    }
    return f;
  }

  kernel::ExprPtr expr(const Expr& e, const Scope& scope, const Frame& fr) {
    switch (e.kind) {
      case Expr::Kind::Int:
        return kernel::int_lit(e.value);
      case Expr::Kind::Bool:
        return kernel::bool_lit(e.value != 0);
      case Expr::Kind::Null:
        return kernel::null_lit();
      case Expr::Kind::Name:
        return lookup(scope, e.name).ref;
      case Expr::Kind::Unary:
        return kernel::unary(e.op, expr(e.args.at(0), scope, fr));
      case Expr::Kind::Binary:
        return kernel::binary(e.op, expr(e.args.at(0), scope, fr), expr(e.args.at(1), scope, fr));
      case Expr::Kind::Call: {
        auto [o, m] = resolve(e, fr);
        if (m->body.size() != 1 || m->body[0].kind != Stmt::Kind::Return || !m->body[0].expr) {
          throw AssemblyFault("method '" + m->name + "' cannot be used in an expression");
        }
        Scope inner{fields_of(*o), {}};
        for (std::size_t i = 0; i < m->params.size(); ++i) {
          inner.back()[m->params[i].name] = Binding{expr(e.args.at(i), scope, fr), 0};
        }
        Frame ifr{o, m, 0, o->name + "." + m->name + "."};
        return expr(*m->body[0].expr, inner, ifr);
      }
    }
    throw AssemblyFault("unknown expression");
  }

  TermPtr block(const std::vector<Stmt>& body, Scope& scope, const Frame& fr) {
    scope.emplace_back();
    TermPtr t = from(body, 0, scope, fr);
    scope.pop_back();
    return t;
  }

 private:
  std::pair<const ObjectDecl*, const Method*> resolve(const Expr& call, const Frame& fr) const {
    const ObjectDecl* o = call.object.empty() ? fr.object : spec_.find_object(call.object);
    if (!o) throw AssemblyFault("call of '" + call.name + "' without an object");
    for (const auto& m : o->methods) {
      if (m.name == call.name) return {o, &m};
    }
    throw AssemblyFault("object '" + o->name + "' has no method '" + call.name + "'");
  }

  kernel::ExprPtr thread_lit() const { return kernel::id_lit(thread_); }

  TermPtr sync_event(Sym ch, const ObjectDecl& o, TermPtr k) {
    return emit(ch, {kernel::id_lit(intern(o.name)), thread_lit()}, std::move(k));
  }

  /// Statements i.. of a block; declarations scope over the rest.
  TermPtr from(const std::vector<Stmt>& body, std::size_t i, Scope& scope, const Frame& fr) {
    if (i == body.size()) return kernel::skip();
    const Stmt& s = body[i];
    if (s.kind == Stmt::Kind::VarDecl) {
      Sym v = intern(fr.prefix + s.name);
      const std::size_t top = scope.size() - 1;  // nested blocks may grow `scope`
      std::optional<Binding> shadowed;
      if (auto it = scope[top].find(s.name); it != scope[top].end()) shadowed = it->second;
      TermPtr init;
      if (s.expr->kind == Expr::Kind::Call && !expression_call(*s.expr, fr)) {
        init = call(*s.expr, v, scope, fr);
        scope[top][s.name] = Binding{kernel::var(v), v};
        init = kernel::seq(init, from(body, i + 1, scope, fr));
      } else {
        auto e = expr(*s.expr, scope, fr);
        scope[top][s.name] = Binding{kernel::var(v), v};
        init = kernel::assign(v, e, from(body, i + 1, scope, fr));
      }
      if (shadowed) {
        scope[top][s.name] = *shadowed;
      } else {
        scope[top].erase(s.name);
      }
      return kernel::var_block({kernel::VarDecl{v, domain(s.type)}}, init);
    }
    if (s.kind == Stmt::Kind::Assign) {
      const Sym target = lookup(scope, s.name).sym;
      if (target == 0) throw AssemblyFault("cannot assign to '" + s.name + "'");
      if (s.expr->kind == Expr::Kind::Call && !expression_call(*s.expr, fr)) {
        TermPtr c = call(*s.expr, target, scope, fr);
        return kernel::seq(c, from(body, i + 1, scope, fr));
      }
      auto e = expr(*s.expr, scope, fr);
      return kernel::assign(target, e, from(body, i + 1, scope, fr));
    }
    if (s.kind == Stmt::Kind::Return) {
      if (s.expr && fr.retvar) {
        return kernel::assign(fr.retvar, expr(*s.expr, scope, fr), from(body, i + 1, scope, fr));
      }
      return from(body, i + 1, scope, fr);
    }
    TermPtr rest = from(body, i + 1, scope, fr);
    switch (s.kind) {
      case Stmt::Kind::Call:
        return kernel::seq(call(*s.expr, 0, scope, fr), rest);
      case Stmt::Kind::If:
        return kernel::seq(kernel::if_then_else(expr(*s.expr, scope, fr), block(s.body, scope, fr),
                                                block(s.else_body, scope, fr)),
                           rest);
      case Stmt::Kind::While: {
        Sym X = intern("While" + std::to_string(++loops_));
        auto loop = kernel::rec(
            X, kernel::if_then_else(expr(*s.expr, scope, fr),
                                    kernel::seq(block(s.body, scope, fr), kernel::recvar(X)),
                                    kernel::skip()));
        return kernel::seq(loop, rest);
      }
      case Stmt::Kind::Wait: {
        const auto& c = sync::sync_channels();
        usage_.waits[thread_].insert(intern(fr.object->name));
        usage_.locks[intern(fr.object->name)].insert(thread_);
        return sync_event(c.wait_call, *fr.object, sync_event(c.wait_ret, *fr.object, rest));
      }
      case Stmt::Kind::Notify:
        usage_.locks[intern(fr.object->name)].insert(thread_);
        return sync_event(sync::sync_channels().notify, *fr.object, rest);
      case Stmt::Kind::NotifyAll:
        usage_.locks[intern(fr.object->name)].insert(thread_);
        return sync_event(sync::sync_channels().notify_all, *fr.object, rest);
      case Stmt::Kind::RequestTermination:
        return emit(framework::channels().request_termination,
                    {kernel::id_lit(intern(s.name)), thread_lit()}, rest);
      case Stmt::Kind::Fire:
        return emit(framework::channels().release, {kernel::id_lit(intern(s.name)), thread_lit()},
                    rest);
      case Stmt::Kind::Interrupt:
        usage_.interrupts.insert(thread_);
        return emit(sync::sync_channels().interrupt, {thread_lit()}, rest);
      case Stmt::Kind::Sleep:
        return kernel::seq(kernel::wait(static_cast<std::uint32_t>(s.value)), rest);
      case Stmt::Kind::Probe: {
        Sym label = intern(s.name);
        usage_.probes.insert(label);
        return emit(framework::channels().probe, {kernel::id_lit(label)}, rest);
      }
      default:
        throw AssemblyFault("unexpected statement");
    }
  }

  bool expression_call(const Expr& e, const Frame& fr) const {
    auto [o, m] = resolve(e, fr);
    return is_pure(spec_, *o, *m) && m->body.size() == 1 &&
           m->body[0].kind == Stmt::Kind::Return && m->body[0].expr;
  }

  /// Inlines a method call; the result, if any, is assigned to `target`.
  TermPtr call(const Expr& e, Sym target, const Scope& scope, const Frame& fr) {
    auto [o, m] = resolve(e, fr);
    const std::string prefix = o->name + "." + m->name + ".";
    const bool pure = is_pure(spec_, *o, *m);
    const Sym obj = intern(o->name);

    std::vector<kernel::VarDecl> decls;
    Scope inner{fields_of(*o), {}};
    std::vector<Sym> params;
    for (const auto& p : m->params) {
      Sym ps = intern(prefix + p.name);
      params.push_back(ps);
      decls.push_back({ps, domain(p.type)});
      inner.back()[p.name] = Binding{kernel::var(ps), ps};
    }
    Sym retvar = 0;
    if (m->ret != Type::Void) {
      retvar = intern(prefix + "$ret");
      decls.push_back({retvar, domain(m->ret)});
    }
    Frame ifr{o, m, retvar, prefix};
    TermPtr body = block(m->body, inner, ifr);

    TermPtr tail = kernel::skip();
    if (target && retvar) tail = kernel::assign(target, kernel::var(retvar), tail);
    if (!pure) {
      auto value = retvar ? kernel::var(retvar) : kernel::null_lit();
      tail = emit(method_channel(m->name, "Ret"), {kernel::id_lit(obj), thread_lit(), value},
                  tail);
    }
    if (m->sync) {
      const auto& c = sync::sync_channels();
      usage_.locks[obj].insert(thread_);
      body = sync_event(c.start_sync_meth, *o,
                        sync_event(c.lock_acquired, *o,
                                   kernel::seq(body, sync_event(c.end_sync_meth, *o,
                                                                kernel::skip()))));
    }
    body = kernel::seq(body, tail);
    if (!pure) {
      std::vector<kernel::ExprPtr> fields = {kernel::id_lit(obj), thread_lit()};
      for (Sym p : params) fields.push_back(kernel::var(p));
      body = emit(method_channel(m->name, "Call"), fields, body);
    }
    for (std::size_t i = params.size(); i-- > 0;) {
      body = kernel::assign(params[i], expr(e.args.at(i), scope, fr), body);
    }
    if (decls.empty()) return body;
    return kernel::var_block(std::move(decls), body);
  }

  const AppSpec& spec_;
  Config cfg_;
  Sym thread_;
  Usage& usage_;
  int loops_ = 0;
};

void collect_patterns(const kernel::Term& t, std::vector<const EventPattern*>& out,
                      std::set<const kernel::Term*>& seen) {
  if (!seen.insert(&t).second) return;
  using kernel::TermKind;
  if (t.kind == TermKind::Prefix || t.kind == TermKind::Interrupt) out.push_back(&t.pattern);
  if (t.first) collect_patterns(*t.first, out, seen);
  if (t.second) collect_patterns(*t.second, out, seen);
}

class Compiler {
 public:
  Compiler(const AppSpec& spec, const CompileOptions& opts)
      : spec_(spec), opts_(opts), cfg_(spec.effective_config()) {}

  CompiledProgram run() {
    universe();
    fields();
    safelet();
    for (const auto& q : spec_.sequencers) sequencer(q.name, q.missions, 0);
    for (const auto& m : spec_.missions) mission(m);
    for (const auto& s : spec_.schedulables) schedulable(s);
    method_channels();
    monitors();
    out_.universe.probes.assign(usage_.probes.begin(), usage_.probes.end());
    return std::move(out_);
  }

 private:
  void universe() {
    auto& u = out_.universe;
    for (const auto& m : spec_.missions) {
      u.missions.push_back(intern(m.object.name));
      u.objects.push_back(intern(m.object.name));
    }
    for (const auto& q : spec_.sequencers) u.sequencers.push_back(intern(q.name));
    for (const auto& o : spec_.objects) u.objects.push_back(intern(o.name));
    for (const auto& s : spec_.schedulables) {
      u.schedulables.push_back(intern(s.name));
      if (s.kind == SchedKind::Sequencer) u.sequencers.push_back(intern(s.name));
    }
  }

  kernel::IntRange range() const { return {cfg_.int_lo, cfg_.int_hi}; }

  Domain domain(Type t) const {
    return t == Type::Bool ? Domain::booleans() : Domain::ints(cfg_.int_lo, cfg_.int_hi);
  }

  /// Evaluates constant initialisers over the values declared so far.
  void initialise(const std::vector<VarDecl>& vars, const std::string& prefix,
                  Store& store, std::map<Sym, Domain>& domains) {
    Scope scope{{}};
    for (const auto& v : vars) {
      Sym s = intern(prefix + v.name);
      BodyCompiler bc(spec_, 0, usage_);
      auto e = bc.expr(v.init, scope, Frame{});
      Value val = kernel::eval(*e, store, range());
      store.set(s, val);
      domains[s] = domain(v.type);
      scope.back()[v.name] = Binding{kernel::var(s), s};
    }
  }

  void fields() {
    for (const auto& m : spec_.missions) {
      initialise(m.object.vars, m.object.name + ".", out_.shared, out_.shared_domains);
    }
    for (const auto& o : spec_.objects) {
      initialise(o.vars, o.name + ".", out_.shared, out_.shared_domains);
    }
  }

  kernel::Component component(const std::string& id, TermPtr body, int priority) {
    kernel::Component c;
    c.id = intern(id);
    c.term = until_end(std::move(body));
    c.interests = derive_interests(c.term);
    c.timed = kernel::mentions_time(*c.term);
    c.priority = priority;
    c.range = range();
    return c;
  }

  void safelet() {
    const auto& c = framework::channels();
    const auto& s = spec_.safelets.at(0);
    auto seq = s.sequencer ? kernel::id_lit(intern(s.sequencer->text)) : kernel::null_lit();
    auto body = emit(c.get_sequencer_call, {}, emit(c.get_sequencer_ret, {seq}, kernel::skip()));
    out_.components.push_back(component("SafeletApp." + s.name, body, 0));
  }

  void sequencer(const std::string& name, const std::vector<Name>& missions, int priority) {
    const auto& c = framework::channels();
    auto q = kernel::id_lit(intern(name));
    TermPtr body = emit(c.get_next_mission_call, {q},
                        emit(c.get_next_mission_ret, {q, kernel::null_lit()}, kernel::skip()));
    for (auto it = missions.rbegin(); it != missions.rend(); ++it) {
      body = emit(c.get_next_mission_call, {q},
                  emit(c.get_next_mission_ret, {q, kernel::id_lit(intern(it->text))}, body));
    }
    out_.components.push_back(component("SequencerApp." + name, body, priority));
  }

  void mission(const MissionDecl& m) {
    const auto& c = framework::channels();
    Sym id = intern(m.object.name);
    auto M = kernel::id_lit(id);
    TermPtr cleanup = kernel::skip();
    if (m.cleanup) {
      BodyCompiler bc(spec_, id, usage_);
      Scope scope{BodyCompiler::fields_of(m.object)};
      cleanup = bc.block(*m.cleanup, scope, Frame{&m.object, nullptr, 0, m.object.name + ".cleanup."});
    }
    Sym L = intern("MissionApp");
    TermPtr tail = emit(c.mission_cleanup_call, {M},
                        kernel::seq(cleanup, emit(c.mission_cleanup_ret, {M}, kernel::recvar(L))));
    TermPtr init = emit(c.initialize_ret, {M}, tail);
    for (auto it = m.registers.rbegin(); it != m.registers.rend(); ++it) {
      init = emit(c.register_, {kernel::id_lit(intern(it->text)), M}, init);
    }
    auto body = kernel::rec(L, emit(c.initialize_call, {M}, init));
    out_.components.push_back(component("MissionApp." + m.object.name, body, 0));
  }

  void schedulable(const SchedDecl& s) {
    if (s.kind == SchedKind::Sequencer) {
      sequencer(s.name, s.missions, s.priority);
      return;
    }
    const auto& c = framework::channels();
    Sym id = intern(s.name);
    auto h = kernel::id_lit(id);
    BodyCompiler bc(spec_, id, usage_);
    Store store;
    std::map<Sym, Domain> domains;
    initialise(s.vars, "", store, domains);
    Scope scope{{}};
    for (const auto& v : s.vars) scope.back()[v.name] = Binding{kernel::var(intern(v.name)),
                                                                intern(v.name)};
    TermPtr body = bc.block(s.body, scope, Frame{});
    TermPtr term;
    std::string kind;
    if (s.kind == SchedKind::Thread) {
      term = emit(c.run_call, {h}, kernel::seq(body, emit(c.run_ret, {h}, kernel::skip())));
      kind = "ThreadApp.";
    } else {
      Sym X = intern("Handler");
      term = kernel::rec(X, emit(c.handle_event_call, {h},
                                 kernel::seq(body, emit(c.handle_event_ret, {h},
                                                        kernel::recvar(X)))));
      kind = "HandlerApp.";
    }
    auto comp = component(kind + s.name, term, s.priority);
    comp.store = std::move(store);
    comp.domains = std::move(domains);
    out_.components.push_back(std::move(comp));
  }

  void method_channels() {
    const Domain callers = out_.universe.caller_ids();
    std::map<std::string, std::pair<std::vector<Sym>, const Method*>> by_name;
    auto add = [&](const ObjectDecl& o) {
      for (const auto& m : o.methods) {
        if (is_pure(spec_, o, m)) continue;
        auto& entry = by_name[m.name];
        entry.first.push_back(intern(o.name));
        entry.second = &m;
      }
    };
    for (const auto& m : spec_.missions) add(m.object);
    for (const auto& o : spec_.objects) add(o);
    for (auto& [name, entry] : by_name) {
      std::sort(entry.first.begin(), entry.first.end(),
                [](Sym a, Sym b) { return sym_name(a) < sym_name(b); });
      Domain objs = Domain::identifiers(entry.first);
      std::vector<Domain> call_fields = {objs, callers};
      for (const auto& p : entry.second->params) call_fields.push_back(domain(p.type));
      Domain ret = entry.second->ret == Type::Void ? Domain::identifiers({}, true)
                                                   : domain(entry.second->ret).with_null();
      out_.channels.push_back({method_channel(name, "Call"), call_fields});
      out_.channels.push_back({method_channel(name, "Ret"), {objs, callers, ret}});
    }
  }

  int priority_of(Sym thread) const {
    const SchedDecl* s = spec_.find_schedulable(sym_name(thread));
    return s ? s->priority : cfg_.prio_lo;
  }

  void monitors() {
    for (const auto& [obj, threads] : usage_.locks) {
      const ObjectDecl* o = spec_.find_object(sym_name(obj));
      sync::ObjectConfig cfg;
      cfg.object = obj;
      cfg.ceiling = o && o->ceiling ? *o->ceiling : cfg_.prio_hi;
      for (Sym t : threads) cfg.threads[t] = priority_of(t);
      cfg.spurious_wakeups = opts_.spurious_wakeups;
      out_.monitors.push_back(std::move(cfg));
    }
    std::set<Sym> users = usage_.interrupts;
    for (const auto& [obj, threads] : usage_.locks) users.insert(threads.begin(), threads.end());
    for (Sym t : users) {
      ThreadUse tu{t, priority_of(t), {}};
      if (auto it = usage_.waits.find(t); it != usage_.waits.end()) {
        tu.waits_on.assign(it->second.begin(), it->second.end());
      }
      out_.threads.push_back(std::move(tu));
    }
  }

  const AppSpec& spec_;
  CompileOptions opts_;
  Config cfg_;
  BodyCompiler::Usage usage_;
  CompiledProgram out_;
};

}  // namespace

bool is_pure(const AppSpec& spec, const ObjectDecl& o, const Method& m) {
  if (m.sync) return false;
  std::function<bool(const Expr&, const ObjectDecl&)> pure_expr;
  std::function<bool(const std::vector<Stmt>&, const ObjectDecl&)> pure_body;
  auto pure_call = [&](const Expr& e, const ObjectDecl& self) {
    const ObjectDecl* target = e.object.empty() ? &self : spec.find_object(e.object);
    if (!target) return false;
    for (const auto& callee : target->methods) {
      if (callee.name == e.name) {
        if (callee.sync || !pure_body(callee.body, *target)) return false;
        for (const auto& a : e.args) {
          if (!pure_expr(a, self)) return false;
        }
        return true;
      }
    }
    return false;
  };
  pure_expr = [&](const Expr& e, const ObjectDecl& self) {
    if (e.kind == Expr::Kind::Call) return pure_call(e, self);
    return std::all_of(e.args.begin(), e.args.end(),
                       [&](const Expr& a) { return pure_expr(a, self); });
  };
  pure_body = [&](const std::vector<Stmt>& body, const ObjectDecl& self) {
    for (const auto& s : body) {
      switch (s.kind) {
        case Stmt::Kind::VarDecl:
        case Stmt::Kind::Assign:
        case Stmt::Kind::Call:
        case Stmt::Kind::Return:
          if (s.expr && !pure_expr(*s.expr, self)) return false;
          break;
        case Stmt::Kind::If:
        case Stmt::Kind::While:
          if (!pure_expr(*s.expr, self) || !pure_body(s.body, self) ||
              !pure_body(s.else_body, self)) {
            return false;
          }
          break;
        default:
          return false;
      }
    }
    return true;
  };
  return pure_body(m.body, o);
}

std::vector<kernel::Interest> derive_interests(const TermPtr& term) {
  std::vector<const EventPattern*> patterns;
  std::set<const kernel::Term*> seen;
  collect_patterns(*term, patterns, seen);
  std::vector<kernel::Interest> out;
  for (const EventPattern* p : patterns) {
    kernel::Interest in{p->channel, {}};
    for (const auto& f : p->fields) {
      if (f.kind == FieldPattern::Kind::Out && f.expr->op == kernel::Op::Lit) {
        in.fields.push_back(f.expr->lit);
      } else {
        in.fields.push_back(std::nullopt);
      }
    }
    while (!in.fields.empty() && !in.fields.back()) in.fields.pop_back();
    bool dup = std::any_of(out.begin(), out.end(), [&](const kernel::Interest& o) {
      return o.channel == in.channel && o.fields == in.fields;
    });
    if (!dup) out.push_back(std::move(in));
  }
  std::sort(out.begin(), out.end(), [](const kernel::Interest& a, const kernel::Interest& b) {
    if (a.channel != b.channel) return sym_name(a.channel) < sym_name(b.channel);
    return std::lexicographical_compare(
        a.fields.begin(), a.fields.end(), b.fields.begin(), b.fields.end(),
        [](const std::optional<Value>& x, const std::optional<Value>& y) {
          if (!x || !y) return !x && y.has_value();
          return compare(*x, *y) < 0;
        });
  });
  return out;
}

CompiledProgram compile_program(const AppSpec& spec, const CompileOptions& opts) {
  auto diags = validate_program(spec);
  for (const auto& d : diags) {
    if (d.is_error()) throw AssemblyFault(d.str());
  }
  return Compiler(spec, opts).run();
}

}  // namespace scj2::app
