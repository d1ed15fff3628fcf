#include "scj2/kernel/semantics.hpp"

#include "scj2/kernel/errors.hpp"

namespace scj2::kernel {

std::string Label::str() const {
  switch (kind) {
    case Kind::Tau:
      return "tau";
    case Kind::Tick:
      return "tick()";
    case Kind::Event:
      return event.str();
  }
  return "?";
}

std::optional<Value> Env::lookup(Sym var) const {
  for (auto it = frames.rbegin(); it != frames.rend(); ++it) {
    const auto& decls = *it->decls;
    for (std::size_t i = 0; i < decls.size(); ++i) {
      if (decls[i].name == var) return it->values[i];
    }
  }
  if (auto v = local.get(var)) return v;
  return shared.get(var);
}

namespace {

constexpr int kMaxUnfold = 64;

Value evaluate(const Expr& e, const Env& env, const StepContext& ctx) {
  return eval(
      e, [&env](Sym s) { return env.lookup(s); }, ctx.range);
}

void check_domain(const Domain& d, Sym var, const Value& v) {
  if (!d.contains(v)) {
    throw ModelRangeFault("value " + v.str() + " outside domain " + d.str() +
                          " of " + sym_name(var));
  }
}

}  // namespace

void assign_var(Env& env, Sym var, Value v, const StepContext& ctx) {
  for (auto it = env.frames.rbegin(); it != env.frames.rend(); ++it) {
    const auto& decls = *it->decls;
    for (std::size_t i = 0; i < decls.size(); ++i) {
      if (decls[i].name == var) {
        check_domain(decls[i].domain, var, v);
        it->values[i] = v;
        return;
      }
    }
  }
  if (env.local.contains(var)) {
    if (ctx.local_domains) {
      auto d = ctx.local_domains->find(var);
      if (d != ctx.local_domains->end()) check_domain(d->second, var, v);
    }
    env.local.update(var, v);
    return;
  }
  if (env.shared.contains(var)) {
    if (ctx.shared_domains) {
      auto d = ctx.shared_domains->find(var);
      if (d != ctx.shared_domains->end()) check_domain(d->second, var, v);
    }
    env.shared.update(var, v);
    return;
  }
  throw WellFormednessFault("assignment to undeclared variable " + sym_name(var));
}

namespace {

/// Binding check for inputs: values outside the target's domain are simply
/// not offered.
bool var_admits(const Env& env, Sym var, const Value& v, const StepContext& ctx) {
  for (auto it = env.frames.rbegin(); it != env.frames.rend(); ++it) {
    const auto& decls = *it->decls;
    for (std::size_t i = 0; i < decls.size(); ++i) {
      if (decls[i].name == var) return decls[i].domain.contains(v);
    }
  }
  if (env.local.contains(var)) {
    if (!ctx.local_domains) return true;
    auto d = ctx.local_domains->find(var);
    return d == ctx.local_domains->end() || d->second.contains(v);
  }
  if (env.shared.contains(var)) {
    if (!ctx.shared_domains) return true;
    auto d = ctx.shared_domains->find(var);
    return d == ctx.shared_domains->end() || d->second.contains(v);
  }
  throw WellFormednessFault("input into undeclared variable " + sym_name(var));
}

void enumerate_pattern(const EventPattern& p, const ChannelDecl& decl,
                       std::size_t idx, Env& env, std::vector<Value>& values,
                       const StepContext& ctx,
                       std::vector<std::pair<Event, Env>>& out) {
  if (idx == p.fields.size()) {
    out.emplace_back(Event{p.channel, values}, env);
    return;
  }
  const auto& f = p.fields[idx];
  const Domain& dom = decl.fields[idx];
  if (f.kind == FieldPattern::Kind::Out) {
    Value v = evaluate(*f.expr, env, ctx);
    if (!dom.contains(v)) {
      throw ModelRangeFault("output " + v.str() + " outside domain " +
                            dom.str() + " of " + p.str());
    }
    values.push_back(v);
    enumerate_pattern(p, decl, idx + 1, env, values, ctx, out);
    values.pop_back();
    return;
  }
  static const Sym discard = intern("$_");
  for (const Value& v : dom.values()) {
    if (f.var == discard) {
      values.push_back(v);
      enumerate_pattern(p, decl, idx + 1, env, values, ctx, out);
      values.pop_back();
      continue;
    }
    if (!var_admits(env, f.var, v, ctx)) continue;
    Env bound = env;
    assign_var(bound, f.var, v, ctx);
    if (f.constraint && !evaluate(*f.constraint, bound, ctx).as_bool()) continue;
    values.push_back(v);
    enumerate_pattern(p, decl, idx + 1, bound, values, ctx, out);
    values.pop_back();
  }
}

std::vector<std::pair<Event, Env>> pattern_events(const EventPattern& p,
                                                  const Env& env,
                                                  const StepContext& ctx) {
  const ChannelDecl& decl = ctx.channels->at(p.channel);
  if (decl.arity() != p.fields.size()) {
    throw WellFormednessFault("arity mismatch in " + p.str());
  }
  std::vector<std::pair<Event, Env>> out;
  Env work = env;
  std::vector<Value> values;
  enumerate_pattern(p, decl, 0, work, values, ctx, out);
  return out;
}

void steps_into(const TermPtr& t, const Env& env, const StepContext& ctx,
                int depth, std::vector<LocalStep>& out);

bool can_terminate_impl(const TermPtr& t, const Env& env, const StepContext& ctx,
                        int depth) {
  switch (t->kind) {
    case TermKind::Skip:
      return true;
    case TermKind::Guard:
      return evaluate(*t->expr, env, ctx).as_bool() &&
             can_terminate_impl(t->first, env, ctx, depth);
    case TermKind::Atomic:
      return can_terminate_impl(t->first, env, ctx, depth);
    case TermKind::VarBlock: {
      Env inner = env;
      inner.frames.push_back(Frame{t->decls, t->values});
      return can_terminate_impl(t->first, inner, ctx, depth);
    }
    case TermKind::Recursion:
      if (depth > kMaxUnfold) {
        throw WellFormednessFault("unguarded recursion " + sym_name(t->name));
      }
      return can_terminate_impl(unfold(t), env, ctx, depth + 1);
    default:
      return false;
  }
}

void steps_into(const TermPtr& t, const Env& env, const StepContext& ctx,
                int depth, std::vector<LocalStep>& out) {
  switch (t->kind) {
    case TermKind::Skip:
    case TermKind::Chaos:
    case TermKind::Wait:
      return;
    case TermKind::RecVar:
      throw WellFormednessFault("unbound recursion variable " + sym_name(t->name));
    case TermKind::Prefix:
      for (auto& [ev, bound] : pattern_events(t->pattern, env, ctx)) {
        out.push_back({Label::of(std::move(ev)), t->first, std::move(bound)});
      }
      return;
    case TermKind::Guard:
      if (evaluate(*t->expr, env, ctx).as_bool()) {
        steps_into(t->first, env, ctx, depth, out);
      }
      return;
    case TermKind::Seq: {
      if (can_terminate_impl(t->first, env, ctx, depth)) {
        out.push_back({Label::tau(), t->second, env});
      }
      std::vector<LocalStep> inner;
      steps_into(t->first, env, ctx, depth, inner);
      for (auto& s : inner) {
        out.push_back({std::move(s.label), seq(s.term, t->second), std::move(s.env)});
      }
      return;
    }
    case TermKind::ExtChoice:
      // Termination of either side resolves the choice, as does any step.
      if (can_terminate_impl(t->first, env, ctx, depth) ||
          can_terminate_impl(t->second, env, ctx, depth)) {
        out.push_back({Label::tau(), skip(), env});
      }
      steps_into(t->first, env, ctx, depth, out);
      steps_into(t->second, env, ctx, depth, out);
      return;
    case TermKind::Interrupt: {
      if (can_terminate_impl(t->first, env, ctx, depth)) {
        out.push_back({Label::tau(), skip(), env});
      }
      std::vector<LocalStep> inner;
      steps_into(t->first, env, ctx, depth, inner);
      for (auto& s : inner) {
        out.push_back(
            {std::move(s.label), interrupt(s.term, t->pattern), std::move(s.env)});
      }
      for (auto& [ev, bound] : pattern_events(t->pattern, env, ctx)) {
        out.push_back({Label::of(std::move(ev)), skip(), std::move(bound)});
      }
      return;
    }
    case TermKind::Recursion:
      if (depth > kMaxUnfold) {
        throw WellFormednessFault("unguarded recursion " + sym_name(t->name));
      }
      steps_into(unfold(t), env, ctx, depth + 1, out);
      return;
    case TermKind::Assign: {
      Env next = env;
      assign_var(next, t->name, evaluate(*t->expr, env, ctx), ctx);
      out.push_back({Label::tau(), t->first, std::move(next)});
      return;
    }
    case TermKind::VarBlock: {
      Env inner_env = env;
      inner_env.frames.push_back(Frame{t->decls, t->values});
      if (can_terminate_impl(t->first, inner_env, ctx, depth)) {
        out.push_back({Label::tau(), skip(), env});
      }
      std::vector<LocalStep> inner;
      steps_into(t->first, inner_env, ctx, depth, inner);
      for (auto& s : inner) {
        Frame f = std::move(s.env.frames.back());
        s.env.frames.pop_back();
        out.push_back({std::move(s.label),
                       var_block(t->decls, std::move(f.values), s.term),
                       std::move(s.env)});
      }
      return;
    }
    case TermKind::Atomic: {
      if (can_terminate_impl(t->first, env, ctx, depth)) {
        out.push_back({Label::tau(), skip(), env});
      }
      std::vector<LocalStep> inner;
      steps_into(t->first, env, ctx, depth, inner);
      for (auto& s : inner) {
        out.push_back({std::move(s.label), atomic(s.term), std::move(s.env)});
      }
      return;
    }
  }
}

std::optional<TermPtr> tick_impl(const TermPtr& t, const Env& env,
                                 const StepContext& ctx, int depth) {
  switch (t->kind) {
    case TermKind::Skip:
    case TermKind::Prefix:
      return t;
    case TermKind::Chaos:
    case TermKind::Assign:
      return std::nullopt;
    case TermKind::RecVar:
      throw WellFormednessFault("unbound recursion variable " + sym_name(t->name));
    case TermKind::Wait:
      return wait(t->ticks - 1);
    case TermKind::Guard: {
      if (!evaluate(*t->expr, env, ctx).as_bool()) return t;
      auto b = tick_impl(t->first, env, ctx, depth);
      if (!b) return std::nullopt;
      return *b == t->first ? t : guard(t->expr, *b);
    }
    case TermKind::Seq: {
      if (can_terminate_impl(t->first, env, ctx, depth)) return std::nullopt;
      auto a = tick_impl(t->first, env, ctx, depth);
      if (!a) return std::nullopt;
      return *a == t->first ? t : seq(*a, t->second);
    }
    case TermKind::ExtChoice: {
      if (can_terminate_impl(t->first, env, ctx, depth) ||
          can_terminate_impl(t->second, env, ctx, depth)) {
        return std::nullopt;
      }
      auto a = tick_impl(t->first, env, ctx, depth);
      if (!a) return std::nullopt;
      auto b = tick_impl(t->second, env, ctx, depth);
      if (!b) return std::nullopt;
      if (*a == t->first && *b == t->second) return t;
      return choice(*a, *b);
    }
    case TermKind::Interrupt: {
      if (can_terminate_impl(t->first, env, ctx, depth)) return std::nullopt;
      auto b = tick_impl(t->first, env, ctx, depth);
      if (!b) return std::nullopt;
      return *b == t->first ? t : interrupt(*b, t->pattern);
    }
    case TermKind::Recursion:
      if (depth > kMaxUnfold) {
        throw WellFormednessFault("unguarded recursion " + sym_name(t->name));
      }
      return tick_impl(unfold(t), env, ctx, depth + 1);
    case TermKind::VarBlock: {
      Env inner = env;
      inner.frames.push_back(Frame{t->decls, t->values});
      if (can_terminate_impl(t->first, inner, ctx, depth)) return std::nullopt;
      auto b = tick_impl(t->first, inner, ctx, depth);
      if (!b) return std::nullopt;
      return *b == t->first ? t : var_block(t->decls, t->values, *b);
    }
    case TermKind::Atomic: {
      if (can_terminate_impl(t->first, env, ctx, depth)) return std::nullopt;
      auto b = tick_impl(t->first, env, ctx, depth);
      if (!b) return std::nullopt;
      return *b == t->first ? t : atomic(*b);
    }
  }
  return std::nullopt;
}

}  // namespace

std::vector<LocalStep> term_steps(const TermPtr& term, const Env& env,
                                  const StepContext& ctx) {
  std::vector<LocalStep> out;
  steps_into(term, env, ctx, 0, out);
  for (auto& s : out) s.term = head_normal(s.term);
  return out;
}

std::optional<TermPtr> term_tick(const TermPtr& term, const Env& env,
                                 const StepContext& ctx) {
  auto t = tick_impl(term, env, ctx, 0);
  if (t) t = head_normal(*t);
  return t;
}

bool can_terminate(const TermPtr& term, const Env& env, const StepContext& ctx) {
  return can_terminate_impl(term, env, ctx, 0);
}

bool in_atomic(const Term& t) {
  switch (t.kind) {
    case TermKind::Atomic:
      return true;
    case TermKind::Seq:
    case TermKind::Interrupt:
    case TermKind::VarBlock:
      return in_atomic(*t.first);
    default:
      return false;
  }
}

}  // namespace scj2::kernel
