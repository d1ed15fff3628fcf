#include "scj2/kernel/term.hpp"

#include <algorithm>
#include <set>

#include "scj2/kernel/errors.hpp"

namespace scj2::kernel {

namespace {

std::vector<Sym> merge_free(const std::vector<Sym>& a, const std::vector<Sym>& b) {
  std::vector<Sym> out;
  std::set_union(a.begin(), a.end(), b.begin(), b.end(), std::back_inserter(out));
  return out;
}

std::uint64_t decls_hash(const std::vector<VarDecl>& decls) {
  std::uint64_t h = 0xdec1;
  for (const auto& d : decls) {
    h = hash_mix(h, sym_hash(d.name));
    h = hash_mix(h, static_cast<std::uint64_t>(d.domain.kind) * 31 +
                        static_cast<std::uint64_t>(d.domain.lo) * 7 +
                        static_cast<std::uint64_t>(d.domain.hi));
  }
  return h;
}

TermPtr finish(std::shared_ptr<Term> t) {
  std::uint64_t h = static_cast<std::uint64_t>(t->kind) * 0x9e3779b1ULL + 1;
  switch (t->kind) {
    case TermKind::Prefix:
    case TermKind::Interrupt:
      h = hash_mix(h, t->pattern.hash());
      break;
    case TermKind::Guard:
    case TermKind::Assign:
      h = hash_mix(h, t->expr->hash);
      break;
    default:
      break;
  }
  if (t->kind == TermKind::Recursion || t->kind == TermKind::RecVar ||
      t->kind == TermKind::Assign) {
    h = hash_mix(h, sym_hash(t->name));
  }
  if (t->kind == TermKind::Wait) h = hash_mix(h, t->ticks);
  if (t->kind == TermKind::VarBlock) {
    h = hash_mix(h, decls_hash(*t->decls));
    for (const auto& v : t->values) h = hash_mix(h, v.hash());
  }
  if (t->first) h = hash_mix(h, t->first->hash);
  if (t->second) h = hash_mix(h, t->second->hash);
  t->hash = h;

  if (t->kind == TermKind::RecVar) {
    t->free_recvars = {t->name};
  } else {
    std::vector<Sym> fv;
    if (t->first) fv = t->first->free_recvars;
    if (t->second) fv = merge_free(fv, t->second->free_recvars);
    if (t->kind == TermKind::Recursion) {
      fv.erase(std::remove(fv.begin(), fv.end(), t->name), fv.end());
    }
    t->free_recvars = std::move(fv);
  }
  return t;
}

std::shared_ptr<Term> node(TermKind k) {
  auto t = std::make_shared<Term>();
  t->kind = k;
  return t;
}

bool has_free(const Term& t, Sym x) {
  return std::binary_search(t.free_recvars.begin(), t.free_recvars.end(), x);
}

TermPtr subst(const TermPtr& t, Sym x, const TermPtr& repl) {
  if (!has_free(*t, x)) return t;
  switch (t->kind) {
    case TermKind::RecVar:
      return repl;
    case TermKind::Prefix:
      return prefix(t->pattern, subst(t->first, x, repl));
    case TermKind::Guard:
      return guard(t->expr, subst(t->first, x, repl));
    case TermKind::Seq:
      return seq(subst(t->first, x, repl), subst(t->second, x, repl));
    case TermKind::ExtChoice:
      return choice(subst(t->first, x, repl), subst(t->second, x, repl));
    case TermKind::Interrupt:
      return interrupt(subst(t->first, x, repl), t->pattern);
    case TermKind::Recursion:
      return rec(t->name, subst(t->first, x, repl));
    case TermKind::Assign:
      return assign(t->name, t->expr, subst(t->first, x, repl));
    case TermKind::VarBlock:
      return var_block(t->decls, t->values, subst(t->first, x, repl));
    case TermKind::Atomic:
      return atomic(subst(t->first, x, repl));
    default:
      return t;
  }
}

}  // namespace

TermPtr skip() {
  static const TermPtr s = finish(node(TermKind::Skip));
  return s;
}

TermPtr chaos() {
  static const TermPtr c = finish(node(TermKind::Chaos));
  return c;
}

TermPtr stop() {
  static const TermPtr s = guard(bool_lit(false), skip());
  return s;
}

TermPtr prefix(EventPattern p, TermPtr k) {
  auto t = node(TermKind::Prefix);
  t->pattern = std::move(p);
  t->first = std::move(k);
  return finish(t);
}

TermPtr guard(ExprPtr cond, TermPtr body) {
  auto t = node(TermKind::Guard);
  t->expr = std::move(cond);
  t->first = std::move(body);
  return finish(t);
}

TermPtr seq(TermPtr a, TermPtr b) {
  if (a->kind == TermKind::Skip) return b;
  if (a->kind == TermKind::Chaos) return a;
  if (b->kind == TermKind::Skip) return a;
  auto t = node(TermKind::Seq);
  t->first = std::move(a);
  t->second = std::move(b);
  return finish(t);
}

TermPtr seq(const std::vector<TermPtr>& parts) {
  TermPtr acc = skip();
  for (auto it = parts.rbegin(); it != parts.rend(); ++it) acc = seq(*it, acc);
  return acc;
}

TermPtr choice(TermPtr a, TermPtr b) {
  auto t = node(TermKind::ExtChoice);
  t->first = std::move(a);
  t->second = std::move(b);
  return finish(t);
}

TermPtr choice(const std::vector<TermPtr>& alts) {
  if (alts.empty()) return stop();
  TermPtr acc = alts.back();
  for (auto it = alts.rbegin() + 1; it != alts.rend(); ++it) acc = choice(*it, acc);
  return acc;
}

TermPtr interrupt(TermPtr body, EventPattern p) {
  if (body->kind == TermKind::Skip || body->kind == TermKind::Chaos) return body;
  auto t = node(TermKind::Interrupt);
  t->first = std::move(body);
  t->pattern = std::move(p);
  return finish(t);
}

TermPtr rec(Sym name, TermPtr body) {
  auto t = node(TermKind::Recursion);
  t->name = name;
  t->first = std::move(body);
  return finish(t);
}

TermPtr recvar(Sym name) {
  auto t = node(TermKind::RecVar);
  t->name = name;
  return finish(t);
}

TermPtr wait(std::uint32_t ticks) {
  if (ticks == 0) return skip();
  auto t = node(TermKind::Wait);
  t->ticks = ticks;
  return finish(t);
}

TermPtr assign(Sym var, ExprPtr e, TermPtr k) {
  auto t = node(TermKind::Assign);
  t->name = var;
  t->expr = std::move(e);
  t->first = std::move(k);
  return finish(t);
}

TermPtr var_block(std::vector<VarDecl> decls, TermPtr body) {
  std::vector<Value> values;
  for (const auto& d : decls) values.push_back(d.domain.minimum());
  return var_block(std::make_shared<const std::vector<VarDecl>>(std::move(decls)),
                   std::move(values), std::move(body));
}

TermPtr var_block(std::shared_ptr<const std::vector<VarDecl>> decls,
                  std::vector<Value> values, TermPtr body) {
  if (body->kind == TermKind::Skip || body->kind == TermKind::Chaos) return body;
  auto t = node(TermKind::VarBlock);
  t->decls = std::move(decls);
  t->values = std::move(values);
  t->first = std::move(body);
  return finish(t);
}

TermPtr atomic(TermPtr body) {
  if (body->kind == TermKind::Skip || body->kind == TermKind::Chaos) return body;
  auto t = node(TermKind::Atomic);
  t->first = std::move(body);
  return finish(t);
}

TermPtr if_then_else(ExprPtr c, TermPtr a, TermPtr b) {
  return choice(guard(c, std::move(a)), guard(not_(c), std::move(b)));
}

TermPtr unfold(const TermPtr& r) {
  if (r->kind != TermKind::Recursion) return r;
  std::call_once(r->unfold_once,
                 [&r] { r->unfolded = subst(r->first, r->name, r); });
  return r->unfolded;
}

TermPtr head_normal(TermPtr t) {
  for (int i = 0; t->kind == TermKind::Recursion; ++i) {
    if (i > 64) {
      throw WellFormednessFault("unguarded recursion " + sym_name(t->name));
    }
    t = unfold(t);
  }
  return t;
}

bool equal(const Term& a, const Term& b) {
  if (&a == &b) return true;
  if (a.hash != b.hash || a.kind != b.kind) return false;
  switch (a.kind) {
    case TermKind::Prefix:
    case TermKind::Interrupt:
      if (!equal(a.pattern, b.pattern)) return false;
      break;
    case TermKind::Guard:
    case TermKind::Assign:
      if (!equal(*a.expr, *b.expr)) return false;
      break;
    default:
      break;
  }
  if (a.name != b.name || a.ticks != b.ticks) return false;
  if (a.kind == TermKind::VarBlock) {
    if (a.values != b.values) return false;
    if (a.decls != b.decls) {
      if (a.decls->size() != b.decls->size()) return false;
      for (std::size_t i = 0; i < a.decls->size(); ++i) {
        if ((*a.decls)[i].name != (*b.decls)[i].name ||
            !((*a.decls)[i].domain == (*b.decls)[i].domain)) {
          return false;
        }
      }
    }
  }
  if ((a.first == nullptr) != (b.first == nullptr)) return false;
  if ((a.second == nullptr) != (b.second == nullptr)) return false;
  if (a.first && !equal(a.first, b.first)) return false;
  if (a.second && !equal(a.second, b.second)) return false;
  return true;
}

std::string to_string(const Term& t) {
  switch (t.kind) {
    case TermKind::Skip:
      return "Skip";
    case TermKind::Chaos:
      return "Chaos";
    case TermKind::Prefix:
      return t.pattern.str() + " -> " + to_string(*t.first);
    case TermKind::Guard:
      return "[" + to_string(*t.expr) + "] & " + to_string(*t.first);
    case TermKind::Seq:
      return "(" + to_string(*t.first) + " ; " + to_string(*t.second) + ")";
    case TermKind::ExtChoice:
      return "(" + to_string(*t.first) + " [] " + to_string(*t.second) + ")";
    case TermKind::Interrupt:
      return "(" + to_string(*t.first) + " /\\ " + t.pattern.str() + ")";
    case TermKind::Recursion:
      return "mu " + sym_name(t.name) + " . " + to_string(*t.first);
    case TermKind::RecVar:
      return sym_name(t.name);
    case TermKind::Wait:
      return "wait " + std::to_string(t.ticks);
    case TermKind::Assign:
      return sym_name(t.name) + " := " + to_string(*t.expr) + " ; " +
             to_string(*t.first);
    case TermKind::VarBlock: {
      std::string s = "var ";
      for (std::size_t i = 0; i < t.decls->size(); ++i) {
        if (i) s += ", ";
        s += sym_name((*t.decls)[i].name) + "=" + t.values[i].str();
      }
      return s + " . " + to_string(*t.first);
    }
    case TermKind::Atomic:
      return "atomic(" + to_string(*t.first) + ")";
  }
  return "?";
}

std::string position(const Term& t, std::size_t max_len) {
  std::string s = to_string(t);
  if (s.size() > max_len) s = s.substr(0, max_len) + "...";
  return s;
}

bool mentions_time(const Term& t) {
  if (t.kind == TermKind::Wait) return true;
  if (t.first && mentions_time(*t.first)) return true;
  if (t.second && mentions_time(*t.second)) return true;
  return false;
}

namespace {
void collect_channels(const Term& t, std::set<Sym>& out) {
  if (t.kind == TermKind::Prefix || t.kind == TermKind::Interrupt) {
    out.insert(t.pattern.channel);
  }
  if (t.first) collect_channels(*t.first, out);
  if (t.second) collect_channels(*t.second, out);
}
}  // namespace

std::vector<Sym> mentioned_channels(const Term& t) {
  std::set<Sym> out;
  collect_channels(t, out);
  return {out.begin(), out.end()};
}

bool is_terminated(const Term& t) { return t.kind == TermKind::Skip; }
bool is_divergent(const Term& t) { return t.kind == TermKind::Chaos; }

}  // namespace scj2::kernel
