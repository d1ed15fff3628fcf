#include "scj2/kernel/system.hpp"

#include <algorithm>

#include "scj2/kernel/errors.hpp"

namespace scj2::kernel {

bool Slot::terminated() const {
  return native ? native->terminated() : is_terminated(*term);
}

bool Slot::divergent() const {
  return native ? native->divergent() : is_divergent(*term);
}

std::uint64_t Slot::hash() const {
  std::uint64_t h = native ? hash_mix(0x7a7e, native->hash()) : term->hash;
  return hash_mix(h, store.hash());
}

bool operator==(const Slot& a, const Slot& b) {
  if ((a.native == nullptr) != (b.native == nullptr)) return false;
  if (a.native) {
    if (a.native != b.native && !a.native->equals(*b.native)) return false;
  } else if (!equal(a.term, b.term)) {
    return false;
  }
  return a.store == b.store;
}

void SystemState::rehash() {
  std::uint64_t h = hash_mix(0x5eed, clock);
  h = hash_mix(h, shared.hash());
  for (const auto& s : slots) h = hash_mix(h, s.hash());
  hash = h;
}

bool operator==(const SystemState& a, const SystemState& b) {
  return a.hash == b.hash && a.clock == b.clock && a.shared == b.shared &&
         a.slots == b.slots;
}

Composition::Composition(ChannelTable channels, std::vector<Component> components,
                         Store shared, std::map<Sym, Domain> shared_domains)
    : channels_(std::move(channels)),
      components_(std::move(components)),
      shared_(std::move(shared)),
      shared_domains_(std::move(shared_domains)) {
  for (std::uint32_t i = 0; i < components_.size(); ++i) {
    const auto& c = components_[i];
    if (!index_.emplace(c.id, i).second) {
      throw AssemblyFault("duplicate component id " + sym_name(c.id));
    }
    if (!c.term && !c.native) {
      throw AssemblyFault("component " + sym_name(c.id) + " has no behaviour");
    }
    for (const auto& in : c.interests) {
      const auto& decl = channels_.at(in.channel);
      if (in.fields.size() > decl.arity()) {
        throw AssemblyFault("interest of " + sym_name(c.id) + " in " +
                            sym_name(in.channel) + " has too many fields");
      }
      auto& members = sync_map_[in.channel];
      if (members.empty() || members.back() != i) members.push_back(i);
    }
  }
}

std::optional<std::size_t> Composition::index_of(Sym id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

std::vector<std::uint32_t> Composition::participants(const Event& e) const {
  std::vector<std::uint32_t> out;
  auto it = sync_map_.find(e.channel);
  if (it == sync_map_.end()) return out;
  for (std::uint32_t i : it->second) {
    for (const auto& in : components_[i].interests) {
      if (in.matches(e)) {
        out.push_back(i);
        break;
      }
    }
  }
  return out;
}

bool Composition::drives(std::uint32_t i, const Event& e) const {
  if (components_[i].passive) return false;
  return std::any_of(components_[i].interests.begin(), components_[i].interests.end(),
                     [&](const Interest& in) { return !in.passive && in.matches(e); });
}

SystemState Composition::initial_state() const {
  SystemState s;
  for (const auto& c : components_) {
    Slot slot;
    if (c.native) {
      slot.native = c.native;
    } else {
      slot.term = head_normal(c.term);
    }
    slot.store = c.store;
    s.slots.push_back(std::move(slot));
  }
  s.shared = shared_;
  s.rehash();
  return s;
}

StepContext Composition::context(std::uint32_t index) const {
  StepContext ctx;
  ctx.channels = &channels_;
  ctx.local_domains = &components_[index].domains;
  ctx.shared_domains = &shared_domains_;
  ctx.range = components_[index].range;
  return ctx;
}

std::vector<LocalStep> Composition::component_steps(const SystemState& s,
                                                    std::uint32_t index) const {
  const Slot& slot = s.slots[index];
  if (slot.native) {
    std::vector<LocalStep> out;
    for (auto& st : slot.native->steps()) {
      out.push_back({st.label, nullptr, Env{{}, slot.store, s.shared}});
    }
    return out;
  }
  Env env{{}, slot.store, s.shared};
  return term_steps(slot.term, env, context(index));
}

namespace {

struct Offer {
  std::uint32_t comp = 0;
  const StepCache::Step* step = nullptr;
};

std::vector<Store::Entry> diff(const Store& before, const Store& after) {
  std::vector<Store::Entry> out;
  for (const auto& [k, v] : after.entries()) {
    auto old = before.get(k);
    if (!old || *old != v) out.emplace_back(k, v);
  }
  return out;
}

void apply(SystemState& s, const Offer& o) {
  s.slots[o.comp] = o.step->slot;
  for (const auto& [k, v] : o.step->shared_diff) s.shared.set(k, v);
}

}  // namespace

const StepCache::Entry& Composition::cached_steps(StepCache& cache, std::uint32_t index,
                                                  const SystemState& s) const {
  const Slot& slot = s.slots[index];
  const std::uint64_t h = hash_mix(hash_mix(index, slot.hash()), s.shared.hash());
  auto& bucket = cache.map_[h];
  for (const auto& e : bucket) {
    if (e->comp == index && e->shared == s.shared && e->slot == slot) return *e;
  }
  auto e = std::make_unique<StepCache::Entry>();
  e->comp = index;
  e->slot = slot;
  e->shared = s.shared;
  if (slot.native) {
    for (auto& st : slot.native->steps()) {
      if (st.label.is_tick()) continue;
      e->steps.push_back({st.label, Slot{nullptr, slot.store, st.next}, {}});
    }
  } else {
    e->atomic = in_atomic(*slot.term);
    Env env{{}, slot.store, s.shared};
    for (auto& st : term_steps(slot.term, env, context(index))) {
      e->steps.push_back({st.label, Slot{st.term, std::move(st.env.local), nullptr},
                          diff(s.shared, st.env.shared)});
    }
  }
  for (auto& st : e->steps) {
    if (!st.label.is_event()) continue;
    const Event& ev = st.label.event;
    if (channels_.at(ev.channel).mode == SyncMode::Interleaved) {
      st.interleaved = true;
      continue;
    }
    st.parts = participants(ev);
    if (!std::binary_search(st.parts.begin(), st.parts.end(), index)) {
      throw WellFormednessFault("component " + sym_name(components_[index].id) + " offers " +
                                ev.str() + " outside its interests");
    }
    st.driven = std::any_of(st.parts.begin(), st.parts.end(),
                            [&](std::uint32_t i) { return drives(i, ev); });
  }
  bucket.push_back(std::move(e));
  ++cache.size_;
  return *bucket.back();
}

std::vector<Transition> Composition::system_steps(const SystemState& s,
                                                  const SystemOptions& opts,
                                                  StepCache* cache) const {
  std::vector<Transition> out;
  if (is_terminated(s) || is_divergent(s)) return out;

  StepCache scratch;
  StepCache& sc = cache ? *cache : scratch;
  if (sc.size_ > sc.max_) {
    sc.map_.clear();
    sc.size_ = 0;
  }

  std::vector<Offer> events;
  std::vector<Offer> taus;
  std::optional<std::uint32_t> atomic_owner;

  for (std::uint32_t i = 0; i < s.slots.size(); ++i) {
    const auto& entry = cached_steps(sc, i, s);
    if (!atomic_owner && entry.atomic) atomic_owner = i;
    for (const auto& st : entry.steps) {
      (st.label.is_event() ? events : taus).push_back({i, &st});
    }
  }
  // group offers by event; stable, so each group stays in component order
  std::stable_sort(events.begin(), events.end(), [](const Offer& x, const Offer& y) {
    return EventIdLess{}(x.step->label.event, y.step->label.event);
  });

  std::vector<std::vector<const Offer*>> options;
  for (std::size_t lo = 0, hi = 0; lo < events.size(); lo = hi) {
    const StepCache::Step& head = *events[lo].step;
    const Event& event = head.label.event;
    for (hi = lo + 1; hi < events.size() && events[hi].step->label.event == event; ++hi) {
    }
    if (head.interleaved) {
      for (std::size_t j = lo; j < hi; ++j) {
        Transition t{events[j].step->label, s, {events[j].comp}};
        apply(t.next, events[j]);
        out.push_back(std::move(t));
      }
      continue;
    }
    if (!head.driven) continue;
    // options per participant; the event needs every participant
    const auto& parts = head.parts;
    options.assign(parts.size(), {});
    bool all = true;
    std::size_t j = lo;
    for (std::size_t k = 0; k < parts.size() && all; ++k) {
      while (j < hi && events[j].comp < parts[k]) ++j;
      while (j < hi && events[j].comp == parts[k]) options[k].push_back(&events[j++]);
      all = !options[k].empty();
    }
    if (!all) continue;
    std::vector<std::size_t> pick(parts.size(), 0);
    while (true) {
      Transition t{Label::of(event), s, parts};
      for (std::size_t k = 0; k < parts.size(); ++k) apply(t.next, *options[k][pick[k]]);
      out.push_back(std::move(t));
      std::size_t k = 0;
      while (k < parts.size() && ++pick[k] == options[k].size()) pick[k++] = 0;
      if (k == parts.size()) break;
    }
  }

  for (const auto& o : taus) {
    Transition t{Label::tau(), s, {o.comp}};
    apply(t.next, o);
    out.push_back(std::move(t));
  }

  if (atomic_owner) {
    std::uint32_t a = *atomic_owner;
    std::erase_if(out, [a](const Transition& t) {
      return !std::binary_search(t.participants.begin(), t.participants.end(), a);
    });
  }

  if (opts.priority_faithful && !out.empty()) {
    auto prio = [this](const Transition& t) {
      int p = 0;
      for (auto i : t.participants) p = std::max(p, components_[i].priority);
      return p;
    };
    int top = 0;
    for (const auto& t : out) top = std::max(top, prio(t));
    std::erase_if(out, [&](const Transition& t) {
      int p = prio(t);
      return p != 0 && p != top;
    });
  }

  bool tick_allowed = !atomic_owner && (!opts.maximal_progress || out.empty());
  if (opts.max_ticks > 0 && s.clock >= opts.max_ticks) tick_allowed = false;
  if (tick_allowed) {
    SystemState next = s;
    bool any_timed = false;
    bool ok = true;
    for (std::uint32_t i = 0; i < s.slots.size() && ok; ++i) {
      if (!components_[i].timed || s.slots[i].native) continue;
      any_timed = true;
      Env env{{}, s.slots[i].store, s.shared};
      auto ticked = term_tick(s.slots[i].term, env, context(i));
      if (!ticked) {
        ok = false;
      } else {
        next.slots[i].term = *ticked;
      }
    }
    if (any_timed && ok) {
      if (opts.max_ticks > 0) ++next.clock;
      std::vector<std::uint32_t> timed;
      for (std::uint32_t i = 0; i < components_.size(); ++i) {
        if (components_[i].timed) timed.push_back(i);
      }
      out.push_back({Label::tick(), std::move(next), std::move(timed)});
    }
  }

  for (auto& t : out) t.next.rehash();
  return out;
}

bool Composition::is_terminated(const SystemState& s) const {
  return std::all_of(s.slots.begin(), s.slots.end(),
                     [](const Slot& slot) { return slot.terminated(); });
}

bool Composition::is_divergent(const SystemState& s) const {
  return std::any_of(s.slots.begin(), s.slots.end(),
                     [](const Slot& slot) { return slot.divergent(); });
}

std::vector<std::string> Composition::describe(const SystemState& s) const {
  std::vector<std::string> out;
  for (std::size_t i = 0; i < s.slots.size(); ++i) {
    const auto& slot = s.slots[i];
    std::string line = sym_name(components_[i].id) + ": ";
    line += slot.native ? slot.native->describe() : position(*slot.term);
    if (!slot.store.empty()) line += " " + slot.store.str();
    out.push_back(std::move(line));
  }
  return out;
}

}  // namespace scj2::kernel
