#include "scj2/checker/explore.hpp"

#include <algorithm>
#include <thread>
#include <unordered_map>

#include "scj2/kernel/errors.hpp"

namespace scj2::check {

using kernel::Label;
using kernel::SystemState;

kernel::SystemOptions ExploreLimits::system_options() const {
  kernel::SystemOptions o;
  o.priority_faithful = mode == Mode::Priority;
  o.max_ticks = max_ticks;
  return o;
}

int compare(const Label& a, const Label& b) {
  if (a.is_tau() || b.is_tau()) return static_cast<int>(b.is_tau()) - static_cast<int>(a.is_tau());
  return kernel::compare(a.event, b.event);
}

std::vector<Label> StateGraph::trace_to(std::uint32_t n) const {
  std::vector<Label> out;
  while (n != 0) {
    out.push_back(*nodes[n].via);
    n = nodes[n].parent;
  }
  std::reverse(out.begin(), out.end());
  return out;
}

namespace {

/// Hash index over states kept elsewhere; `at(i)` returns state i.
class StateIndex {
 public:
  /// Index of `s` if present, otherwise registers it under `fresh_id`.
  template <typename At>
  std::pair<std::uint32_t, bool> insert(const SystemState& s, std::uint32_t fresh_id, At&& at) {
    auto [it, fresh] = first_.emplace(s.hash, fresh_id);
    if (!fresh) {
      for (std::uint32_t i = it->second; i != kNone; i = next_[i]) {
        if (at(i) == s) return {i, false};
      }
    }
    if (next_.size() <= fresh_id) next_.resize(fresh_id + 1, kNone);
    if (!fresh) {
      next_[fresh_id] = it->second;
      it->second = fresh_id;
    }
    return {fresh_id, true};
  }

 private:
  static constexpr std::uint32_t kNone = 0xffffffffu;
  std::unordered_map<std::uint64_t, std::uint32_t> first_;
  std::vector<std::uint32_t> next_;
};

/// Deduplicating set of states, insertion ordered.
class StateSet {
 public:
  std::pair<std::uint32_t, bool> insert(const SystemState& s) {
    auto r = index_.insert(s, static_cast<std::uint32_t>(states_.size()),
                           [&](std::uint32_t i) -> const SystemState& { return states_[i]; });
    if (r.second) states_.push_back(s);
    return r;
  }
  const SystemState& operator[](std::uint32_t i) const { return states_[i]; }
  std::size_t size() const { return states_.size(); }

 private:
  StateIndex index_;
  std::vector<SystemState> states_;
};

}  // namespace

Expansion expand(const kernel::Composition& comp, const SystemState& start,
                 const kernel::SystemOptions& opts, kernel::StepCache* cache) {
  Expansion ex;
  StateSet closure;
  closure.insert(start);
  std::vector<std::pair<std::uint32_t, std::uint32_t>> tau_edges;
  for (std::uint32_t i = 0; i < closure.size(); ++i) {
    const SystemState st = closure[i];
    auto note = [&](bool& flag) {
      if (!flag && !ex.witness) ex.witness = st;
      flag = true;
    };
    if (comp.is_divergent(st)) {
      note(ex.divergent);
      continue;
    }
    if (comp.is_terminated(st)) {
      ex.terminated = true;
      continue;
    }
    std::vector<kernel::Transition> steps;
    try {
      steps = comp.system_steps(st, opts, cache);
    } catch (const Error& e) {
      if (!ex.fault) {
        ex.fault = e.what();
        ex.witness = st;
      }
      continue;
    }
    if (steps.empty()) note(ex.deadlock);
    for (auto& t : steps) {
      if (t.label.is_tau()) {
        auto [j, fresh] = closure.insert(t.next);
        tau_edges.emplace_back(i, j);
        (void)fresh;
      } else {
        ex.succ.emplace_back(std::move(t.label), std::move(t.next));
      }
    }
  }
  ex.closure = closure.size();

  // tau cycle: Kahn's algorithm leaves some state unremoved
  std::vector<std::uint32_t> indeg(closure.size(), 0);
  std::vector<std::vector<std::uint32_t>> out(closure.size());
  for (auto [a, b] : tau_edges) {
    out[a].push_back(b);
    ++indeg[b];
  }
  std::vector<std::uint32_t> ready;
  for (std::uint32_t i = 0; i < indeg.size(); ++i) {
    if (indeg[i] == 0) ready.push_back(i);
  }
  std::size_t removed = 0;
  while (!ready.empty()) {
    std::uint32_t n = ready.back();
    ready.pop_back();
    ++removed;
    for (std::uint32_t m : out[n]) {
      if (--indeg[m] == 0) ready.push_back(m);
    }
  }
  ex.tau_loop = removed != closure.size();

  std::stable_sort(ex.succ.begin(), ex.succ.end(),
                   [](const auto& a, const auto& b) { return compare(a.first, b.first) < 0; });
  // identical (label, state) pairs reached through different tau paths
  std::vector<std::pair<Label, SystemState>> unique;
  for (auto& p : ex.succ) {
    bool dup = false;
    for (auto it = unique.rbegin(); it != unique.rend() && compare(it->first, p.first) == 0; ++it) {
      if (it->second.hash == p.second.hash && it->second == p.second) {
        dup = true;
        break;
      }
    }
    if (!dup) unique.push_back(std::move(p));
  }
  ex.succ = std::move(unique);
  return ex;
}

StateGraph explore(const kernel::Composition& comp, const ExploreLimits& limits) {
  const auto opts = limits.system_options();
  StateGraph g;
  StateIndex seen;
  auto at = [&](std::uint32_t i) -> const SystemState& { return g.nodes[i].state; };
  g.nodes.emplace_back();
  g.nodes[0].state = comp.initial_state();
  seen.insert(g.nodes[0].state, 0, at);

  std::vector<std::uint32_t> layer = {0};
  const unsigned workers = std::max(1u, limits.workers);
  std::vector<kernel::StepCache> caches(workers);
  while (!layer.empty() && !g.partial) {
    std::uint32_t depth = g.nodes[layer.front()].depth;
    if (limits.max_depth && depth >= limits.max_depth) {
      g.partial = true;
      g.limit = "max-depth";
      break;
    }
    std::vector<Expansion> results(layer.size());
    auto work = [&](kernel::StepCache* cache, std::size_t from, std::size_t to) {
      for (std::size_t i = from; i < to; ++i) {
        results[i] = expand(comp, g.nodes[layer[i]].state, opts, cache);
      }
    };
    if (workers == 1 || layer.size() < 64) {
      work(&caches[0], 0, layer.size());
    } else {
      std::vector<std::thread> pool;
      std::size_t chunk = (layer.size() + workers - 1) / workers;
      for (unsigned w = 0; w < workers; ++w) {
        std::size_t from = w * chunk, to = std::min(layer.size(), from + chunk);
        if (from < to) pool.emplace_back(work, &caches[w], from, to);
      }
      for (auto& t : pool) t.join();
    }

    // sequential merge in layer order keeps numbering deterministic
    std::vector<std::uint32_t> next_layer;
    for (std::size_t i = 0; i < layer.size(); ++i) {
      Expansion& ex = results[i];
      const std::uint32_t n = layer[i];
      g.closure_states += ex.closure;
      {
        Node& node = g.nodes[n];
        node.expanded = true;
        node.terminated = ex.terminated;
        node.deadlock = ex.deadlock;
        node.divergent = ex.divergent;
        node.tau_loop = ex.tau_loop;
        node.fault = ex.fault;
        node.witness = std::move(ex.witness);
      }
      for (auto& [label, state] : ex.succ) {
        if (g.nodes.size() >= limits.max_states) {
          g.partial = true;
          g.limit = "max-states";
          continue;
        }
        auto [idx, fresh] = seen.insert(state, static_cast<std::uint32_t>(g.nodes.size()), at);
        const std::uint32_t target = idx;
        if (fresh) {
          Node fresh_node;
          fresh_node.state = std::move(state);
          fresh_node.parent = n;
          fresh_node.depth = depth + 1;
          fresh_node.via = label;
          g.nodes.push_back(std::move(fresh_node));
          next_layer.push_back(idx);
          g.max_depth = std::max(g.max_depth, depth + 1);
        }
        g.nodes[n].edges.push_back(Edge{label, target});
        ++g.edge_count;
      }
    }
    layer = std::move(next_layer);
  }
  return g;
}

std::vector<SystemState> replay(const kernel::Composition& comp,
                                const std::vector<kernel::Event>& trace,
                                const ExploreLimits& limits) {
  const auto opts = limits.system_options();
  kernel::StepCache cache;
  auto close = [&](std::vector<SystemState> states) {
    StateSet set;
    for (const auto& s : states) set.insert(s);
    for (std::uint32_t i = 0; i < set.size(); ++i) {
      const SystemState st = set[i];
      if (comp.is_divergent(st) || comp.is_terminated(st)) continue;
      for (auto& t : comp.system_steps(st, opts, &cache)) {
        if (t.label.is_tau()) set.insert(t.next);
      }
    }
    std::vector<SystemState> out;
    for (std::uint32_t i = 0; i < set.size(); ++i) out.push_back(set[i]);
    return out;
  };
  std::vector<SystemState> current = close({comp.initial_state()});
  for (const auto& e : trace) {
    std::vector<SystemState> next;
    for (const auto& st : current) {
      if (comp.is_divergent(st) || comp.is_terminated(st)) continue;
      for (auto& t : comp.system_steps(st, opts, &cache)) {
        if (!t.label.is_tau() && t.label.event == e) next.push_back(std::move(t.next));
      }
    }
    if (next.empty()) return {};
    current = close(std::move(next));
  }
  return current;
}

kernel::Event parse_trace_event(const kernel::Composition& comp, std::string_view text) {
  auto e = kernel::parse_event(text, comp.channels());
  if (!e) throw Error("not an event of this model: " + std::string(text));
  return *e;
}

}  // namespace scj2::check
