#include "scj2/checker/checks.hpp"

#include <functional>

#include "scj2/sync/protocol.hpp"

namespace scj2::check {

using kernel::Label;

const char* status_name(Status s) {
  switch (s) {
    case Status::Holds: return "holds";
    case Status::Fails: return "fails";
    case Status::Inconclusive: return "inconclusive";
  }
  return "?";
}

std::optional<Relation> parse_relation(std::string_view t) {
  if (t == "=" || t == "==" || t == "eq") return Relation::Eq;
  if (t == "<=" || t == "le") return Relation::Le;
  if (t == "<" || t == "lt") return Relation::Lt;
  if (t == ">=" || t == "ge") return Relation::Ge;
  if (t == ">" || t == "gt") return Relation::Gt;
  return std::nullopt;
}

const char* relation_name(Relation r) {
  switch (r) {
    case Relation::Eq: return "=";
    case Relation::Le: return "<=";
    case Relation::Lt: return "<";
    case Relation::Ge: return ">=";
    case Relation::Gt: return ">";
  }
  return "?";
}

namespace {

Verdict base(const StateGraph& g, std::string property) {
  Verdict v;
  v.property = std::move(property);
  v.states = g.nodes.size();
  return v;
}

Verdict finish_holds(const StateGraph& g, Verdict v) {
  if (g.partial) {
    v.status = Status::Inconclusive;
    v.note = "exploration stopped at " + g.limit;
  }
  return v;
}

Verdict fail_at(const StateGraph& g, Verdict v, std::uint32_t n, const kernel::SystemState& s,
                std::optional<Label> last = std::nullopt) {
  v.status = Status::Fails;
  Counterexample cx;
  cx.trace = g.trace_to(n);
  if (last) cx.trace.push_back(*last);
  cx.final_state = s;
  v.counterexample = std::move(cx);
  return v;
}

/// First node (in BFS order) satisfying `pred`, failing there.
Verdict node_search(const StateGraph& g, std::string property,
                    const std::function<bool(const Node&)>& pred) {
  Verdict v = base(g, std::move(property));
  for (std::uint32_t n = 0; n < g.nodes.size(); ++n) {
    const Node& node = g.nodes[n];
    if (node.expanded && pred(node)) {
      return fail_at(g, std::move(v), n, node.witness ? *node.witness : node.state);
    }
  }
  return finish_holds(g, std::move(v));
}

constexpr std::uint32_t kFail = 0xffffffffu;

/// Breadth-first search of the graph extended with a small observer state.
/// `on_edge` gives the observer state after a label, or kFail; `on_stop`
/// says whether a maximal trace ending at a node with that observer state
/// violates the property.
Verdict product_search(const StateGraph& g, Verdict v, std::uint32_t aux_size,
                       const std::function<std::uint32_t(std::uint32_t, const Label&)>& on_edge,
                       const std::function<bool(std::uint32_t)>& on_stop) {
  struct Pair {
    std::uint32_t node, aux, parent;
    std::optional<Label> via;
  };
  std::vector<Pair> pairs = {{0, 0, 0, std::nullopt}};
  std::vector<std::uint8_t> seen(g.nodes.size() * aux_size, 0);
  seen[0] = 1;
  auto trace = [&](std::uint32_t p, std::optional<Label> last) {
    std::vector<Label> out;
    if (last) out.push_back(*last);
    while (p != 0) {
      out.push_back(*pairs[p].via);
      p = pairs[p].parent;
    }
    std::reverse(out.begin(), out.end());
    return out;
  };
  for (std::uint32_t p = 0; p < pairs.size(); ++p) {
    const Pair cur = pairs[p];
    const Node& node = g.nodes[cur.node];
    if (!node.expanded) continue;
    if (node.can_stop() && on_stop(cur.aux)) {
      v.status = Status::Fails;
      v.counterexample = Counterexample{trace(p, std::nullopt),
                                        node.witness ? *node.witness : node.state};
      return v;
    }
    for (const Edge& e : node.edges) {
      std::uint32_t aux = on_edge(cur.aux, e.label);
      if (aux == kFail) {
        v.status = Status::Fails;
        v.counterexample = Counterexample{trace(p, e.label), g.nodes[e.target].state};
        return v;
      }
      std::size_t key = static_cast<std::size_t>(e.target) * aux_size + aux;
      if (!seen[key]) {
        seen[key] = 1;
        pairs.push_back({e.target, aux, p, e.label});
      }
    }
  }
  return finish_holds(g, std::move(v));
}

bool matches(const kernel::ChannelPattern& p, const Label& l) {
  return !l.is_tau() && p.matches(l.event);
}

}  // namespace

Verdict check_deadlock(const StateGraph& g) {
  return node_search(g, "deadlock", [](const Node& n) { return n.deadlock; });
}

Verdict check_divergence(const StateGraph& g) {
  return node_search(g, "divergence", [](const Node& n) { return n.divergent; });
}

Verdict check_faults(const StateGraph& g) {
  Verdict v = node_search(g, "modelFault", [](const Node& n) { return n.fault.has_value(); });
  if (v.status == Status::Fails) {
    for (const auto& n : g.nodes) {
      if (n.fault) {
        v.note = *n.fault;
        break;
      }
    }
  }
  return v;
}

Verdict check_exception(const StateGraph& g, sync::ExceptionKind kind) {
  Verdict v = base(g, std::string("exception ") + sync::exception_name(kind));
  const kernel::Event target{sync::sync_channels().throw_,
                             {Value::id(intern(sync::exception_name(kind)))}};
  for (std::uint32_t n = 0; n < g.nodes.size(); ++n) {
    for (const Edge& e : g.nodes[n].edges) {
      if (e.label.is_event() && e.label.event == target) {
        return fail_at(g, std::move(v), n, g.nodes[e.target].state, e.label);
      }
    }
  }
  return finish_holds(g, std::move(v));
}

Verdict check_event_count(const StateGraph& g, const kernel::ChannelPattern& pattern,
                          std::string_view pattern_text, Relation rel, int n) {
  Verdict v = base(g, "count " + std::string(pattern_text) + " " + relation_name(rel) + " " +
                          std::to_string(n));
  const std::uint32_t cap = static_cast<std::uint32_t>(std::max(n, 0)) + 1;
  auto too_many = [&](std::uint32_t c) {
    switch (rel) {
      case Relation::Eq:
      case Relation::Le: return static_cast<int>(c) > n;
      case Relation::Lt: return static_cast<int>(c) >= n;
      default: return false;
    }
  };
  auto bad_end = [&](std::uint32_t c) {
    switch (rel) {
      case Relation::Eq: return static_cast<int>(c) != n;
      case Relation::Ge: return static_cast<int>(c) < n;
      case Relation::Gt: return static_cast<int>(c) <= n;
      default: return too_many(c);
    }
  };
  if (too_many(0)) {
    // vacuous bound such as `< 0`: the empty trace already violates it
    return fail_at(g, std::move(v), 0, g.nodes[0].state);
  }
  return product_search(
      g, std::move(v), cap + 1,
      [&](std::uint32_t c, const Label& l) {
        if (!matches(pattern, l)) return c;
        std::uint32_t next = std::min(c + 1, cap);
        return too_many(next) ? kFail : next;
      },
      bad_end);
}

Verdict check_order(const StateGraph& g, const kernel::ChannelPattern& before,
                    std::string_view before_text, const kernel::ChannelPattern& after,
                    std::string_view after_text) {
  Verdict v = base(g, "order " + std::string(before_text) + " " + std::string(after_text));
  return product_search(
      g, std::move(v), 2,
      [&](std::uint32_t seen_before, const Label& l) -> std::uint32_t {
        if (matches(after, l) && !seen_before) return kFail;
        return seen_before || matches(before, l) ? 1 : 0;
      },
      [](std::uint32_t) { return false; });
}

Verdict check_alternation(const StateGraph& g, const kernel::ChannelPattern& first,
                          std::string_view first_text, const kernel::ChannelPattern& second,
                          std::string_view second_text) {
  Verdict v =
      base(g, "alternation " + std::string(first_text) + " " + std::string(second_text));
  return product_search(
      g, std::move(v), 2,
      [&](std::uint32_t pending, const Label& l) -> std::uint32_t {
        if (matches(first, l)) return pending ? kFail : 1;
        if (matches(second, l)) return 0;
        return pending;
      },
      [](std::uint32_t) { return false; });
}

bool replays(const kernel::Composition& comp, const Counterexample& cx,
             const ExploreLimits& limits) {
  std::vector<kernel::Event> events;
  for (const auto& l : cx.trace) events.push_back(l.event);
  auto states = replay(comp, events, limits);
  return std::any_of(states.begin(), states.end(),
                     [&](const kernel::SystemState& s) { return s == cx.final_state; });
}

}  // namespace scj2::check
