#ifndef SCJ2_CHECKER_EXPLORE_HPP_
#define SCJ2_CHECKER_EXPLORE_HPP_

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "scj2/kernel/semantics.hpp"
#include "scj2/kernel/system.hpp"

namespace scj2::check {

enum class Mode : std::uint8_t { Free, Priority };

struct ExploreLimits {
  std::size_t max_states = 5'000'000;
  std::size_t max_depth = 0;  // 0: unbounded
  std::uint32_t max_ticks = 0;
  Mode mode = Mode::Free;
  bool spurious_wakeups = false;  // applied when the model is assembled
  unsigned workers = 1;

  kernel::SystemOptions system_options() const;
};

/// A visible transition: an event or a tick.
struct Edge {
  kernel::Label label;
  std::uint32_t target = 0;
};

/// A node is a state reached by a visible transition (or the initial
/// state); the states reachable from it by tau alone form its closure.
struct Node {
  kernel::SystemState state;
  std::uint32_t parent = 0;
  std::uint32_t depth = 0;
  std::optional<kernel::Label> via;  // label of the BFS tree edge
  std::vector<Edge> edges;           // canonical label order
  bool expanded = false;
  bool terminated = false;  // some closure state has every component finished
  bool deadlock = false;    // some closure state is stuck
  bool divergent = false;   // some closure state contains Chaos
  bool tau_loop = false;    // the closure contains a tau cycle
  std::optional<std::string> fault;  // a model-range or well-formedness fault
  /// Closure state witnessing deadlock/divergence/termination/fault.
  std::optional<kernel::SystemState> witness;

  /// A maximal trace may end here.
  bool can_stop() const { return terminated || deadlock || divergent || fault.has_value(); }
};

struct StateGraph {
  std::vector<Node> nodes;  // nodes[0] is the initial state
  std::size_t edge_count = 0;
  std::size_t closure_states = 0;  // states visited inside tau closures
  std::uint32_t max_depth = 0;
  bool partial = false;
  std::string limit;  // why exploration stopped early

  /// Labels from the initial state to `n` along the BFS tree.
  std::vector<kernel::Label> trace_to(std::uint32_t n) const;
};

/// The tau-closure of one state and the visible transitions leaving it.
struct Expansion {
  std::vector<std::pair<kernel::Label, kernel::SystemState>> succ;  // canonical order
  bool terminated = false, deadlock = false, divergent = false, tau_loop = false;
  std::optional<std::string> fault;
  std::optional<kernel::SystemState> witness;
  std::size_t closure = 0;
};

Expansion expand(const kernel::Composition& comp, const kernel::SystemState& start,
                 const kernel::SystemOptions& opts, kernel::StepCache* cache = nullptr);

/// Breadth-first exploration. Node numbering, edge order and BFS parents
/// are independent of the number of workers.
StateGraph explore(const kernel::Composition& comp, const ExploreLimits& limits);

/// States consistent with having observed `trace` (each step followed by
/// any number of taus). Empty when the trace cannot be replayed.
std::vector<kernel::SystemState> replay(const kernel::Composition& comp,
                                        const std::vector<kernel::Event>& trace,
                                        const ExploreLimits& limits);

/// Canonical label order: channel name, then values; tick is the event
/// `tick()`.
int compare(const kernel::Label& a, const kernel::Label& b);

/// Parses `channel(v,...)` against the channel table; identifiers are
/// interned, `null`, `true`, `false` and integers are literals.
kernel::Event parse_trace_event(const kernel::Composition& comp, std::string_view text);

}  // namespace scj2::check

#endif  // SCJ2_CHECKER_EXPLORE_HPP_
