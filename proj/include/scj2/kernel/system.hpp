#ifndef SCJ2_KERNEL_SYSTEM_HPP_
#define SCJ2_KERNEL_SYSTEM_HPP_

#include <cstdint>
#include <map>
#include <memory>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "scj2/kernel/event.hpp"
#include "scj2/kernel/semantics.hpp"
#include "scj2/kernel/store.hpp"
#include "scj2/kernel/term.hpp"

namespace scj2::kernel {

class NativeState;
using NativePtr = std::shared_ptr<const NativeState>;

struct NativeStep {
  Label label;
  NativePtr next;
};

/// A component whose behaviour is coded directly rather than as a term
/// (the monitor of an application object). Instances are immutable.
class NativeState {
 public:
  virtual ~NativeState() = default;
  virtual std::uint64_t hash() const = 0;
  virtual bool equals(const NativeState& other) const = 0;
  virtual std::string describe() const = 0;
  /// All transitions, tau included. Native components never take part in
  /// the clock.
  virtual std::vector<NativeStep> steps() const = 0;
  virtual bool terminated() const = 0;
  virtual bool divergent() const = 0;
};

/// Static description of one component plus its initial state.
struct Component {
  Sym id = 0;
  TermPtr term;       // null for native components
  Store store;        // component-local variables
  NativePtr native;   // set for native components
  std::map<Sym, Domain> domains;  // declared domains of `store`
  /// Events this component synchronises on. A channel with no field
  /// constraints is a whole-channel interest.
  std::vector<Interest> interests;
  bool timed = false;
  /// A passive component never drives a synchronised event on its own:
  /// such an event also needs an active participant.
  bool passive = false;
  /// Scheduling priority; 0 means unprioritised (framework bookkeeping).
  int priority = 0;
  IntRange range;
};

/// One component's current state inside a SystemState.
struct Slot {
  TermPtr term;
  Store store;
  NativePtr native;

  bool terminated() const;
  bool divergent() const;
  std::uint64_t hash() const;
};

bool operator==(const Slot& a, const Slot& b);

struct SystemState {
  std::vector<Slot> slots;
  Store shared;
  std::uint32_t clock = 0;
  std::uint64_t hash = 0;

  void rehash();
};

bool operator==(const SystemState& a, const SystemState& b);

struct SystemOptions {
  bool maximal_progress = true;
  bool priority_faithful = false;
  /// When positive, the clock is part of the state and stops at this bound.
  std::uint32_t max_ticks = 0;
};

/// Memo of single-component transitions keyed by the component's state and
/// the shared store. Not thread-safe: use one per worker.
class StepCache {
 public:
  explicit StepCache(std::size_t max_entries = std::size_t{1} << 20) : max_(max_entries) {}
  std::size_t size() const { return size_; }

  struct Step {
    Label label;
    Slot slot;
    std::vector<Store::Entry> shared_diff;
    // event routing, fixed by the event alone
    std::vector<std::uint32_t> parts;
    bool interleaved = false;
    bool driven = false;
  };
  struct Entry {
    std::uint32_t comp = 0;
    Slot slot;
    Store shared;
    bool atomic = false;
    std::vector<Step> steps;
  };

 private:
  friend class Composition;
  std::unordered_map<std::uint64_t, std::vector<std::unique_ptr<Entry>>> map_;
  std::size_t size_ = 0;
  std::size_t max_;
};

struct Transition {
  Label label;
  SystemState next;
  std::vector<std::uint32_t> participants;  // component indices, ascending
};

/// Parallel composition. Components synchronise on an event when their
/// interests match it; identifier-carrying channels thereby route by value.
class Composition {
 public:
  Composition(ChannelTable channels, std::vector<Component> components,
              Store shared = {}, std::map<Sym, Domain> shared_domains = {});

  const ChannelTable& channels() const { return channels_; }
  const std::vector<Component>& components() const { return components_; }
  const std::map<Sym, Domain>& shared_domains() const { return shared_domains_; }
  std::optional<std::size_t> index_of(Sym id) const;

  /// Channel -> components with an interest in it.
  const std::map<Sym, std::vector<std::uint32_t>>& sync_map() const {
    return sync_map_;
  }
  /// Components whose interests match the event, ascending.
  std::vector<std::uint32_t> participants(const Event& e) const;
  /// Component i matches `e` through an active interest.
  bool drives(std::uint32_t i, const Event& e) const;

  SystemState initial_state() const;

  /// Transitions of a single component in isolation.
  std::vector<LocalStep> component_steps(const SystemState& s,
                                         std::uint32_t index) const;

  /// Every system transition: synchronised events, interleaved tau-markers,
  /// and the clock tick. Output order is canonical: events in event order,
  /// then tau by component index, then tick.
  std::vector<Transition> system_steps(const SystemState& s, const SystemOptions& opts = {},
                                       StepCache* cache = nullptr) const;

  /// All components finished.
  bool is_terminated(const SystemState& s) const;
  /// Some component is Chaos.
  bool is_divergent(const SystemState& s) const;

  /// Per-component summary lines, for counterexamples and the animator.
  std::vector<std::string> describe(const SystemState& s) const;

 private:
  StepContext context(std::uint32_t index) const;
  const StepCache::Entry& cached_steps(StepCache& cache, std::uint32_t index,
                                       const SystemState& s) const;

  ChannelTable channels_;
  std::vector<Component> components_;
  Store shared_;
  std::map<Sym, Domain> shared_domains_;
  std::map<Sym, std::vector<std::uint32_t>> sync_map_;
  std::map<Sym, std::uint32_t> index_;
};

}  // namespace scj2::kernel

#endif  // SCJ2_KERNEL_SYSTEM_HPP_
