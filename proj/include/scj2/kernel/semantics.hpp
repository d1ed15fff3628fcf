#ifndef SCJ2_KERNEL_SEMANTICS_HPP_
#define SCJ2_KERNEL_SEMANTICS_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scj2/kernel/event.hpp"
#include "scj2/kernel/store.hpp"
#include "scj2/kernel/term.hpp"

namespace scj2::kernel {

/// Transition label: an event, the internal tau-marker, or the clock tick.
struct Label {
  enum class Kind : std::uint8_t { Event, Tau, Tick };
  Kind kind = Kind::Tau;
  Event event;

  static Label tau() { return {}; }
  static Label tick() { return {Kind::Tick, tick_event()}; }
  static Label of(Event e) { return {Kind::Event, std::move(e)}; }

  bool is_tau() const { return kind == Kind::Tau; }
  bool is_tick() const { return kind == Kind::Tick; }
  bool is_event() const { return kind == Kind::Event; }
  std::string str() const;
};

/// Locals of one enclosing VarBlock.
struct Frame {
  std::shared_ptr<const std::vector<VarDecl>> decls;
  std::vector<Value> values;
};

/// Everything a term can read or write: enclosing VarBlock frames
/// (innermost last), the component store, and the system-wide shared store
/// holding application object fields.
struct Env {
  std::vector<Frame> frames;
  Store local;
  Store shared;

  std::optional<Value> lookup(Sym var) const;
};

/// Static facts needed to step a term.
struct StepContext {
  const ChannelTable* channels = nullptr;
  const std::map<Sym, Domain>* local_domains = nullptr;
  const std::map<Sym, Domain>* shared_domains = nullptr;
  IntRange range;
};

struct LocalStep {
  Label label;
  TermPtr term;
  Env env;
};

/// All non-tick transitions of `term` under `env`: events (inputs bound to
/// every domain value) and tau-markers (assignments, Seq hand-over, choice
/// resolution on termination). Deterministic in its output order.
std::vector<LocalStep> term_steps(const TermPtr& term, const Env& env,
                                  const StepContext& ctx);

/// The successor under one clock tick, or nullopt when time cannot pass
/// (pending internal activity, or Chaos). Idle prefixes let time pass
/// unchanged; Wait counts down; choices are not resolved by time.
std::optional<TermPtr> term_tick(const TermPtr& term, const Env& env,
                                 const StepContext& ctx);

/// True when the term can finish without a visible event: Skip, or Skip
/// under true guards.
bool can_terminate(const TermPtr& term, const Env& env, const StepContext& ctx);

/// True when the active position lies inside an Atomic region.
bool in_atomic(const Term& term);

/// Assigns through the frame chain, then the component store, then the
/// shared store. Checks the target's declared domain.
void assign_var(Env& env, Sym var, Value v, const StepContext& ctx);

}  // namespace scj2::kernel

#endif  // SCJ2_KERNEL_SEMANTICS_HPP_
