#ifndef SCJ2_CHECKER_CHECKS_HPP_
#define SCJ2_CHECKER_CHECKS_HPP_

#include <optional>
#include <string>
#include <vector>

#include "scj2/checker/explore.hpp"
#include "scj2/sync/monitor.hpp"

namespace scj2::check {

enum class Status : std::uint8_t { Holds, Fails, Inconclusive };
const char* status_name(Status s);

struct Counterexample {
  std::vector<kernel::Label> trace;
  kernel::SystemState final_state;
};

struct Verdict {
  std::string property;
  Status status = Status::Holds;
  std::optional<Counterexample> counterexample;
  std::size_t states = 0;
  std::string note;  // e.g. the fault message or the limit that was hit
};

enum class Relation : std::uint8_t { Eq, Le, Lt, Ge, Gt };
std::optional<Relation> parse_relation(std::string_view text);
const char* relation_name(Relation r);

Verdict check_deadlock(const StateGraph& g);
/// Chaos reachability.
Verdict check_divergence(const StateGraph& g);
/// throw.kind reachable; the counterexample ends with the throw event.
Verdict check_exception(const StateGraph& g, sync::ExceptionKind kind);
/// Model-range and well-formedness faults met during exploration.
Verdict check_faults(const StateGraph& g);
/// Number of matching events on every finite maximal trace, against
/// `relation n`. Upper bounds are also checked on prefixes.
Verdict check_event_count(const StateGraph& g, const kernel::ChannelPattern& pattern,
                          std::string_view pattern_text, Relation rel, int n);
/// Fails when an `after` event occurs with no `before` event earlier in the
/// trace.
Verdict check_order(const StateGraph& g, const kernel::ChannelPattern& before,
                    std::string_view before_text, const kernel::ChannelPattern& after,
                    std::string_view after_text);
/// Fails when two `first` events occur without a `second` event between them.
Verdict check_alternation(const StateGraph& g, const kernel::ChannelPattern& first,
                          std::string_view first_text, const kernel::ChannelPattern& second,
                          std::string_view second_text);

/// Every counterexample must lead back to its final state.
bool replays(const kernel::Composition& comp, const Counterexample& cx,
             const ExploreLimits& limits);

}  // namespace scj2::check

#endif  // SCJ2_CHECKER_CHECKS_HPP_
