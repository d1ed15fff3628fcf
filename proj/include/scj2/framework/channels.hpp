#ifndef SCJ2_FRAMEWORK_CHANNELS_HPP_
#define SCJ2_FRAMEWORK_CHANNELS_HPP_

#include <vector>

#include "scj2/kernel/event.hpp"

namespace scj2::framework {

/// Identifier sets of one program. Schedulable sequencers appear both in
/// `schedulables` and in `sequencers`.
struct Universe {
  std::vector<Sym> missions;
  std::vector<Sym> sequencers;
  std::vector<Sym> schedulables;
  /// Application objects usable as locks, missions with methods included.
  std::vector<Sym> objects;
  std::vector<Sym> probes;

  Domain mission_ids(bool nullable = false) const;
  Domain sequencer_ids(bool nullable = false) const;
  Domain schedulable_ids() const;
  Domain object_ids() const;
  /// Who may request termination or fire a release: schedulables and
  /// objects (method bodies run on behalf of their object).
  Domain caller_ids() const;
};

/// Framework channel symbols.
struct Channels {
  Sym get_sequencer_call, get_sequencer_ret;
  Sym start_sequencer, sequencer_done;
  Sym get_next_mission_call, get_next_mission_ret;
  Sym start_mission, mission_done;
  Sym initialize_call, initialize_ret;
  Sym register_, check_schedulable;
  Sym start_schedulable, stop, done;
  Sym request_termination;
  Sym release_start, release_end, release;
  Sym overrun, deadline_miss;
  Sym handle_event_call, handle_event_ret;
  Sym run_call, run_ret;
  Sym mission_cleanup_call, mission_cleanup_ret;
  Sym probe;
};

const Channels& channels();

/// The full signature table: framework channels, the monitor protocol,
/// throw, end_of_program, probe and tick. Application method channels are
/// added by the compiler.
kernel::ChannelTable channel_table(const Universe& u);

}  // namespace scj2::framework

#endif  // SCJ2_FRAMEWORK_CHANNELS_HPP_
