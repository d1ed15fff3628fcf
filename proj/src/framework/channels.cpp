#include "scj2/framework/channels.hpp"

#include <algorithm>

#include "scj2/sync/protocol.hpp"

namespace scj2::framework {

namespace {

Domain ids(std::vector<Sym> v, bool nullable = false) {
  std::sort(v.begin(), v.end(),
            [](Sym a, Sym b) { return sym_name(a) < sym_name(b); });
  v.erase(std::unique(v.begin(), v.end()), v.end());
  return Domain::identifiers(std::move(v), nullable);
}

}  // namespace

Domain Universe::mission_ids(bool nullable) const { return ids(missions, nullable); }
Domain Universe::sequencer_ids(bool nullable) const { return ids(sequencers, nullable); }
Domain Universe::schedulable_ids() const { return ids(schedulables); }
Domain Universe::object_ids() const { return ids(objects); }

Domain Universe::caller_ids() const {
  std::vector<Sym> all = schedulables;
  all.insert(all.end(), objects.begin(), objects.end());
  return ids(std::move(all));
}

const Channels& channels() {
  static const Channels c{
      intern("getSequencerCall"),    intern("getSequencerRet"),
      intern("start_sequencer"),     intern("sequencer_done"),
      intern("getNextMissionCall"),  intern("getNextMissionRet"),
      intern("start_mission"),       intern("mission_done"),
      intern("initializeCall"),      intern("initializeRet"),
      intern("register"),            intern("checkSchedulable"),
      intern("start_schedulable"),   intern("stop"),
      intern("done"),                intern("requestTermination"),
      intern("releaseStart"),        intern("releaseEnd"),
      intern("release"),             intern("overrun"),
      intern("deadlineMiss"),        intern("handleEventCall"),
      intern("handleEventRet"),      intern("runCall"),
      intern("runRet"),              intern("missionCleanupCall"),
      intern("missionCleanupRet"),   intern("probe")};
  return c;
}

kernel::ChannelTable channel_table(const Universe& u) {
  using kernel::ChannelDecl;
  const auto& c = channels();
  kernel::ChannelTable t;
  const Domain M = u.mission_ids();
  const Domain Q = u.sequencer_ids();
  const Domain S = u.schedulable_ids();
  const Domain C = u.caller_ids();

  t.add({c.get_sequencer_call, {}});
  t.add({c.get_sequencer_ret, {u.sequencer_ids(true)}});
  t.add({c.start_sequencer, {Q}});
  t.add({c.sequencer_done, {Q}});
  t.add({c.get_next_mission_call, {Q}});
  t.add({c.get_next_mission_ret, {Q, u.mission_ids(true)}});
  t.add({c.start_mission, {M, Q}});
  t.add({c.mission_done, {M}});
  t.add({c.initialize_call, {M}});
  t.add({c.initialize_ret, {M}});
  t.add({c.register_, {S, M}});
  t.add({c.check_schedulable, {M, Domain::booleans()}});
  for (Sym ch : {c.start_schedulable, c.stop, c.done, c.release_start, c.release_end,
                 c.overrun, c.deadline_miss, c.handle_event_call, c.handle_event_ret,
                 c.run_call, c.run_ret}) {
    t.add({ch, {S}});
  }
  t.add({c.request_termination, {M, C}});
  t.add({c.release, {S, C}});
  t.add({c.mission_cleanup_call, {M}});
  t.add({c.mission_cleanup_ret, {M}});
  t.add({c.probe, {ids(u.probes)}, kernel::SyncMode::Interleaved});
  sync::declare_sync_channels(t, u.object_ids(), S);
  return t;
}

}  // namespace scj2::framework
