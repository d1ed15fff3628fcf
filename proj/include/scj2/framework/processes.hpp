#ifndef SCJ2_FRAMEWORK_PROCESSES_HPP_
#define SCJ2_FRAMEWORK_PROCESSES_HPP_

#include <optional>
#include <vector>

#include "scj2/framework/channels.hpp"
#include "scj2/kernel/system.hpp"

namespace scj2::framework {

struct ReleaseParams {
  int period = 0;  // periodic only
  int offset = 0;  // one-shot only
  std::optional<int> deadline;
};

/// Gets the top-level sequencer from the application, starts it, answers
/// registration checks from the global registry, and ends the program when
/// the sequencer is done.
kernel::Component safelet_fw(const Universe& u);

kernel::Component top_sequencer_fw(Sym id, const std::vector<Sym>& missions,
                                   const Universe& u);

/// A sequencer that is itself a schedulable of an enclosing mission. On
/// stop it forwards termination to the mission it is running.
kernel::Component sched_sequencer_fw(Sym id, const std::vector<Sym>& missions,
                                     int priority, const Universe& u);

/// Initialisation (registrations checked by the safelet), atomic start of
/// every registered schedulable, execution until all are done or
/// termination is requested, then cleanup.
kernel::Component mission_fw(Sym id, const std::vector<Sym>& registers,
                             const Universe& u);

kernel::Component periodic_fw(Sym id, const ReleaseParams& p, int priority,
                              const Universe& u);
kernel::Component aperiodic_fw(Sym id, const ReleaseParams& p, int priority,
                               const Universe& u);
kernel::Component oneshot_fw(Sym id, const ReleaseParams& p, int priority,
                             const Universe& u);
kernel::Component managed_thread_fw(Sym id, int priority, const Universe& u);

}  // namespace scj2::framework

#endif  // SCJ2_FRAMEWORK_PROCESSES_HPP_
