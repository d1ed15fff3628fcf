#ifndef SCJ2_SYNC_MONITOR_HPP_
#define SCJ2_SYNC_MONITOR_HPP_

#include <map>
#include <optional>
#include <string>
#include <vector>

#include "scj2/kernel/value.hpp"

namespace scj2::sync {

using ThreadId = Sym;
using PriorityLevel = int;

/// The five paradigm-misuse exceptions.
enum class ExceptionKind : std::uint8_t {
  IllegalState,
  IllegalMonitorState,
  CeilingViolation,
  Interrupted,
  IllegalArgument,
};

/// Channel-value spelling, e.g. "illegalMonitorStateException".
const char* exception_name(ExceptionKind k);
std::optional<ExceptionKind> parse_exception(std::string_view name);
std::vector<ExceptionKind> all_exceptions();

/// Waiting threads by priority level, FIFO within a level. Only non-empty
/// levels are stored, so equal queues compare equal.
class PriorityQueueT {
 public:
  const std::map<PriorityLevel, std::vector<ThreadId>>& levels() const {
    return levels_;
  }
  bool empty() const { return levels_.empty(); }
  bool contains(ThreadId t) const;
  std::size_t size() const;
  /// Removes `t` if present; returns whether it was.
  bool remove(ThreadId t);
  /// All threads, most eligible first.
  std::vector<ThreadId> in_eligibility_order() const;
  std::uint64_t hash() const;
  std::string str() const;

  friend bool operator==(const PriorityQueueT& a, const PriorityQueueT& b) {
    return a.levels_ == b.levels_;
  }

 private:
  friend PriorityQueueT enqueue(PriorityQueueT q, ThreadId t, PriorityLevel p);
  std::map<PriorityLevel, std::vector<ThreadId>> levels_;
};

/// Appends `t` at level `p`. Throws InvariantFault if `t` is already queued.
PriorityQueueT enqueue(PriorityQueueT q, ThreadId t, PriorityLevel p);

/// Head of the highest non-empty level.
std::optional<ThreadId> most_eligible(const PriorityQueueT& q);

struct ThreadState {
  ThreadId id = 0;
  PriorityLevel priority = 0;
  bool interrupted = false;
};

struct MonitorState {
  Sym object = 0;
  PriorityLevel ceiling = 0;
  std::optional<ThreadId> holder;
  int depth = 0;
  PriorityQueueT entry_queue;
  PriorityQueueT wait_set;
  /// Reentrancy depth to restore on re-acquisition. Notified threads keep
  /// their entry here while they sit in the entry queue.
  std::map<ThreadId, int> saved_depths;

  std::uint64_t hash() const;
  std::string str() const;

  friend bool operator==(const MonitorState& a, const MonitorState& b) {
    return a.object == b.object && a.ceiling == b.ceiling &&
           a.holder == b.holder && a.depth == b.depth &&
           a.entry_queue == b.entry_queue && a.wait_set == b.wait_set &&
           a.saved_depths == b.saved_depths;
  }
};

enum class AcquireOutcome : std::uint8_t { Acquired, Queued, Error };

struct AcquireResult {
  MonitorState monitor;
  AcquireOutcome outcome = AcquireOutcome::Acquired;
  std::optional<ExceptionKind> error;
};

/// Handover target of a lock release, and whether it resumes from a wait.
struct Handover {
  ThreadId thread = 0;
  bool from_wait = false;
};

struct ReleaseResult {
  MonitorState monitor;
  std::optional<Handover> handover;
  std::optional<ExceptionKind> error;
};

struct NotifyResult {
  MonitorState monitor;
  std::vector<ThreadId> resumed;
  std::optional<ExceptionKind> error;
};

AcquireResult try_acquire(MonitorState m, const ThreadState& t);
ReleaseResult release_once(MonitorState m, ThreadId t);
/// Gives up the lock entirely and joins the wait set. The handover, if any,
/// names the entry-queue thread that now holds the lock.
ReleaseResult monitor_wait(MonitorState m, const ThreadState& t);
NotifyResult monitor_notify(MonitorState m, ThreadId t);
NotifyResult monitor_notify_all(MonitorState m, ThreadId t);

/// Moves a waiting thread to the entry queue without a notify (spurious
/// wakeup), handing over the lock if it is free.
ReleaseResult spurious_wakeup(MonitorState m, ThreadId t,
                              PriorityLevel priority);

}  // namespace scj2::sync

#endif  // SCJ2_SYNC_MONITOR_HPP_
