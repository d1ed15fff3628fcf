#ifndef SCJ2_SYNC_OBJECT_FW_HPP_
#define SCJ2_SYNC_OBJECT_FW_HPP_

#include <map>
#include <memory>
#include <optional>

#include "scj2/kernel/system.hpp"
#include "scj2/sync/monitor.hpp"

namespace scj2::sync {

struct ObjectConfig {
  Sym object = 0;
  PriorityLevel ceiling = 0;
  /// Every thread that may lock the object, with its priority.
  std::map<ThreadId, PriorityLevel> threads;
  bool spurious_wakeups = false;
};

/// The monitor of one application object as a native component. It accepts
/// lock requests from any thread not already queued, and grants the lock
/// to the holder with lockAcquired (fresh acquisition) or waitRet (resumed
/// waiter). Misuse raises throw.kind and then diverges.
class ObjectFW final : public kernel::NativeState {
 public:
  enum class Mode : std::uint8_t { Running, Throwing, Chaos, Done };

  explicit ObjectFW(std::shared_ptr<const ObjectConfig> cfg);

  const MonitorState& monitor() const { return monitor_; }
  Mode mode() const { return mode_; }
  /// Holder still waiting for its lockAcquired/waitRet.
  const std::optional<Handover>& grant() const { return grant_; }

  std::uint64_t hash() const override;
  bool equals(const kernel::NativeState& other) const override;
  std::string describe() const override;
  std::vector<kernel::NativeStep> steps() const override;
  bool terminated() const override { return mode_ == Mode::Done; }
  bool divergent() const override { return mode_ == Mode::Chaos; }

 private:
  kernel::NativePtr with(MonitorState m, std::optional<Handover> grant) const;
  kernel::NativePtr throwing(ExceptionKind k) const;

  std::shared_ptr<const ObjectConfig> cfg_;
  MonitorState monitor_;
  std::optional<Handover> grant_;
  Mode mode_ = Mode::Running;
  ExceptionKind pending_ = ExceptionKind::IllegalMonitorState;
};

kernel::Component object_fw(ObjectConfig cfg);

/// Per-thread bookkeeping: the interrupted flag, checked at every waitCall.
kernel::Component thread_fw(ThreadId tid, PriorityLevel priority,
                            const Domain& objects);

}  // namespace scj2::sync

#endif  // SCJ2_SYNC_OBJECT_FW_HPP_
