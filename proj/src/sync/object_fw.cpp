#include "scj2/sync/object_fw.hpp"

#include "scj2/kernel/errors.hpp"
#include "scj2/sync/protocol.hpp"

namespace scj2::sync {

using kernel::Event;
using kernel::Label;
using kernel::NativePtr;
using kernel::NativeStep;

const SyncChannels& sync_channels() {
  static const SyncChannels c{
      intern("startSyncMeth"), intern("lockAcquired"), intern("endSyncMeth"),
      intern("waitCall"),      intern("waitRet"),      intern("notify"),
      intern("notifyAll"),     intern("interrupt"),    intern("throw"),
      intern("end_of_program")};
  return c;
}

Domain exception_domain() {
  std::vector<Sym> ids;
  for (auto k : all_exceptions()) ids.push_back(intern(exception_name(k)));
  return Domain::identifiers(std::move(ids));
}

void declare_sync_channels(kernel::ChannelTable& table, const Domain& objects,
                           const Domain& threads) {
  const auto& c = sync_channels();
  for (Sym ch : {c.start_sync_meth, c.lock_acquired, c.end_sync_meth, c.wait_call,
                 c.wait_ret, c.notify, c.notify_all}) {
    table.add({ch, {objects, threads}});
  }
  table.add({c.interrupt, {threads}});
  table.add({c.throw_, {exception_domain()}, kernel::SyncMode::Interleaved});
  table.add({c.end_of_program, {}});
}

ObjectFW::ObjectFW(std::shared_ptr<const ObjectConfig> cfg) : cfg_(std::move(cfg)) {
  monitor_.object = cfg_->object;
  monitor_.ceiling = cfg_->ceiling;
}

std::uint64_t ObjectFW::hash() const {
  std::uint64_t h = hash_mix(monitor_.hash(), static_cast<std::uint64_t>(mode_));
  if (grant_) h = hash_mix(h, sym_hash(grant_->thread) * 2 + grant_->from_wait);
  if (mode_ == Mode::Throwing) h = hash_mix(h, static_cast<std::uint64_t>(pending_));
  return h;
}

bool ObjectFW::equals(const kernel::NativeState& other) const {
  const auto* o = dynamic_cast<const ObjectFW*>(&other);
  if (!o) return false;
  if (mode_ != o->mode_ || !(monitor_ == o->monitor_)) return false;
  if (grant_.has_value() != o->grant_.has_value()) return false;
  if (grant_ && (grant_->thread != o->grant_->thread ||
                 grant_->from_wait != o->grant_->from_wait)) {
    return false;
  }
  return mode_ != Mode::Throwing || pending_ == o->pending_;
}

std::string ObjectFW::describe() const {
  switch (mode_) {
    case Mode::Throwing:
      return std::string("throwing ") + exception_name(pending_);
    case Mode::Chaos:
      return "Chaos";
    case Mode::Done:
      return "Skip";
    case Mode::Running:
      break;
  }
  std::string s = "monitor " + monitor_.str();
  if (grant_) {
    s += std::string(" granting ") + (grant_->from_wait ? "waitRet" : "lockAcquired") +
         " to " + sym_name(grant_->thread);
  }
  return s;
}

NativePtr ObjectFW::with(MonitorState m, std::optional<Handover> grant) const {
  auto next = std::make_shared<ObjectFW>(*this);
  next->monitor_ = std::move(m);
  next->grant_ = grant;
  return next;
}

NativePtr ObjectFW::throwing(ExceptionKind k) const {
  auto next = std::make_shared<ObjectFW>(*this);
  next->mode_ = Mode::Throwing;
  next->pending_ = k;
  next->grant_.reset();
  return next;
}

std::vector<NativeStep> ObjectFW::steps() const {
  const auto& ch = sync_channels();
  std::vector<NativeStep> out;
  const Value obj = Value::id(cfg_->object);
  auto event = [&](Sym channel, ThreadId t) {
    return Label::of(Event{channel, {obj, Value::id(t)}});
  };

  if (mode_ == Mode::Throwing) {
    auto next = std::make_shared<ObjectFW>(*this);
    next->mode_ = Mode::Chaos;
    out.push_back({Label::of(Event{ch.throw_, {Value::id(intern(exception_name(pending_)))}}),
                   next});
    return out;
  }
  if (mode_ != Mode::Running) return out;

  if (grant_) {
    out.push_back({event(grant_->from_wait ? ch.wait_ret : ch.lock_acquired,
                         grant_->thread),
                   with(monitor_, std::nullopt)});
  }

  for (const auto& [t, prio] : cfg_->threads) {
    if (grant_ && grant_->thread == t) continue;
    if (monitor_.entry_queue.contains(t) || monitor_.wait_set.contains(t)) continue;
    ThreadState ts{t, prio, false};

    auto acq = try_acquire(monitor_, ts);
    if (acq.error) {
      out.push_back({event(ch.start_sync_meth, t), throwing(*acq.error)});
    } else if (acq.outcome == AcquireOutcome::Acquired) {
      out.push_back({event(ch.start_sync_meth, t),
                     with(std::move(acq.monitor), Handover{t, false})});
    } else {
      out.push_back({event(ch.start_sync_meth, t), with(std::move(acq.monitor), grant_)});
    }

    auto rel = release_once(monitor_, t);
    if (rel.error) {
      out.push_back({event(ch.end_sync_meth, t), throwing(*rel.error)});
    } else {
      out.push_back({event(ch.end_sync_meth, t),
                     with(std::move(rel.monitor), rel.handover ? rel.handover : grant_)});
    }

    auto w = monitor_wait(monitor_, ts);
    if (w.error) {
      out.push_back({event(ch.wait_call, t), throwing(*w.error)});
    } else {
      out.push_back({event(ch.wait_call, t), with(std::move(w.monitor), w.handover)});
    }

    auto n = monitor_notify(monitor_, t);
    out.push_back({event(ch.notify, t),
                   n.error ? throwing(*n.error) : with(std::move(n.monitor), grant_)});
    auto na = monitor_notify_all(monitor_, t);
    out.push_back({event(ch.notify_all, t),
                   na.error ? throwing(*na.error) : with(std::move(na.monitor), grant_)});
  }

  if (cfg_->spurious_wakeups) {
    for (const auto& [p, seq] : monitor_.wait_set.levels()) {
      for (ThreadId w : seq) {
        auto r = spurious_wakeup(monitor_, w, p);
        out.push_back({Label::tau(), with(std::move(r.monitor), r.handover ? r.handover : grant_)});
      }
    }
  }

  auto done = std::make_shared<ObjectFW>(*this);
  done->mode_ = Mode::Done;
  out.push_back({Label::of(Event{ch.end_of_program, {}}), done});
  return out;
}

kernel::Component object_fw(ObjectConfig cfg) {
  const auto& ch = sync_channels();
  kernel::Component c;
  c.id = intern("ObjectFW." + sym_name(cfg.object));
  const Value obj = Value::id(cfg.object);
  for (Sym chan : {ch.start_sync_meth, ch.lock_acquired, ch.end_sync_meth, ch.wait_call,
                   ch.wait_ret, ch.notify, ch.notify_all}) {
    c.interests.push_back({chan, {obj}});
  }
  c.interests.push_back({ch.end_of_program, {}});
  c.passive = true;
  c.native = std::make_shared<ObjectFW>(std::make_shared<const ObjectConfig>(std::move(cfg)));
  return c;
}

kernel::Component thread_fw(ThreadId tid, PriorityLevel priority, const Domain& objects) {
  using namespace kernel;
  const auto& ch = sync_channels();
  Sym X = intern("ThreadFW");
  Sym interrupted = intern("interrupted");
  auto t = id_lit(tid);
  auto raise = prefix(
      EventPattern{ch.throw_,
                   {FieldPattern::out(id_lit(intern(exception_name(ExceptionKind::Interrupted))))}},
      chaos());
  std::vector<TermPtr> alts;
  alts.push_back(prefix(EventPattern{ch.interrupt, {FieldPattern::out(t)}},
                        assign(interrupted, bool_lit(true), recvar(X))));
  for (const Value& o : objects.values()) {
    alts.push_back(prefix(EventPattern{ch.wait_call, {FieldPattern::out(lit(o)), FieldPattern::out(t)}},
                          if_then_else(var(interrupted), raise, recvar(X))));
  }
  Component c;
  c.id = intern("ThreadFW." + sym_name(tid));
  c.term = interrupt(rec(X, choice(alts)), EventPattern{ch.end_of_program, {}});
  c.store.set(interrupted, Value::boolean(false));
  c.domains[interrupted] = Domain::booleans();
  c.interests = {Interest{ch.interrupt, {Value::id(tid)}},
                 Interest{ch.wait_call, {std::nullopt, Value::id(tid)}},
                 Interest{ch.end_of_program, {}}};
  c.priority = priority;
  c.passive = true;
  return c;
}

}  // namespace scj2::sync
