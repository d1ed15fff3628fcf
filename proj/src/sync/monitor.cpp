#include "scj2/sync/monitor.hpp"

#include <algorithm>

#include "scj2/kernel/errors.hpp"

namespace scj2::sync {

const char* exception_name(ExceptionKind k) {
  switch (k) {
    case ExceptionKind::IllegalState:
      return "illegalStateException";
    case ExceptionKind::IllegalMonitorState:
      return "illegalMonitorStateException";
    case ExceptionKind::CeilingViolation:
      return "ceilingViolation";
    case ExceptionKind::Interrupted:
      return "interrupted";
    case ExceptionKind::IllegalArgument:
      return "illegalArgumentException";
  }
  return "?";
}

std::vector<ExceptionKind> all_exceptions() {
  return {ExceptionKind::IllegalState, ExceptionKind::IllegalMonitorState,
          ExceptionKind::CeilingViolation, ExceptionKind::Interrupted,
          ExceptionKind::IllegalArgument};
}

std::optional<ExceptionKind> parse_exception(std::string_view name) {
  for (auto k : all_exceptions()) {
    if (name == exception_name(k)) return k;
  }
  return std::nullopt;
}

bool PriorityQueueT::contains(ThreadId t) const {
  for (const auto& [p, seq] : levels_) {
    if (std::find(seq.begin(), seq.end(), t) != seq.end()) return true;
  }
  return false;
}

std::size_t PriorityQueueT::size() const {
  std::size_t n = 0;
  for (const auto& [p, seq] : levels_) n += seq.size();
  return n;
}

bool PriorityQueueT::remove(ThreadId t) {
  for (auto it = levels_.begin(); it != levels_.end(); ++it) {
    auto& seq = it->second;
    auto pos = std::find(seq.begin(), seq.end(), t);
    if (pos == seq.end()) continue;
    seq.erase(pos);
    if (seq.empty()) levels_.erase(it);
    return true;
  }
  return false;
}

std::vector<ThreadId> PriorityQueueT::in_eligibility_order() const {
  std::vector<ThreadId> out;
  for (auto it = levels_.rbegin(); it != levels_.rend(); ++it) {
    out.insert(out.end(), it->second.begin(), it->second.end());
  }
  return out;
}

std::uint64_t PriorityQueueT::hash() const {
  std::uint64_t h = 0x9a9a;
  for (const auto& [p, seq] : levels_) {
    h = hash_mix(h, static_cast<std::uint64_t>(p));
    for (auto t : seq) h = hash_mix(h, sym_hash(t));
  }
  return h;
}

std::string PriorityQueueT::str() const {
  std::string s = "{";
  bool first = true;
  for (auto it = levels_.rbegin(); it != levels_.rend(); ++it) {
    if (!first) s += ", ";
    first = false;
    s += std::to_string(it->first) + ":<";
    for (std::size_t i = 0; i < it->second.size(); ++i) {
      if (i) s += ",";
      s += sym_name(it->second[i]);
    }
    s += ">";
  }
  return s + "}";
}

PriorityQueueT enqueue(PriorityQueueT q, ThreadId t, PriorityLevel p) {
  if (q.contains(t)) {
    throw InvariantFault("thread " + sym_name(t) + " already queued");
  }
  q.levels_[p].push_back(t);
  return q;
}

std::optional<ThreadId> most_eligible(const PriorityQueueT& q) {
  if (q.empty()) return std::nullopt;
  return q.levels().rbegin()->second.front();
}

namespace {

std::optional<PriorityLevel> level_of(const PriorityQueueT& q, ThreadId t) {
  for (const auto& [p, seq] : q.levels()) {
    if (std::find(seq.begin(), seq.end(), t) != seq.end()) return p;
  }
  return std::nullopt;
}

// Hands a free lock to the most eligible entry-queue thread.
std::optional<Handover> hand_over(MonitorState& m) {
  if (m.holder) return std::nullopt;
  auto next = most_eligible(m.entry_queue);
  if (!next) return std::nullopt;
  m.entry_queue.remove(*next);
  m.holder = *next;
  Handover h{*next, false};
  auto saved = m.saved_depths.find(*next);
  if (saved != m.saved_depths.end()) {
    m.depth = saved->second;
    m.saved_depths.erase(saved);
    h.from_wait = true;
  } else {
    m.depth = 1;
  }
  return h;
}

}  // namespace

std::uint64_t MonitorState::hash() const {
  std::uint64_t h = hash_mix(sym_hash(object), static_cast<std::uint64_t>(ceiling));
  h = hash_mix(h, holder ? sym_hash(*holder) : 0);
  h = hash_mix(h, static_cast<std::uint64_t>(depth));
  h = hash_mix(h, entry_queue.hash());
  h = hash_mix(h, wait_set.hash());
  for (const auto& [t, d] : saved_depths) {
    h += hash_mix(sym_hash(t), static_cast<std::uint64_t>(d));
  }
  return h;
}

std::string MonitorState::str() const {
  std::string s = sym_name(object) + " holder=" +
                  (holder ? sym_name(*holder) : std::string("none")) +
                  " depth=" + std::to_string(depth) +
                  " entry=" + entry_queue.str() + " wait=" + wait_set.str();
  return s;
}

AcquireResult try_acquire(MonitorState m, const ThreadState& t) {
  if (t.priority > m.ceiling) {
    return {std::move(m), AcquireOutcome::Error, ExceptionKind::CeilingViolation};
  }
  if (!m.holder) {
    m.holder = t.id;
    m.depth = 1;
    return {std::move(m), AcquireOutcome::Acquired, std::nullopt};
  }
  if (*m.holder == t.id) {
    ++m.depth;
    return {std::move(m), AcquireOutcome::Acquired, std::nullopt};
  }
  m.entry_queue = enqueue(std::move(m.entry_queue), t.id, t.priority);
  return {std::move(m), AcquireOutcome::Queued, std::nullopt};
}

ReleaseResult release_once(MonitorState m, ThreadId t) {
  if (!m.holder || *m.holder != t) {
    return {std::move(m), std::nullopt, ExceptionKind::IllegalMonitorState};
  }
  if (--m.depth > 0) return {std::move(m), std::nullopt, std::nullopt};
  m.holder.reset();
  auto h = hand_over(m);
  return {std::move(m), h, std::nullopt};
}

ReleaseResult monitor_wait(MonitorState m, const ThreadState& t) {
  if (!m.holder || *m.holder != t.id) {
    return {std::move(m), std::nullopt, ExceptionKind::IllegalMonitorState};
  }
  if (t.interrupted) {
    return {std::move(m), std::nullopt, ExceptionKind::Interrupted};
  }
  m.saved_depths[t.id] = m.depth;
  m.holder.reset();
  m.depth = 0;
  m.wait_set = enqueue(std::move(m.wait_set), t.id, t.priority);
  auto h = hand_over(m);
  return {std::move(m), h, std::nullopt};
}

NotifyResult monitor_notify(MonitorState m, ThreadId t) {
  if (!m.holder || *m.holder != t) {
    return {std::move(m), {}, ExceptionKind::IllegalMonitorState};
  }
  auto r = most_eligible(m.wait_set);
  if (!r) return {std::move(m), {}, std::nullopt};
  PriorityLevel p = *level_of(m.wait_set, *r);
  m.wait_set.remove(*r);
  m.entry_queue = enqueue(std::move(m.entry_queue), *r, p);
  return {std::move(m), {*r}, std::nullopt};
}

NotifyResult monitor_notify_all(MonitorState m, ThreadId t) {
  if (!m.holder || *m.holder != t) {
    return {std::move(m), {}, ExceptionKind::IllegalMonitorState};
  }
  std::vector<ThreadId> resumed;
  while (auto r = most_eligible(m.wait_set)) {
    PriorityLevel p = *level_of(m.wait_set, *r);
    m.wait_set.remove(*r);
    m.entry_queue = enqueue(std::move(m.entry_queue), *r, p);
    resumed.push_back(*r);
  }
  return {std::move(m), std::move(resumed), std::nullopt};
}

ReleaseResult spurious_wakeup(MonitorState m, ThreadId t, PriorityLevel priority) {
  if (!m.wait_set.remove(t)) {
    throw InvariantFault("spurious wakeup of non-waiting " + sym_name(t));
  }
  m.entry_queue = enqueue(std::move(m.entry_queue), t, priority);
  auto h = hand_over(m);
  return {std::move(m), h, std::nullopt};
}

}  // namespace scj2::sync
