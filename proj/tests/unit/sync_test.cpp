#include <algorithm>
#include <functional>
#include <random>
#include <set>

#include "doctest.h"
#include "scj2/kernel/errors.hpp"
#include "scj2/sync/monitor.hpp"
#include "scj2/sync/object_fw.hpp"
#include "scj2/sync/protocol.hpp"

using namespace scj2;
using namespace scj2::sync;
using namespace scj2::kernel;

namespace {

Sym T(const char* n) { return intern(n); }

// Brute force: scan every (level, position) entry, keep the highest level and
// the earliest position within it.
std::optional<ThreadId> oracle_most_eligible(const PriorityQueueT& q) {
  std::optional<ThreadId> best;
  int best_level = 0;
  std::size_t best_pos = 0;
  for (const auto& [level, seq] : q.levels()) {
    for (std::size_t pos = 0; pos < seq.size(); ++pos) {
      if (!best || level > best_level || (level == best_level && pos < best_pos)) {
        best = seq[pos];
        best_level = level;
        best_pos = pos;
      }
    }
  }
  return best;
}

PriorityQueueT random_queue(std::mt19937& rng) {
  static const std::vector<Sym> pool = {T("t1"), T("t2"), T("t3"),
                                        T("t4"), T("t5"), T("t6")};
  std::vector<Sym> threads = pool;
  std::shuffle(threads.begin(), threads.end(), rng);
  std::size_t n = rng() % 7;
  PriorityQueueT q;
  for (std::size_t i = 0; i < n; ++i) {
    q = enqueue(std::move(q), threads[i], static_cast<int>(rng() % 5) + 1);
  }
  return q;
}

MonitorState monitor(int ceiling = 10) {
  MonitorState m;
  m.object = T("buf");
  m.ceiling = ceiling;
  return m;
}

// ---- composition helpers -------------------------------------------------

ChannelTable protocol_table(std::initializer_list<const char*> threads,
                            std::initializer_list<const char*> extra = {}) {
  ChannelTable table;
  std::vector<Sym> ts;
  for (const char* t : threads) ts.push_back(T(t));
  declare_sync_channels(table, Domain::identifiers({T("buf")}),
                        Domain::identifiers(ts));
  for (const char* e : extra) table.add({T(e), {}});
  return table;
}

EventPattern lock_ev(Sym channel, const char* thread) {
  return EventPattern{channel, {FieldPattern::out(id_lit(T("buf"))),
                                FieldPattern::out(id_lit(T(thread)))}};
}

Component client(const char* thread, std::vector<EventPattern> script) {
  Component c;
  c.id = intern(std::string("client.") + thread);
  TermPtr t = skip();
  for (auto it = script.rbegin(); it != script.rend(); ++it) t = prefix(*it, t);
  c.term = t;
  for (const auto& p : script) {
    if (p.fields.empty()) {
      c.interests.push_back({p.channel, {}});
    } else {
      c.interests.push_back({p.channel, {Value::id(T("buf")), Value::id(T(thread))}});
    }
  }
  return c;
}

std::vector<EventPattern> critical_section(const char* t) {
  const auto& ch = sync_channels();
  return {lock_ev(ch.start_sync_meth, t), lock_ev(ch.lock_acquired, t),
          lock_ev(ch.end_sync_meth, t)};
}

// All maximal traces (no cycles in these small compositions).
void all_traces(const Composition& comp, const SystemState& s,
                std::vector<std::string>& prefix,
                std::vector<std::vector<std::string>>& out) {
  auto steps = comp.system_steps(s);
  if (steps.empty()) {
    out.push_back(prefix);
    return;
  }
  for (const auto& t : steps) {
    bool visible = !t.label.is_tau();
    if (visible) prefix.push_back(t.label.str());
    all_traces(comp, t.next, prefix, out);
    if (visible) prefix.pop_back();
  }
}

std::vector<SystemState> reachable(const Composition& comp) {
  std::vector<SystemState> states{comp.initial_state()};
  std::set<std::uint64_t> seen{states[0].hash};
  for (std::size_t i = 0; i < states.size(); ++i) {
    for (auto& t : comp.system_steps(states[i])) {
      if (seen.insert(t.next.hash).second) states.push_back(t.next);
    }
  }
  return states;
}

const ObjectFW& object_state(const SystemState& s, std::size_t index) {
  return dynamic_cast<const ObjectFW&>(*s.slots[index].native);
}

Component buf_fw(std::map<ThreadId, PriorityLevel> threads, bool spurious = false,
                 int ceiling = 10) {
  ObjectConfig cfg;
  cfg.object = T("buf");
  cfg.ceiling = ceiling;
  cfg.threads = std::move(threads);
  cfg.spurious_wakeups = spurious;
  return object_fw(cfg);
}

std::size_t index_in(const std::vector<std::string>& trace, const std::string& e) {
  return std::find(trace.begin(), trace.end(), e) - trace.begin();
}

}  // namespace

TEST_CASE("enqueue appends within a level") {
  auto q = enqueue({}, T("t1"), 5);
  CHECK(q.str() == "{5:<t1>}");
  q = enqueue(q, T("t2"), 5);
  CHECK(q.str() == "{5:<t1,t2>}");
  CHECK_THROWS_AS(enqueue(q, T("t1"), 3), InvariantFault);
}

TEST_CASE("most_eligible picks the highest level, longest waiting") {
  CHECK_FALSE(most_eligible({}).has_value());
  auto q = enqueue(enqueue(enqueue({}, T("t1"), 5), T("t3"), 5), T("t2"), 9);
  CHECK(most_eligible(q) == T("t2"));
}

TEST_CASE("most_eligible agrees with a brute-force scan") {
  std::mt19937 rng(20240601);
  for (int i = 0; i < 1000; ++i) {
    auto q = random_queue(rng);
    REQUIRE(most_eligible(q) == oracle_most_eligible(q));
  }
}

TEST_CASE("notifyAll resumes in repeated-extraction order") {
  std::mt19937 rng(99);
  for (int i = 0; i < 1000; ++i) {
    auto m = monitor();
    m.holder = T("h");
    m.depth = 1;
    m.wait_set = random_queue(rng);
    std::vector<ThreadId> expected;
    auto rest = m.wait_set;
    while (auto t = oracle_most_eligible(rest)) {
      expected.push_back(*t);
      rest.remove(*t);
    }
    auto r = monitor_notify_all(m, T("h"));
    REQUIRE_FALSE(r.error);
    CHECK(r.resumed == expected);
    CHECK(r.monitor.wait_set.empty());
    CHECK(r.monitor.entry_queue.size() == expected.size());
    if (expected.size() == 1) {
      CHECK(monitor_notify(m, T("h")).resumed == expected);
    }
  }
  auto m = monitor();
  m.holder = T("h");
  m.depth = 1;
  m.wait_set = enqueue(enqueue(enqueue({}, T("t2"), 9), T("t1"), 5), T("t3"), 5);
  CHECK(monitor_notify_all(m, T("h")).resumed ==
        std::vector<ThreadId>{T("t2"), T("t1"), T("t3")});
}

TEST_CASE("try_acquire") {
  auto r = try_acquire(monitor(), {T("t1"), 5, false});
  CHECK(r.outcome == AcquireOutcome::Acquired);
  CHECK(r.monitor.holder == T("t1"));
  CHECK(r.monitor.depth == 1);
  auto again = try_acquire(r.monitor, {T("t1"), 5, false});
  CHECK(again.monitor.depth == 2);
  auto other = try_acquire(r.monitor, {T("t2"), 5, false});
  CHECK(other.outcome == AcquireOutcome::Queued);
  CHECK(other.monitor.entry_queue.contains(T("t2")));
  auto high = try_acquire(monitor(5), {T("t1"), 9, false});
  CHECK(high.outcome == AcquireOutcome::Error);
  CHECK(high.error == ExceptionKind::CeilingViolation);
}

TEST_CASE("release_once") {
  auto m = monitor();
  m.holder = T("t1");
  m.depth = 2;
  auto r = release_once(m, T("t1"));
  CHECK(r.monitor.depth == 1);
  CHECK_FALSE(r.handover);

  // try_acquire t1, t2 queued, then t1 releases
  auto a = try_acquire(monitor(), {T("t1"), 5, false}).monitor;
  a = try_acquire(a, {T("t2"), 5, false}).monitor;
  auto h = release_once(a, T("t1"));
  REQUIRE(h.handover);
  CHECK(h.handover->thread == T("t2"));
  CHECK(h.monitor.holder == T("t2"));
  CHECK(h.monitor.depth == 1);
  CHECK(h.monitor.entry_queue.empty());

  CHECK(release_once(monitor(), T("t1")).error == ExceptionKind::IllegalMonitorState);
}

TEST_CASE("monitor_wait releases fully and saves depth") {
  auto m = monitor();
  m.holder = T("t1");
  m.depth = 3;
  auto r = monitor_wait(m, {T("t1"), 4, false});
  REQUIRE_FALSE(r.error);
  CHECK(r.monitor.wait_set.str() == "{4:<t1>}");
  CHECK(r.monitor.saved_depths.at(T("t1")) == 3);
  CHECK_FALSE(r.monitor.holder);
  CHECK(r.monitor.depth == 0);

  CHECK(monitor_wait(monitor(), {T("t1"), 4, false}).error ==
        ExceptionKind::IllegalMonitorState);
  CHECK(monitor_wait(m, {T("t1"), 4, true}).error == ExceptionKind::Interrupted);

  // notify then release: t1 gets the lock back with depth 3
  auto held = try_acquire(r.monitor, {T("t2"), 4, false}).monitor;
  auto n = monitor_notify(held, T("t2"));
  CHECK(n.resumed == std::vector<ThreadId>{T("t1")});
  auto back = release_once(n.monitor, T("t2"));
  REQUIRE(back.handover);
  CHECK(back.handover->from_wait);
  CHECK(back.monitor.depth == 3);
  CHECK(back.monitor.saved_depths.empty());
}

TEST_CASE("monitor_notify") {
  auto m = monitor();
  m.holder = T("h");
  m.depth = 1;
  auto empty = monitor_notify(m, T("h"));
  CHECK(empty.resumed.empty());
  CHECK(empty.monitor == m);
  m.wait_set = enqueue(enqueue({}, T("t2"), 9), T("t3"), 5);
  CHECK(monitor_notify(m, T("h")).resumed == std::vector<ThreadId>{T("t2")});
  CHECK(monitor_notify(m, T("x")).error == ExceptionKind::IllegalMonitorState);
}

TEST_CASE("object_fw realises the synchronised method skeleton") {
  const auto& ch = sync_channels();
  auto table = protocol_table({"t1"}, {"readCall", "readRet"});
  auto script = critical_section("t1");
  script.insert(script.begin(), EventPattern{T("readCall"), {}});
  script.push_back(EventPattern{T("readRet"), {}});
  Composition comp(table, {buf_fw({{T("t1"), 5}}), client("t1", script)});
  std::vector<std::string> prefix;
  std::vector<std::vector<std::string>> traces;
  all_traces(comp, comp.initial_state(), prefix, traces);
  std::vector<std::string> expected = {"readCall()", "startSyncMeth(buf,t1)",
                                       "lockAcquired(buf,t1)", "endSyncMeth(buf,t1)",
                                       "readRet()"};
  CHECK(std::find(traces.begin(), traces.end(), expected) != traces.end());
  (void)ch;
}

TEST_CASE("waitCall without the lock throws and diverges") {
  const auto& ch = sync_channels();
  auto table = protocol_table({"t1"});
  Composition comp(table, {buf_fw({{T("t1"), 5}}), client("t1", {lock_ev(ch.wait_call, "t1")})});
  auto s = comp.system_steps(comp.initial_state());
  REQUIRE(s.size() == 1);
  CHECK(s[0].label.str() == "waitCall(buf,t1)");
  auto s2 = comp.system_steps(s[0].next);
  REQUIRE(s2.size() == 1);
  CHECK(s2[0].label.str() == "throw(illegalMonitorStateException)");
  CHECK(comp.is_divergent(s2[0].next));
}

TEST_CASE("second client acquires only after the first releases") {
  auto table = protocol_table({"t1", "t2"});
  Composition comp(table, {buf_fw({{T("t1"), 5}, {T("t2"), 5}}),
                           client("t1", critical_section("t1")),
                           client("t2", critical_section("t2"))});
  std::vector<std::string> prefix;
  std::vector<std::vector<std::string>> traces;
  all_traces(comp, comp.initial_state(), prefix, traces);
  CHECK(traces.size() > 2);
  for (const auto& tr : traces) {
    auto a1 = index_in(tr, "lockAcquired(buf,t1)");
    auto e1 = index_in(tr, "endSyncMeth(buf,t1)");
    auto a2 = index_in(tr, "lockAcquired(buf,t2)");
    auto e2 = index_in(tr, "endSyncMeth(buf,t2)");
    REQUIRE(a1 < tr.size());
    REQUIRE(a2 < tr.size());
    CHECK((e1 < a2 || e2 < a1));
  }
  for (const auto& s : reachable(comp)) {
    const auto& m = object_state(s, 0).monitor();
    CHECK(m.holder.has_value() == (m.depth > 0));
    if (m.holder) CHECK_FALSE(m.entry_queue.contains(*m.holder));
  }
}

TEST_CASE("equal-priority threads acquire in arrival order") {
  auto table = protocol_table({"t1", "t2", "t3"});
  Composition comp(table, {buf_fw({{T("t1"), 5}, {T("t2"), 5}, {T("t3"), 5}}),
                           client("t1", critical_section("t1")),
                           client("t2", critical_section("t2")),
                           client("t3", critical_section("t3"))});
  std::vector<std::string> prefix;
  std::vector<std::vector<std::string>> traces;
  all_traces(comp, comp.initial_state(), prefix, traces);
  CHECK(traces.size() >= 6);
  for (const auto& tr : traces) {
    std::vector<std::string> started, acquired;
    for (const auto& e : tr) {
      if (e.rfind("startSyncMeth", 0) == 0) started.push_back(e.substr(e.find('(')));
      if (e.rfind("lockAcquired", 0) == 0) acquired.push_back(e.substr(e.find('(')));
    }
    CHECK(started == acquired);
  }
}

TEST_CASE("waiting thread gets its depth back") {
  const auto& ch = sync_channels();
  auto table = protocol_table({"t1", "t2"});
  std::vector<EventPattern> waiter = {
      lock_ev(ch.start_sync_meth, "t1"), lock_ev(ch.lock_acquired, "t1"),
      lock_ev(ch.start_sync_meth, "t1"), lock_ev(ch.lock_acquired, "t1"),
      lock_ev(ch.wait_call, "t1"),       lock_ev(ch.wait_ret, "t1"),
      lock_ev(ch.end_sync_meth, "t1"),   lock_ev(ch.end_sync_meth, "t1")};
  std::vector<EventPattern> notifier = {
      lock_ev(ch.start_sync_meth, "t2"), lock_ev(ch.lock_acquired, "t2"),
      lock_ev(ch.notify, "t2"), lock_ev(ch.end_sync_meth, "t2")};
  Composition comp(table, {buf_fw({{T("t1"), 5}, {T("t2"), 5}}), client("t1", waiter),
                           client("t2", notifier)});
  bool saw_wait = false, saw_resume = false;
  std::function<void(const SystemState&)> walk = [&](const SystemState& s) {
    for (const auto& t : comp.system_steps(s)) {
      const auto& m = object_state(t.next, 0).monitor();
      if (t.label.str() == "waitCall(buf,t1)") {
        saw_wait = true;
        CHECK(m.depth <= 1);  // 0, or 1 when t2 was queued and took over
        CHECK(m.holder != T("t1"));
      }
      if (t.label.str() == "waitRet(buf,t1)") {
        saw_resume = true;
        CHECK(m.holder == T("t1"));
        CHECK(m.depth == 2);
      }
      walk(t.next);
    }
  };
  walk(comp.initial_state());
  CHECK(saw_wait);
  CHECK(saw_resume);
}

TEST_CASE("spurious wakeups resume a waiter without notify") {
  const auto& ch = sync_channels();
  auto table = protocol_table({"t1"});
  std::vector<EventPattern> waiter = {
      lock_ev(ch.start_sync_meth, "t1"), lock_ev(ch.lock_acquired, "t1"),
      lock_ev(ch.wait_call, "t1"), lock_ev(ch.wait_ret, "t1"),
      lock_ev(ch.end_sync_meth, "t1")};
  auto count_ret = [&](bool spurious) {
    Composition comp(table, {buf_fw({{T("t1"), 5}}, spurious), client("t1", waiter)});
    std::vector<std::string> prefix;
    std::vector<std::vector<std::string>> traces;
    all_traces(comp, comp.initial_state(), prefix, traces);
    int n = 0;
    for (const auto& tr : traces) n += index_in(tr, "waitRet(buf,t1)") < tr.size();
    return n;
  };
  CHECK(count_ret(false) == 0);
  CHECK(count_ret(true) > 0);
}

TEST_CASE("interrupted thread throws at waitCall") {
  const auto& ch = sync_channels();
  auto table = protocol_table({"t1"});
  Component app = client("t1", {EventPattern{ch.interrupt, {FieldPattern::out(id_lit(T("t1")))}},
                                lock_ev(ch.start_sync_meth, "t1"),
                                lock_ev(ch.lock_acquired, "t1"), lock_ev(ch.wait_call, "t1")});
  app.interests[0] = Interest{ch.interrupt, {Value::id(T("t1"))}};
  app.interests.push_back({ch.end_of_program, {}});
  Composition comp(table, {buf_fw({{T("t1"), 5}}), app,
                           thread_fw(T("t1"), 5, Domain::identifiers({T("buf")}))});
  std::vector<std::string> prefix;
  std::vector<std::vector<std::string>> traces;
  all_traces(comp, comp.initial_state(), prefix, traces);
  bool thrown = false;
  for (const auto& tr : traces) {
    if (!tr.empty() && tr.back() == "throw(interrupted)") thrown = true;
  }
  CHECK(thrown);
}

TEST_CASE("ceiling violation is thrown on lock request") {
  const auto& ch = sync_channels();
  auto table = protocol_table({"t1"});
  Composition comp(table, {buf_fw({{T("t1"), 9}}, false, 5),
                           client("t1", critical_section("t1"))});
  auto s = comp.system_steps(comp.initial_state());
  REQUIRE(s.size() == 1);
  auto s2 = comp.system_steps(s[0].next);
  REQUIRE(s2.size() == 1);
  CHECK(s2[0].label.str() == "throw(ceilingViolation)");
  (void)ch;
}
