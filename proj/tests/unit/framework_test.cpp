#include <map>

#include "doctest.h"
#include "helpers.hpp"
#include "scj2/checker/checks.hpp"

using namespace scj2;
using testutil::starts_with;

namespace {

const char* kNullSequencer = "safelet A { sequencer = null; }\n";

const char* kTwoMissions = R"(
safelet A { sequencer = Seq; }
sequencer Seq { missions = [M1, M2]; }
mission M1 { registers = []; }
mission M2 { registers = []; }
)";

const char* kNoMissions = R"(
safelet A { sequencer = Seq; }
sequencer Seq { missions = []; }
)";

const char* kOneShot = R"(
safelet A { sequencer = Seq; }
sequencer Seq { missions = [M]; }
mission M { registers = [O]; }
oneshot O priority=1 offset=3 { handle { requestTermination(M); } }
)";

const char* kThread = R"(
safelet A { sequencer = Seq; }
sequencer Seq { missions = [M]; }
mission M { registers = [T]; }
thread T priority=1 { run { probe(hi); requestTermination(M); } }
)";

const char* kStopForwarding = R"(
safelet A { sequencer = Seq; }
sequencer Seq { missions = [M]; }
mission M { registers = [P, T]; }
periodic P priority=2 period=2 { handle { probe(p); } }
thread T priority=1 { run { sleep(3); requestTermination(M); } }
)";

struct Run {
  kernel::Composition comp;
  check::StateGraph g;
};

Run run_text(const std::string& text) {
  auto comp = testutil::assemble_text(text);
  auto g = testutil::explore_all(comp);
  return {std::move(comp), std::move(g)};
}

// Counts events with the given prefix on every path and fails once the count
// exceeds `max`.
testutil::Monitor at_most(const std::string& prefix, int max) {
  return [=](int q, const std::string& ev) -> std::optional<int> {
    if (!starts_with(ev, prefix)) return q;
    if (q + 1 > max) return std::nullopt;
    return q + 1;
  };
}

bool some_path_has(const check::StateGraph& g, const std::string& ev) {
  return testutil::all_events(g).count(ev) > 0;
}

}  // namespace

TEST_CASE("every run starts by asking the safelet for its sequencer") {
  auto r = run_text(kThread);
  REQUIRE(r.g.nodes[0].edges.size() == 1);
  CHECK(r.g.nodes[0].edges[0].label.str() == "getSequencerCall()");
  const auto& second = r.g.nodes[r.g.nodes[0].edges[0].target].edges;
  REQUIRE(second.size() == 1);
  CHECK(second[0].label.str() == "getSequencerRet(Seq)");
}

TEST_CASE("a null sequencer raises illegalArgumentException") {
  auto r = run_text(kNullSequencer);
  auto v = check::check_exception(r.g, sync::ExceptionKind::IllegalArgument);
  CHECK(v.status == check::Status::Fails);
  REQUIRE(v.counterexample);
  std::vector<std::string> trace;
  for (const auto& l : v.counterexample->trace) trace.push_back(l.str());
  CHECK(trace == std::vector<std::string>{"getSequencerCall()", "getSequencerRet(null)",
                                          "throw(illegalArgumentException)"});
  CHECK(check::replays(r.comp, *v.counterexample, {}));
}

TEST_CASE("end_of_program happens at most once and the program ends") {
  for (const char* text : {kTwoMissions, kNoMissions, kOneShot, kThread, kStopForwarding}) {
    CAPTURE(text);
    auto r = run_text(text);
    CHECK_FALSE(testutil::find_violation(r.g, at_most("end_of_program", 1)));
    CHECK(some_path_has(r.g, "end_of_program()"));
    CHECK(check::check_deadlock(r.g).status == check::Status::Holds);
    CHECK(check::check_divergence(r.g).status == check::Status::Holds);
  }
}

TEST_CASE("a sequencer hands out its missions in order, then null") {
  auto r = run_text(kTwoMissions);
  const std::vector<std::string> expected = {"getNextMissionRet(Seq,M1)",
                                             "getNextMissionRet(Seq,M2)",
                                             "getNextMissionRet(Seq,null)"};
  auto v = testutil::find_violation(r.g, [&](int q, const std::string& ev) -> std::optional<int> {
    if (!starts_with(ev, "getNextMissionRet")) return q;
    if (q < static_cast<int>(expected.size()) && ev == expected[q]) return q + 1;
    return std::nullopt;
  });
  CHECK_FALSE(v);
  // a mission finishes before the next one starts
  auto overlap = testutil::find_violation(r.g, [](int q, const std::string& ev) -> std::optional<int> {
    if (starts_with(ev, "start_mission")) return q == 0 ? std::optional<int>(1) : std::nullopt;
    if (starts_with(ev, "mission_done")) return q == 1 ? std::optional<int>(0) : std::nullopt;
    return q;
  });
  CHECK_FALSE(overlap);
}

TEST_CASE("an empty mission list ends the program without starting a mission") {
  auto r = run_text(kNoMissions);
  auto events = testutil::all_events(r.g);
  for (const auto& e : events) CHECK_FALSE(starts_with(e, "start_mission"));
  CHECK(events.count("getNextMissionRet(Seq,null)") == 1);
  CHECK(events.count("end_of_program()") == 1);
}

TEST_CASE("termination stops every registered schedulable before cleanup") {
  auto r = run_text(kStopForwarding);
  // 0 running, 1 termination requested, 2 periodic stopped
  auto v = testutil::find_violation(r.g, [](int q, const std::string& ev) -> std::optional<int> {
    if (starts_with(ev, "requestTermination(M,")) return q == 0 ? 1 : q;
    if (ev == "stop(P)") return q == 1 ? std::optional<int>(2) : std::nullopt;
    if (starts_with(ev, "missionCleanupCall(M)")) return q == 2 ? std::optional<int>(q) : std::nullopt;
    return q;
  });
  CHECK_FALSE(v);
  CHECK(some_path_has(r.g, "missionCleanupCall(M)"));
}

TEST_CASE("registering a schedulable twice raises illegalStateException") {
  auto comp = testutil::assemble_file("tests/programs/double_registration.scj2");
  auto g = testutil::explore_all(comp);
  auto v = check::check_exception(g, sync::ExceptionKind::IllegalState);
  CHECK(v.status == check::Status::Fails);
  REQUIRE(v.counterexample);
  CHECK(v.counterexample->trace.back().str() == "throw(illegalStateException)");
  CHECK(check::replays(comp, *v.counterexample, {}));
  bool saw_false = false;
  for (const auto& e : testutil::all_events(g)) saw_false |= e == "checkSchedulable(FlatBufferMission,false)";
  CHECK(saw_false);
}

TEST_CASE("a mission with no registrations still runs to completion") {
  auto r = run_text(kTwoMissions);
  auto events = testutil::all_events(r.g);
  for (const auto& e : events) CHECK_FALSE(starts_with(e, "register("));
  CHECK(events.count("mission_done(M1)") == 1);
  CHECK(events.count("mission_done(M2)") == 1);
}

TEST_CASE("a one-shot handler with offset 3 is released after exactly 3 ticks") {
  auto r = run_text(kOneShot);
  // q counts ticks since start_schedulable(O); 100 once released
  auto v = testutil::find_violation(r.g, [](int q, const std::string& ev) -> std::optional<int> {
    if (ev == "start_schedulable(O)") return 0;
    if (ev == "tick()" && q >= 0 && q < 100) return q + 1;
    if (ev == "releaseStart(O)") return q == 3 ? std::optional<int>(100) : std::nullopt;
    return q;
  });
  CHECK_FALSE(v);
  CHECK(some_path_has(r.g, "releaseStart(O)"));
}

TEST_CASE("periodic overrun depends on the handler's duration") {
  auto count_zero = [](const char* rel, const char* pattern) {
    auto comp = testutil::assemble_file(rel);
    auto g = testutil::explore_all(comp);
    auto v = check::check_event_count(g, kernel::ChannelPattern::parse(pattern), pattern,
                                      check::Relation::Eq, 0);
    if (v.counterexample) CHECK(check::replays(comp, *v.counterexample, {}));
    return v.status;
  };
  CHECK(count_zero("tests/programs/overrun.scj2", "overrun") == check::Status::Fails);
  CHECK(count_zero("tests/programs/no_overrun.scj2", "overrun") == check::Status::Holds);
  CHECK(count_zero("tests/programs/deadline_miss.scj2", "deadlineMiss") == check::Status::Fails);
}

TEST_CASE("a managed thread is released as soon as it is started") {
  auto r = run_text(kThread);
  // 0 not started, 1 started, 2 released
  auto v = testutil::find_violation(r.g, [](int q, const std::string& ev) -> std::optional<int> {
    if (ev == "start_schedulable(T)") return q == 0 ? std::optional<int>(1) : std::nullopt;
    if (ev == "releaseStart(T)") return q == 1 ? std::optional<int>(2) : std::nullopt;
    if (q == 1) return std::nullopt;
    return q;
  });
  CHECK_FALSE(v);
}

TEST_CASE("flatbuffer assembles the expected processes") {
  auto comp = testutil::assemble_file("programs/flatbuffer.scj2");
  std::map<std::string, int> kinds;
  for (const auto& line : comp.describe(comp.initial_state())) {
    kinds[line.substr(0, line.find('.'))]++;
  }
  const std::map<std::string, int> expected = {
      {"SafeletFW", 1},   {"SequencerFW", 1}, {"MissionFW", 1},  {"ManagedThreadFW", 2},
      {"SafeletApp", 1},  {"SequencerApp", 1}, {"MissionApp", 1}, {"ThreadApp", 2},
      {"ObjectFW", 1},    {"ThreadFW", 2}};
  CHECK(kinds == expected);
  CHECK(comp.components().size() == 13);
}

TEST_CASE("a nested sequencer runs its missions inside the outer mission") {
  auto comp = testutil::assemble_file("programs/corpus/nested_single.scj2");
  auto g = testutil::explore_all(comp);
  REQUIRE_FALSE(g.partial);
  CHECK(check::check_deadlock(g).status == check::Status::Holds);
  CHECK(check::check_divergence(g).status == check::Status::Holds);
  CHECK(some_path_has(g, "start_mission(InnerWork,Inner)"));
  // 0 inner mission running, 1 inner mission done, 2 nested sequencer done
  auto v = testutil::find_violation(g, [](int q, const std::string& ev) -> std::optional<int> {
    if (ev == "mission_done(InnerWork)") return q == 0 ? std::optional<int>(1) : std::nullopt;
    if (ev == "done(Inner)") return q == 1 ? std::optional<int>(2) : std::nullopt;
    if (ev == "mission_done(Outer)") return q == 2 ? std::optional<int>(3) : std::nullopt;
    return q;
  });
  CHECK_FALSE(v);
  CHECK(some_path_has(g, "mission_done(Outer)"));
}
