#include <map>
#include <set>

#include "doctest.h"
#include "helpers.hpp"
#include "scj2/checker/checks.hpp"
#include "scj2/cli/pipeline.hpp"
#include "scj2/kernel/errors.hpp"

using namespace scj2;
using kernel::SystemState;

namespace {

kernel::Component term_component(const char* id, kernel::TermPtr t,
                                 std::initializer_list<const char*> chans) {
  kernel::Component c;
  c.id = intern(id);
  c.term = std::move(t);
  for (const char* ch : chans) c.interests.push_back(kernel::Interest{intern(ch), {}});
  c.timed = kernel::mentions_time(*c.term);
  return c;
}

const char* kThread = R"(
safelet A { sequencer = Seq; }
sequencer Seq { missions = [M]; }
mission M { registers = [T, P]; }
thread T priority=1 { run { probe(hi); sleep(2); requestTermination(M); } }
periodic P priority=2 period=2 { handle { probe(p); } }
)";

// Deduplicated list of raw states.
struct RawSet {
  std::vector<SystemState> states;
  bool insert(const SystemState& s) {
    for (const auto& t : states) {
      if (t.hash == s.hash && t == s) return false;
    }
    states.push_back(s);
    return true;
  }
};

bool stuck_or_done(const kernel::Composition& comp, const SystemState& s) {
  return comp.is_divergent(s) || comp.is_terminated(s);
}

std::vector<kernel::Transition> steps_of(const kernel::Composition& comp, const SystemState& s,
                                         const kernel::SystemOptions& opts) {
  try {
    return comp.system_steps(s, opts);
  } catch (const Error&) {
    return {};
  }
}

RawSet tau_close(const kernel::Composition& comp, RawSet set, const kernel::SystemOptions& opts) {
  for (std::size_t i = 0; i < set.states.size(); ++i) {
    const SystemState s = set.states[i];
    if (stuck_or_done(comp, s)) continue;
    for (auto& t : steps_of(comp, s, opts)) {
      if (t.label.is_tau()) set.insert(t.next);
    }
  }
  return set;
}

using Traces = std::set<std::vector<std::string>>;

// Visible traces up to `max_len` straight from the transition relation,
// without the checker's graph or tau-closure nodes.
Traces naive_traces(const kernel::Composition& comp, std::size_t max_len,
                    const kernel::SystemOptions& opts = {}) {
  Traces out;
  std::map<std::vector<std::string>, RawSet> layer;
  RawSet init;
  init.insert(comp.initial_state());
  layer[{}] = tau_close(comp, init, opts);
  for (std::size_t len = 0; len <= max_len && !layer.empty(); ++len) {
    std::map<std::vector<std::string>, RawSet> next;
    for (auto& [trace, set] : layer) {
      out.insert(trace);
      if (len == max_len) continue;
      for (const auto& s : set.states) {
        if (stuck_or_done(comp, s)) continue;
        for (auto& t : steps_of(comp, s, opts)) {
          if (t.label.is_tau()) continue;
          auto tr = trace;
          tr.push_back(t.label.str());
          next[tr].insert(t.next);
        }
      }
    }
    for (auto& [trace, set] : next) set = tau_close(comp, set, opts);
    layer = std::move(next);
  }
  return out;
}

Traces graph_traces(const check::StateGraph& g, std::size_t max_len) {
  Traces out;
  std::map<std::vector<std::string>, std::set<std::uint32_t>> layer = {{{}, {0}}};
  for (std::size_t len = 0; len <= max_len && !layer.empty(); ++len) {
    std::map<std::vector<std::string>, std::set<std::uint32_t>> next;
    for (const auto& [trace, nodes] : layer) {
      out.insert(trace);
      if (len == max_len) continue;
      for (auto n : nodes) {
        for (const auto& e : g.nodes[n].edges) {
          auto tr = trace;
          tr.push_back(e.label.str());
          next[tr].insert(e.target);
        }
      }
    }
    layer = std::move(next);
  }
  return out;
}

// Some reachable raw state offers nothing and has not finished.
bool naive_deadlock(const kernel::Composition& comp) {
  RawSet seen;
  seen.insert(comp.initial_state());
  for (std::size_t i = 0; i < seen.states.size(); ++i) {
    const SystemState s = seen.states[i];
    if (stuck_or_done(comp, s)) continue;
    auto steps = comp.system_steps(s);
    if (steps.empty()) return true;
    for (auto& t : steps) seen.insert(t.next);
  }
  return false;
}

// Every trace of `sub` is a trace of `sup`, by simulating sets of `sup` nodes.
bool trace_included(const check::StateGraph& sub, const check::StateGraph& sup) {
  using Pair = std::pair<std::uint32_t, std::set<std::uint32_t>>;
  std::set<Pair> seen;
  std::vector<Pair> work = {{0, {0}}};
  seen.insert(work.back());
  while (!work.empty()) {
    Pair p = work.back();
    work.pop_back();
    for (const auto& e : sub.nodes[p.first].edges) {
      std::set<std::uint32_t> targets;
      for (auto n : p.second) {
        for (const auto& f : sup.nodes[n].edges) {
          if (check::compare(f.label, e.label) == 0) targets.insert(f.target);
        }
      }
      if (targets.empty()) return false;
      Pair q{e.target, std::move(targets)};
      if (seen.insert(q).second) work.push_back(std::move(q));
    }
  }
  return true;
}

}  // namespace

TEST_CASE("a single prefix gives two states and one edge") {
  kernel::ChannelTable ch;
  ch.add(kernel::ChannelDecl{intern("a"), {}});
  auto P = term_component("P", kernel::prefix(kernel::EventPattern{intern("a"), {}},
                                              kernel::skip()),
                          {"a"});
  kernel::Composition comp(ch, {P});
  auto g = check::explore(comp, {});
  CHECK(g.nodes.size() == 2);
  CHECK(g.edge_count == 1);
  CHECK(g.max_depth == 1);
  CHECK_FALSE(g.partial);
  CHECK(g.nodes[1].terminated);
  CHECK(check::check_deadlock(g).status == check::Status::Holds);
}

TEST_CASE("a blocked prefix is a deadlock with a replayable witness") {
  kernel::ChannelTable ch;
  ch.add(kernel::ChannelDecl{intern("a"), {}});
  ch.add(kernel::ChannelDecl{intern("b"), {}});
  auto P = term_component("P", kernel::prefix(kernel::EventPattern{intern("a"), {}},
                                              kernel::prefix(kernel::EventPattern{intern("b"), {}},
                                                             kernel::skip())),
                          {"a", "b"});
  auto Q = term_component("Q", kernel::prefix(kernel::EventPattern{intern("a"), {}},
                                              kernel::skip()),
                          {"a", "b"});
  kernel::Composition comp(ch, {P, Q});
  auto g = check::explore(comp, {});
  auto v = check::check_deadlock(g);
  REQUIRE(v.status == check::Status::Fails);
  REQUIRE(v.counterexample);
  REQUIRE(v.counterexample->trace.size() == 1);
  CHECK(v.counterexample->trace[0].str() == "a()");
  CHECK(check::replays(comp, *v.counterexample, {}));
}

TEST_CASE("exploration is deterministic across runs and worker counts") {
  auto comp = testutil::assemble_file("programs/flatbuffer.scj2");
  check::ExploreLimits one;
  check::ExploreLimits four;
  four.workers = 4;
  auto a = check::explore(comp, one);
  auto b = check::explore(comp, one);
  auto c = check::explore(comp, four);
  auto text = cli::export_graph(comp, a);
  CHECK(text == cli::export_graph(comp, b));
  CHECK(text == cli::export_graph(comp, c));
}

TEST_CASE("graph traces agree with a naive enumeration of the transition relation") {
  for (const char* rel : {"", "programs/corpus/three_oneshots.scj2"}) {
    CAPTURE(rel);
    auto comp = *rel ? testutil::assemble_file(rel) : testutil::assemble_text(kThread);
    auto g = check::explore(comp, {});
    REQUIRE_FALSE(g.partial);
    const std::size_t len = 24;
    auto expected = naive_traces(comp, len);
    auto got = graph_traces(g, len);
    CHECK(expected.size() > 20);
    CHECK(got == expected);
  }
}

TEST_CASE("deadlock verdicts agree with a naive search") {
  for (const char* rel : {"programs/flatbuffer.scj2", "tests/programs/no_notify.scj2",
                          "programs/corpus/three_threads.scj2"}) {
    CAPTURE(rel);
    auto comp = testutil::assemble_file(rel);
    auto g = check::explore(comp, {});
    bool fails = check::check_deadlock(g).status == check::Status::Fails;
    CHECK(fails == naive_deadlock(comp));
  }
}

TEST_CASE("priority scheduling only removes behaviour") {
  auto comp = testutil::assemble_file("programs/flatbuffer.scj2");
  check::ExploreLimits prio;
  prio.mode = check::Mode::Priority;
  auto free = check::explore(comp, {});
  auto faithful = check::explore(comp, prio);
  CHECK(faithful.nodes.size() <= free.nodes.size());
  CHECK(trace_included(faithful, free));
}

TEST_CASE("order, count and alternation checks") {
  auto comp = testutil::assemble_file("programs/flatbuffer.scj2");
  auto g = check::explore(comp, {});
  auto pat = kernel::ChannelPattern::parse;

  CHECK(check::check_order(g, pat("initializeRet"), "initializeRet", pat("start_schedulable"),
                           "start_schedulable")
            .status == check::Status::Holds);
  auto backwards = check::check_order(g, pat("readRet"), "readRet", pat("writeCall"), "writeCall");
  CHECK(backwards.status == check::Status::Fails);
  REQUIRE(backwards.counterexample);
  CHECK(testutil::starts_with(backwards.counterexample->trace.back().str(), "writeCall"));
  CHECK(check::replays(comp, *backwards.counterexample, {}));

  CHECK(check::check_event_count(g, pat("interrupt"), "interrupt", check::Relation::Eq, 0).status ==
        check::Status::Holds);
  CHECK(check::check_event_count(g, pat("writeCall"), "writeCall", check::Relation::Eq, 5).status ==
        check::Status::Holds);
  CHECK(check::check_event_count(g, pat("writeCall"), "writeCall", check::Relation::Le, 4).status ==
        check::Status::Fails);
  CHECK(check::check_event_count(g, pat("writeCall.FlatBufferMission.Writer.3"), "w3",
                                 check::Relation::Eq, 1)
            .status == check::Status::Holds);

  CHECK(check::check_alternation(g, pat("start_mission"), "start_mission", pat("mission_done"),
                                 "mission_done")
            .status == check::Status::Holds);
}

TEST_CASE("replay rejects a trace the model cannot perform") {
  auto comp = testutil::assemble_file("programs/flatbuffer.scj2");
  std::vector<kernel::Event> bogus = {check::parse_trace_event(comp, "getSequencerCall()"),
                                      check::parse_trace_event(comp, "end_of_program()")};
  CHECK(check::replay(comp, bogus, {}).empty());
  std::vector<kernel::Event> real = {check::parse_trace_event(comp, "getSequencerCall()")};
  CHECK_FALSE(check::replay(comp, real, {}).empty());
  CHECK_THROWS_AS(check::parse_trace_event(comp, "noSuchChannel()"), Error);
}

TEST_CASE("state limits mark the graph partial and verdicts inconclusive") {
  auto comp = testutil::assemble_file("programs/flatbuffer.scj2");
  check::ExploreLimits small;
  small.max_states = 50;
  auto g = check::explore(comp, small);
  CHECK(g.partial);
  CHECK(g.limit == "max-states");
  CHECK(g.nodes.size() <= 50);
  CHECK(check::check_deadlock(g).status == check::Status::Inconclusive);

  check::ExploreLimits shallow;
  shallow.max_depth = 5;
  auto h = check::explore(comp, shallow);
  CHECK(h.partial);
  CHECK(h.limit == "max-depth");
  CHECK(h.max_depth == 5);
}
