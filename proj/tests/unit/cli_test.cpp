#include <chrono>
#include <sstream>
#include <thread>

#include "doctest.h"
#include "helpers.hpp"
#include "httplib.h"
#include "scj2/checker/report.hpp"
#include "scj2/cli/pipeline.hpp"
#include "scj2/cli/server.hpp"

using namespace scj2;
using nlohmann::ordered_json;

namespace {

cli::RunConfig config_for(const std::string& rel) {
  cli::RunConfig cfg;
  cfg.input = testutil::source_path(rel);
  cfg.checks = cli::CheckRequest::all();
  return cfg;
}

std::shared_ptr<const kernel::Composition> flatbuffer() {
  auto l = cli::load_file(testutil::source_path("programs/flatbuffer.scj2"), {});
  REQUIRE(l.ok());
  return l.comp;
}

// Index of the first offered event equal to `ev`, or -1.
long find_event(const ordered_json& events, const std::string& ev) {
  for (const auto& e : events["events"]) {
    if (e["event"] == ev) return e["index"].get<long>();
  }
  return -1;
}

// Steps through `script` in order; while the next scripted event is not
// offered, takes the first offered event that is not Writer activity, if
// there is one.
bool drive(cli::Session& s, const std::vector<std::string>& script) {
  for (const auto& target : script) {
    for (int guard = 0;; ++guard) {
      if (guard > 200) return false;
      auto events = s.events();
      long i = find_event(events, target);
      if (i >= 0) {
        s.step(static_cast<std::size_t>(i));
        break;
      }
      if (events["events"].empty()) return false;
      long pick = 0;
      for (const auto& e : events["events"]) {
        if (e["event"].get<std::string>().find("Writer") == std::string::npos) {
          pick = e["index"].get<long>();
          break;
        }
      }
      s.step(static_cast<std::size_t>(pick));
    }
  }
  return true;
}

bool reader_waits(const ordered_json& state) {
  for (const auto& m : state["monitors"]) {
    for (const auto& level : m["waitSet"]) {
      for (const auto& t : level["threads"]) {
        if (t == "Reader") return true;
      }
    }
  }
  return false;
}

}  // namespace

TEST_CASE("check exit statuses") {
  auto ok = cli::cmd_check(config_for("programs/flatbuffer.scj2"));
  CHECK(ok.exit_status == 0);
  CHECK(ok.report["partial"] == false);

  auto bad = cli::cmd_check(config_for("tests/programs/double_registration.scj2"));
  CHECK(bad.exit_status == 1);
  bool found = false;
  for (const auto& v : bad.report["verdicts"]) {
    if (v["property"].get<std::string>().find("illegalStateException") != std::string::npos) {
      found = true;
      CHECK(v["status"] == "fails");
      CHECK(v["trace"].back() == "throw(illegalStateException)");
    }
  }
  CHECK(found);

  auto missing = cli::cmd_check(config_for("programs/does_not_exist.scj2"));
  CHECK(missing.exit_status == 2);
  CHECK(missing.report.contains("error"));

  auto limited_cfg = config_for("programs/flatbuffer.scj2");
  limited_cfg.limits.max_states = 100;
  auto limited = cli::cmd_check(limited_cfg);
  CHECK(limited.exit_status == 3);
  CHECK(limited.report["partial"] == true);
}

TEST_CASE("program errors are reported as diagnostics") {
  auto l = cli::load_text("safelet A { sequencer = Missing; }", {});
  CHECK_FALSE(l.ok());
  auto report = cli::diagnostics_report("inline", l);
  REQUIRE(report["diagnostics"].size() >= 1);
  CHECK(report["diagnostics"][0]["code"] == "E010");
  CHECK(report["diagnostics"][0]["severity"] == "error");
}

TEST_CASE("structured reports are byte-identical across runs and worker counts") {
  auto cfg = config_for("programs/flatbuffer.scj2");
  cfg.checks.counts.push_back({"writeCall", "=", 5});
  auto a = cli::cmd_check(cfg).report.dump(2);
  auto b = cli::cmd_check(cfg).report.dump(2);
  cfg.limits.workers = 3;
  auto c = cli::cmd_check(cfg).report.dump(2);
  CHECK(a == b);
  CHECK(a == c);
}

TEST_CASE("graph export matches the explored graph") {
  auto comp = flatbuffer();
  auto g = check::explore(*comp, {});
  std::string text = cli::export_graph(*comp, g);
  std::istringstream in(text);
  std::string line;
  std::getline(in, line);
  CHECK(line == "scj2-graph 1 nodes " + std::to_string(g.nodes.size()) + " edges " +
                    std::to_string(g.edge_count) + " partial no");
  std::size_t nodes = 0, edges = 0;
  while (std::getline(in, line)) {
    if (testutil::starts_with(line, "node ")) ++nodes;
    if (testutil::starts_with(line, "edge ")) ++edges;
  }
  CHECK(nodes == g.nodes.size());
  CHECK(edges == g.edge_count);

  std::string channels = cli::export_channels(*comp);
  CHECK(channels.find("writeCall({FlatBufferMission}, {FlatBufferMission,Reader,Writer}, 0..7)\n") !=
        std::string::npos);
  CHECK(channels.find(" interleaved\n") != std::string::npos);
}

TEST_CASE("session stepping, backtracking and reset") {
  cli::Session s(flatbuffer(), {});
  auto start = s.state();
  CHECK(start["protocolVersion"] == cli::kProtocolVersion);
  CHECK(start["trace"].empty());
  auto events = s.events();
  REQUIRE(events["events"].size() == 1);
  CHECK(events["events"][0]["event"] == "getSequencerCall()");
  CHECK(events["events"][0]["channel"] == "getSequencerCall");

  CHECK(s.step(0));
  CHECK(s.depth() == 1);
  CHECK_FALSE(s.step(99));
  CHECK(s.depth() == 1);
  auto second = s.events();
  REQUIRE(second["events"].size() == 1);
  CHECK(second["events"][0]["values"] == ordered_json::array({"FlatBufferSequencer"}));
  CHECK(s.step(0));
  CHECK(s.state()["trace"] == ordered_json::array({"getSequencerCall()",
                                                   "getSequencerRet(FlatBufferSequencer)"}));
  CHECK(s.backtrack());
  CHECK(s.depth() == 1);
  s.reset();
  CHECK(s.depth() == 0);
  CHECK_FALSE(s.backtrack());
  CHECK(s.state() == start);
}

TEST_CASE("session scenario: the reader waits on an empty buffer") {
  cli::Session s(flatbuffer(), {});
  REQUIRE(drive(s, {"readCall(FlatBufferMission,Reader)", "waitCall(FlatBufferMission,Reader)"}));
  auto st = s.state();
  // the monitor is released while the reader waits
  REQUIRE(st["monitors"].size() == 1);
  CHECK(st["monitors"][0]["holder"].is_null());
  CHECK(reader_waits(st));
  CHECK(st["shared"]["FlatBufferMission.buffer"] == 0);

  // the same state reached again through load_trace
  std::vector<std::string> trace;
  for (const auto& e : st["trace"]) trace.push_back(e.get<std::string>());
  cli::Session t(flatbuffer(), {});
  std::string error;
  REQUIRE(t.load_trace(trace, error));
  CHECK(t.state() == st);
  CHECK_FALSE(t.load_trace({"end_of_program()"}, error));
  CHECK_FALSE(error.empty());
  CHECK(t.state() == st);
}

TEST_CASE("HTTP protocol on an ephemeral port") {
  cli::Session session(flatbuffer(), {});
  httplib::Server server;
  cli::install_routes(server, session);
  int port = server.bind_to_any_port("127.0.0.1");
  REQUIRE(port > 0);
  std::thread runner([&] { server.listen_after_bind(); });
  server.wait_until_ready();

  httplib::Client client("127.0.0.1", port);
  auto state = client.Get("/state");
  REQUIRE(state);
  CHECK(state->status == 200);
  CHECK(state->get_header_value("Access-Control-Allow-Origin") == "*");
  CHECK(ordered_json::parse(state->body)["trace"].empty());

  auto events = client.Get("/events");
  REQUIRE(events);
  CHECK(ordered_json::parse(events->body)["events"][0]["event"] == "getSequencerCall()");

  auto step = client.Post("/step", R"({"index": 0})", "application/json");
  REQUIRE(step);
  CHECK(step->status == 200);
  CHECK(ordered_json::parse(step->body)["trace"] == ordered_json::array({"getSequencerCall()"}));

  auto bad_index = client.Post("/step", R"({"index": 42})", "application/json");
  REQUIRE(bad_index);
  CHECK(bad_index->status == 409);
  auto malformed = client.Post("/step", "not json", "application/json");
  REQUIRE(malformed);
  CHECK(malformed->status == 400);

  auto back = client.Post("/backtrack", "", "application/json");
  REQUIRE(back);
  CHECK(back->status == 200);
  auto back_again = client.Post("/backtrack", "", "application/json");
  REQUIRE(back_again);
  CHECK(back_again->status == 409);

  auto trace = client.Post(
      "/trace", R"j({"events": ["getSequencerCall()", "getSequencerRet(FlatBufferSequencer)"]})j",
      "application/json");
  REQUIRE(trace);
  CHECK(trace->status == 200);
  CHECK(ordered_json::parse(trace->body)["trace"].size() == 2);
  auto bad_trace = client.Post("/trace", R"j({"events": ["end_of_program()"]})j", "application/json");
  REQUIRE(bad_trace);
  CHECK(bad_trace->status == 422);

  auto reset = client.Post("/reset", "", "application/json");
  REQUIRE(reset);
  CHECK(ordered_json::parse(reset->body)["trace"].empty());

  auto options = client.Options("/step");
  REQUIRE(options);
  CHECK(options->status == 204);

  server.stop();
  runner.join();
}
