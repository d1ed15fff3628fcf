#include "scj2/cli/server.hpp"

#include <cstdio>
#include <functional>
#include <mutex>
#include <ostream>

#include "httplib.h"
#include "scj2/checker/report.hpp"
#include "scj2/kernel/errors.hpp"

namespace scj2::cli {

using nlohmann::ordered_json;

Session::Session(std::shared_ptr<const kernel::Composition> comp, check::ExploreLimits limits)
    : comp_(std::move(comp)), limits_(limits) {
  reset();
}

Session::Frame Session::frame(kernel::SystemState s, std::optional<kernel::Label> via) const {
  Frame f;
  f.ex = check::expand(*comp_, s, limits_.system_options());
  f.state = std::move(s);
  f.via = std::move(via);
  return f;
}

void Session::reset() {
  stack_.clear();
  stack_.push_back(frame(comp_->initial_state(), std::nullopt));
}

bool Session::step(std::size_t index) {
  const auto& succ = stack_.back().ex.succ;
  if (index >= succ.size()) return false;
  stack_.push_back(frame(succ[index].second, succ[index].first));
  return true;
}

bool Session::backtrack() {
  if (stack_.size() <= 1) return false;
  stack_.pop_back();
  return true;
}

bool Session::load_trace(const std::vector<std::string>& trace, std::string& error) {
  std::vector<kernel::Event> events;
  try {
    for (const auto& t : trace) events.push_back(check::parse_trace_event(*comp_, t));
  } catch (const Error& e) {
    error = e.what();
    return false;
  }
  std::vector<Frame> path = {frame(comp_->initial_state(), std::nullopt)};
  std::function<bool(std::size_t)> search = [&](std::size_t i) {
    if (i == events.size()) return true;
    const auto succ = path.back().ex.succ;
    for (const auto& [label, next] : succ) {
      if (label.event != events[i]) continue;
      path.push_back(frame(next, label));
      if (search(i + 1)) return true;
      path.pop_back();
    }
    return false;
  };
  if (!search(0)) {
    error = "trace does not replay";
    return false;
  }
  stack_ = std::move(path);
  return true;
}

ordered_json Session::state() const {
  const Frame& f = stack_.back();
  ordered_json j;
  j["protocolVersion"] = kProtocolVersion;
  char id[17];
  std::snprintf(id, sizeof id, "%016llx", static_cast<unsigned long long>(f.state.hash));
  j["stateId"] = id;
  ordered_json s = check::state_json(*comp_, f.state);
  for (auto& [k, v] : s.items()) j[k] = v;
  ordered_json trace = ordered_json::array();
  for (std::size_t i = 1; i < stack_.size(); ++i) trace.push_back(stack_[i].via->str());
  j["trace"] = std::move(trace);
  j["terminated"] = f.ex.terminated;
  j["deadlock"] = f.ex.deadlock;
  j["divergent"] = f.ex.divergent;
  return j;
}

ordered_json Session::events() const {
  ordered_json list = ordered_json::array();
  const auto& succ = stack_.back().ex.succ;
  for (std::size_t i = 0; i < succ.size(); ++i) {
    const auto& e = succ[i].first.event;
    ordered_json values = ordered_json::array();
    for (const auto& v : e.values) {
      switch (v.kind) {
        case Value::Kind::Null: values.push_back(nullptr); break;
        case Value::Kind::Bool: values.push_back(v.as_bool()); break;
        case Value::Kind::Int: values.push_back(v.v); break;
        case Value::Kind::Id: values.push_back(sym_name(v.as_id())); break;
      }
    }
    list.push_back({{"index", i},
                    {"channel", sym_name(e.channel)},
                    {"values", values},
                    {"event", succ[i].first.str()}});
  }
  ordered_json j;
  j["protocolVersion"] = kProtocolVersion;
  j["events"] = std::move(list);
  return j;
}

namespace {

void reply(httplib::Response& res, const ordered_json& body, int status = 200) {
  res.status = status;
  res.set_header("Access-Control-Allow-Origin", "*");
  res.set_content(body.dump(), "application/json");
}

void fail(httplib::Response& res, int status, const std::string& message) {
  reply(res, ordered_json{{"error", message}}, status);
}

}  // namespace

void install_routes(httplib::Server& server, Session& session) {
  auto mu = std::make_shared<std::mutex>();
  using Req = const httplib::Request&;
  using Res = httplib::Response&;
  server.Get("/state", [&session, mu](Req, Res res) {
    std::lock_guard lock(*mu);
    reply(res, session.state());
  });
  server.Get("/events", [&session, mu](Req, Res res) {
    std::lock_guard lock(*mu);
    reply(res, session.events());
  });
  server.Post("/step", [&session, mu](Req req, Res res) {
    std::lock_guard lock(*mu);
    auto body = ordered_json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("index") || !body["index"].is_number_unsigned()) {
      return fail(res, 400, "expected {\"index\": n}");
    }
    if (!session.step(body["index"].get<std::size_t>())) {
      return fail(res, 409, "no such event");
    }
    reply(res, session.state());
  });
  server.Post("/backtrack", [&session, mu](Req, Res res) {
    std::lock_guard lock(*mu);
    if (!session.backtrack()) return fail(res, 409, "already at the initial state");
    reply(res, session.state());
  });
  server.Post("/reset", [&session, mu](Req, Res res) {
    std::lock_guard lock(*mu);
    session.reset();
    reply(res, session.state());
  });
  server.Post("/trace", [&session, mu](Req req, Res res) {
    std::lock_guard lock(*mu);
    auto body = ordered_json::parse(req.body, nullptr, false);
    if (body.is_discarded() || !body.contains("events") || !body["events"].is_array()) {
      return fail(res, 400, "expected {\"events\": [...]}");
    }
    std::vector<std::string> trace;
    for (const auto& e : body["events"]) {
      if (!e.is_string()) return fail(res, 400, "events must be strings");
      trace.push_back(e.get<std::string>());
    }
    std::string error;
    if (!session.load_trace(trace, error)) return fail(res, 422, error);
    reply(res, session.state());
  });
  server.Options(R"(/.*)", [](Req, Res res) {
    res.set_header("Access-Control-Allow-Origin", "*");
    res.set_header("Access-Control-Allow-Headers", "Content-Type");
    res.set_header("Access-Control-Allow-Methods", "GET, POST, OPTIONS");
    res.status = 204;
  });
}

bool serve(Session& session, const std::string& host, int port, std::ostream& log) {
  httplib::Server server;
  server.new_task_queue = [] { return new httplib::ThreadPool(1); };
  install_routes(server, session);
  if (!server.bind_to_port(host, port)) {
    log << "cannot bind " << host << ":" << port << "\n";
    return false;
  }
  log << "serving on http://" << host << ":" << port << "\n";
  return server.listen_after_bind();
}

}  // namespace scj2::cli
