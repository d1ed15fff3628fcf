#include "scj2/checker/report.hpp"

#include <sstream>

#include "scj2/sync/object_fw.hpp"

namespace scj2::check {

using nlohmann::ordered_json;

namespace {

ordered_json value_json(const Value& v) {
  switch (v.kind) {
    case Value::Kind::Null: return nullptr;
    case Value::Kind::Bool: return v.as_bool();
    case Value::Kind::Int: return v.v;
    case Value::Kind::Id: return sym_name(v.as_id());
  }
  return nullptr;
}

ordered_json store_json(const Store& s) {
  ordered_json out = ordered_json::object();
  for (const auto& [k, v] : s.sorted_by_name()) out[sym_name(k)] = value_json(v);
  return out;
}

ordered_json queue_json(const sync::PriorityQueueT& q) {
  ordered_json out = ordered_json::array();
  const auto& levels = q.levels();
  for (auto it = levels.rbegin(); it != levels.rend(); ++it) {
    ordered_json threads = ordered_json::array();
    for (Sym t : it->second) threads.push_back(sym_name(t));
    out.push_back({{"level", it->first}, {"threads", threads}});
  }
  return out;
}

ordered_json trace_json(const std::vector<kernel::Label>& trace) {
  ordered_json out = ordered_json::array();
  for (const auto& l : trace) out.push_back(l.str());
  return out;
}

}  // namespace

ordered_json state_json(const kernel::Composition& comp, const kernel::SystemState& s) {
  ordered_json components = ordered_json::array();
  ordered_json monitors = ordered_json::array();
  for (std::size_t i = 0; i < s.slots.size(); ++i) {
    const auto& slot = s.slots[i];
    ordered_json c;
    c["id"] = sym_name(comp.components()[i].id);
    c["position"] = slot.native ? slot.native->describe() : kernel::position(*slot.term);
    c["store"] = store_json(slot.store);
    c["terminated"] = slot.terminated();
    components.push_back(std::move(c));
    if (const auto* o = dynamic_cast<const sync::ObjectFW*>(slot.native.get())) {
      const auto& m = o->monitor();
      ordered_json mj;
      mj["object"] = sym_name(m.object);
      mj["ceiling"] = m.ceiling;
      mj["holder"] = m.holder ? ordered_json(sym_name(*m.holder)) : ordered_json(nullptr);
      mj["depth"] = m.depth;
      mj["entryQueue"] = queue_json(m.entry_queue);
      mj["waitSet"] = queue_json(m.wait_set);
      monitors.push_back(std::move(mj));
    }
  }
  ordered_json out;
  out["components"] = std::move(components);
  out["shared"] = store_json(s.shared);
  out["monitors"] = std::move(monitors);
  out["clock"] = s.clock;
  return out;
}

ordered_json verdict_json(const kernel::Composition& comp, const Verdict& v) {
  ordered_json j;
  j["property"] = v.property;
  j["status"] = status_name(v.status);
  j["states"] = v.states;
  if (!v.note.empty()) j["note"] = v.note;
  if (v.counterexample) {
    j["depth"] = v.counterexample->trace.size();
    j["trace"] = trace_json(v.counterexample->trace);
    j["finalState"] = state_json(comp, v.counterexample->final_state);
  }
  return j;
}

ordered_json report_json(const std::string& program, const kernel::Composition& comp,
                         const StateGraph& g, const std::vector<Verdict>& verdicts) {
  ordered_json j;
  j["version"] = kReportVersion;
  j["program"] = program;
  j["states"] = g.nodes.size();
  j["edges"] = g.edge_count;
  j["depth"] = g.max_depth;
  j["partial"] = g.partial;
  if (g.partial) j["limit"] = g.limit;
  std::size_t tau_loops = 0;
  for (const auto& n : g.nodes) tau_loops += n.tau_loop;
  j["tauLoopStates"] = tau_loops;
  ordered_json vs = ordered_json::array();
  for (const auto& v : verdicts) vs.push_back(verdict_json(comp, v));
  j["verdicts"] = std::move(vs);
  return j;
}

std::string render_human(const ordered_json& r) {
  std::ostringstream out;
  out << r["program"].get<std::string>() << ": " << r["states"].get<std::size_t>()
      << " states, " << r["edges"].get<std::size_t>() << " edges, depth "
      << r["depth"].get<std::size_t>();
  if (r["partial"].get<bool>()) out << " (partial: " << r["limit"].get<std::string>() << ")";
  out << "\n";
  for (const auto& v : r["verdicts"]) {
    out << "  " << v["property"].get<std::string>() << ": " << v["status"].get<std::string>();
    if (v.contains("note")) out << " (" << v["note"].get<std::string>() << ")";
    out << "\n";
    if (v.contains("trace")) {
      out << "    trace:";
      for (const auto& e : v["trace"]) out << " " << e.get<std::string>();
      out << "\n    final state:\n";
      for (const auto& c : v["finalState"]["components"]) {
        if (c["terminated"].get<bool>()) continue;
        out << "      " << c["id"].get<std::string>() << ": "
            << c["position"].get<std::string>();
        if (!c["store"].empty()) out << " " << c["store"].dump();
        out << "\n";
      }
      if (!v["finalState"]["shared"].empty()) {
        out << "      shared: " << v["finalState"]["shared"].dump() << "\n";
      }
    }
  }
  return out.str();
}

int exit_status(const std::vector<Verdict>& verdicts) {
  bool inconclusive = false;
  for (const auto& v : verdicts) {
    if (v.status == Status::Fails) return 1;
    inconclusive |= v.status == Status::Inconclusive;
  }
  return inconclusive ? 3 : 0;
}

}  // namespace scj2::check
