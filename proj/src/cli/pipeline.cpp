#include "scj2/cli/pipeline.hpp"

#include <fstream>
#include <sstream>

#include "scj2/checker/report.hpp"
#include "scj2/framework/assemble.hpp"
#include "scj2/kernel/errors.hpp"

namespace scj2::cli {

using nlohmann::ordered_json;

CheckRequest CheckRequest::all() {
  CheckRequest r;
  r.deadlock = true;
  r.divergence = true;
  for (auto k : sync::all_exceptions()) r.exceptions.emplace_back(sync::exception_name(k));
  return r;
}

bool CheckRequest::empty() const {
  return !deadlock && !divergence && exceptions.empty() && counts.empty() && orders.empty() &&
         alternations.empty();
}

Loaded load_text(const std::string& text, const check::ExploreLimits& limits) {
  Loaded l;
  auto parsed = app::parse_program(text);
  l.diagnostics = parsed.diagnostics;
  if (!parsed.spec) return l;
  l.spec = std::move(parsed.spec);
  auto diags = app::validate_program(*l.spec);
  l.diagnostics.insert(l.diagnostics.end(), diags.begin(), diags.end());
  if (app::has_errors(l.diagnostics)) return l;
  try {
    l.comp = std::make_shared<kernel::Composition>(
        framework::assemble_system(*l.spec, {limits.spurious_wakeups}));
  } catch (const Error& e) {
    l.error = e.what();
  }
  return l;
}

Loaded load_file(const std::string& path, const check::ExploreLimits& limits) {
  std::ifstream in(path);
  if (!in) {
    Loaded l;
    l.error = "cannot read " + path;
    return l;
  }
  std::stringstream ss;
  ss << in.rdbuf();
  return load_text(ss.str(), limits);
}

ordered_json diagnostics_report(const std::string& program, const Loaded& l) {
  ordered_json j;
  j["version"] = check::kReportVersion;
  j["program"] = program;
  ordered_json ds = ordered_json::array();
  for (const auto& d : l.diagnostics) {
    ds.push_back({{"severity", d.is_error() ? "error" : "warning"},
                  {"line", d.loc.line},
                  {"column", d.loc.col},
                  {"code", d.code},
                  {"message", d.message}});
  }
  j["diagnostics"] = std::move(ds);
  if (!l.error.empty()) j["error"] = l.error;
  return j;
}

CheckOutcome run_checks(const std::string& program, const kernel::Composition& comp,
                        const CheckRequest& req, const check::ExploreLimits& limits) {
  CheckOutcome out;
  check::StateGraph g = check::explore(comp, limits);
  auto& vs = out.verdicts;
  vs.push_back(check::check_faults(g));
  if (req.deadlock) vs.push_back(check::check_deadlock(g));
  if (req.divergence) vs.push_back(check::check_divergence(g));
  for (const auto& name : req.exceptions) {
    auto kind = sync::parse_exception(name);
    if (!kind) throw Error("unknown exception kind '" + name + "'");
    vs.push_back(check::check_exception(g, *kind));
  }
  for (const auto& c : req.counts) {
    auto rel = check::parse_relation(c.relation);
    if (!rel) throw Error("unknown relation '" + c.relation + "'");
    vs.push_back(check::check_event_count(g, kernel::ChannelPattern::parse(c.pattern), c.pattern,
                                          *rel, c.n));
  }
  for (const auto& [a, b] : req.orders) {
    vs.push_back(check::check_order(g, kernel::ChannelPattern::parse(a), a,
                                    kernel::ChannelPattern::parse(b), b));
  }
  for (const auto& [a, b] : req.alternations) {
    vs.push_back(check::check_alternation(g, kernel::ChannelPattern::parse(a), a,
                                          kernel::ChannelPattern::parse(b), b));
  }
  for (auto& v : vs) {
    if (v.counterexample && !check::replays(comp, *v.counterexample, limits)) {
      v.status = check::Status::Inconclusive;
      v.note = "internal error: counterexample does not replay";
    }
  }
  out.report = check::report_json(program, comp, g, vs);
  out.exit_status = check::exit_status(vs);
  return out;
}

CheckOutcome cmd_check(const RunConfig& cfg) {
  Loaded l = load_file(cfg.input, cfg.limits);
  if (!l.ok()) {
    CheckOutcome out;
    out.exit_status = 2;
    out.report = diagnostics_report(cfg.input, l);
    return out;
  }
  try {
    return run_checks(cfg.input, *l.comp, cfg.checks, cfg.limits);
  } catch (const Error& e) {
    CheckOutcome out;
    out.exit_status = 2;
    l.error = e.what();
    out.report = diagnostics_report(cfg.input, l);
    return out;
  }
}

std::string export_graph(const kernel::Composition& comp, const check::StateGraph& g) {
  std::ostringstream out;
  out << "scj2-graph 1 nodes " << g.nodes.size() << " edges " << g.edge_count << " partial "
      << (g.partial ? "yes" : "no") << "\n";
  for (std::uint32_t n = 0; n < g.nodes.size(); ++n) {
    const auto& node = g.nodes[n];
    out << "node " << n << " depth " << node.depth;
    if (!node.expanded) out << " unexpanded";
    if (node.terminated) out << " terminated";
    if (node.deadlock) out << " deadlock";
    if (node.divergent) out << " divergent";
    if (node.tau_loop) out << " tau-loop";
    if (node.fault) out << " fault";
    out << " :";
    auto lines = comp.describe(node.state);
    for (std::size_t i = 0; i < lines.size(); ++i) out << (i ? " | " : " ") << lines[i];
    if (!node.state.shared.empty()) out << " | shared: " << node.state.shared.str();
    out << "\n";
  }
  for (std::uint32_t n = 0; n < g.nodes.size(); ++n) {
    for (const auto& e : g.nodes[n].edges) {
      out << "edge " << n << " " << e.target << " " << e.label.str() << "\n";
    }
  }
  return out.str();
}

std::string export_channels(const kernel::Composition& comp) {
  std::ostringstream out;
  for (const auto* d : comp.channels().sorted()) {
    out << sym_name(d->name) << "(";
    for (std::size_t i = 0; i < d->fields.size(); ++i) out << (i ? ", " : "") << d->fields[i].str();
    out << ")";
    if (d->mode == kernel::SyncMode::Interleaved) out << " interleaved";
    out << "\n";
  }
  return out.str();
}

}  // namespace scj2::cli
