#ifndef SCJ2_TESTS_HELPERS_HPP_
#define SCJ2_TESTS_HELPERS_HPP_

#include <fstream>
#include <functional>
#include <optional>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "scj2/appmodel/program.hpp"
#include "scj2/checker/explore.hpp"
#include "scj2/framework/assemble.hpp"

namespace testutil {

inline std::string source_path(const std::string& rel) {
  return std::string(SCJ2_SOURCE_DIR) + "/" + rel;
}

inline std::string read_file(const std::string& rel) {
  std::ifstream in(source_path(rel));
  if (!in) throw std::runtime_error("cannot read " + rel);
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

inline scj2::app::AppSpec parse_ok(const std::string& text) {
  auto r = scj2::app::parse_program(text);
  if (!r.spec) {
    std::string msg;
    for (const auto& d : r.diagnostics) msg += d.str() + "\n";
    throw std::runtime_error("parse failed:\n" + msg);
  }
  return *r.spec;
}

inline scj2::kernel::Composition assemble_text(const std::string& text) {
  return scj2::framework::assemble_system(parse_ok(text));
}

inline scj2::kernel::Composition assemble_file(const std::string& rel) {
  return assemble_text(read_file(rel));
}

inline scj2::check::StateGraph explore_all(const scj2::kernel::Composition& comp,
                                           scj2::check::ExploreLimits limits = {}) {
  return scj2::check::explore(comp, limits);
}

/// Step function of a monitor automaton over event strings. Returns the next
/// state, or nullopt when the event violates the property.
using Monitor = std::function<std::optional<int>(int, const std::string&)>;

/// Walks every path of the graph together with the monitor and returns the
/// first violating path, if any. Written independently of the checker's own
/// product search.
inline std::optional<std::vector<std::string>> find_violation(const scj2::check::StateGraph& g,
                                                              const Monitor& step) {
  struct Item {
    std::uint32_t node;
    int q;
    std::vector<std::string> path;
  };
  std::set<std::pair<std::uint32_t, int>> seen = {{0, 0}};
  std::vector<Item> stack = {{0, 0, {}}};
  while (!stack.empty()) {
    Item it = std::move(stack.back());
    stack.pop_back();
    for (const auto& e : g.nodes[it.node].edges) {
      std::string ev = e.label.str();
      auto next = step(it.q, ev);
      auto path = it.path;
      path.push_back(ev);
      if (!next) return path;
      if (seen.insert({e.target, *next}).second) stack.push_back({e.target, *next, path});
    }
  }
  return std::nullopt;
}

/// All event strings on edges of the graph.
inline std::set<std::string> all_events(const scj2::check::StateGraph& g) {
  std::set<std::string> out;
  for (const auto& n : g.nodes) {
    for (const auto& e : n.edges) out.insert(e.label.str());
  }
  return out;
}

inline bool starts_with(const std::string& s, const std::string& prefix) {
  return s.rfind(prefix, 0) == 0;
}

}  // namespace testutil

#endif  // SCJ2_TESTS_HELPERS_HPP_
