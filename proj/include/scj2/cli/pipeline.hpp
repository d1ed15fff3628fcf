#ifndef SCJ2_CLI_PIPELINE_HPP_
#define SCJ2_CLI_PIPELINE_HPP_

#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "scj2/appmodel/program.hpp"
#include "scj2/checker/checks.hpp"

namespace scj2::cli {

struct CountSpec {
  std::string pattern;
  std::string relation;
  int n = 0;
};

struct CheckRequest {
  bool deadlock = false;
  bool divergence = false;
  std::vector<std::string> exceptions;  // exception names
  std::vector<CountSpec> counts;
  std::vector<std::pair<std::string, std::string>> orders;        // before, after
  std::vector<std::pair<std::string, std::string>> alternations;  // first, second

  /// Deadlock, divergence and all five exceptions.
  static CheckRequest all();
  bool empty() const;
};

struct RunConfig {
  std::string input;
  CheckRequest checks;
  check::ExploreLimits limits;
  std::string format = "human";  // human | structured
};

/// A program taken through parse, validation and assembly.
struct Loaded {
  std::optional<app::AppSpec> spec;
  std::vector<app::Diagnostic> diagnostics;
  std::shared_ptr<kernel::Composition> comp;
  std::string error;  // I/O or assembly error

  bool ok() const { return comp != nullptr; }
};

Loaded load_text(const std::string& text, const check::ExploreLimits& limits);
Loaded load_file(const std::string& path, const check::ExploreLimits& limits);

struct CheckOutcome {
  int exit_status = 0;
  nlohmann::ordered_json report;
  std::vector<check::Verdict> verdicts;
};

/// Runs the requested checks on an assembled model. Counterexamples are
/// replayed before they are reported; one that does not replay turns its
/// verdict inconclusive with an internal-error note.
CheckOutcome run_checks(const std::string& program, const kernel::Composition& comp,
                        const CheckRequest& req, const check::ExploreLimits& limits);

/// parse, validate, compile, assemble, explore, check. Exit statuses: 0 all
/// hold, 1 some property fails, 2 usage or program error, 3 inconclusive.
CheckOutcome cmd_check(const RunConfig& cfg);

/// Diagnostics as a report with the same top-level schema as check reports.
nlohmann::ordered_json diagnostics_report(const std::string& program, const Loaded& l);

/// Graph text format: a header line, one `node` line per state and one
/// `edge` line per visible transition.
std::string export_graph(const kernel::Composition& comp, const check::StateGraph& g);
/// One line per channel: `name(domain, ...)` plus ` interleaved` where it applies.
std::string export_channels(const kernel::Composition& comp);

}  // namespace scj2::cli

#endif  // SCJ2_CLI_PIPELINE_HPP_
