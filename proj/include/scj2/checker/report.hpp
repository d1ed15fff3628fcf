#ifndef SCJ2_CHECKER_REPORT_HPP_
#define SCJ2_CHECKER_REPORT_HPP_

#include <string>
#include <vector>

#include "scj2/checker/checks.hpp"
#include "json.hpp"

namespace scj2::check {

inline constexpr int kReportVersion = 1;

/// Per-component positions and stores, shared fields, monitors and clock.
nlohmann::ordered_json state_json(const kernel::Composition& comp,
                                  const kernel::SystemState& s);

nlohmann::ordered_json verdict_json(const kernel::Composition& comp, const Verdict& v);

/// The structured report. Deterministic: no timings, no addresses.
nlohmann::ordered_json report_json(const std::string& program,
                                   const kernel::Composition& comp, const StateGraph& g,
                                   const std::vector<Verdict>& verdicts);

std::string render_human(const nlohmann::ordered_json& report);

/// 0 all hold, 1 some property fails, 3 some verdict is inconclusive.
int exit_status(const std::vector<Verdict>& verdicts);

}  // namespace scj2::check

#endif  // SCJ2_CHECKER_REPORT_HPP_
