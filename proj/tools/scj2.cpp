#include <fstream>
#include <iostream>
#include <thread>

#include "CLI11.hpp"
#include "scj2/checker/report.hpp"
#include "scj2/cli/pipeline.hpp"
#include "scj2/cli/server.hpp"

namespace {

void add_limit_options(CLI::App* cmd, scj2::check::ExploreLimits& limits, std::string& mode) {
  cmd->add_option("--max-states", limits.max_states, "state limit")->check(CLI::PositiveNumber);
  cmd->add_option("--max-depth", limits.max_depth, "depth limit (0: none)");
  cmd->add_option("--max-ticks", limits.max_ticks, "clock bound (0: untimed state)");
  cmd->add_option("--mode", mode, "scheduling mode")
      ->check(CLI::IsMember({"free", "priority"}));
  cmd->add_flag("--spurious", limits.spurious_wakeups, "allow spurious wake-ups");
  cmd->add_option("--workers", limits.workers, "exploration threads")
      ->check(CLI::PositiveNumber);
}

}  // namespace

int main(int argc, char** argv) {
  using namespace scj2;
  CLI::App app{"scj2: model checker for SCJ Level 2 programs"};
  app.require_subcommand(1);

  cli::RunConfig cfg;
  cfg.limits.workers = std::max(1u, std::thread::hardware_concurrency());
  std::string mode = "free";
  bool all = false;
  std::vector<std::string> counts, orders, alternations;

  auto* check = app.add_subcommand("check", "check properties of a program");
  check->add_option("input", cfg.input, "program file")->required();
  check->add_flag("--all", all, "deadlock, divergence and all exceptions");
  check->add_flag("--deadlock", cfg.checks.deadlock);
  check->add_flag("--divergence", cfg.checks.divergence);
  check->add_option("--exception", cfg.checks.exceptions, "exception kind");
  check->add_option("--count", counts, "<pattern> <relation> <n>")->expected(3)->take_all();
  check->add_option("--order", orders, "<before> <after>")->expected(2)->take_all();
  check->add_option("--alternation", alternations, "<first> <second>")
      ->expected(2)
      ->take_all();
  check->add_option("--format", cfg.format)->check(CLI::IsMember({"human", "structured"}));
  add_limit_options(check, cfg.limits, mode);

  std::string graph_out, channels_out;
  auto* exp = app.add_subcommand("export", "write the state graph and channel table");
  exp->add_option("input", cfg.input, "program file")->required();
  exp->add_option("--output", graph_out, "graph file (default: stdout)");
  exp->add_option("--channels", channels_out, "channel table file");
  add_limit_options(exp, cfg.limits, mode);

  int port = 8080;
  std::string host = "127.0.0.1";
  auto* serve = app.add_subcommand("serve", "serve the animation protocol over HTTP");
  serve->add_option("input", cfg.input, "program file")->required();
  serve->add_option("--port", port)->check(CLI::Range(0, 65535));
  serve->add_option("--host", host);
  add_limit_options(serve, cfg.limits, mode);

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    int rc = app.exit(e);
    return rc == 0 ? 0 : 2;
  }
  cfg.limits.mode = mode == "priority" ? check::Mode::Priority : check::Mode::Free;

  if (*check) {
    if (all) {
      auto extra = cli::CheckRequest::all();
      cfg.checks.deadlock = cfg.checks.divergence = true;
      for (auto& e : extra.exceptions) cfg.checks.exceptions.push_back(e);
    }
    for (std::size_t i = 0; i + 2 < counts.size(); i += 3) {
      cfg.checks.counts.push_back({counts[i], counts[i + 1], std::stoi(counts[i + 2])});
    }
    for (std::size_t i = 0; i + 1 < orders.size(); i += 2) {
      cfg.checks.orders.emplace_back(orders[i], orders[i + 1]);
    }
    for (std::size_t i = 0; i + 1 < alternations.size(); i += 2) {
      cfg.checks.alternations.emplace_back(alternations[i], alternations[i + 1]);
    }
    if (cfg.checks.empty()) {
      std::cerr << "no checks requested (try --all)\n";
      return 2;
    }
    auto out = cli::cmd_check(cfg);
    if (cfg.format == "structured" || out.report.contains("diagnostics")) {
      if (out.report.contains("diagnostics")) {
        for (const auto& d : out.report["diagnostics"]) {
          std::cerr << d["line"] << ":" << d["column"] << ": " << d["severity"].get<std::string>()
                    << "[" << d["code"].get<std::string>()
                    << "]: " << d["message"].get<std::string>() << "\n";
        }
        if (out.report.contains("error")) {
          std::cerr << "error: " << out.report["error"].get<std::string>() << "\n";
        }
      }
      if (cfg.format == "structured") std::cout << out.report.dump(2) << "\n";
    } else {
      std::cout << check::render_human(out.report);
    }
    return out.exit_status;
  }

  auto loaded = cli::load_file(cfg.input, cfg.limits);
  if (!loaded.ok()) {
    for (const auto& d : loaded.diagnostics) std::cerr << d.str() << "\n";
    if (!loaded.error.empty()) std::cerr << "error: " << loaded.error << "\n";
    return 2;
  }

  if (*exp) {
    auto g = check::explore(*loaded.comp, cfg.limits);
    std::string text = cli::export_graph(*loaded.comp, g);
    if (graph_out.empty()) {
      std::cout << text;
    } else {
      std::ofstream(graph_out) << text;
    }
    if (!channels_out.empty()) std::ofstream(channels_out) << cli::export_channels(*loaded.comp);
    return 0;
  }

  cli::Session session(loaded.comp, cfg.limits);
  return cli::serve(session, host, port, std::cerr) ? 0 : 2;
}
