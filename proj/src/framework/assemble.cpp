#include "scj2/framework/assemble.hpp"

#include "scj2/appmodel/compile.hpp"
#include "scj2/framework/processes.hpp"
#include "scj2/kernel/errors.hpp"

namespace scj2::framework {

namespace {

ReleaseParams params_of(const app::SchedDecl& s) {
  return ReleaseParams{s.period, s.offset, s.deadline};
}

}  // namespace

kernel::Composition assemble_system(const app::AppSpec& spec, const AssembleOptions& opts) {
  app::CompiledProgram prog = app::compile_program(spec, {opts.spurious_wakeups});
  const Universe& u = prog.universe;

  kernel::ChannelTable table = channel_table(u);
  for (const auto& decl : prog.channels) table.add(decl);

  std::vector<kernel::Component> comps;
  comps.push_back(safelet_fw(u));
  for (const auto& q : spec.sequencers) {
    std::vector<Sym> ms;
    for (const auto& m : q.missions) ms.push_back(intern(m.text));
    comps.push_back(top_sequencer_fw(intern(q.name), ms, u));
  }
  for (const auto& m : spec.missions) {
    std::vector<Sym> regs;
    for (const auto& r : m.registers) regs.push_back(intern(r.text));
    comps.push_back(mission_fw(intern(m.object.name), regs, u));
  }
  for (const auto& s : spec.schedulables) {
    Sym id = intern(s.name);
    switch (s.kind) {
      case app::SchedKind::Periodic:
        comps.push_back(periodic_fw(id, params_of(s), s.priority, u));
        break;
      case app::SchedKind::Aperiodic:
        comps.push_back(aperiodic_fw(id, params_of(s), s.priority, u));
        break;
      case app::SchedKind::OneShot:
        comps.push_back(oneshot_fw(id, params_of(s), s.priority, u));
        break;
      case app::SchedKind::Thread:
        comps.push_back(managed_thread_fw(id, s.priority, u));
        break;
      case app::SchedKind::Sequencer: {
        std::vector<Sym> ms;
        for (const auto& m : s.missions) ms.push_back(intern(m.text));
        comps.push_back(sched_sequencer_fw(id, ms, s.priority, u));
        break;
      }
    }
  }
  for (auto& c : prog.components) comps.push_back(std::move(c));
  for (const auto& cfg : prog.monitors) comps.push_back(sync::object_fw(cfg));
  for (const auto& t : prog.threads) {
    std::vector<Sym> objs = t.waits_on;
    comps.push_back(sync::thread_fw(t.thread, t.priority, Domain::identifiers(objs)));
  }
  return kernel::Composition(std::move(table), std::move(comps), std::move(prog.shared),
                             std::move(prog.shared_domains));
}

}  // namespace scj2::framework
