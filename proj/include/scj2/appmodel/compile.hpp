#ifndef SCJ2_APPMODEL_COMPILE_HPP_
#define SCJ2_APPMODEL_COMPILE_HPP_

#include <map>
#include <vector>

#include "scj2/appmodel/ast.hpp"
#include "scj2/framework/channels.hpp"
#include "scj2/kernel/system.hpp"
#include "scj2/sync/object_fw.hpp"

namespace scj2::app {

/// A schedulable that takes part in the monitor protocol.
struct ThreadUse {
  Sym thread = 0;
  int priority = 0;
  std::vector<Sym> waits_on;  // objects it may wait on
};

struct CompiledProgram {
  framework::Universe universe;
  /// Method Call/Ret channels.
  std::vector<kernel::ChannelDecl> channels;
  /// Application side: safelet, sequencers, missions, schedulables.
  std::vector<kernel::Component> components;
  /// Object and mission fields, named `Object.field`.
  Store shared;
  std::map<Sym, Domain> shared_domains;
  /// Objects used as locks, with the threads that may lock them.
  std::vector<sync::ObjectConfig> monitors;
  std::vector<ThreadUse> threads;
};

struct CompileOptions {
  bool spurious_wakeups = false;
};

/// Method bodies are inlined at their call sites; a method that is not
/// purely a data operation is bracketed by `mCall(object, thread, args...)`
/// and `mRet(object, thread, value)`. Throws AssemblyFault on a program
/// that does not validate.
CompiledProgram compile_program(const AppSpec& spec, const CompileOptions& opts = {});

/// Routing interests implied by the event patterns of a term: literal
/// output fields are fixed, everything else is a wildcard.
std::vector<kernel::Interest> derive_interests(const kernel::TermPtr& term);

/// True when calling the method produces no events at all.
bool is_pure(const AppSpec& spec, const ObjectDecl& o, const Method& m);

}  // namespace scj2::app

#endif  // SCJ2_APPMODEL_COMPILE_HPP_
