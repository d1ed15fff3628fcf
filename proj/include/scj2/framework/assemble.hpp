#ifndef SCJ2_FRAMEWORK_ASSEMBLE_HPP_
#define SCJ2_FRAMEWORK_ASSEMBLE_HPP_

#include "scj2/appmodel/ast.hpp"
#include "scj2/kernel/system.hpp"

namespace scj2::framework {

struct AssembleOptions {
  bool spurious_wakeups = false;
};

/// The whole model of a program: framework processes, application
/// components, one ObjectFW per object used as a lock and one ThreadFW per
/// schedulable taking part in the monitor protocol. Throws AssemblyFault
/// when the program does not validate.
kernel::Composition assemble_system(const app::AppSpec& spec,
                                    const AssembleOptions& opts = {});

}  // namespace scj2::framework

#endif  // SCJ2_FRAMEWORK_ASSEMBLE_HPP_
