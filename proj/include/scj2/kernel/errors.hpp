#ifndef SCJ2_KERNEL_ERRORS_HPP_
#define SCJ2_KERNEL_ERRORS_HPP_

#include <stdexcept>
#include <string>

namespace scj2 {

class Error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A value left its declared finite domain. Reported as its own verdict,
/// never wrapped.
class ModelRangeFault : public Error {
 public:
  using Error::Error;
};

/// Unbound variable, unbound recursion variable, unguarded recursion,
/// undeclared channel and similar structural defects.
class WellFormednessFault : public Error {
 public:
  using Error::Error;
};

/// A data-structure invariant was violated by the caller (e.g. enqueueing a
/// thread twice).
class InvariantFault : public Error {
 public:
  using Error::Error;
};

class AssemblyFault : public Error {
 public:
  using Error::Error;
};

}  // namespace scj2

#endif  // SCJ2_KERNEL_ERRORS_HPP_
