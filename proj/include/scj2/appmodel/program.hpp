#ifndef SCJ2_APPMODEL_PROGRAM_HPP_
#define SCJ2_APPMODEL_PROGRAM_HPP_

#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scj2/appmodel/ast.hpp"

namespace scj2::app {

struct Diagnostic {
  enum class Severity : std::uint8_t { Error, Warning };
  Severity severity = Severity::Error;
  Loc loc;
  std::string code;
  std::string message;

  bool is_error() const { return severity == Severity::Error; }
  /// `line:col: error[E001]: message`
  std::string str() const;
};

namespace codes {
inline constexpr const char* kSyntax = "E001";
inline constexpr const char* kMissingSafelet = "E002";
inline constexpr const char* kWaitNotOnThis = "E003";
inline constexpr const char* kUndeclared = "E010";
inline constexpr const char* kDuplicate = "E011";
inline constexpr const char* kBadParameter = "E012";
inline constexpr const char* kKindMismatch = "E013";
inline constexpr const char* kMultipleSafelets = "E014";
inline constexpr const char* kType = "E015";
inline constexpr const char* kRange = "E016";
inline constexpr const char* kUnsupported = "E017";
inline constexpr const char* kDoubleRegistration = "W001";
inline constexpr const char* kUnreachable = "W002";
}  // namespace codes

struct ParseResult {
  std::optional<AppSpec> spec;
  std::vector<Diagnostic> diagnostics;

  bool ok() const;
};

/// Parses `.scj2` text. Syntax errors, a missing safelet, and suspension
/// calls on anything but the enclosing object are reported here.
ParseResult parse_program(std::string_view text);

/// Canonical text form; parse_program(print_program(s)) equals s.
std::string print_program(const AppSpec& spec);

/// Name resolution, parameter ranges, kinds, types and the restrictions of
/// the compiler. Double registration is only a warning: the checker is
/// expected to find it.
std::vector<Diagnostic> validate_program(const AppSpec& spec);

bool has_errors(const std::vector<Diagnostic>& diags);

}  // namespace scj2::app

#endif  // SCJ2_APPMODEL_PROGRAM_HPP_
