#ifndef SCJ2_APPMODEL_AST_HPP_
#define SCJ2_APPMODEL_AST_HPP_

#include <optional>
#include <string>
#include <vector>

#include "scj2/kernel/expr.hpp"

namespace scj2::app {

/// Source position. Positions never take part in structural equality, so a
/// re-parsed program compares equal to the original.
struct Loc {
  int line = 0;
  int col = 0;
  friend bool operator==(const Loc&, const Loc&) { return true; }
};

enum class Type : std::uint8_t { Int, Bool, Void };
const char* type_name(Type t);

struct Expr {
  enum class Kind : std::uint8_t { Int, Bool, Null, Name, Unary, Binary, Call };
  Kind kind = Kind::Int;
  int value = 0;              // Int, Bool
  std::string name;           // Name; Call method
  std::string object;         // Call target object, empty for this
  kernel::Op op = kernel::Op::Lit;  // Unary, Binary
  std::vector<Expr> args;     // operands or call arguments
  Loc loc;

  bool operator==(const Expr&) const = default;
};

struct Stmt {
  enum class Kind : std::uint8_t {
    VarDecl,             // var name: type = expr
    Assign,              // name = expr (expr may be a call)
    Call,                // expr is the call
    If,                  // expr, body, else_body
    While,               // expr, body
    Wait,                // object (empty = this)
    Notify,
    NotifyAll,
    RequestTermination,  // name = mission
    Fire,                // name = aperiodic handler
    Interrupt,
    Sleep,               // value = ticks
    Return,              // optional expr
    Probe,               // name = label
  };
  Kind kind = Kind::Call;
  std::string name;
  std::string object;
  Type type = Type::Int;
  int value = 0;
  std::optional<Expr> expr;
  std::vector<Stmt> body;
  std::vector<Stmt> else_body;
  Loc loc;

  bool operator==(const Stmt&) const = default;
};

struct VarDecl {
  std::string name;
  Type type = Type::Int;
  Expr init;
  Loc loc;
  bool operator==(const VarDecl&) const = default;
};

struct Param {
  std::string name;
  Type type = Type::Int;
  bool operator==(const Param&) const = default;
};

struct Method {
  std::string name;
  bool sync = false;
  std::vector<Param> params;
  Type ret = Type::Void;
  std::vector<Stmt> body;
  Loc loc;
  bool operator==(const Method&) const = default;
};

struct Name {
  std::string text;
  Loc loc;
  bool operator==(const Name&) const = default;
};

/// A mission or a plain shared object: fields, methods, optional ceiling.
struct ObjectDecl {
  std::string name;
  std::optional<int> ceiling;
  std::vector<VarDecl> vars;
  std::vector<Method> methods;
  Loc loc;
  bool operator==(const ObjectDecl&) const = default;
};

struct MissionDecl {
  ObjectDecl object;
  std::vector<Name> registers;
  std::optional<std::vector<Stmt>> cleanup;
  bool operator==(const MissionDecl&) const = default;
};

enum class SchedKind : std::uint8_t { Periodic, Aperiodic, OneShot, Thread, Sequencer };
const char* sched_keyword(SchedKind k);

struct SchedDecl {
  SchedKind kind = SchedKind::Thread;
  std::string name;
  int priority = 0;
  int period = 0;
  int offset = 0;
  std::optional<int> deadline;
  std::vector<VarDecl> vars;
  std::vector<Stmt> body;           // run/handle body
  std::vector<Name> missions;       // schedulable sequencer
  Loc loc;
  bool operator==(const SchedDecl&) const = default;
};

struct SequencerDecl {
  std::string name;
  std::vector<Name> missions;
  Loc loc;
  bool operator==(const SequencerDecl&) const = default;
};

struct SafeletDecl {
  std::string name;
  std::optional<Name> sequencer;  // nullopt: `sequencer = null`
  Loc loc;
  bool operator==(const SafeletDecl&) const = default;
};

struct Config {
  int int_lo = 0;
  int int_hi = 7;
  int prio_lo = 1;
  int prio_hi = 10;
  bool operator==(const Config&) const = default;
};

struct AppSpec {
  std::optional<Config> config;
  std::vector<SafeletDecl> safelets;
  std::vector<SequencerDecl> sequencers;
  std::vector<MissionDecl> missions;
  std::vector<ObjectDecl> objects;
  std::vector<SchedDecl> schedulables;

  bool operator==(const AppSpec&) const = default;

  Config effective_config() const { return config.value_or(Config{}); }
  const MissionDecl* find_mission(std::string_view name) const;
  const ObjectDecl* find_object(std::string_view name) const;  // missions too
  const SchedDecl* find_schedulable(std::string_view name) const;
  const SequencerDecl* find_sequencer(std::string_view name) const;
};

}  // namespace scj2::app

#endif  // SCJ2_APPMODEL_AST_HPP_
