#ifndef SCJ2_KERNEL_EVENT_HPP_
#define SCJ2_KERNEL_EVENT_HPP_

#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "scj2/kernel/expr.hpp"
#include "scj2/kernel/value.hpp"

namespace scj2::kernel {

/// A channel name plus a finite tuple of values.
struct Event {
  Sym channel = 0;
  std::vector<Value> values;

  std::uint64_t hash() const;
  /// `channel(value,...)`; the tick event renders as `tick()`.
  std::string str() const;

  friend bool operator==(const Event& a, const Event& b) {
    return a.channel == b.channel && a.values == b.values;
  }
  friend bool operator!=(const Event& a, const Event& b) { return !(a == b); }
};

/// Canonical event order: channel name, then value tuple.
int compare(const Event& a, const Event& b);

struct EventLess {
  bool operator()(const Event& a, const Event& b) const {
    return compare(a, b) < 0;
  }
};

/// Cheap total order by symbol ids, stable only within one process.
struct EventIdLess {
  bool operator()(const Event& a, const Event& b) const;
};

/// Synchronised channels require every interested component to engage;
/// interleaved channels (throw, probe) are performed by one component alone.
enum class SyncMode : std::uint8_t { Synchronised, Interleaved };

struct ChannelDecl {
  Sym name = 0;
  std::vector<Domain> fields;
  SyncMode mode = SyncMode::Synchronised;

  std::size_t arity() const { return fields.size(); }
  bool accepts(const Event& e) const;
};

/// Name of the global clock channel.
Sym tick_channel();
Event tick_event();

class ChannelTable {
 public:
  ChannelTable();

  /// Throws WellFormednessFault on a duplicate name with a different
  /// signature; re-adding an identical declaration is a no-op.
  void add(ChannelDecl decl);
  const ChannelDecl* find(Sym name) const;
  const ChannelDecl& at(Sym name) const;
  /// Declarations in channel-name order.
  std::vector<const ChannelDecl*> sorted() const;

 private:
  std::map<Sym, ChannelDecl> decls_;
};

/// Parses `channel(v,...)` (or `channel.v.v`); identifiers resolve to ids,
/// `true`/`false`/`null` and integers to their values. The result is checked
/// against the table. Returns nullopt on malformed text.
std::optional<Event> parse_event(std::string_view text,
                                 const ChannelTable& channels);

/// One field of a prefix: an output (`!e` / `.e`) or an input (`?x`),
/// optionally restricted by a constraint over the bound variable.
struct FieldPattern {
  enum class Kind : std::uint8_t { Out, In };
  Kind kind = Kind::Out;
  ExprPtr expr;        // Out
  Sym var = 0;         // In
  ExprPtr constraint;  // In, optional

  static FieldPattern out(ExprPtr e) {
    FieldPattern f;
    f.kind = Kind::Out;
    f.expr = std::move(e);
    return f;
  }
  static FieldPattern in(Sym v, ExprPtr constraint = nullptr) {
    FieldPattern f;
    f.kind = Kind::In;
    f.var = v;
    f.constraint = std::move(constraint);
    return f;
  }
  /// Input that accepts any domain value without binding it.
  static FieldPattern any();
};

struct EventPattern {
  Sym channel = 0;
  std::vector<FieldPattern> fields;

  std::uint64_t hash() const;
  std::string str() const;
};

bool equal(const EventPattern& a, const EventPattern& b);

/// Routing interest of a component on a channel: fixed field values, or
/// nullopt for "any". A component participates in exactly the events that
/// match one of its interests.
struct Interest {
  Sym channel = 0;
  std::vector<std::optional<Value>> fields;
  /// The component takes part in matching events but never drives them:
  /// some other participant must match through an active interest.
  bool passive = false;

  bool matches(const Event& e) const;
};

/// Event-pattern strings used by checks: `chan`, `chan.*`, `chan.a.*.3`.
/// Omitted trailing fields match anything.
struct ChannelPattern {
  Sym channel = 0;
  std::vector<std::optional<std::string>> fields;

  static ChannelPattern parse(std::string_view text);
  bool matches(const Event& e) const;
  std::string str() const;
};

}  // namespace scj2::kernel

#endif  // SCJ2_KERNEL_EVENT_HPP_
