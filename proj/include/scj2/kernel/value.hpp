#ifndef SCJ2_KERNEL_VALUE_HPP_
#define SCJ2_KERNEL_VALUE_HPP_

#include <cstdint>
#include <string>
#include <string_view>
#include <vector>

namespace scj2 {

/// Interned identifier. Ids are assigned in first-seen order; canonical
/// orderings always compare the names, never the ids.
using Sym = std::uint32_t;

Sym intern(std::string_view name);
const std::string& sym_name(Sym s);
/// Hash of the symbol's name (independent of interning order).
std::uint64_t sym_hash(Sym s);

/// Deterministic 64-bit mixing used for all structural hashes.
inline std::uint64_t hash_mix(std::uint64_t h, std::uint64_t v) {
  v += 0x9e3779b97f4a7c15ULL + (h << 6) + (h >> 2);
  v ^= v >> 30;
  v *= 0xbf58476d1ce4e5b9ULL;
  v ^= v >> 27;
  v *= 0x94d049bb133111ebULL;
  v ^= v >> 31;
  return h ^ v;
}

std::uint64_t hash_string(std::string_view s);

struct Value {
  enum class Kind : std::uint8_t { Null, Bool, Int, Id };

  Kind kind = Kind::Null;
  std::int32_t v = 0;

  static Value null() { return {}; }
  static Value boolean(bool b) { return {Kind::Bool, b ? 1 : 0}; }
  static Value integer(std::int32_t i) { return {Kind::Int, i}; }
  static Value id(Sym s) { return {Kind::Id, static_cast<std::int32_t>(s)}; }

  bool is_null() const { return kind == Kind::Null; }
  bool as_bool() const { return v != 0; }
  Sym as_id() const { return static_cast<Sym>(v); }

  std::uint64_t hash() const;
  std::string str() const;

  friend bool operator==(const Value& a, const Value& b) {
    return a.kind == b.kind && a.v == b.v;
  }
  friend bool operator!=(const Value& a, const Value& b) { return !(a == b); }
};

/// Canonical value order: null < bool < int < id, ids by name.
int compare(const Value& a, const Value& b);

struct ValueLess {
  bool operator()(const Value& a, const Value& b) const {
    return compare(a, b) < 0;
  }
};

/// A finite value domain: integer range, booleans, or a set of identifiers.
/// Any domain may additionally admit the null-marker.
struct Domain {
  enum class Kind : std::uint8_t { Int, Bool, Ids };

  Kind kind = Kind::Int;
  std::int32_t lo = 0;
  std::int32_t hi = 0;
  std::vector<Sym> ids;
  bool nullable = false;

  static Domain ints(std::int32_t lo, std::int32_t hi) {
    Domain d;
    d.kind = Kind::Int;
    d.lo = lo;
    d.hi = hi;
    return d;
  }
  static Domain booleans() {
    Domain d;
    d.kind = Kind::Bool;
    return d;
  }
  static Domain identifiers(std::vector<Sym> ids, bool nullable = false) {
    Domain d;
    d.kind = Kind::Ids;
    d.ids = std::move(ids);
    d.nullable = nullable;
    return d;
  }
  Domain with_null() const {
    Domain d = *this;
    d.nullable = true;
    return d;
  }

  bool contains(const Value& v) const;
  /// Enumerates the domain in canonical value order.
  std::vector<Value> values() const;
  /// Smallest member, used as the default initial value.
  Value minimum() const;
  std::string str() const;

  friend bool operator==(const Domain& a, const Domain& b) {
    return a.kind == b.kind && a.lo == b.lo && a.hi == b.hi && a.ids == b.ids &&
           a.nullable == b.nullable;
  }
};

}  // namespace scj2

#endif  // SCJ2_KERNEL_VALUE_HPP_
