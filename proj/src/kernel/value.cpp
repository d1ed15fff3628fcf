#include "scj2/kernel/value.hpp"

#include <algorithm>
#include <array>
#include <atomic>
#include <mutex>
#include <stdexcept>
#include <unordered_map>

namespace scj2 {

namespace {

struct Symbol {
  std::string name;
  std::uint64_t hash;
};

/// Symbols live in fixed chunks that never move, so readers need no lock:
/// a Sym is only handed out after its entry is written.
struct SymbolTable {
  static constexpr std::size_t kChunkBits = 12;
  static constexpr std::size_t kChunk = std::size_t{1} << kChunkBits;
  static constexpr std::size_t kChunks = 4096;

  std::mutex mu;
  std::unordered_map<std::string, Sym> index;
  std::array<std::atomic<Symbol*>, kChunks> chunks{};
  std::size_t size = 0;

  const Symbol& at(Sym s) const {
    return chunks[s >> kChunkBits].load(std::memory_order_acquire)[s & (kChunk - 1)];
  }
};

SymbolTable& table() {
  static SymbolTable t;
  return t;
}

}  // namespace

Sym intern(std::string_view name) {
  auto& t = table();
  std::lock_guard<std::mutex> lock(t.mu);
  auto it = t.index.find(std::string(name));
  if (it != t.index.end()) return it->second;
  const std::size_t s = t.size;
  if (s >= SymbolTable::kChunk * SymbolTable::kChunks) throw std::length_error("symbol table full");
  auto& chunk = t.chunks[s >> SymbolTable::kChunkBits];
  Symbol* block = chunk.load(std::memory_order_relaxed);
  if (!block) {
    block = new Symbol[SymbolTable::kChunk];  // owned by the table for the process lifetime
    chunk.store(block, std::memory_order_release);
  }
  block[s & (SymbolTable::kChunk - 1)] = Symbol{std::string(name), hash_string(name)};
  ++t.size;
  t.index.emplace(std::string(name), static_cast<Sym>(s));
  return static_cast<Sym>(s);
}

const std::string& sym_name(Sym s) { return table().at(s).name; }

std::uint64_t sym_hash(Sym s) { return table().at(s).hash; }

std::uint64_t hash_string(std::string_view s) {
  std::uint64_t h = 1469598103934665603ULL;
  for (unsigned char c : s) {
    h ^= c;
    h *= 1099511628211ULL;
  }
  return h;
}

std::uint64_t Value::hash() const {
  std::uint64_t h = static_cast<std::uint64_t>(kind) + 1;
  if (kind == Kind::Id) return hash_mix(h, sym_hash(as_id()));
  return hash_mix(h, static_cast<std::uint64_t>(static_cast<std::uint32_t>(v)));
}

std::string Value::str() const {
  switch (kind) {
    case Kind::Null:
      return "null";
    case Kind::Bool:
      return v ? "true" : "false";
    case Kind::Int:
      return std::to_string(v);
    case Kind::Id:
      return sym_name(as_id());
  }
  return "?";
}

int compare(const Value& a, const Value& b) {
  if (a.kind != b.kind) return a.kind < b.kind ? -1 : 1;
  if (a.kind == Value::Kind::Id) {
    if (a.v == b.v) return 0;
    return sym_name(a.as_id()) < sym_name(b.as_id()) ? -1 : 1;
  }
  if (a.v == b.v) return 0;
  return a.v < b.v ? -1 : 1;
}

bool Domain::contains(const Value& v) const {
  if (v.is_null()) return nullable;
  switch (kind) {
    case Kind::Int:
      return v.kind == Value::Kind::Int && v.v >= lo && v.v <= hi;
    case Kind::Bool:
      return v.kind == Value::Kind::Bool;
    case Kind::Ids:
      return v.kind == Value::Kind::Id &&
             std::find(ids.begin(), ids.end(), v.as_id()) != ids.end();
  }
  return false;
}

std::vector<Value> Domain::values() const {
  std::vector<Value> out;
  if (nullable) out.push_back(Value::null());
  switch (kind) {
    case Kind::Int:
      for (std::int32_t i = lo; i <= hi; ++i) out.push_back(Value::integer(i));
      break;
    case Kind::Bool:
      out.push_back(Value::boolean(false));
      out.push_back(Value::boolean(true));
      break;
    case Kind::Ids: {
      std::vector<Value> ids_v;
      for (Sym s : ids) ids_v.push_back(Value::id(s));
      std::sort(ids_v.begin(), ids_v.end(), ValueLess{});
      out.insert(out.end(), ids_v.begin(), ids_v.end());
      break;
    }
  }
  return out;
}

Value Domain::minimum() const {
  auto vs = values();
  return vs.empty() ? Value::null() : vs.front();
}

std::string Domain::str() const {
  std::string s;
  switch (kind) {
    case Kind::Int:
      s = std::to_string(lo) + ".." + std::to_string(hi);
      break;
    case Kind::Bool:
      s = "bool";
      break;
    case Kind::Ids: {
      s = "{";
      bool first = true;
      for (const auto& v : values()) {
        if (v.is_null()) continue;
        if (!first) s += ",";
        s += v.str();
        first = false;
      }
      s += "}";
      break;
    }
  }
  if (nullable) s += "|null";
  return s;
}

}  // namespace scj2
