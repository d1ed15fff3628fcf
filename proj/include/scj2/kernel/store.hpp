#ifndef SCJ2_KERNEL_STORE_HPP_
#define SCJ2_KERNEL_STORE_HPP_

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "scj2/kernel/value.hpp"

namespace scj2 {

/// Variable store: a small map from variable symbol to value, kept sorted by
/// symbol id so equality is a plain vector comparison.
class Store {
 public:
  using Entry = std::pair<Sym, Value>;

  Store() = default;

  std::optional<Value> get(Sym var) const {
    auto it = find(var);
    if (it == entries_.end() || it->first != var) return std::nullopt;
    return it->second;
  }

  bool contains(Sym var) const { return get(var).has_value(); }

  /// Inserts or overwrites.
  void set(Sym var, Value v) {
    auto it = find(var);
    if (it != entries_.end() && it->first == var) {
      hash_ += contribution(var, v) - contribution(var, it->second);
      it->second = v;
    } else {
      hash_ += contribution(var, v);
      entries_.insert(it, {var, v});
    }
  }

  /// Overwrites an existing binding; returns false if absent.
  bool update(Sym var, Value v) {
    auto it = find(var);
    if (it == entries_.end() || it->first != var) return false;
    hash_ += contribution(var, v) - contribution(var, it->second);
    it->second = v;
    return true;
  }

  const std::vector<Entry>& entries() const { return entries_; }
  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }

  /// Order-independent over symbol ids, so stable across interning orders.
  std::uint64_t hash() const { return hash_; }

  /// Entries sorted by variable name, for display.
  std::vector<Entry> sorted_by_name() const {
    auto out = entries_;
    std::sort(out.begin(), out.end(), [](const Entry& a, const Entry& b) {
      return sym_name(a.first) < sym_name(b.first);
    });
    return out;
  }

  std::string str() const {
    std::string s = "{";
    bool first = true;
    for (const auto& [k, v] : sorted_by_name()) {
      if (!first) s += ", ";
      s += sym_name(k) + "=" + v.str();
      first = false;
    }
    return s + "}";
  }

  friend bool operator==(const Store& a, const Store& b) {
    return a.entries_ == b.entries_;
  }
  friend bool operator!=(const Store& a, const Store& b) { return !(a == b); }

 private:
  std::vector<Entry>::iterator find(Sym var) {
    return std::lower_bound(
        entries_.begin(), entries_.end(), var,
        [](const Entry& e, Sym k) { return e.first < k; });
  }
  std::vector<Entry>::const_iterator find(Sym var) const {
    return std::lower_bound(
        entries_.begin(), entries_.end(), var,
        [](const Entry& e, Sym k) { return e.first < k; });
  }

  static std::uint64_t contribution(Sym k, Value v) { return hash_mix(sym_hash(k), v.hash()); }

  std::vector<Entry> entries_;
  std::uint64_t hash_ = 0x5151;  // kept up to date by set/update
};

}  // namespace scj2

#endif  // SCJ2_KERNEL_STORE_HPP_
