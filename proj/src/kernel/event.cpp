#include "scj2/kernel/event.hpp"

#include <algorithm>
#include <cctype>

#include "scj2/kernel/errors.hpp"

namespace scj2::kernel {

std::uint64_t Event::hash() const {
  std::uint64_t h = sym_hash(channel);
  for (const auto& v : values) h = hash_mix(h, v.hash());
  return h;
}

std::string Event::str() const {
  std::string s = sym_name(channel) + "(";
  for (std::size_t i = 0; i < values.size(); ++i) {
    if (i) s += ",";
    s += values[i].str();
  }
  return s + ")";
}

int compare(const Event& a, const Event& b) {
  if (a.channel != b.channel) {
    return sym_name(a.channel) < sym_name(b.channel) ? -1 : 1;
  }
  const std::size_t n = std::min(a.values.size(), b.values.size());
  for (std::size_t i = 0; i < n; ++i) {
    if (int c = compare(a.values[i], b.values[i])) return c;
  }
  if (a.values.size() == b.values.size()) return 0;
  return a.values.size() < b.values.size() ? -1 : 1;
}

bool EventIdLess::operator()(const Event& a, const Event& b) const {
  if (a.channel != b.channel) return a.channel < b.channel;
  if (a.values.size() != b.values.size()) return a.values.size() < b.values.size();
  for (std::size_t i = 0; i < a.values.size(); ++i) {
    const Value& x = a.values[i];
    const Value& y = b.values[i];
    if (x.kind != y.kind) return x.kind < y.kind;
    if (x.v != y.v) return x.v < y.v;
  }
  return false;
}

bool ChannelDecl::accepts(const Event& e) const {
  if (e.channel != name || e.values.size() != fields.size()) return false;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (!fields[i].contains(e.values[i])) return false;
  }
  return true;
}

Sym tick_channel() {
  static const Sym s = intern("tick");
  return s;
}

Event tick_event() { return Event{tick_channel(), {}}; }

ChannelTable::ChannelTable() { add(ChannelDecl{tick_channel(), {}}); }

void ChannelTable::add(ChannelDecl decl) {
  auto it = decls_.find(decl.name);
  if (it != decls_.end()) {
    const auto& old = it->second;
    if (old.fields == decl.fields && old.mode == decl.mode) return;
    throw WellFormednessFault("channel " + sym_name(decl.name) +
                              " declared twice with different signatures");
  }
  decls_.emplace(decl.name, std::move(decl));
}

const ChannelDecl* ChannelTable::find(Sym name) const {
  auto it = decls_.find(name);
  return it == decls_.end() ? nullptr : &it->second;
}

const ChannelDecl& ChannelTable::at(Sym name) const {
  const auto* d = find(name);
  if (!d) throw WellFormednessFault("undeclared channel " + sym_name(name));
  return *d;
}

std::vector<const ChannelDecl*> ChannelTable::sorted() const {
  std::vector<const ChannelDecl*> out;
  for (const auto& [k, d] : decls_) out.push_back(&d);
  std::sort(out.begin(), out.end(), [](const auto* a, const auto* b) {
    return sym_name(a->name) < sym_name(b->name);
  });
  return out;
}

namespace {

std::string trim(std::string_view s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return std::string(s.substr(b, e - b));
}

std::vector<std::string> split(std::string_view s, char sep) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : s) {
    if (c == sep) {
      out.push_back(trim(cur));
      cur.clear();
    } else {
      cur += c;
    }
  }
  out.push_back(trim(cur));
  return out;
}

std::optional<Value> parse_value(const std::string& tok) {
  if (tok.empty()) return std::nullopt;
  if (tok == "true") return Value::boolean(true);
  if (tok == "false") return Value::boolean(false);
  if (tok == "null") return Value::null();
  bool numeric = true;
  for (std::size_t i = 0; i < tok.size(); ++i) {
    char c = tok[i];
    if (!(std::isdigit(static_cast<unsigned char>(c)) || (i == 0 && c == '-'))) {
      numeric = false;
    }
  }
  if (numeric && tok != "-") return Value::integer(std::stoi(tok));
  for (char c : tok) {
    if (!(std::isalnum(static_cast<unsigned char>(c)) || c == '_' || c == '$')) {
      return std::nullopt;
    }
  }
  return Value::id(intern(tok));
}

}  // namespace

std::optional<Event> parse_event(std::string_view text,
                                 const ChannelTable& channels) {
  std::string t = trim(text);
  std::string name;
  std::vector<std::string> parts;
  auto open = t.find('(');
  if (open != std::string::npos) {
    if (t.back() != ')') return std::nullopt;
    name = trim(t.substr(0, open));
    std::string inner = t.substr(open + 1, t.size() - open - 2);
    if (!trim(inner).empty()) parts = split(inner, ',');
  } else {
    auto all = split(t, '.');
    name = all.front();
    parts.assign(all.begin() + 1, all.end());
  }
  if (name.empty()) return std::nullopt;
  Event e;
  e.channel = intern(name);
  for (const auto& p : parts) {
    auto v = parse_value(p);
    if (!v) return std::nullopt;
    e.values.push_back(*v);
  }
  const auto* decl = channels.find(e.channel);
  if (!decl || !decl->accepts(e)) return std::nullopt;
  return e;
}

FieldPattern FieldPattern::any() { return in(intern("$_")); }

std::uint64_t EventPattern::hash() const {
  std::uint64_t h = sym_hash(channel) + 17;
  for (const auto& f : fields) {
    h = hash_mix(h, static_cast<std::uint64_t>(f.kind));
    if (f.kind == FieldPattern::Kind::Out) {
      h = hash_mix(h, f.expr->hash);
    } else {
      h = hash_mix(h, sym_hash(f.var));
      if (f.constraint) h = hash_mix(h, f.constraint->hash);
    }
  }
  return h;
}

std::string EventPattern::str() const {
  std::string s = sym_name(channel);
  for (const auto& f : fields) {
    if (f.kind == FieldPattern::Kind::Out) {
      s += "!" + to_string(*f.expr);
    } else {
      s += "?" + sym_name(f.var);
      if (f.constraint) s += ":(" + to_string(*f.constraint) + ")";
    }
  }
  return s;
}

bool equal(const EventPattern& a, const EventPattern& b) {
  if (a.channel != b.channel || a.fields.size() != b.fields.size()) return false;
  for (std::size_t i = 0; i < a.fields.size(); ++i) {
    const auto& x = a.fields[i];
    const auto& y = b.fields[i];
    if (x.kind != y.kind) return false;
    if (x.kind == FieldPattern::Kind::Out) {
      if (!equal(*x.expr, *y.expr)) return false;
    } else {
      if (x.var != y.var) return false;
      if ((x.constraint == nullptr) != (y.constraint == nullptr)) return false;
      if (x.constraint && !equal(*x.constraint, *y.constraint)) return false;
    }
  }
  return true;
}

bool Interest::matches(const Event& e) const {
  if (e.channel != channel) return false;
  for (std::size_t i = 0; i < fields.size() && i < e.values.size(); ++i) {
    if (fields[i] && *fields[i] != e.values[i]) return false;
  }
  return true;
}

ChannelPattern ChannelPattern::parse(std::string_view text) {
  ChannelPattern p;
  std::string t = trim(text);
  // accept both chan.a.b and chan(a,b) spellings
  std::vector<std::string> parts;
  auto open = t.find('(');
  if (open != std::string::npos && t.back() == ')') {
    parts.push_back(trim(t.substr(0, open)));
    std::string inner = t.substr(open + 1, t.size() - open - 2);
    if (!trim(inner).empty()) {
      for (auto& f : split(inner, ',')) parts.push_back(f);
    }
  } else {
    parts = split(t, '.');
  }
  p.channel = intern(parts.front());
  for (std::size_t i = 1; i < parts.size(); ++i) {
    if (parts[i] == "*" || parts[i] == "_") {
      p.fields.push_back(std::nullopt);
    } else {
      p.fields.push_back(parts[i]);
    }
  }
  return p;
}

bool ChannelPattern::matches(const Event& e) const {
  if (e.channel != channel) return false;
  for (std::size_t i = 0; i < fields.size(); ++i) {
    if (!fields[i]) continue;
    if (i >= e.values.size()) return false;
    if (e.values[i].str() != *fields[i]) return false;
  }
  return true;
}

std::string ChannelPattern::str() const {
  std::string s = sym_name(channel);
  for (const auto& f : fields) s += "." + (f ? *f : std::string("*"));
  return s;
}

}  // namespace scj2::kernel
