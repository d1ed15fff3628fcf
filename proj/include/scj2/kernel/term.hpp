#ifndef SCJ2_KERNEL_TERM_HPP_
#define SCJ2_KERNEL_TERM_HPP_

#include <cstdint>
#include <memory>
#include <mutex>
#include <string>
#include <vector>

#include "scj2/kernel/event.hpp"
#include "scj2/kernel/expr.hpp"
#include "scj2/kernel/value.hpp"

namespace scj2::kernel {

enum class TermKind : std::uint8_t {
  Skip,
  Chaos,
  Prefix,
  Guard,
  Seq,
  ExtChoice,
  Interrupt,
  Recursion,
  RecVar,
  Wait,
  Assign,
  VarBlock,
  Atomic,
};

struct VarDecl {
  Sym name = 0;
  Domain domain;
};

struct Term;
using TermPtr = std::shared_ptr<const Term>;

/// Immutable behaviour expression. Build terms only through the
/// constructor functions below: they apply the unit laws
/// (Skip ; B = B, Wait 0 = Skip, ...) so that terms stay canonical.
///
/// VarBlock carries the current values of its local variables, which keeps
/// local state inside the term and lets it vanish when the block finishes.
/// Atomic marks a region during which no other component may move.
struct Term {
  TermKind kind = TermKind::Skip;
  EventPattern pattern;  // Prefix, Interrupt
  ExprPtr expr;          // Guard condition, Assign value
  Sym name = 0;          // Recursion/RecVar name, Assign target
  std::uint32_t ticks = 0;
  TermPtr first;   // Prefix/Guard/Assign/Recursion/VarBlock/Atomic body,
                   // Seq/ExtChoice left, Interrupt body
  TermPtr second;  // Seq/ExtChoice right
  std::shared_ptr<const std::vector<VarDecl>> decls;  // VarBlock
  std::vector<Value> values;                          // VarBlock
  std::uint64_t hash = 0;
  std::vector<Sym> free_recvars;  // sorted

  // Recursion unfolding is memoised so equal unfoldings share pointers.
  mutable std::once_flag unfold_once;
  mutable TermPtr unfolded;
};

TermPtr skip();
TermPtr chaos();
/// Blocked forever: a false guard over Skip.
TermPtr stop();
TermPtr prefix(EventPattern p, TermPtr k);
TermPtr guard(ExprPtr cond, TermPtr body);
TermPtr seq(TermPtr a, TermPtr b);
TermPtr seq(const std::vector<TermPtr>& parts);
TermPtr choice(TermPtr a, TermPtr b);
/// Right-nested choice; an empty list gives stop().
TermPtr choice(const std::vector<TermPtr>& alts);
TermPtr interrupt(TermPtr body, EventPattern p);
TermPtr rec(Sym name, TermPtr body);
TermPtr recvar(Sym name);
TermPtr wait(std::uint32_t ticks);
TermPtr assign(Sym var, ExprPtr e, TermPtr k);
TermPtr var_block(std::vector<VarDecl> decls, TermPtr body);
TermPtr var_block(std::shared_ptr<const std::vector<VarDecl>> decls,
                  std::vector<Value> values, TermPtr body);
TermPtr atomic(TermPtr body);
/// if c then a else b, as a choice between complementary guards.
TermPtr if_then_else(ExprPtr c, TermPtr a, TermPtr b);

/// One level of unfolding: the body with the recursion variable replaced
/// by the recursion itself.
TermPtr unfold(const TermPtr& rec_term);

/// Unfolds recursion at the head until the head is not a recursion.
/// Throws WellFormednessFault on unguarded recursion.
TermPtr head_normal(TermPtr t);

bool equal(const Term& a, const Term& b);
inline bool equal(const TermPtr& a, const TermPtr& b) {
  return a == b || equal(*a, *b);
}

std::string to_string(const Term& t);
/// Short form of the active position, for state summaries.
std::string position(const Term& t, std::size_t max_len = 160);

/// True iff any Wait occurs in the term.
bool mentions_time(const Term& t);
/// Channels of every prefix and interrupt pattern in the term.
std::vector<Sym> mentioned_channels(const Term& t);

/// Term is Skip (unit laws already applied by construction).
bool is_terminated(const Term& t);
/// Term is Chaos.
bool is_divergent(const Term& t);

}  // namespace scj2::kernel

#endif  // SCJ2_KERNEL_TERM_HPP_
