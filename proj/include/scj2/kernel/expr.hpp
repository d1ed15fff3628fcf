#ifndef SCJ2_KERNEL_EXPR_HPP_
#define SCJ2_KERNEL_EXPR_HPP_

#include <cstdint>
#include <functional>
#include <memory>
#include <optional>
#include <string>

#include "scj2/kernel/store.hpp"
#include "scj2/kernel/value.hpp"

namespace scj2::kernel {

struct Expr;
using ExprPtr = std::shared_ptr<const Expr>;

enum class Op : std::uint8_t {
  Lit,
  Var,
  Not,
  Neg,
  Add,
  Sub,
  Mul,
  Div,
  Mod,
  Eq,
  Ne,
  Lt,
  Le,
  Gt,
  Ge,
  And,
  Or,
};

/// Immutable expression tree. The structural hash is computed once at
/// construction and never depends on pointer values.
struct Expr {
  Op op = Op::Lit;
  Value lit;
  Sym var = 0;
  ExprPtr lhs;
  ExprPtr rhs;
  std::uint64_t hash = 0;
};

ExprPtr lit(Value v);
ExprPtr int_lit(std::int32_t i);
ExprPtr bool_lit(bool b);
ExprPtr id_lit(Sym s);
ExprPtr null_lit();
ExprPtr var(Sym s);
ExprPtr var(std::string_view name);
ExprPtr unary(Op op, ExprPtr e);
ExprPtr binary(Op op, ExprPtr a, ExprPtr b);

inline ExprPtr not_(ExprPtr e) { return unary(Op::Not, std::move(e)); }
inline ExprPtr and_(ExprPtr a, ExprPtr b) {
  return binary(Op::And, std::move(a), std::move(b));
}
inline ExprPtr or_(ExprPtr a, ExprPtr b) {
  return binary(Op::Or, std::move(a), std::move(b));
}
inline ExprPtr eq(ExprPtr a, ExprPtr b) {
  return binary(Op::Eq, std::move(a), std::move(b));
}
inline ExprPtr add(ExprPtr a, ExprPtr b) {
  return binary(Op::Add, std::move(a), std::move(b));
}

bool equal(const Expr& a, const Expr& b);
std::string to_string(const Expr& e);

struct IntRange {
  std::int32_t lo = 0;
  std::int32_t hi = 7;
};

/// Resolves a variable to its current value; nullopt when unbound.
using Lookup = std::function<std::optional<Value>(Sym)>;

/// Evaluates over bounded integers. Every integer result (including
/// intermediates) must lie in `range`, otherwise ModelRangeFault. Unbound
/// variables raise WellFormednessFault.
Value eval(const Expr& e, const Lookup& lookup, IntRange range);
Value eval(const Expr& e, const Store& store, IntRange range);

}  // namespace scj2::kernel

#endif  // SCJ2_KERNEL_EXPR_HPP_
